#include <doctest.h>

#include <cmath>
#include <limits>

#include "lrlab/errors.hpp"
#include "lrlab/experiments.hpp"

using namespace lrlab;

namespace {

LatticeModel bump_chain(int n, int origin = 0, double r_cut = 2.0) {
  return LatticeModel::with_decay_couplings(Lattice::chain(n, origin), DecayFunction::power_law(2.0), 1,
                                            Vec::Ones(n), Vec::Ones(n), PairPotential::bump(1.0, 1.5, 1), 1.0,
                                            r_cut);
}

LatticeModel free_chain(int n, int origin = 0) {
  return LatticeModel(Lattice::chain(n, origin), DecayFunction::power_law(2.0), 1, Vec::Ones(n), Vec::Ones(n), {},
                      0.0);
}

Observable levee(int site) { return Observable::gaussian_levee(SiteSet{site}, 1, Vec::Zero(1), Vec::Zero(1), 1.0); }

SamplerSpec small(int n = 24, int refine = 0) {
  SamplerSpec s;
  s.n = n;
  s.refine = refine;
  s.radius = 3.0;
  return s;
}

}  // namespace

TEST_CASE("linspace and onset") {
  const auto t = linspace(-1.0, 1.0, 5);
  CHECK(t == std::vector<double>{-1.0, -0.5, 0.0, 0.5, 1.0});
  CHECK(linspace(2.0, 3.0, 1) == std::vector<double>{2.0});
  CHECK(onset_time({0.0, 0.1, 0.2}, {0.0, 1e-9, 1.0}) == doctest::Approx(0.2));
  CHECK(onset_time({0.0, 0.1, 0.2}, {0.0, 1e-3, 1.0}) == doctest::Approx(0.1));
  CHECK(std::isinf(onset_time({0.0, 0.1}, {0.0, 0.0})));
}

TEST_CASE("envelope check") {
  SUBCASE("interaction-free blocks vanish off the diagonal") {
    const auto m = free_chain(4);
    const SiteSet v = SiteSet::range(0, 3);
    const auto rep = run_envelope_check(m, v, off_diagonal_pairs(v), {0.0, 0.5, 1.0}, small());
    CHECK(rep.pass);
    for (int k = 0; k < 4; ++k)
      for (const auto& row : rep.measured[static_cast<std::size_t>(k)])
        for (double x : row) CHECK(x == 0.0);
  }
  SUBCASE("coupled chain") {
    const auto m = bump_chain(5);
    const SiteSet v = SiteSet::range(0, 4);
    const auto pairs = off_diagonal_pairs(v);
    CHECK(pairs.size() == 20);
    const auto rep = run_envelope_check(m, v, pairs, {0.0, 0.5, 1.0, 2.0}, small());
    CHECK(rep.pass);
    CHECK(rep.violations == 0);
    for (int k = 0; k < 4; ++k) {
      const auto kk = static_cast<std::size_t>(k);
      CHECK(rep.worst_margin[kk] == 0.0);  // t = 0: both sides vanish
      for (std::size_t p = 0; p < pairs.size(); ++p) {
        CHECK(rep.measured[kk][p][0] == 0.0);
        CHECK(rep.envelope[kk][p][0] == 0.0);
      }
      CHECK(rep.worst_ratio[kk] > 0.0);
      CHECK(rep.worst_ratio[kk] <= 1.0);
    }
  }
}

TEST_CASE("Lieb-Robinson experiment") {
  SUBCASE("coupled chain passes and vanishes at t = 0") {
    const auto m = bump_chain(6);
    const SiteSet v = SiteSet::range(0, 5);
    const auto rep = run_lr_experiment(m, v, levee(1), levee(4), linspace(-1.0, 1.0, 5), small(), mu_grid());
    CHECK(rep.pass);
    CHECK(rep.lhs_at_zero == 0.0);
    CHECK(rep.dist_XY == 3.0);
    CHECK(rep.D_XY == doctest::Approx(1.0 / 16.0));
    for (std::size_t n = 0; n < rep.times.size(); ++n) {
      CHECK(rep.lhs[n] <= rep.rhs_sinh[n]);
      CHECK(rep.rhs_sinh[n] <= rep.rhs_exp[n]);
      if (rep.times[n] != 0.0) CHECK(rep.lhs[n] > 0.0);
    }
    CHECK(rep.rhs_corollary.size() == rep.times.size());
  }
  SUBCASE("interaction-free: no propagation") {
    const auto m = free_chain(4);
    const SiteSet v = SiteSet::range(0, 3);
    const auto rep = run_lr_experiment(m, v, levee(0), levee(3), {0.0, 0.5, 1.0}, small(), {});
    CHECK(rep.pass);
    for (double x : rep.lhs) CHECK(x == 0.0);
    CHECK(rep.rhs_sinh[1] > 0.0);
    CHECK(std::isinf(rep.onset_time));
  }
  SUBCASE("inflated LHS fails") {
    const auto m = bump_chain(4);
    const SiteSet v = SiteSet::range(0, 3);
    const auto rep = run_lr_experiment(m, v, levee(0), levee(3), {0.0, 0.5}, small(8), {}, {}, 1e6);
    CHECK_FALSE(rep.pass);
  }
  SUBCASE("overlapping supports are rejected") {
    const auto m = bump_chain(4);
    CHECK_THROWS_AS(run_lr_experiment(m, SiteSet::range(0, 3), levee(1), levee(1), {0.5}, small(), {}),
                    DomainError);
  }
}

TEST_CASE("onset sweep") {
  const auto m = bump_chain(8);
  const SiteSet v = SiteSet::range(0, 7);
  const auto rep = run_onset_sweep(m, v, levee(1), {levee(3), levee(5), levee(7)}, linspace(0.0, 2.0, 21), small(32));
  CHECK(rep.monotone);
  CHECK(rep.onset[0] <= rep.onset[1]);
  CHECK(rep.onset[1] <= rep.onset[2]);
}

TEST_CASE("finite-volume convergence") {
  SUBCASE("interaction-free differences vanish") {
    const auto m = free_chain(17, -8);
    const auto X = SiteSet{8};
    std::vector<SiteSet> vols{m.lattice().ball(8, 2), m.lattice().ball(8, 4), m.lattice().ball(8, 8)};
    const auto rep = run_convergence_experiment(m, vols, levee(8), 1.0, 5, small());
    for (const auto& row : rep.diff)
      for (double x : row) CHECK(x == 0.0);
  }
  SUBCASE("t = 0 differences vanish and the coupled run is consistent") {
    const auto m = bump_chain(17, -8);
    std::vector<SiteSet> vols{m.lattice().ball(8, 2), m.lattice().ball(8, 4), m.lattice().ball(8, 8)};
    const auto rep = run_convergence_experiment(m, vols, levee(8), 1.0, 5, small());
    for (const auto& row : rep.diff) CHECK(row[2] == 0.0);
    CHECK(rep.consistent);
    CHECK(rep.sup_diff[0] > rep.sup_diff[1]);
    CHECK(rep.prefactor == doctest::Approx(convergence_prefactor(compute_C0(m, vols.back()), rep.C_harm,
                                                                 levee(8).c1_norm())));
    CHECK(rep.C_harm == 1.0);
  }
  SUBCASE("strict locality before the perturbation reaches the boundary") {
    const auto m = bump_chain(41, -20);
    std::vector<SiteSet> vols{m.lattice().ball(20, 10), m.lattice().ball(20, 20)};
    const auto rep = run_convergence_experiment(m, vols, levee(20), 1e-3, 3, small());
    for (double x : rep.diff[0]) CHECK(x <= 1e-9);
  }
  SUBCASE("support outside the first volume is rejected") {
    const auto m = bump_chain(9);
    CHECK_THROWS_AS(run_convergence_experiment(m, {SiteSet{0, 1}, SiteSet::range(0, 4)}, levee(3), 1.0, 3, small()),
                    DomainError);
  }
}

TEST_CASE("harmonic constant") {
  const auto m = LatticeModel(Lattice::chain(2), DecayFunction::power_law(2.0), 1, Vec{{1.0, 4.0}},
                              Vec{{1.0, 4.0}}, {}, 0.0);
  // sqrt(m nu) in {1, 4}: max{4, 1/1} = 4.
  CHECK(harmonic_constant(m, SiteSet{0, 1}) == doctest::Approx(4.0));
  const auto s = LatticeModel(Lattice::chain(1), DecayFunction::power_law(2.0), 1, Vec{{0.25}}, Vec{{1.0}}, {}, 0.0);
  CHECK(harmonic_constant(s, SiteSet{0}) == doctest::Approx(2.0));
}

TEST_CASE("interaction picture identity") {
  SUBCASE("free model") {
    const auto m = free_chain(3);
    const auto rep = run_interaction_picture_check(m, SiteSet::range(0, 2), levee(1), {0.0, 0.5, 1.0}, small());
    CHECK(rep.pass);
    CHECK(rep.discrepancy[0] == 0.0);
    for (double g : rep.gamma_deviation) CHECK(g <= 1e-8);
  }
  SUBCASE("coupled chain") {
    const auto m = bump_chain(6);
    const auto rep = run_interaction_picture_check(m, SiteSet::range(0, 5), levee(2), {0.0, 0.5, 1.0}, small());
    CHECK(rep.pass);
    CHECK(rep.discrepancy[0] == 0.0);
    for (double x : rep.discrepancy) CHECK(x <= 1e-6);
    CHECK(rep.gamma_deviation[2] > 1e-4);
  }
}
