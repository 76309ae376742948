#include <doctest.h>

#include <cmath>
#include <random>

#include "lrlab/errors.hpp"
#include "lrlab/observables.hpp"
#include "oracles.hpp"

using namespace lrlab;

namespace {

LatticeModel bump_chain(int n, int d = 1) {
  return LatticeModel::with_decay_couplings(Lattice::chain(n), DecayFunction::power_law(2.0), d, Vec::Ones(n),
                                            Vec::Ones(n), PairPotential::bump(1.0, 1.5, d), 1.0, 2.0);
}

PhaseState random_state(const SiteSet& sites, int d, std::uint64_t seed, double scale = 0.7) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, scale);
  PhaseState s = PhaseState::zeros(sites, d);
  for (Eigen::Index i = 0; i < s.p.size(); ++i) {
    s.p(i) = g(rng);
    s.q(i) = g(rng);
  }
  return s;
}

double window(double u, double sigma) { return u * std::exp(-u * u / (2 * sigma * sigma)); }
double window_prime(double u, double sigma) {
  return (1.0 - u * u / (sigma * sigma)) * std::exp(-u * u / (2 * sigma * sigma));
}

}  // namespace

TEST_CASE("resolvent values") {
  Vec xp(2), xq(2);
  xp << 1.0, 0.0;
  xq << 0.0, 2.0;
  const auto re = Observable::resolvent(SiteSet{0}, 2, xp, xq, 1.5, ResolventPart::Real);
  const auto im = Observable::resolvent(SiteSet{0}, 2, xp, xq, 1.5, ResolventPart::Imag);
  // z orthogonal to x.
  Vec z(4);
  z << 0.0, 3.0, 1.0, 0.0;
  CHECK(re.value_local(z) == doctest::Approx(0.0));
  CHECK(im.value_local(z) == doctest::Approx(-1.0 / 1.5));
  CHECK(re.sup_norm() == doctest::Approx(1.0 / 3.0));
  CHECK(im.sup_norm() == doctest::Approx(1.0 / 1.5));
  CHECK_THROWS_AS(Observable::resolvent(SiteSet{0}, 2, Vec::Zero(2), Vec::Zero(2), 1.0, ResolventPart::Real),
                  DomainError);
}

TEST_CASE("gradients match finite differences") {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> g(0.0, 1.0);
  Vec xp(2), xq(2), c(2);
  xp << 0.3, -0.8;
  xq << 1.1, 0.4;
  c << 0.5, -0.2;
  const std::vector<Observable> obs{
      Observable::resolvent(SiteSet{0, 1}, 1, xp, xq, 0.9, ResolventPart::Real),
      Observable::resolvent(SiteSet{0, 1}, 1, xp, xq, 0.9, ResolventPart::Imag),
      Observable::gaussian_levee(SiteSet{0, 1}, 1, c, -c, 0.8),
      Observable::coordinate_window(1, 0, Coordinate::Q, 1, 1.3),
  };
  for (const auto& f : obs)
    for (int trial = 0; trial < 50; ++trial) {
      const Eigen::Index n = 2 * static_cast<Eigen::Index>(f.support().size()) * f.dim();
      Vec z(n);
      for (Eigen::Index i = 0; i < n; ++i) z(i) = g(rng);
      const Vec grad = f.gradient_local(z);
      const double h = 1e-6;
      for (Eigen::Index i = 0; i < n; ++i) {
        Vec a = z, b = z;
        a(i) += h;
        b(i) -= h;
        const double fd = (f.value_local(a) - f.value_local(b)) / (2 * h);
        CHECK(std::abs(grad(i) - fd) <= 1e-6 * std::max(1.0, std::abs(grad(i))));
      }
    }
}

TEST_CASE("certified norms dominate sampled values") {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> g(0.0, 2.0);
  Vec xp(1), xq(1);
  xp << 0.6;
  xq << -0.8;
  for (const auto& f : {Observable::resolvent(SiteSet{0}, 1, xp, xq, 0.5, ResolventPart::Real),
                        Observable::resolvent(SiteSet{0}, 1, xp, xq, 0.5, ResolventPart::Imag),
                        Observable::gaussian_levee(SiteSet{0}, 1, Vec::Zero(1), Vec::Zero(1), 0.7),
                        Observable::coordinate_window(0, 0, Coordinate::P, 1, 2.0)})
    for (int i = 0; i < 2000; ++i) {
      Vec z(2);
      z << g(rng), g(rng);
      CHECK(std::abs(f.value_local(z)) <= f.sup_norm() * (1 + 1e-12));
      CHECK(f.gradient_local(z).norm() <= f.grad_norm() * (1 + 1e-12));
    }
}

TEST_CASE("gaussian levee") {
  Vec c(2);
  c << 0.3, -0.4;
  const auto f = Observable::gaussian_levee(SiteSet{2}, 2, c, c, 1.0);
  PhaseState s = PhaseState::zeros(SiteSet{1, 2, 3}, 2);
  s.p.segment(2, 2) = c;
  s.q.segment(2, 2) = c;
  CHECK(f.value(s) == doctest::Approx(1.0));
  CHECK(f.grad_norm() == doctest::Approx(std::exp(-0.5)).epsilon(1e-12));
  CHECK(f.sup_norm() == 1.0);
  const double before = f.value(s);
  s.q(0) = 17.0;
  s.p(5) = -3.0;
  CHECK(f.value(s) == before);
  CHECK_THROWS_AS(f.value(PhaseState::zeros(SiteSet{0, 1}, 2)), DomainError);
}

TEST_CASE("static Poisson brackets") {
  const SiteSet v{0, 1};
  const PhaseState s = random_state(v, 1, 3);
  const auto f = Observable::gaussian_levee(SiteSet{0}, 1, Vec::Zero(1), Vec::Ones(1), 1.0);
  const auto g = Observable::gaussian_levee(SiteSet{1}, 1, Vec::Zero(1), Vec::Zero(1), 1.0);
  CHECK(poisson_bracket_static(f, f, s) == 0.0);
  CHECK(poisson_bracket_static(f, g, s) == 0.0);

  // One site, p-window against q-window: {w(p), w(q)} = -w'(p) w'(q).
  const double sigma = 1.1;
  const auto wp = Observable::coordinate_window(0, 0, Coordinate::P, 1, sigma);
  const auto wq = Observable::coordinate_window(0, 0, Coordinate::Q, 1, sigma);
  PhaseState one = PhaseState::zeros(SiteSet{0}, 1);
  one.p << 0.4;
  one.q << -1.7;
  CHECK(wp.value(one) == doctest::Approx(window(0.4, sigma)));
  CHECK(poisson_bracket_static(wp, wq, one) ==
        doctest::Approx(-window_prime(0.4, sigma) * window_prime(-1.7, sigma)).epsilon(1e-14));
}

TEST_CASE("evolved bracket") {
  const auto m = bump_chain(5);
  const SiteSet v = SiteSet::range(0, 4);
  const auto f = Observable::gaussian_levee(SiteSet{1}, 1, Vec::Zero(1), Vec::Zero(1), 1.0);
  const auto g = Observable::gaussian_levee(SiteSet{3}, 1, Vec::Constant(1, 0.2), Vec::Zero(1), 1.0);
  const auto f2 = Observable::gaussian_levee(SiteSet{1}, 1, Vec::Zero(1), Vec::Constant(1, 0.3), 0.8);
  const PhaseState s0 = random_state(v, 1, 21);

  CHECK(evolved_bracket(m, v, f, g, 0.0, s0) == 0.0);
  CHECK(evolved_bracket(m, v, f, f, 0.0, s0) == doctest::Approx(0.0));
  CHECK(evolved_bracket(m, v, f, f2, 0.0, s0) == doctest::Approx(poisson_bracket_static(f, f2, s0)).epsilon(1e-14));
  CHECK(evolved_bracket(m, v, f, f2, 0.0, s0) == doctest::Approx(-evolved_bracket(m, v, f2, f, 0.0, s0)));

  // Finite differences of alpha_t(f) along the Hamiltonian vector field of g.
  for (double t : {0.8, -1.2, 2.0}) {
    const PhaseState dg = g.gradient(s0);
    const double eps = 1e-5;
    PhaseState a = s0, b = s0;
    a.q += eps * dg.p;
    a.p -= eps * dg.q;
    b.q -= eps * dg.p;
    b.p += eps * dg.q;
    const double fd = (f.value(propagate(m, v, a, t)) - f.value(propagate(m, v, b, t))) / (2 * eps);
    const double an = evolved_bracket(m, v, f, g, t, s0);
    CHECK(an == doctest::Approx(fd).epsilon(1e-3).scale(1e-8));
  }

  const std::vector<double> times{-1.0, 0.0, 0.5, 1.5};
  const auto series = evolved_bracket_series(m, v, f, g, times, s0);
  for (std::size_t n = 0; n < times.size(); ++n)
    CHECK(series[n] == doctest::Approx(evolved_bracket(m, v, f, g, times[n], s0)).epsilon(1e-10).scale(1e-14));
}

TEST_CASE("disjoint supports without coupling never interact") {
  const auto m = LatticeModel(Lattice::chain(3), DecayFunction::power_law(2.0), 1, Vec::Ones(3), Vec::Ones(3), {},
                              0.0);
  const SiteSet v = SiteSet::range(0, 2);
  const auto f = Observable::gaussian_levee(SiteSet{0}, 1, Vec::Zero(1), Vec::Zero(1), 1.0);
  const auto g = Observable::gaussian_levee(SiteSet{2}, 1, Vec::Zero(1), Vec::Zero(1), 1.0);
  for (double t : {0.5, 1.0, 3.0}) CHECK(evolved_bracket(m, v, f, g, t, random_state(v, 1, 4)) == 0.0);
}
