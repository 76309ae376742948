#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "lrlab/dynamics.hpp"
#include "lrlab/errors.hpp"
#include "oracles.hpp"

using namespace lrlab;

namespace {

LatticeModel harmonic(int n, int d = 1) {
  return LatticeModel(Lattice::chain(n), DecayFunction::power_law(2.0), d, Vec::Ones(n), Vec::Ones(n), {}, 0.0);
}

LatticeModel bump_chain(int n, int d = 1) {
  return LatticeModel::with_decay_couplings(Lattice::chain(n), DecayFunction::power_law(2.0), d, Vec::Ones(n),
                                            Vec::Ones(n), PairPotential::bump(1.0, 1.5, d), 1.0, 2.0);
}

PhaseState random_state(const SiteSet& sites, int d, std::uint64_t seed, double scale = 0.6) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, scale);
  PhaseState s = PhaseState::zeros(sites, d);
  for (Eigen::Index i = 0; i < s.p.size(); ++i) {
    s.p(i) = g(rng);
    s.q(i) = g(rng);
  }
  return s;
}

PhaseState one_site(double p, double q) {
  PhaseState s = PhaseState::zeros(SiteSet{0}, 1);
  s.p << p;
  s.q << q;
  return s;
}

}  // namespace

TEST_CASE("step count policy") {
  CHECK(FlowIntegrator::steps_for(1.0, 1e-3) == 1000);
  CHECK(FlowIntegrator::steps_for(-0.5, 1e-3) == 500);
  CHECK(FlowIntegrator::steps_for(0.0, 1e-3) == 0);
  CHECK(FlowIntegrator::steps_for(0.00101, 1e-3) == 2);
}

TEST_CASE("harmonic oscillator against the closed form") {
  const auto m = harmonic(1);
  const SiteSet v{0};
  for (Integrator integ : {Integrator::RK4, Integrator::Leapfrog}) {
    const Trajectory tr = integrate_flow(m, v, one_site(0.0, 1.0), M_PI / 2, 1e-3, integ);
    const double tol = integ == Integrator::RK4 ? 1e-8 : 1e-6;
    CHECK(tr.states.back().p(0) == doctest::Approx(-1.0).epsilon(tol));
    CHECK(std::abs(tr.states.back().q(0)) <= tol);
    CHECK(tr.times.back() == doctest::Approx(M_PI / 2));
  }
  const PhaseState s0 = one_site(0.3, -0.7);
  const Trajectory zero = integrate_flow(m, v, s0, 0.0, 1e-3);
  CHECK(zero.states.back().p == s0.p);
  CHECK(zero.states.back().q == s0.q);
  CHECK_THROWS_AS(integrate_flow(m, v, s0, 1.0, 0.0), DomainError);
}

TEST_CASE("exact harmonic flow") {
  const auto m = harmonic(1);
  const SiteSet v{0};
  const PhaseState s0 = one_site(0.0, 1.0);
  const PhaseState a = harmonic_flow(m, v, s0, 0.0);
  CHECK(a.q(0) == 1.0);
  const PhaseState b = harmonic_flow(m, v, s0, M_PI);
  CHECK(b.q(0) == doctest::Approx(-1.0));
  CHECK(std::abs(b.p(0)) <= 1e-15);

  const auto many = LatticeModel(Lattice::chain(3), DecayFunction::power_law(2.0), 2, Vec{{1.0, 2.0, 0.5}},
                                 Vec{{1.0, 3.0, 0.7}}, {}, 0.0);
  const SiteSet vm = SiteSet::range(0, 2);
  const PhaseState s = random_state(vm, 2, 5);
  for (double t : {-1.3, 0.4, 2.0}) {
    const PhaseState ex = harmonic_flow(many, vm, s, t);
    const PhaseState num = propagate(many, vm, s, t);
    CHECK((ex.p - num.p).cwiseAbs().maxCoeff() <= 1e-8);
    CHECK((ex.q - num.q).cwiseAbs().maxCoeff() <= 1e-8);
  }
}

TEST_CASE("reversibility and multi-time propagation") {
  const auto m = bump_chain(6, 2);
  const SiteSet v = SiteSet::range(0, 5);
  const PhaseState s0 = random_state(v, 2, 2);
  const PhaseState fwd = propagate(m, v, s0, 1.7);
  const PhaseState back = propagate(m, v, fwd, -1.7);
  CHECK((back.p - s0.p).cwiseAbs().maxCoeff() <= 1e-6);
  CHECK((back.q - s0.q).cwiseAbs().maxCoeff() <= 1e-6);
  const auto states = propagate_to_times(m, v, s0, {1.0, -0.5, 0.0, 0.25});
  CHECK(states[2].p == s0.p);
  const PhaseState direct = propagate(m, v, s0, -0.5);
  CHECK((states[1].q - direct.q).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("energy conservation") {
  const auto m = bump_chain(8);
  const SiteSet v = SiteSet::range(0, 7);
  const Trajectory tr = integrate_flow(m, v, random_state(v, 1, 7, 1.0), 5.0, 1e-3, Integrator::RK4, 100);
  CHECK(tr.max_relative_energy_drift() <= 1e-9);
  const Trajectory lf = integrate_flow(m, v, random_state(v, 1, 7, 1.0), 5.0, 1e-3, Integrator::Leapfrog, 100);
  CHECK(lf.max_relative_energy_drift() <= 1e-5);
}

TEST_CASE("variational blocks of the harmonic oscillator") {
  const auto m = harmonic(1);
  const SiteSet v{0};
  const auto var = variational_at_times(m, v, one_site(0.2, 0.4), v, {0.0, 1.0});
  const auto& B = var.blocks;
  CHECK(B.X[0](0, 0) == 1.0);
  CHECK(B.W[0](0, 0) == 1.0);
  CHECK(B.Y[0](0, 0) == 0.0);
  CHECK(B.Z[0](0, 0) == 0.0);
  CHECK(B.block(BlockKind::X, 1, 0, 0)(0, 0) == doctest::Approx(std::cos(1.0)).epsilon(1e-7));
  CHECK(B.block(BlockKind::Y, 1, 0, 0)(0, 0) == doctest::Approx(-std::sin(1.0)).epsilon(1e-7));
  CHECK(B.block(BlockKind::Z, 1, 0, 0)(0, 0) == doctest::Approx(std::sin(1.0)).epsilon(1e-7));
  CHECK(B.block(BlockKind::W, 1, 0, 0)(0, 0) == doctest::Approx(std::cos(1.0)).epsilon(1e-7));
  CHECK(symplectic_defect(B, 0) == 0.0);
  CHECK(symplectic_defect(B, 1) <= 1e-10);
}

TEST_CASE("variational blocks match finite differences of the flow") {
  const auto m = bump_chain(4, 1);
  const SiteSet v = SiteSet::range(0, 3);
  const PhaseState s0 = random_state(v, 1, 11);
  for (Integrator integ : {Integrator::RK4, Integrator::Leapfrog}) {
    const StepOptions opts{integ, 1e-3};
    const auto var = variational_at_times(m, v, s0, v, {-0.7, 1.0, 2.0}, opts);
    for (std::size_t n = 0; n < var.blocks.size(); ++n) {
      const Mat fd = oracle::fd_flow_jacobian(m, v, s0, var.blocks.times[n], 1e-5, opts);
      CHECK(oracle::column_rel_error(assembled_jacobian(var.blocks, n), fd) <= 1e-4);
    }
  }
}

TEST_CASE("partial seeds agree with the full Jacobian") {
  const auto m = bump_chain(5, 2);
  const SiteSet v = SiteSet::range(0, 4);
  const PhaseState s0 = random_state(v, 2, 3);
  const auto full = variational_at_times(m, v, s0, v, {1.5});
  const auto part = variational_at_times(m, v, s0, SiteSet{1, 3}, {1.5});
  for (BlockKind k : {BlockKind::X, BlockKind::Y, BlockKind::Z, BlockKind::W})
    for (int i : v)
      for (int j : {1, 3}) CHECK((full.blocks.block(k, 0, i, j) - part.blocks.block(k, 0, i, j)).norm() <= 1e-13);
  CHECK_THROWS_AS(symplectic_defect(part.blocks, 0), UnsupportedError);
}

TEST_CASE("symplectic structure of the coupled chain") {
  const auto m = bump_chain(4, 1);
  const SiteSet v = SiteSet::range(0, 3);
  const auto var = integrate_variational(m, v, random_state(v, 1, 1), v, 2.0, 1e-3, Integrator::RK4, 2000);
  const std::size_t last = var.blocks.size() - 1;
  CHECK(var.blocks.times[last] == doctest::Approx(2.0));
  CHECK(symplectic_defect(var.blocks, last) <= 1e-6);
  CHECK(jacobian_determinant(var.blocks, last) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("integrator names and CSV dumps") {
  CHECK(integrator_from_string("leapfrog") == Integrator::Leapfrog);
  CHECK(to_string(Integrator::RK4) == "rk4");
  CHECK_THROWS_AS(integrator_from_string("euler"), DomainError);
  const auto m = harmonic(2);
  const SiteSet v{0, 1};
  const auto var = integrate_variational(m, v, PhaseState::zeros(v, 1), SiteSet{0}, 0.002, 1e-3);
  std::ostringstream traj, jac;
  write_trajectory_csv(traj, var.trajectory);
  write_jacobian_csv(jac, var.blocks);
  CHECK(traj.str().rfind("t,site,component,value\n", 0) == 0);
  CHECK(jac.str().rfind("t,site,component,value\n", 0) == 0);
  // 3 nodes x 2 sites x (p0, q0)
  const std::string rows = traj.str();
  CHECK(std::count(rows.begin(), rows.end(), '\n') == 1 + 3 * 2 * 2);
}

TEST_CASE("blow-up is reported") {
  const auto m = LatticeModel(Lattice::chain(1), DecayFunction::power_law(2.0), 1, Vec::Ones(1),
                              Vec::Constant(1, -1.0), {}, 0.0);
  CHECK_THROWS_AS(integrate_flow(m, SiteSet{0}, one_site(1.0, 1.0), 2000.0, 0.5), IntegrationError);
}
