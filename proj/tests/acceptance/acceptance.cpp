// One PASS/FAIL line per acceptance criterion, all on the shipped chain-8 preset.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "../unit/oracles.hpp"
#include "lrlab/config.hpp"
#include "lrlab/experiments.hpp"

using namespace lrlab;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

ExperimentConfig chain8() { return parse_config(std::string(LRLAB_SOURCE_DIR) + "/configs/chain-8.json"); }

SiteSet everything(const LatticeModel& m) { return m.lattice().all_sites(); }

std::vector<PhaseState> sample_states(const SiteSet& vol, int d, int n, double radius, std::uint64_t seed) {
  const Mat pts = quasi_random_ball(n, 2 * static_cast<int>(vol.size()) * d, radius, seed);
  std::vector<PhaseState> out;
  for (Eigen::Index i = 0; i < pts.rows(); ++i) out.push_back(PhaseState::from_flat(vol, d, pts.row(i).transpose()));
  return out;
}

Outcome jacobian_vs_fd(double& budget) {
  const auto cfg = chain8();
  const auto m = build_model(cfg);
  const SiteSet v = everything(m);
  const std::vector<double> times{0.5, 1.0, 2.0};
  double worst = 0.0;
  const auto t0 = std::chrono::steady_clock::now();
  for (const PhaseState& s : sample_states(v, m.dim(), 3, cfg.sampler.radius, cfg.sampler.seed)) {
    const auto var = variational_at_times(m, v, s, v, times, cfg.dynamics);
    for (std::size_t n = 0; n < times.size(); ++n) {
      const Mat fd = oracle::fd_flow_jacobian(m, v, s, times[n], 1e-5, cfg.dynamics);
      worst = std::max(worst, oracle::column_rel_error(assembled_jacobian(var.blocks, n), fd));
    }
  }
  budget = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {worst <= 1e-4 && budget <= 60.0, "max column-relative error " + fmt(worst) + " (tol 1e-4), " +
                                               fmt(budget) + " s (limit 60 s)"};
}

Outcome envelope(double& secs) {
  const auto cfg = chain8();
  const auto m = build_model(cfg);
  const SiteSet v = everything(m);
  SamplerSpec s = cfg.envelope && cfg.envelope->sampler ? *cfg.envelope->sampler : cfg.sampler;
  s.n = 512;
  const auto t0 = std::chrono::steady_clock::now();
  const auto rep = run_envelope_check(m, v, off_diagonal_pairs(v), linspace(0.0, 2.0, 11), s, cfg.dynamics);
  secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  double ratio = 0.0;
  for (double r : rep.worst_ratio) ratio = std::max(ratio, r);
  return {rep.pass && rep.violations == 0 && rep.failed_samples == 0 && secs <= 300.0,
          std::to_string(rep.violations) + " violations over " + std::to_string(rep.pairs.size()) +
              " pairs, worst measured/envelope " + fmt(ratio) + ", " + fmt(secs) + " s (limit 300 s)"};
}

Outcome lr_inequality(double& secs) {
  const auto cfg = chain8();
  const auto m = build_model(cfg);
  const auto& L = *cfg.lr;
  const auto f = build_observable(L.f, m.dim());
  const auto g = build_observable(L.g, m.dim());
  const auto times = linspace(-2.0, 2.0, 21);
  const auto t0 = std::chrono::steady_clock::now();
  const auto rep = run_lr_experiment(m, everything(m), f, g, times, cfg.sampler,
                                     mu_grid(L.mu_count, L.mu_min, L.mu_max), cfg.dynamics);
  secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  bool below = rep.X == SiteSet{1} && rep.Y == SiteSet{5};
  double ratio = 0.0;
  for (std::size_t n = 0; n < times.size(); ++n) {
    below = below && rep.lhs[n] <= rep.rhs_sinh[n];
    if (rep.rhs_sinh[n] > 0.0) ratio = std::max(ratio, rep.lhs[n] / rep.rhs_sinh[n]);
  }
  return {below && rep.lhs_at_zero <= 1e-12 && secs <= 600.0,
          "max LHS/RHS " + fmt(ratio) + " at 21 times, LHS(0) = " + fmt(rep.lhs_at_zero) + ", " + fmt(secs) +
              " s (limit 600 s)"};
}

Outcome onset(double&) {
  const auto cfg = chain8();
  const auto m = build_model(cfg);
  const auto& L = *cfg.lr;
  const auto f = build_observable(L.f, m.dim());
  std::vector<Observable> gs;
  for (int y : {3, 5, 7}) {
    ObservableSpec spec = L.g;
    spec.sites = {y};
    gs.push_back(build_observable(spec, m.dim()));
  }
  const auto rep = run_onset_sweep(m, everything(m), f, gs, L.onset_times.values(),
                                   L.onset_sampler.value_or(cfg.sampler), cfg.dynamics);
  bool ok = rep.onset.size() == 3;
  std::string s = "onset by dist:";
  for (std::size_t i = 0; i < rep.onset.size(); ++i) {
    s += " " + fmt(rep.dist[i]) + "->" + fmt(rep.onset[i]);
    if (i > 0) ok = ok && rep.onset[i - 1] <= rep.onset[i];
  }
  return {ok && rep.monotone, s};
}

Outcome convergence(double&) {
  const auto cfg = chain8();
  const auto setup = build_convergence(cfg);
  const auto& C = *cfg.convergence;
  const SamplerSpec s = C.sampler.value_or(cfg.sampler);
  const auto rep = run_convergence_experiment(setup.model, setup.volumes, setup.f, C.T, C.count, s, cfg.dynamics);
  const auto& M = setup.model;
  const LatticeModel free(M.lattice(), M.decay(), M.dim(), M.masses(), M.force_constants(), {}, M.r_cut());
  const auto ctl = run_convergence_experiment(free, setup.volumes, setup.f, C.T, C.count, s, cfg.dynamics);
  double ctl_max = 0.0;
  for (double x : ctl.sup_diff) ctl_max = std::max(ctl_max, x);
  bool below = rep.sup_diff.size() + 1 == setup.volumes.size();
  std::string diffs;
  for (std::size_t i = 0; i < rep.sup_diff.size(); ++i) {
    below = below && rep.sup_diff[i] <= rep.bound[i];
    diffs += (i ? ", " : "") + fmt(rep.sup_diff[i]) + " <= " + fmt(rep.bound[i]);
  }
  return {rep.strictly_decreasing && below && ctl_max <= 1e-12,
          "sup diffs " + diffs + "; interaction-free control " + fmt(ctl_max)};
}

Outcome interaction_picture(double&) {
  const auto cfg = chain8();
  const auto m = build_model(cfg);
  const auto& I = *cfg.interaction_picture;
  SamplerSpec s = I.sampler.value_or(cfg.sampler);
  s.n = 128;
  const auto rep = run_interaction_picture_check(m, everything(m), build_observable(I.f, m.dim()), {0.5, 1.0}, s,
                                                 cfg.dynamics);
  double worst = 0.0;
  for (double x : rep.discrepancy) worst = std::max(worst, x);
  return {worst <= 1e-6, "max discrepancy " + fmt(worst) + " at N=128, t in {0.5, 1} (tol 1e-6)"};
}

Outcome dyson(double&) {
  const auto cfg = chain8();
  const auto m = build_model(cfg);
  BoundConstants bc = compute_C0(m, everything(m));
  double worst = 0.0;
  int checks = 0;
  for (double C0 : {bc.C0, 0.37, 4.0}) {
    bc.C0 = C0;
    for (int i = 1; i <= 50; ++i) {
      const double t = (5.0 * i / 50.0) / std::sqrt(C0);
      for (double tt : {t, -t})
        for (BlockKind k : {BlockKind::X, BlockKind::Y, BlockKind::Z, BlockKind::W}) {
          const double closed = jacobian_envelope(bc, 1.0, tt, k);
          const double s40 = dyson_partial_sums(bc, 1.0, tt, 40, k).back();
          worst = std::max(worst, std::abs(s40 - closed) / closed);
          ++checks;
        }
    }
  }
  return {worst <= 1e-12, "max |S40 - closed|/closed " + fmt(worst) + " over " + std::to_string(checks) +
                              " cases with sqrt(C0)|t| <= 5"};
}

Outcome structure(double&) {
  const auto cfg = chain8();
  const auto m = build_model(cfg);
  const SiteSet v = everything(m);
  double drift = 0.0, defect = 0.0, det = 0.0;
  for (const PhaseState& s : sample_states(v, m.dim(), 3, cfg.sampler.radius, cfg.sampler.seed + 1)) {
    drift = std::max(drift, integrate_flow(m, v, s, 10.0, 1e-3, Integrator::RK4, 100).max_relative_energy_drift());
    const auto var = integrate_variational(m, v, s, v, 2.0, 1e-3, Integrator::RK4, 2000);
    const std::size_t last = var.blocks.size() - 1;
    defect = std::max(defect, symplectic_defect(var.blocks, last));
    det = std::max(det, std::abs(jacobian_determinant(var.blocks, last) - 1.0));
  }
  return {drift <= 1e-6 && defect <= 1e-6 && det <= 1e-6,
          "energy drift " + fmt(drift) + ", symplectic defect " + fmt(defect) + ", |det - 1| " + fmt(det)};
}

Outcome geometry(double&) {
  const auto half = DecayFunction::exp_power_law(0.0, std::log(2.0));
  const auto G = DecayFunction::power_law(2.0);
  auto g = [](double r) { return std::pow(1.0 + r, -2.0); };
  auto pos = [](int n) {
    std::vector<double> xs;
    for (int i = 0; i < n; ++i) xs.push_back(i);
    return xs;
  };
  auto close = [](double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(b)); };
  bool norms = close(norm_F(Lattice::chain(5), half, SiteSet::range(0, 4)), 2.5) &&
               close(norm_F(Lattice::chain(1), half, SiteSet{0}), 1.0) &&
               close(norm_F(Lattice::chain(2), half, SiteSet{0, 1}), 1.5) &&
               close(norm_F(Lattice::chain(9), G, SiteSet::range(0, 8)), oracle::norm_F_1d(pos(9), g)) &&
               close(convolution_constant(Lattice::chain(1), G, SiteSet{0}), 1.0) &&
               close(convolution_constant(Lattice::chain(3), half, SiteSet::range(0, 2)), 3.0);
  const double c8 = convolution_constant(Lattice::chain(8), G, SiteSet::range(0, 7));
  const double c16 = convolution_constant(Lattice::chain(16), G, SiteSet::range(0, 15));
  const bool oracle_ok = close(c8, oracle::conv_const_1d(pos(8), g)) && close(c16, oracle::conv_const_1d(pos(16), g));
  const double drift = std::abs(c16 - c8) / c8;
  return {norms && oracle_ok && drift <= 0.05,
          std::string("norm_F examples ") + (norms ? "match" : "MISMATCH") + "; C_F(8) = " + fmt(c8) +
              ", C_F(16) = " + fmt(c16) + " (enumeration oracle " + (oracle_ok ? "agrees" : "DISAGREES") +
              "), drift " + fmt(100 * drift) + "% (tol 5%)"};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome(double&)>>> criteria{
      {"jacobian matches finite differences", jacobian_vs_fd},
      {"envelope domination", envelope},
      {"Lieb-Robinson inequality", lr_inequality},
      {"light-cone onset monotone", onset},
      {"finite-volume convergence", convergence},
      {"interaction-picture identity", interaction_picture},
      {"Dyson partial sums", dyson},
      {"structural numerics", structure},
      {"geometry constants", geometry},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    double secs = 0.0;
    try {
      o = criteria[i].second(secs);
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += o.pass ? 0 : 1;
    std::printf("criterion %zu: %s  %s: %s\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
