#include "lrlab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "lrlab/errors.hpp"

namespace lrlab {

std::vector<double> linspace(double lo, double hi, int n) {
  if (n < 1) throw DomainError("linspace: need at least one point");
  std::vector<double> out(static_cast<std::size_t>(n));
  if (n == 1) {
    out[0] = lo;
    return out;
  }
  for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (n - 1);
  out.back() = hi;
  return out;
}

namespace {

constexpr std::array<BlockKind, 4> kKinds{BlockKind::X, BlockKind::Y, BlockKind::Z, BlockKind::W};

double op_norm(const Mat& b) {
  if (b.size() == 1) return std::abs(b(0, 0));
  return Eigen::JacobiSVD<Mat>(b).singularValues()(0);
}

int dim_of(const SiteSet& volume, int d) { return 2 * static_cast<int>(volume.size()) * d; }

}  // namespace

// ---------------------------------------------------------------------------
// Envelopes

std::vector<std::pair<int, int>> off_diagonal_pairs(const SiteSet& volume) {
  std::vector<std::pair<int, int>> out;
  for (int j : volume)
    for (int k : volume)
      if (j != k) out.emplace_back(j, k);
  return out;
}

EnvelopeReport run_envelope_check(const LatticeModel& model, const SiteSet& volume,
                                  const std::vector<std::pair<int, int>>& pairs, const std::vector<double>& times,
                                  const SamplerSpec& sampler, StepOptions opts) {
  std::vector<int> cols;
  for (const auto& [j, k] : pairs) {
    if (j == k) throw DomainError("envelope check: pairs must be off-diagonal");
    if (!volume.contains(j) || !volume.contains(k)) throw DomainError("envelope check: pair outside the volume");
    cols.push_back(k);
  }
  if (pairs.empty()) throw DomainError("envelope check: no pairs");
  const SiteSet seeds(cols);
  const int d = model.dim();

  EnvelopeReport rep;
  rep.volume = volume;
  rep.times = times;
  rep.pairs = pairs;
  rep.sampler = sampler;
  rep.constants = compute_C0(model, volume);

  const std::size_t P = pairs.size(), T = times.size();
  const Mat pts = quasi_random_ball(sampler.n, dim_of(volume, d), sampler.radius, sampler.seed);
  const auto N = static_cast<std::size_t>(sampler.n);
  // per sample: kind-major [4][P][T], empty on integration failure
  std::vector<std::vector<double>> per(N);
  parallel_for(N, sampler.workers, [&](std::size_t i) {
    const PhaseState s0 = PhaseState::from_flat(volume, d, pts.row(static_cast<Eigen::Index>(i)).transpose());
    VariationalResult var;
    try {
      var = variational_at_times(model, volume, s0, seeds, times, opts);
    } catch (const IntegrationError&) {
      return;
    }
    std::vector<double> v(4 * P * T);
    for (std::size_t kk = 0; kk < 4; ++kk)
      for (std::size_t p = 0; p < P; ++p)
        for (std::size_t n = 0; n < T; ++n)
          v[(kk * P + p) * T + n] = op_norm(var.blocks.block(kKinds[kk], n, pairs[p].first, pairs[p].second));
    per[i] = std::move(v);
  });

  for (std::size_t kk = 0; kk < 4; ++kk) {
    rep.measured[kk].assign(P, std::vector<double>(T, 0.0));
    rep.envelope[kk].assign(P, std::vector<double>(T, 0.0));
    rep.worst_margin[kk] = std::numeric_limits<double>::infinity();
  }
  for (std::size_t i = 0; i < N; ++i) {
    if (per[i].empty()) {
      ++rep.failed_samples;
      continue;
    }
    for (std::size_t kk = 0; kk < 4; ++kk)
      for (std::size_t p = 0; p < P; ++p)
        for (std::size_t n = 0; n < T; ++n)
          rep.measured[kk][p][n] = std::max(rep.measured[kk][p][n], per[i][(kk * P + p) * T + n]);
  }
  const Lattice& lat = model.lattice();
  for (std::size_t kk = 0; kk < 4; ++kk)
    for (std::size_t p = 0; p < P; ++p) {
      const double Fv = model.decay()(lat.distance(pairs[p].first, pairs[p].second));
      for (std::size_t n = 0; n < T; ++n) {
        const double env = jacobian_envelope(rep.constants, Fv, times[n], kKinds[kk]);
        rep.envelope[kk][p][n] = env;
        const double margin = env - rep.measured[kk][p][n];
        rep.worst_margin[kk] = std::min(rep.worst_margin[kk], margin);
        if (margin < 0.0) ++rep.violations;
        if (env > 0.0) rep.worst_ratio[kk] = std::max(rep.worst_ratio[kk], rep.measured[kk][p][n] / env);
      }
    }
  rep.pass = rep.violations == 0 && rep.failed_samples == 0;
  return rep;
}

// ---------------------------------------------------------------------------
// Lieb-Robinson

double onset_time(const std::vector<double>& times, const std::vector<double>& values, double rel) {
  double mx = 0.0;
  for (double v : values) mx = std::max(mx, v);
  double best = std::numeric_limits<double>::infinity();
  if (!(mx > 0.0)) return best;
  for (std::size_t i = 0; i < times.size(); ++i)
    if (values[i] > rel * mx) best = std::min(best, std::abs(times[i]));
  return best;
}

LRReport run_lr_experiment(const LatticeModel& model, const SiteSet& volume, const Observable& f,
                           const Observable& g, const std::vector<double>& times, const SamplerSpec& sampler,
                           const std::vector<double>& mus, StepOptions opts, double lhs_inflation) {
  const SiteSet& X = f.support();
  const SiteSet& Y = g.support();
  if (!X.subset_of(volume) || !Y.subset_of(volume)) throw DomainError("lr: supports must lie inside the volume");
  const Lattice& lat = model.lattice();
  const double dist = dist_sets(lat, X, Y);
  if (!(dist > 0.0)) throw DomainError("lr: supports of f and g must be spatially separated (dist(X,Y) > 0)");
  if (times.empty()) throw DomainError("lr: empty time grid");

  LRReport rep;
  rep.volume = volume;
  rep.X = X;
  rep.Y = Y;
  rep.f_desc = f.describe();
  rep.g_desc = g.describe();
  rep.f_c1 = f.c1_norm();
  rep.g_c1 = g.c1_norm();
  rep.D_XY = interaction_weight_D(lat, model.decay(), X, Y);
  rep.dist_XY = dist;
  rep.times = times;
  rep.sampler = sampler;
  rep.lhs_inflation = lhs_inflation;
  rep.constants = compute_C0(model, volume);

  const int d = model.dim();
  auto all = [&](const Vec& x) {
    return evolved_bracket_series(model, volume, f, g, times, PhaseState::from_flat(volume, d, x), opts);
  };
  auto single = [&](const Vec& x, std::size_t n) {
    return evolved_bracket(model, volume, f, g, times[n], PhaseState::from_flat(volume, d, x), opts);
  };
  const auto est = sup_norm_estimate_multi(dim_of(volume, d), times.size(), all, single, sampler);

  std::vector<BoundConstants> family;
  for (double mu : mus) family.push_back(with_mu(rep.constants, model, volume, mu));

  rep.pass = true;
  for (std::size_t n = 0; n < times.size(); ++n) {
    const double lhs = est[n].value + lhs_inflation;
    rep.lhs.push_back(lhs);
    rep.lhs_sample.push_back(est[n].sample_value);
    const LRRhs r = lr_rhs(rep.constants, rep.f_c1, rep.g_c1, rep.D_XY, times[n]);
    rep.rhs_sinh.push_back(r.sinh_form);
    rep.rhs_exp.push_back(r.exp_form);
    if (!family.empty()) {
      const LightConeResult lc = light_cone_bound(family, rep.f_c1, rep.g_c1, lat, X, Y, times[n]);
      rep.rhs_corollary.push_back(lc.bound);
      rep.best_mu.push_back(lc.best_mu);
      rep.velocity.push_back(lc.velocity);
    }
    rep.margin.push_back(r.sinh_form - lhs);
    if (rep.margin.back() < 0.0) rep.pass = false;
    if (times[n] == 0.0) rep.lhs_at_zero = lhs;
  }
  // Disjoint supports commute at t = 0, so the bracket must vanish there.
  if (!(rep.lhs_at_zero <= 1e-12)) rep.pass = false;
  rep.onset_time = onset_time(times, rep.lhs);
  return rep;
}

OnsetReport run_onset_sweep(const LatticeModel& model, const SiteSet& volume, const Observable& f,
                            const std::vector<Observable>& gs, const std::vector<double>& times,
                            const SamplerSpec& sampler, StepOptions opts) {
  if (gs.empty()) throw DomainError("onset sweep: no targets");
  OnsetReport rep;
  rep.times = times;
  rep.sampler = sampler;
  for (const Observable& g : gs) {
    const LRReport r = run_lr_experiment(model, volume, f, g, times, sampler, {}, opts);
    rep.targets.push_back(g.support());
    rep.dist.push_back(r.dist_XY);
    rep.onset.push_back(r.onset_time);
    rep.lhs.push_back(r.lhs);
  }
  std::vector<std::size_t> order(gs.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return rep.dist[a] < rep.dist[b]; });
  rep.monotone = true;
  for (std::size_t i = 1; i < order.size(); ++i) {
    const double prev = rep.onset[order[i - 1]], cur = rep.onset[order[i]];
    if (rep.dist[order[i]] > rep.dist[order[i - 1]] && cur < prev) rep.monotone = false;
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Convergence

double harmonic_constant(const LatticeModel& model, const SiteSet& volume) {
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (int s : volume) {
    const double w = std::sqrt(model.masses()(s) * model.force_constants()(s));
    lo = std::min(lo, w);
    hi = std::max(hi, w);
  }
  return std::max(hi, 1.0 / lo);
}

double convergence_prefactor(const BoundConstants& bc, double C_harm, double f_c1) {
  return 8.0 * bc.d * C_harm * C_harm * f_c1 * bc.psi_norm * bc.C_V * bc.C_F;
}

ConvergenceReport run_convergence_experiment(const LatticeModel& model, const std::vector<SiteSet>& volumes,
                                             const Observable& f, double T, int n_times,
                                             const SamplerSpec& sampler, StepOptions opts) {
  if (volumes.size() < 2) throw DomainError("convergence: need at least two volumes");
  if (!f.support().subset_of(volumes.front())) throw DomainError("convergence: X must lie in the first volume");
  for (std::size_t i = 1; i < volumes.size(); ++i)
    if (!volumes[i - 1].subset_of(volumes[i]) || volumes[i - 1].size() == volumes[i].size())
      throw DomainError("convergence: volumes must be strictly nested");

  ConvergenceReport rep;
  rep.volumes = volumes;
  rep.X = f.support();
  rep.times = linspace(-std::abs(T), std::abs(T), n_times);
  rep.sampler = sampler;
  const BoundConstants bc = compute_C0(model, volumes.back());
  rep.C0 = bc.C0;
  rep.C_harm = harmonic_constant(model, volumes.back());
  rep.prefactor = convergence_prefactor(bc, rep.C_harm, f.c1_norm());

  const int d = model.dim();
  const Lattice& lat = model.lattice();
  const std::size_t npairs = volumes.size() - 1;
  for (std::size_t i = 0; i < npairs; ++i) {
    const SiteSet& V1 = volumes[i];
    const SiteSet& V2 = volumes[i + 1];
    auto diff_at = [&](const Vec& x, const std::vector<double>& ts) {
      const PhaseState s1 = PhaseState::from_flat(V1, d, x);
      const PhaseState s2 = s1.extended_to(V2);
      const auto a = propagate_to_times(model, V1, s1, ts, opts);
      const auto b = propagate_to_times(model, V2, s2, ts, opts);
      std::vector<double> out(ts.size());
      for (std::size_t n = 0; n < ts.size(); ++n) out[n] = f.value(b[n]) - f.value(a[n]);
      return out;
    };
    auto all = [&](const Vec& x) { return diff_at(x, rep.times); };
    auto single = [&](const Vec& x, std::size_t n) { return diff_at(x, {rep.times[n]}).front(); };
    const auto est = sup_norm_estimate_multi(dim_of(V1, d), rep.times.size(), all, single, sampler);
    std::vector<double> row;
    for (const auto& e : est) row.push_back(e.value);
    rep.diff.push_back(row);
    rep.sup_diff.push_back(*std::max_element(row.begin(), row.end()));
    rep.tail_D.push_back(interaction_weight_D(lat, model.decay(), rep.X, V2.set_difference(V1)));
  }

  rep.strictly_decreasing = true;
  rep.below_bound = true;
  rep.decay_ratio_ok = true;
  const double s = std::sqrt(rep.C0);
  for (std::size_t i = 0; i < npairs; ++i) {
    double worst = 0.0;
    for (std::size_t n = 0; n < rep.times.size(); ++n) {
      const double b = rep.prefactor * rep.slack * rep.tail_D[i] * std::cosh(s * std::abs(rep.times[n]));
      worst = std::max(worst, b);
      if (rep.diff[i][n] > b) rep.below_bound = false;
    }
    rep.bound.push_back(worst);
    if (i > 0) {
      if (!(rep.sup_diff[i] < rep.sup_diff[i - 1])) rep.strictly_decreasing = false;
      const double lhs = rep.sup_diff[i] * rep.tail_D[i - 1];
      const double rhs = rep.slack * rep.tail_D[i] * rep.sup_diff[i - 1];
      if (lhs > rhs) rep.decay_ratio_ok = false;
    }
  }
  rep.consistent = rep.strictly_decreasing && rep.below_bound;
  return rep;
}

// ---------------------------------------------------------------------------
// Interaction picture

InteractionPictureReport run_interaction_picture_check(const LatticeModel& model, const SiteSet& volume,
                                                       const Observable& f, const std::vector<double>& times,
                                                       const SamplerSpec& sampler, StepOptions opts,
                                                       double tolerance) {
  const SiteSet& X = f.support();
  if (!X.subset_of(volume)) throw DomainError("interaction picture: X must lie inside the volume");
  InteractionPictureReport rep;
  rep.volume = volume;
  rep.times = times;
  rep.sampler = sampler;
  rep.tolerance = tolerance;
  const int d = model.dim();
  const std::size_t T = times.size();
  auto all = [&](const Vec& x) {
    const PhaseState s = PhaseState::from_flat(volume, d, x);
    const auto st = propagate_to_times(model, volume, s, times, opts);
    std::vector<double> out(2 * T);
    const double f0 = f.value(s);
    for (std::size_t n = 0; n < T; ++n) {
      const double alpha = f.value(st[n]);
      const PhaseState back = harmonic_flow(model, volume, st[n], -times[n]);  // Phi^{0,Lambda}_{-t} o Phi_t
      const PhaseState fwd = harmonic_flow(model, X, back.restricted_to(X), times[n]);  // then Phi^{0,X}_t
      out[n] = alpha - f.value(fwd);
      out[T + n] = f.value(back) - f0;
    }
    return out;
  };
  auto single = [&](const Vec& x, std::size_t j) { return all(x)[j]; };
  const auto est = sup_norm_estimate_multi(dim_of(volume, d), 2 * T, all, single, sampler);
  rep.pass = true;
  for (std::size_t n = 0; n < T; ++n) {
    rep.discrepancy.push_back(est[n].value);
    rep.gamma_deviation.push_back(est[T + n].value);
    if (!(est[n].value <= tolerance)) rep.pass = false;
  }
  return rep;
}

}  // namespace lrlab
