#pragma once

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "lrlab/bounds.hpp"
#include "lrlab/observables.hpp"
#include "lrlab/sampler.hpp"

namespace lrlab {

/// n equally spaced values from lo to hi inclusive.
std::vector<double> linspace(double lo, double hi, int n);

// ---------------------------------------------------------------------------
// Jacobian envelopes

struct EnvelopeReport {
  SiteSet volume;
  std::vector<double> times;
  std::vector<std::pair<int, int>> pairs;  ///< (j, k): block dq_j/dq_k etc.
  /// measured[kind][pair][time]: max over samples of the block operator norm.
  std::array<std::vector<std::vector<double>>, 4> measured;
  std::array<std::vector<std::vector<double>>, 4> envelope;
  std::array<double, 4> worst_margin{};  ///< min of envelope - measured per kind
  std::array<double, 4> worst_ratio{};   ///< max of measured / envelope per kind
  int violations = 0;
  int failed_samples = 0;
  BoundConstants constants;
  SamplerSpec sampler;
  bool pass = false;
};

/// Every off-diagonal pair (j, k) of the volume.
std::vector<std::pair<int, int>> off_diagonal_pairs(const SiteSet& volume);

/// Measured block norms over sampled initial states against the closed-form envelopes.
/// Refinement is not used; each sample is one variational integration.
EnvelopeReport run_envelope_check(const LatticeModel& model, const SiteSet& volume,
                                  const std::vector<std::pair<int, int>>& pairs, const std::vector<double>& times,
                                  const SamplerSpec& sampler, StepOptions opts = {});

// ---------------------------------------------------------------------------
// Lieb-Robinson inequality

struct LRReport {
  SiteSet volume;
  SiteSet X, Y;
  std::string f_desc, g_desc;
  double f_c1 = 0.0, g_c1 = 0.0;
  double D_XY = 0.0;
  double dist_XY = 0.0;
  std::vector<double> times;
  std::vector<double> lhs;         ///< sampled sup |{alpha_t(f), g}|, refined
  std::vector<double> lhs_sample;  ///< same before refinement
  std::vector<double> rhs_sinh;
  std::vector<double> rhs_exp;
  std::vector<double> rhs_corollary;
  std::vector<double> best_mu;
  std::vector<double> velocity;
  std::vector<double> margin;  ///< rhs_sinh - lhs
  double onset_time = 0.0;     ///< smallest |t| with lhs > 1e-6 max lhs
  double lhs_at_zero = 0.0;    ///< lhs at t = 0 if the grid contains it, else 0
  BoundConstants constants;
  SamplerSpec sampler;
  double lhs_inflation = 0.0;
  bool pass = false;
};

/// Onset of a curve: smallest |t| with value > rel * max value; +inf if the curve vanishes.
double onset_time(const std::vector<double>& times, const std::vector<double>& values, double rel = 1e-6);

/// Throws DomainError when supp f and supp g overlap or touch (dist = 0).
/// `lhs_inflation` is added to every measured LHS value (test hook for the failure path).
LRReport run_lr_experiment(const LatticeModel& model, const SiteSet& volume, const Observable& f,
                           const Observable& g, const std::vector<double>& times, const SamplerSpec& sampler,
                           const std::vector<double>& mus, StepOptions opts = {}, double lhs_inflation = 0.0);

struct OnsetReport {
  std::vector<double> times;
  std::vector<SiteSet> targets;
  std::vector<double> dist;
  std::vector<double> onset;  ///< per target; +inf when the curve stays zero
  std::vector<std::vector<double>> lhs;
  SamplerSpec sampler;
  bool monotone = false;  ///< onset non-decreasing in dist(X, Y)
};

/// LR curves of f against each g, reduced to onset times.
OnsetReport run_onset_sweep(const LatticeModel& model, const SiteSet& volume, const Observable& f,
                            const std::vector<Observable>& gs, const std::vector<double>& times,
                            const SamplerSpec& sampler, StepOptions opts = {});

// ---------------------------------------------------------------------------
// Finite-volume convergence

struct ConvergenceReport {
  std::vector<SiteSet> volumes;
  SiteSet X;
  std::vector<double> times;
  /// diff[i][n]: sampled sup over states of |alpha_t^{i+1}(f) - alpha_t^{i}(f)| at times[n].
  std::vector<std::vector<double>> diff;
  std::vector<double> sup_diff;  ///< max over times of diff[i]
  std::vector<double> tail_D;    ///< D(X, volume[i+1] \ volume[i])
  std::vector<double> bound;     ///< prefactor * slack * max_t tail_D cosh(sqrt(C0)|t|)
  double C0 = 0.0;               ///< on the largest volume
  double C_harm = 0.0;
  double prefactor = 0.0;
  double slack = 10.0;
  bool strictly_decreasing = false;
  bool below_bound = false;
  bool decay_ratio_ok = false;  ///< sup_diff ratios <= slack * tail_D ratios
  SamplerSpec sampler;
  bool consistent = false;
};

/// C_harm = max{ sup sqrt(m_k nu_k), 1 / inf sqrt(m_k nu_k) } over the volume.
double harmonic_constant(const LatticeModel& model, const SiteSet& volume);

/// Explicit pre-factor 8 d C_harm^2 |f|_C1 ||Psi|| C_V C_F used by the convergence verdict.
double convergence_prefactor(const BoundConstants& bc, double C_harm, double f_c1);

/// Throws DomainError unless X lies in the first volume and the volumes are strictly nested.
ConvergenceReport run_convergence_experiment(const LatticeModel& model, const std::vector<SiteSet>& volumes,
                                             const Observable& f, double T, int n_times,
                                             const SamplerSpec& sampler, StepOptions opts = {});

// ---------------------------------------------------------------------------
// Interaction picture

struct InteractionPictureReport {
  SiteSet volume;
  std::vector<double> times;
  /// max over samples of |alpha_t(f) - gamma_t(f o Phi^{0,X}_t)|.
  std::vector<double> discrepancy;
  /// max over samples of |gamma_t(f) - f|: zero without interactions.
  std::vector<double> gamma_deviation;
  SamplerSpec sampler;
  double tolerance = 1e-6;
  bool pass = false;
};

InteractionPictureReport run_interaction_picture_check(const LatticeModel& model, const SiteSet& volume,
                                                       const Observable& f, const std::vector<double>& times,
                                                       const SamplerSpec& sampler, StepOptions opts = {},
                                                       double tolerance = 1e-6);

}  // namespace lrlab
