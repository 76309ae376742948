#pragma once

#include <string>
#include <vector>

#include "lrlab/dynamics.hpp"
#include "lrlab/model.hpp"

namespace lrlab {

enum class ObservableKind { Resolvent, GaussianLevee, CoordinateWindow };
enum class ResolventPart { Real, Imag };
enum class Coordinate { P, Q };

std::string to_string(ObservableKind k);

/// Real C^1 function f = g o pi_X of the phase space, with analytic gradient and certified norms.
///
/// Local coordinates z = (p_X, q_X), each block ordered by site then component.
class Observable {
public:
  /// Re or Im of 1/(i lambda - x.z); x = (x_p, x_q) over X, |x|_2 > 0.
  static Observable resolvent(SiteSet X, int d, Vec x_p, Vec x_q, double lambda, ResolventPart part);
  /// exp(-|z - c|^2 / (2 sigma^2)); center = (c_p, c_q) over X.
  static Observable gaussian_levee(SiteSet X, int d, Vec c_p, Vec c_q, double sigma);
  /// w(u) = u exp(-u^2 / (2 sigma^2)) applied to a single coordinate p_{site,i} or q_{site,i}.
  static Observable coordinate_window(int site, int component, Coordinate which, int d, double sigma);

  ObservableKind kind() const noexcept { return kind_; }
  const SiteSet& support() const noexcept { return support_; }
  int dim() const noexcept { return d_; }
  std::string describe() const;

  double value_local(const Vec& z) const;
  Vec gradient_local(const Vec& z) const;
  /// z for state s; throws DomainError if s does not cover the support.
  Vec project(const PhaseState& s) const;

  double value(const PhaseState& s) const { return value_local(project(s)); }
  /// Gradient embedded on s.sites: result.p = df/dp, result.q = df/dq.
  PhaseState gradient(const PhaseState& s) const;

  double sup_norm() const noexcept { return sup_; }
  /// sup of |grad f|_2.
  double grad_norm() const noexcept { return grad_sup_; }
  double c1_norm() const noexcept { return sup_ + grad_sup_; }

private:
  Observable() = default;

  ObservableKind kind_ = ObservableKind::GaussianLevee;
  SiteSet support_;
  int d_ = 1;
  Vec dir_;     // resolvent direction or gaussian center, local coordinates
  double lambda_ = 1.0;
  double sigma_ = 1.0;
  ResolventPart part_ = ResolventPart::Real;
  Eigen::Index coord_ = 0;  // coordinate window index into z
  double sup_ = 0.0;
  double grad_sup_ = 0.0;
};

/// {f, g} = sum_j sum_i (df/dq_ji dg/dp_ji - df/dp_ji dg/dq_ji) from gradient states on the same sites.
double poisson_bracket_gradients(const PhaseState& df, const PhaseState& dg);

double poisson_bracket_static(const Observable& f, const Observable& g, const PhaseState& s);

/// {alpha_t(f), g}(s0) from the Jacobian snapshot n of `var` (seeds must contain supp g):
/// sum_{j in X, k in Y} [f_q X_jk g_p + f_p Y_jk g_p - f_q Z_jk g_q - f_p W_jk g_q].
double evolved_bracket_from(const VariationalResult& var, std::size_t n, const Observable& f, const Observable& g,
                            const PhaseState& s0);

/// {alpha_t(f), g}(s0) with one variational integration seeded on supp g.
double evolved_bracket(const LatticeModel& model, const SiteSet& volume, const Observable& f, const Observable& g,
                       double t, const PhaseState& s0, StepOptions opts = {});

/// The same at several times from a single outward integration.
std::vector<double> evolved_bracket_series(const LatticeModel& model, const SiteSet& volume, const Observable& f,
                                           const Observable& g, const std::vector<double>& times,
                                           const PhaseState& s0, StepOptions opts = {});

}  // namespace lrlab
