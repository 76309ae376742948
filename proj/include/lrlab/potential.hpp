#pragma once

#include <string>
#include <vector>

#include "lrlab/lattice.hpp"

namespace lrlab {

enum class PotentialFamily { Zero, Bump, CosineWindow, Tabulated };

std::string to_string(PotentialFamily f);
PotentialFamily potential_family_from_string(const std::string& s);

/// Radial data of V at x with rho = |x|^2:
///   V(x) = value,  grad V(x) = a x,  Hess V(x) = a I + b x x^T.
struct RadialJet {
  double value = 0.0;
  double a = 0.0;
  double b = 0.0;
};

/// Even, compactly supported pair potential V(x) = amplitude * profile(|x| / radius), x in R^d.
///
/// Families:
///  - bump:          exp(-1 / (1 - u^2)) for u < 1
///  - cosine-window: cos^2(pi u / 2) * chi(u), chi a C-infinity cutoff equal to 1 on u <= 0.6
///                   and falling to 0 at u = 1
///  - tabulated:     piecewise-linear radial table (continuous, not smooth)
///  - zero
class PairPotential {
public:
  static PairPotential zero(int d);
  static PairPotential bump(double amplitude, double radius, int d);
  static PairPotential cosine_window(double amplitude, double radius, int d);
  /// Radial profile values at r_nodes (r_nodes.front() == 0); zero beyond r_nodes.back().
  static PairPotential tabulated(std::vector<double> r_nodes, std::vector<double> values, int d);

  PotentialFamily family() const noexcept { return family_; }
  double amplitude() const noexcept { return amplitude_; }
  double radius() const noexcept { return radius_; }
  int dim() const noexcept { return dim_; }
  bool is_even() const noexcept { return true; }
  bool is_smooth() const noexcept { return family_ != PotentialFamily::Tabulated; }

  /// Same profile, amplitude multiplied by s.
  PairPotential scaled(double s) const;

  RadialJet jet(double rho) const;

  double value(const Vec& x) const;
  Vec gradient(const Vec& x) const;
  Mat hessian(const Vec& x) const;

private:
  PairPotential() = default;
  RadialJet unit_jet(double rho) const;

  PotentialFamily family_ = PotentialFamily::Zero;
  double amplitude_ = 0.0;
  double radius_ = 1.0;
  int dim_ = 1;
  std::vector<double> table_r_;
  std::vector<double> table_v_;
};

/// Grid certificate for ||d^beta V||_inf <= C_kl * C_V^|beta|.
struct DerivativeCertificate {
  double C_kl = 0.0;
  /// Rate certified over orders 1..2, the orders that enter Hessian bounds.
  double C_V = 0.0;
  /// Rate over every certified order 1..max_order.
  double C_V_all_orders = 0.0;
  int max_order = 0;
  /// sup_by_order[n] = max over grid and multi-indices |beta| = n of |d^beta V|.
  std::vector<double> sup_by_order;
  int grid_points_per_axis = 0;
  double fd_step = 0.0;

  DerivativeCertificate scaled(double s) const;
};

/// Dense-grid certification over [-R, R]^d. Orders <= 2 are analytic, orders 3..4
/// are central differences of the analytic Hessian.
/// Throws UnsupportedError for non-smooth families, DomainError for max_order < 2 or > 4.
DerivativeCertificate certify_derivative_bounds(const PairPotential& V, int max_order = 4);

}  // namespace lrlab
