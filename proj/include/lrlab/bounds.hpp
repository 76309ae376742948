#pragma once

#include <map>
#include <string>
#include <vector>

#include "lrlab/dynamics.hpp"
#include "lrlab/model.hpp"

namespace lrlab {

/// Ingredients of C0 on a finite volume, with where each one came from.
struct BoundConstants {
  double inv_mass_sup = 0.0;  ///< ||m^-1||_inf
  double nu_sup = 0.0;        ///< ||nu||_inf
  int d = 1;
  double C_V = 0.0;       ///< certified over derivative orders <= 2
  double psi_norm = 0.0;  ///< ||Psi|| (or ||Psi||_mu)
  double norm_F = 0.0;    ///< ||F|| (or ||F_mu||), truncation value
  double norm_F_unweighted = 0.0;
  double C_F = 0.0;  ///< truncation value, never re-weighted
  double mu = 0.0;   ///< 0 for the unweighted constants
  double C0 = 0.0;   ///< C0, or C_mu when mu > 0
  std::map<std::string, std::string> provenance;

  double sqrt_C0() const;
};

/// ||m^-1||_inf * max{ ||nu||_inf + d C_V^2 ||Psi|| ||F||,  d C_V^2 ||Psi|| C_F,  1 }.
double c0_formula(double inv_mass_sup, double nu_sup, int d, double C_V, double psi_norm, double norm_F, double C_F);

/// Throws AssumptionError (carrying the report text) when validate_assumptions fails.
BoundConstants compute_C0(const LatticeModel& model, const SiteSet& volume);

/// C_mu: ||Psi|| and ||F|| re-weighted by F_mu, C_F unchanged. Throws DomainError for mu <= 0.
BoundConstants with_mu(const BoundConstants& bc, const LatticeModel& model, const SiteSet& volume, double mu);

/// Partial sums S_1..S_N of the per-order bounds, each multiplied by F_value:
///   X, W: sum_{n=1}^N (C0 t^2)^n / (2n)!
///   Y:    sum_{n=1}^N C0^n |t|^(2n-1) / (2n-1)!
///   Z:    sum_{n=0}^N C0^n |t|^(2n+1) / (2n+1)!
std::vector<double> dyson_partial_sums(const BoundConstants& bc, double F_value, double t, int N, BlockKind kind);

/// Limits of the partial sums: F (cosh(sqrt(C0) t) - 1) for X, W; F sqrt(C0) sinh(sqrt(C0)|t|) for Y;
/// F sinh(sqrt(C0)|t|) / sqrt(C0) for Z.
double jacobian_envelope(const BoundConstants& bc, double F_value, double t, BlockKind kind);

struct LRRhs {
  double sinh_form = 0.0;  ///< 4 |f| |g| sqrt(C0) sinh(sqrt(C0)|t|) D
  double exp_form = 0.0;   ///< 4 |f| |g| sqrt(C0) (exp(sqrt(C0)|t|) - 1) D, never below sinh_form
};

LRRhs lr_rhs(const BoundConstants& bc, double f_c1, double g_c1, double D_XY, double t);

/// Pre-factor 2 |f| |g| sqrt(C_mu) min{|X|,|Y|} ||F||.
double corollary_prefactor(double f_c1, double g_c1, double C_mu, std::size_t min_support, double norm_F);

/// C exp(sqrt(C_mu)|t| - mu dist).
double corollary_bound(double C, double C_mu, double mu, double dist, double t);

struct LightConeResult {
  double best_mu = 0.0;
  double bound = 0.0;
  double velocity = 0.0;  ///< sqrt(C_mu) / mu at best_mu
  std::vector<double> mus;
  std::vector<double> bounds;
  std::vector<double> velocities;
};

/// Minimises the corollary bound over a family of C_mu constants.
/// Throws DomainError for an empty family or dist(X, Y) == 0.
LightConeResult light_cone_bound(const std::vector<BoundConstants>& family, double f_c1, double g_c1,
                                 const Lattice& lattice, const SiteSet& X, const SiteSet& Y, double t);

/// n log-spaced values in [lo, hi]; defaults give 16 values in [1e-2, 10].
std::vector<double> mu_grid(int n = 16, double lo = 1e-2, double hi = 10.0);

}  // namespace lrlab
