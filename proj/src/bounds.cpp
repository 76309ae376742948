#include "lrlab/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "lrlab/errors.hpp"

namespace lrlab {

double BoundConstants::sqrt_C0() const { return std::sqrt(C0); }

double c0_formula(double inv_mass_sup, double nu_sup, int d, double C_V, double psi_norm, double norm_F, double C_F) {
  const double inter = static_cast<double>(d) * C_V * C_V * psi_norm;
  return inv_mass_sup * std::max({nu_sup + inter * norm_F, inter * C_F, 1.0});
}

namespace {

double max_C_V(const LatticeModel& model, const SiteSet& volume) {
  double cv = 0.0;
  for (const auto& I : model.interactions())
    if (volume.contains(I.k) && volume.contains(I.l) && I.certificate) cv = std::max(cv, I.certificate->C_V);
  return cv;
}

}  // namespace

BoundConstants compute_C0(const LatticeModel& model, const SiteSet& volume) {
  const AssumptionReport rep = validate_assumptions(model, volume);
  if (!rep.all_passed()) throw AssumptionError("model assumptions fail on this volume:\n" + rep.summary());
  const Lattice& lat = model.lattice();
  BoundConstants bc;
  bc.inv_mass_sup = rep.sup_inv_mass;
  bc.nu_sup = rep.sup_nu;
  bc.d = model.dim();
  bc.C_V = max_C_V(model, volume);
  bc.psi_norm = rep.psi_norm;
  bc.norm_F = norm_F(lat, model.decay(), volume);
  bc.norm_F_unweighted = bc.norm_F;
  bc.C_F = convolution_constant(lat, model.decay(), volume);
  bc.C0 = c0_formula(bc.inv_mass_sup, bc.nu_sup, bc.d, bc.C_V, bc.psi_norm, bc.norm_F, bc.C_F);
  bc.provenance = {
      {"inv_mass_sup", "max of 1/m_k over the volume"},
      {"nu_sup", "max of nu_k over the volume"},
      {"d", "particle dimension of the model"},
      {"C_V", "largest grid-certified derivative rate over pairs in the volume, orders 1..2 only"},
      {"psi_norm", "max over pairs in the volume of certified C_kl / F(d(k,l))"},
      {"norm_F", "max_y sum_x F(d(x,y)) over the volume (truncation value)"},
      {"C_F", "max_{x,y} sum_z F(d(x,z))F(d(z,y)) / F(d(x,y)) over the volume (truncation value)"},
      {"C0", "inv_mass_sup * max{nu_sup + d C_V^2 psi_norm norm_F, d C_V^2 psi_norm C_F, 1}"},
  };
  return bc;
}

BoundConstants with_mu(const BoundConstants& bc, const LatticeModel& model, const SiteSet& volume, double mu) {
  const DecayFunction Fmu = weight_decay(model.decay(), mu);
  const Lattice& lat = model.lattice();
  double psi = 0.0;
  for (const auto& I : model.interactions()) {
    if (!volume.contains(I.k) || !volume.contains(I.l) || !I.certificate) continue;
    psi = std::max(psi, I.certificate->C_kl / Fmu(lat.distance(I.k, I.l)));
  }
  BoundConstants out = bc;
  out.mu = mu;
  out.psi_norm = psi;
  out.norm_F = norm_F(lat, Fmu, volume);
  out.C0 = c0_formula(out.inv_mass_sup, out.nu_sup, out.d, out.C_V, out.psi_norm, out.norm_F, out.C_F);
  out.provenance["psi_norm"] = "max over pairs in the volume of certified C_kl / F_mu(d(k,l))";
  out.provenance["norm_F"] = "max_y sum_x F_mu(d(x,y)) over the volume (truncation value)";
  out.provenance["C_F"] = "unweighted truncation value, reused for F_mu";
  out.provenance["C0"] = "C_mu: C0 formula with psi_norm and norm_F weighted by exp(-mu r)";
  return out;
}

std::vector<double> dyson_partial_sums(const BoundConstants& bc, double F_value, double t, int N, BlockKind kind) {
  if (N < 1) throw DomainError("dyson_partial_sums: N must be >= 1");
  const double c = bc.C0;
  const double at = std::abs(t);
  const double x2 = c * t * t;
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(N));
  double sum = 0.0;
  double term;
  switch (kind) {
    case BlockKind::X:
    case BlockKind::W:
      term = x2 / 2.0;  // n = 1
      for (int n = 1; n <= N; ++n) {
        sum += term;
        out.push_back(F_value * sum);
        term *= x2 / ((2.0 * n + 1.0) * (2.0 * n + 2.0));
      }
      break;
    case BlockKind::Y:
      term = c * at;  // n = 1
      for (int n = 1; n <= N; ++n) {
        sum += term;
        out.push_back(F_value * sum);
        term *= x2 / ((2.0 * n) * (2.0 * n + 1.0));
      }
      break;
    case BlockKind::Z:
      sum = at;  // n = 0
      term = c * at * at * at / 6.0;
      for (int n = 1; n <= N; ++n) {
        sum += term;
        out.push_back(F_value * sum);
        term *= x2 / ((2.0 * n + 2.0) * (2.0 * n + 3.0));
      }
      break;
  }
  return out;
}

double jacobian_envelope(const BoundConstants& bc, double F_value, double t, BlockKind kind) {
  const double s = bc.sqrt_C0();
  const double x = s * std::abs(t);
  switch (kind) {
    case BlockKind::X:
    case BlockKind::W: {
      const double sh = std::sinh(0.5 * x);
      return F_value * 2.0 * sh * sh;  // cosh(x) - 1 without cancellation
    }
    case BlockKind::Y: return F_value * s * std::sinh(x);
    case BlockKind::Z: return F_value * (s > 0.0 ? std::sinh(x) / s : std::abs(t));
  }
  return 0.0;
}

LRRhs lr_rhs(const BoundConstants& bc, double f_c1, double g_c1, double D_XY, double t) {
  if (f_c1 < 0.0 || g_c1 < 0.0 || D_XY < 0.0) throw DomainError("lr_rhs: norms and D must be non-negative");
  const double s = bc.sqrt_C0();
  const double x = s * std::abs(t);
  const double pre = 4.0 * f_c1 * g_c1 * s * D_XY;
  LRRhs r;
  r.sinh_form = pre * std::sinh(x);
  r.exp_form = pre * std::expm1(x);
  if (r.sinh_form > r.exp_form) throw std::logic_error("lr_rhs: sinh form exceeds exponential form");
  return r;
}

double corollary_prefactor(double f_c1, double g_c1, double C_mu, std::size_t min_support, double norm_F) {
  return 2.0 * f_c1 * g_c1 * std::sqrt(C_mu) * static_cast<double>(min_support) * norm_F;
}

double corollary_bound(double C, double C_mu, double mu, double dist, double t) {
  return C * std::exp(std::sqrt(C_mu) * std::abs(t) - mu * dist);
}

LightConeResult light_cone_bound(const std::vector<BoundConstants>& family, double f_c1, double g_c1,
                                 const Lattice& lattice, const SiteSet& X, const SiteSet& Y, double t) {
  if (family.empty()) throw DomainError("light_cone_bound: empty mu grid");
  const double dist = dist_sets(lattice, X, Y);
  if (!(dist > 0.0)) throw DomainError("light_cone_bound: supports must be spatially separated");
  const std::size_t min_support = std::min(X.size(), Y.size());
  LightConeResult r;
  r.bound = std::numeric_limits<double>::infinity();
  for (const auto& bc : family) {
    if (!(bc.mu > 0.0)) throw DomainError("light_cone_bound: every member needs mu > 0");
    const double C = corollary_prefactor(f_c1, g_c1, bc.C0, min_support, bc.norm_F_unweighted);
    const double b = corollary_bound(C, bc.C0, bc.mu, dist, t);
    r.mus.push_back(bc.mu);
    r.bounds.push_back(b);
    r.velocities.push_back(bc.sqrt_C0() / bc.mu);
    if (b < r.bound) {
      r.bound = b;
      r.best_mu = bc.mu;
      r.velocity = r.velocities.back();
    }
  }
  return r;
}

std::vector<double> mu_grid(int n, double lo, double hi) {
  if (n < 1 || !(lo > 0.0) || !(hi >= lo)) throw DomainError("mu_grid: need n >= 1 and 0 < lo <= hi");
  std::vector<double> out(static_cast<std::size_t>(n));
  if (n == 1) {
    out[0] = lo;
    return out;
  }
  const double a = std::log(lo), b = std::log(hi);
  for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = std::exp(a + (b - a) * i / (n - 1));
  out.back() = hi;
  return out;
}

}  // namespace lrlab
