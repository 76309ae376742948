#include "lrlab/potential.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "lrlab/errors.hpp"

namespace lrlab {

namespace {

constexpr double kPi = std::numbers::pi;
// Cosine window: chi == 1 on [0, kWindowCore].
constexpr double kWindowCore = 0.6;

double psi(double x) { return x > 0.0 ? std::exp(-1.0 / x) : 0.0; }
double psi1(double x) { return x > 0.0 ? psi(x) / (x * x) : 0.0; }
double psi2(double x) {
  if (x <= 0.0) return 0.0;
  const double x2 = x * x;
  return psi(x) * (1.0 / (x2 * x2) - 2.0 / (x2 * x));
}

struct Jet1 {
  double f, f1, f2;
};

// Smooth step S(w): S = 1 for w <= 0, S = 0 for w >= 1.
Jet1 smooth_step(double w) {
  if (w <= 0.0) return {1.0, 0.0, 0.0};
  if (w >= 1.0) return {0.0, 0.0, 0.0};
  const double a = psi(1.0 - w), b = psi(w);
  const double a1 = -psi1(1.0 - w), b1 = psi1(w);
  const double a2 = psi2(1.0 - w), b2 = psi2(w);
  const double s = a + b;
  const double num = a1 * b - a * b1;
  const double den = s * s;
  const double num1 = a2 * b - a * b2;
  const double den1 = 2.0 * s * (a1 + b1);
  return {a / s, num / den, (num1 * den - num * den1) / (den * den)};
}

// First and second z-derivatives of cos(sqrt(z)).
void cos_sqrt_derivs(double z, double& c1, double& c2) {
  if (z >= 0.25) {
    const double w = std::sqrt(z);
    c1 = -std::sin(w) / (2.0 * w);
    c2 = (std::sin(w) - w * std::cos(w)) / (4.0 * w * w * w);
    return;
  }
  // cos(sqrt z) = sum_n (-z)^n / (2n)!
  c1 = 0.0;
  c2 = 0.0;
  double zpow1 = 1.0;  // z^(n-1)
  double zpow2 = 1.0;  // z^(n-2)
  double fact = 1.0;   // (2n)!
  for (int n = 1; n <= 12; ++n) {
    fact *= (2.0 * n - 1.0) * (2.0 * n);
    const double sign = (n % 2 == 0) ? 1.0 : -1.0;
    c1 += sign * n * zpow1 / fact;
    if (n >= 2) {
      c2 += sign * n * (n - 1.0) * zpow2 / fact;
      zpow2 *= z;
    }
    zpow1 *= z;
  }
}

}  // namespace

std::string to_string(PotentialFamily f) {
  switch (f) {
    case PotentialFamily::Zero: return "zero";
    case PotentialFamily::Bump: return "bump";
    case PotentialFamily::CosineWindow: return "cosine-window";
    case PotentialFamily::Tabulated: return "tabulated";
  }
  return "unknown";
}

PotentialFamily potential_family_from_string(const std::string& s) {
  if (s == "zero") return PotentialFamily::Zero;
  if (s == "bump") return PotentialFamily::Bump;
  if (s == "cosine-window") return PotentialFamily::CosineWindow;
  if (s == "tabulated") return PotentialFamily::Tabulated;
  throw DomainError("unknown potential family '" + s + "'");
}

PairPotential PairPotential::zero(int d) {
  if (d < 1) throw DomainError("potential: dimension must be >= 1");
  PairPotential V;
  V.dim_ = d;
  return V;
}

PairPotential PairPotential::bump(double amplitude, double radius, int d) {
  if (!(radius > 0.0)) throw DomainError("bump: radius must be > 0");
  if (!std::isfinite(amplitude)) throw DomainError("bump: amplitude must be finite");
  PairPotential V = zero(d);
  V.family_ = PotentialFamily::Bump;
  V.amplitude_ = amplitude;
  V.radius_ = radius;
  return V;
}

PairPotential PairPotential::cosine_window(double amplitude, double radius, int d) {
  PairPotential V = bump(amplitude, radius, d);
  V.family_ = PotentialFamily::CosineWindow;
  return V;
}

PairPotential PairPotential::tabulated(std::vector<double> r_nodes, std::vector<double> values, int d) {
  if (r_nodes.size() < 2 || r_nodes.size() != values.size())
    throw DomainError("tabulated potential: need >= 2 matching nodes");
  if (r_nodes.front() != 0.0) throw DomainError("tabulated potential: first node must be r = 0");
  for (std::size_t i = 1; i < r_nodes.size(); ++i)
    if (!(r_nodes[i] > r_nodes[i - 1])) throw DomainError("tabulated potential: nodes must increase");
  if (values.back() != 0.0) throw DomainError("tabulated potential: last value must be 0 (compact support)");
  PairPotential V = zero(d);
  V.family_ = PotentialFamily::Tabulated;
  V.amplitude_ = 1.0;
  V.radius_ = r_nodes.back();
  V.table_r_ = std::move(r_nodes);
  V.table_v_ = std::move(values);
  return V;
}

PairPotential PairPotential::scaled(double s) const {
  PairPotential V = *this;
  V.amplitude_ *= s;
  return V;
}

RadialJet PairPotential::unit_jet(double rho) const {
  const double R = radius_;
  switch (family_) {
    case PotentialFamily::Zero: return {};
    case PotentialFamily::Bump: {
      const double s = rho / (R * R);
      if (s >= 1.0) return {};
      const double om = 1.0 - s;
      const double g = std::exp(-1.0 / om);
      const double gs = -g / (om * om);
      const double gss = g * (1.0 / (om * om * om * om) - 2.0 / (om * om * om));
      const double R2 = R * R;
      return {g, 2.0 * gs / R2, 4.0 * gss / (R2 * R2)};
    }
    case PotentialFamily::CosineWindow: {
      const double r = std::sqrt(rho);
      const double u = r / R;
      if (u >= 1.0) return {};
      if (u <= kWindowCore) {
        const double z = kPi * kPi * rho / (R * R);
        double c1, c2;
        cos_sqrt_derivs(z, c1, c2);
        const double k = kPi * kPi / (R * R);
        const double g = 0.5 * (1.0 + std::cos(std::sqrt(z)));
        return {g, 2.0 * 0.5 * c1 * k, 4.0 * 0.5 * c2 * k * k};
      }
      // Transition region: work in r, then convert to rho-derivatives (r > 0 here).
      const double width = 1.0 - kWindowCore;
      const Jet1 S = smooth_step((u - kWindowCore) / width);
      const double chi = S.f, chi1 = S.f1 / (width * R), chi2 = S.f2 / (width * width * R * R);
      const double arg = kPi * r / R;
      const double kv = 0.5 * (1.0 + std::cos(arg));
      const double k1 = -0.5 * (kPi / R) * std::sin(arg);
      const double k2 = -0.5 * (kPi / R) * (kPi / R) * std::cos(arg);
      const double h = kv * chi;
      const double h1 = k1 * chi + kv * chi1;
      const double h2 = k2 * chi + 2.0 * k1 * chi1 + kv * chi2;
      const double grho = h1 / (2.0 * r);
      const double grhorho = (h2 - h1 / r) / (4.0 * r * r);
      return {h, 2.0 * grho, 4.0 * grhorho};
    }
    case PotentialFamily::Tabulated: {
      const double r = std::sqrt(rho);
      if (r >= radius_) return {};
      auto it = std::upper_bound(table_r_.begin(), table_r_.end(), r);
      const auto i = static_cast<std::size_t>(it - table_r_.begin());
      const double slope = (table_v_[i] - table_v_[i - 1]) / (table_r_[i] - table_r_[i - 1]);
      const double h = table_v_[i - 1] + slope * (r - table_r_[i - 1]);
      if (r == 0.0) return {h, 0.0, 0.0};
      return {h, slope / r, -slope / (r * r * r)};
    }
  }
  return {};
}

RadialJet PairPotential::jet(double rho) const {
  if (family_ == PotentialFamily::Zero || amplitude_ == 0.0) return {};
  RadialJet j = unit_jet(rho);
  j.value *= amplitude_;
  j.a *= amplitude_;
  j.b *= amplitude_;
  return j;
}

double PairPotential::value(const Vec& x) const { return jet(x.squaredNorm()).value; }

Vec PairPotential::gradient(const Vec& x) const { return jet(x.squaredNorm()).a * x; }

Mat PairPotential::hessian(const Vec& x) const {
  const RadialJet j = jet(x.squaredNorm());
  const Eigen::Index n = x.size();
  Mat H(n, n);
  for (Eigen::Index c = 0; c < n; ++c)
    for (Eigen::Index r = c; r < n; ++r) H(r, c) = H(c, r) = j.b * (x(r) * x(c));
  H.diagonal().array() += j.a;
  return H;
}

// ---------------------------------------------------------------------------
// Certification

DerivativeCertificate DerivativeCertificate::scaled(double s) const {
  DerivativeCertificate c = *this;
  const double m = std::abs(s);
  c.C_kl *= m;
  for (double& v : c.sup_by_order) v *= m;
  if (m == 0.0) {
    c.C_V = 0.0;
    c.C_V_all_orders = 0.0;
  }
  return c;
}

DerivativeCertificate certify_derivative_bounds(const PairPotential& V, int max_order) {
  if (max_order < 2 || max_order > 4) throw DomainError("certify_derivative_bounds: max_order must be in [2, 4]");
  if (!V.is_smooth())
    throw UnsupportedError("certify_derivative_bounds: " + to_string(V.family()) + " potential is not smooth");

  const int d = V.dim();
  const double R = V.radius();
  DerivativeCertificate cert;
  cert.max_order = max_order;
  cert.sup_by_order.assign(static_cast<std::size_t>(max_order) + 1, 0.0);

  // Odd point count so the origin and +-R/2 lie on the grid.
  int per_axis = static_cast<int>(std::floor(std::pow(3.0e5, 1.0 / d)));
  per_axis = std::clamp(per_axis, 9, 4001);
  if (per_axis % 2 == 0) --per_axis;
  const double h_fd = 1e-3 * R;
  cert.grid_points_per_axis = per_axis;
  cert.fd_step = h_fd;

  if (V.family() == PotentialFamily::Zero || V.amplitude() == 0.0) return cert;

  const double spacing = 2.0 * R / (per_axis - 1);
  long total = 1;
  for (int k = 0; k < d; ++k) total *= per_axis;

  Vec x(d), xp(d);
  std::vector<int> idx(static_cast<std::size_t>(d), 0);
  auto& sup = cert.sup_by_order;
  for (long p = 0; p < total; ++p) {
    long rem = p;
    for (int k = 0; k < d; ++k) {
      idx[static_cast<std::size_t>(k)] = static_cast<int>(rem % per_axis);
      rem /= per_axis;
      x(k) = -R + spacing * idx[static_cast<std::size_t>(k)];
    }
    const double r2 = x.squaredNorm();
    if (r2 >= R * R * (1.0 + 1e-12) + 4.0 * h_fd * h_fd * d) continue;

    sup[0] = std::max(sup[0], std::abs(V.value(x)));
    sup[1] = std::max(sup[1], V.gradient(x).cwiseAbs().maxCoeff());
    const Mat H = V.hessian(x);
    sup[2] = std::max(sup[2], H.cwiseAbs().maxCoeff());
    if (max_order >= 3) {
      for (int k = 0; k < d; ++k) {
        xp = x;
        xp(k) += h_fd;
        const Mat Hp = V.hessian(xp);
        xp(k) -= 2.0 * h_fd;
        const Mat Hm = V.hessian(xp);
        sup[3] = std::max(sup[3], ((Hp - Hm) / (2.0 * h_fd)).cwiseAbs().maxCoeff());
        if (max_order >= 4) {
          sup[4] = std::max(sup[4], ((Hp - 2.0 * H + Hm) / (h_fd * h_fd)).cwiseAbs().maxCoeff());
          for (int l = k + 1; l < d; ++l) {
            auto shifted = [&](double sk, double sl) {
              Vec y = x;
              y(k) += sk * h_fd;
              y(l) += sl * h_fd;
              return V.hessian(y);
            };
            const Mat mixed = (shifted(1, 1) - shifted(1, -1) - shifted(-1, 1) + shifted(-1, -1)) / (4.0 * h_fd * h_fd);
            sup[4] = std::max(sup[4], mixed.cwiseAbs().maxCoeff());
          }
        }
      }
    }
  }

  cert.C_kl = sup[0];
  if (sup[0] > 0.0) {
    for (int n = 1; n <= max_order; ++n) {
      const double rate = std::pow(sup[static_cast<std::size_t>(n)] / sup[0], 1.0 / n);
      if (n <= 2) cert.C_V = std::max(cert.C_V, rate);
      cert.C_V_all_orders = std::max(cert.C_V_all_orders, rate);
    }
  }
  return cert;
}

}  // namespace lrlab
