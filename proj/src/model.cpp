#include "lrlab/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "lrlab/errors.hpp"

namespace lrlab {

// ---------------------------------------------------------------------------
// PhaseState

PhaseState PhaseState::zeros(SiteSet sites, int d) {
  PhaseState s;
  const auto n = static_cast<Eigen::Index>(sites.size()) * d;
  s.sites = std::move(sites);
  s.d = d;
  s.p = Vec::Zero(n);
  s.q = Vec::Zero(n);
  return s;
}

PhaseState PhaseState::from_flat(SiteSet sites, int d, const Vec& y) {
  PhaseState s = zeros(std::move(sites), d);
  const auto n = s.p.size();
  if (y.size() != 2 * n) throw DomainError("PhaseState::from_flat: length mismatch");
  s.p = y.head(n);
  s.q = y.tail(n);
  return s;
}

Vec PhaseState::flat() const {
  Vec y(p.size() + q.size());
  y << p, q;
  return y;
}

PhaseState PhaseState::restricted_to(const SiteSet& sub) const {
  if (!sub.subset_of(sites)) throw DomainError("PhaseState::restricted_to: not a subset");
  PhaseState out = zeros(sub, d);
  for (std::size_t i = 0; i < sub.size(); ++i) {
    const auto src = static_cast<Eigen::Index>(*sites.position(sub[i])) * d;
    out.p.segment(static_cast<Eigen::Index>(i) * d, d) = p.segment(src, d);
    out.q.segment(static_cast<Eigen::Index>(i) * d, d) = q.segment(src, d);
  }
  return out;
}

PhaseState PhaseState::extended_to(const SiteSet& super) const {
  if (!sites.subset_of(super)) throw DomainError("PhaseState::extended_to: not a superset");
  PhaseState out = zeros(super, d);
  for (std::size_t i = 0; i < sites.size(); ++i) {
    const auto dst = static_cast<Eigen::Index>(*super.position(sites[i])) * d;
    out.p.segment(dst, d) = p.segment(static_cast<Eigen::Index>(i) * d, d);
    out.q.segment(dst, d) = q.segment(static_cast<Eigen::Index>(i) * d, d);
  }
  return out;
}

// ---------------------------------------------------------------------------
// LatticeModel

LatticeModel::LatticeModel(Lattice lattice, DecayFunction decay, int d, Vec masses, Vec force_constants,
                           std::vector<Interaction> interactions, double r_cut)
    : lattice_(std::move(lattice)),
      decay_(std::move(decay)),
      d_(d),
      masses_(std::move(masses)),
      nu_(std::move(force_constants)),
      interactions_(std::move(interactions)),
      r_cut_(r_cut) {
  if (d_ < 1) throw DomainError("model: particle dimension must be >= 1");
  const int n = lattice_.size();
  if (masses_.size() != n || nu_.size() != n) throw DomainError("model: masses/force constants must cover every site");
  for (auto& I : interactions_) {
    if (I.k < 0 || I.l < 0 || I.k >= n || I.l >= n) throw DomainError("model: interaction references unknown site");
    if (I.potential.dim() != d_) throw DomainError("model: potential dimension differs from particle dimension");
    if (I.k > I.l) std::swap(I.k, I.l);
  }
  std::sort(interactions_.begin(), interactions_.end(),
            [](const Interaction& a, const Interaction& b) { return std::pair(a.k, a.l) < std::pair(b.k, b.l); });
  for (std::size_t i = 1; i < interactions_.size(); ++i)
    if (interactions_[i].k == interactions_[i - 1].k && interactions_[i].l == interactions_[i - 1].l)
      throw DomainError("model: duplicate interaction for a site pair");
}

LatticeModel LatticeModel::with_decay_couplings(Lattice lattice, DecayFunction decay, int d, Vec masses,
                                                Vec force_constants, const PairPotential& profile, double strength,
                                                double r_cut) {
  if (profile.dim() != d) throw DomainError("model: potential dimension differs from particle dimension");
  std::vector<Interaction> inter;
  if (profile.family() != PotentialFamily::Zero && profile.amplitude() != 0.0 && strength != 0.0) {
    const PairPotential unit = profile.scaled(1.0 / profile.amplitude());
    std::optional<DerivativeCertificate> unit_cert;
    if (unit.is_smooth()) unit_cert = certify_derivative_bounds(unit);
    const int n = lattice.size();
    for (int k = 0; k < n; ++k)
      for (int l = k + 1; l < n; ++l) {
        const double r = lattice.distance(k, l);
        if (r > r_cut) continue;
        const double c = strength * decay(r);
        Interaction I{k, l, unit.scaled(c), std::nullopt};
        if (unit_cert) I.certificate = unit_cert->scaled(c);
        inter.push_back(std::move(I));
      }
  }
  return LatticeModel(std::move(lattice), std::move(decay), d, std::move(masses), std::move(force_constants),
                      std::move(inter), r_cut);
}

LatticeModel LatticeModel::with_scaled_couplings(double s) const {
  std::vector<Interaction> inter = interactions_;
  for (auto& I : inter) {
    I.potential = I.potential.scaled(s);
    if (I.certificate) I.certificate = I.certificate->scaled(s);
  }
  return LatticeModel(lattice_, decay_, d_, masses_, nu_, std::move(inter), r_cut_);
}

// ---------------------------------------------------------------------------
// LocalSystem

LocalSystem::LocalSystem(const LatticeModel& model, const SiteSet& volume) : sites_(volume), d_(model.dim()) {
  if (volume.empty()) throw DomainError("volume must be non-empty");
  for (int s : volume)
    if (s < 0 || s >= model.lattice().size()) throw DomainError("volume contains a site outside the lattice");
  const int n = this->n();
  inv_mass_.resize(n);
  nu_.resize(n);
  for (int i = 0; i < n; ++i) {
    inv_mass_(i) = 1.0 / model.masses()(volume[static_cast<std::size_t>(i)]);
    nu_(i) = model.force_constants()(volume[static_cast<std::size_t>(i)]);
  }
  for (const auto& I : model.interactions()) {
    const auto a = volume.position(I.k);
    const auto b = volume.position(I.l);
    if (!a || !b) continue;
    if (I.k == I.l) {
      self_energy_ += 0.5 * I.potential.jet(0.0).value;
      continue;
    }
    pairs_.push_back({static_cast<int>(*a), static_cast<int>(*b), I.potential});
  }
}

double LocalSystem::energy(const Vec& p, const Vec& q) const {
  double e = self_energy_;
  const int n = this->n();
  for (int i = 0; i < n; ++i) {
    e += 0.5 * inv_mass_(i) * p.segment(i * d_, d_).squaredNorm();
    e += 0.5 * nu_(i) * q.segment(i * d_, d_).squaredNorm();
  }
  for (const auto& P : pairs_) {
    const Vec x = q.segment(P.a * d_, d_) - q.segment(P.b * d_, d_);
    e += P.potential.jet(x.squaredNorm()).value;
  }
  return e;
}

void LocalSystem::velocity(const Vec& p, Vec& dq) const {
  dq.resize(p.size());
  for (int i = 0; i < n(); ++i) dq.segment(i * d_, d_) = inv_mass_(i) * p.segment(i * d_, d_);
}

void LocalSystem::force(const Vec& q, Vec& dp) const {
  dp.resize(q.size());
  for (int i = 0; i < n(); ++i) dp.segment(i * d_, d_) = -nu_(i) * q.segment(i * d_, d_);
  if (d_ == 1) {
    for (const auto& P : pairs_) {
      const double x = q(P.a) - q(P.b);
      const double g = P.potential.jet(x * x).a * x;
      dp(P.a) -= g;
      dp(P.b) += g;
    }
    return;
  }
  Vec x(d_);
  for (const auto& P : pairs_) {
    x = q.segment(P.a * d_, d_) - q.segment(P.b * d_, d_);
    const double a = P.potential.jet(x.squaredNorm()).a;
    dp.segment(P.a * d_, d_) -= a * x;
    dp.segment(P.b * d_, d_) += a * x;
  }
}

void LocalSystem::pair_jets(const Vec& q, std::vector<RadialJet>& jets) const {
  jets.resize(pairs_.size());
  for (std::size_t i = 0; i < pairs_.size(); ++i) {
    const auto& P = pairs_[i];
    const double rho = (q.segment(P.a * d_, d_) - q.segment(P.b * d_, d_)).squaredNorm();
    jets[i] = P.potential.jet(rho);
  }
}

void LocalSystem::force_from_jets(const Vec& q, const std::vector<RadialJet>& jets, Vec& dp) const {
  dp.resize(q.size());
  for (int i = 0; i < n(); ++i) dp.segment(i * d_, d_) = -nu_(i) * q.segment(i * d_, d_);
  for (std::size_t k = 0; k < pairs_.size(); ++k) {
    const auto& P = pairs_[k];
    for (int c = 0; c < d_; ++c) {
      const double g = jets[k].a * (q(P.a * d_ + c) - q(P.b * d_ + c));
      dp(P.a * d_ + c) -= g;
      dp(P.b * d_ + c) += g;
    }
  }
}

void LocalSystem::apply_hessian(const Vec& q, const std::vector<RadialJet>& jets, const Mat& in, Mat& out) const {
  const Eigen::Index cols = in.cols();
  out.resize(in.rows(), cols);
  for (int i = 0; i < n(); ++i) out.middleRows(i * d_, d_) = nu_(i) * in.middleRows(i * d_, d_);
  if (d_ == 1) {
    for (std::size_t k = 0; k < pairs_.size(); ++k) {
      const auto& P = pairs_[k];
      const double x = q(P.a) - q(P.b);
      const double h = jets[k].a + jets[k].b * x * x;
      if (h == 0.0) continue;
      for (Eigen::Index c = 0; c < cols; ++c) {
        const double hv = h * (in(P.a, c) - in(P.b, c));
        out(P.a, c) += hv;
        out(P.b, c) -= hv;
      }
    }
    return;
  }
  Vec x(d_);
  Mat v(d_, cols);
  for (std::size_t k = 0; k < pairs_.size(); ++k) {
    const auto& P = pairs_[k];
    if (jets[k].a == 0.0 && jets[k].b == 0.0) continue;
    x = q.segment(P.a * d_, d_) - q.segment(P.b * d_, d_);
    v = in.middleRows(P.a * d_, d_) - in.middleRows(P.b * d_, d_);
    const Eigen::RowVectorXd xv = x.transpose() * v;
    v = jets[k].a * v + jets[k].b * x * xv;
    out.middleRows(P.a * d_, d_) += v;
    out.middleRows(P.b * d_, d_) -= v;
  }
}

// ---------------------------------------------------------------------------
// Free functions

void check_state_on(const LatticeModel& model, const SiteSet& volume, const PhaseState& s) {
  if (!(s.sites == volume)) throw DomainError("phase state is not defined on the requested volume");
  if (s.d != model.dim()) throw DomainError("phase state dimension differs from the model");
  const auto n = static_cast<Eigen::Index>(volume.size()) * model.dim();
  if (s.p.size() != n || s.q.size() != n) throw DomainError("phase state has the wrong number of entries");
  for (int site : volume)
    if (site < 0 || site >= model.lattice().size()) throw DomainError("phase state site outside the lattice");
}

double hamiltonian(const LatticeModel& model, const SiteSet& volume, const PhaseState& s) {
  check_state_on(model, volume, s);
  return LocalSystem(model, volume).energy(s.p, s.q);
}

PhaseState force_field(const LatticeModel& model, const SiteSet& volume, const PhaseState& s) {
  check_state_on(model, volume, s);
  LocalSystem sys(model, volume);
  PhaseState out = PhaseState::zeros(volume, model.dim());
  sys.force(s.q, out.p);
  sys.velocity(s.p, out.q);
  return out;
}

BlockMap hessian_blocks(const LatticeModel& model, const SiteSet& volume, const PhaseState& s) {
  check_state_on(model, volume, s);
  LocalSystem sys(model, volume);
  const int d = model.dim();
  BlockMap out;
  for (int i = 0; i < sys.n(); ++i) {
    const int site = volume[static_cast<std::size_t>(i)];
    out[{site, site}] = sys.nu()(i) * Mat::Identity(d, d);
  }
  for (const auto& P : sys.pairs()) {
    const Vec x = s.q.segment(P.a * d, d) - s.q.segment(P.b * d, d);
    const Mat H = P.potential.hessian(x);
    const int ka = volume[static_cast<std::size_t>(P.a)];
    const int kb = volume[static_cast<std::size_t>(P.b)];
    out[{ka, ka}] += H;
    out[{kb, kb}] += H;
    out[{ka, kb}] = -H;
    out[{kb, ka}] = -H;
  }
  return out;
}

bool AssumptionReport::all_passed() const {
  for (const auto& c : checks)
    if (!c.passed) return false;
  return true;
}

std::string AssumptionReport::summary() const {
  std::ostringstream os;
  for (const auto& c : checks) os << (c.passed ? "  pass  " : "  FAIL  ") << c.name << ": " << c.detail << "\n";
  return os.str();
}

AssumptionReport validate_assumptions(const LatticeModel& model, const SiteSet& volume) {
  AssumptionReport rep;
  const auto& lat = model.lattice();
  auto add = [&](std::string name, bool ok, std::string detail) {
    rep.checks.push_back({std::move(name), ok, std::move(detail)});
  };
  auto fmt = [](double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
  };

  bool sites_ok = !volume.empty();
  for (int s : volume) sites_ok = sites_ok && s >= 0 && s < lat.size();
  if (!sites_ok) {
    add("volume", false, "volume is empty or references sites outside the lattice");
    return rep;
  }

  // Masses and force constants.
  const double inf = std::numeric_limits<double>::infinity();
  double inv_lo = inf, inv_hi = 0.0, nu_lo = inf, nu_hi = 0.0;
  bool mass_ok = true, nu_ok = true;
  for (int s : volume) {
    const double m = model.masses()(s);
    const double nu = model.force_constants()(s);
    mass_ok = mass_ok && std::isfinite(m) && m > 0.0;
    nu_ok = nu_ok && std::isfinite(nu) && nu > 0.0;
    const double im = 1.0 / m;
    inv_lo = std::min(inv_lo, im);
    inv_hi = std::max(inv_hi, im);
    nu_lo = std::min(nu_lo, nu);
    nu_hi = std::max(nu_hi, nu);
  }
  rep.inf_inv_mass = inv_lo;
  rep.sup_inv_mass = inv_hi;
  rep.inf_nu = nu_lo;
  rep.sup_nu = nu_hi;

  // Pair terms inside the volume.
  bool no_self = true, even = true, smooth = true, certified = true;
  double psi = 0.0;
  for (const auto& I : model.interactions()) {
    if (!volume.contains(I.k) || !volume.contains(I.l)) continue;
    const bool active = I.potential.family() != PotentialFamily::Zero && I.potential.amplitude() != 0.0;
    if (I.k == I.l && active) no_self = false;
    even = even && I.potential.is_even();
    if (!I.potential.is_smooth()) smooth = false;
    if (!I.certificate || !std::isfinite(I.certificate->C_kl) || !std::isfinite(I.certificate->C_V)) {
      certified = false;
      continue;
    }
    psi = std::max(psi, I.certificate->C_kl / model.decay()(lat.distance(I.k, I.l)));
  }
  rep.psi_norm = certified ? psi : inf;

  add("pair-symmetry", no_self && even,
      no_self ? (even ? "V_kl(x) = V_lk(-x), no self interaction" : "a pair potential is not even")
              : "a site interacts with itself (V_kk != 0)");
  add("smooth-compact-support", smooth, smooth ? "all pair potentials smooth with compact support"
                                               : "a pair potential is not smooth");
  add("derivative-bounds", certified, certified ? "every pair potential carries a derivative certificate"
                                                : "a pair potential has no derivative certificate");
  add("mass-bounds", mass_ok, "inf 1/m = " + fmt(inv_lo) + ", sup 1/m = " + fmt(inv_hi));
  add("force-constant-bounds", nu_ok, "inf nu = " + fmt(nu_lo) + ", sup nu = " + fmt(nu_hi));

  const DecayFunction& F = model.decay();
  bool decay_ok = F(0.0) == 1.0;
  double prev = 1.0;
  for (int i = 1; i <= 1000 && decay_ok; ++i) {
    const double v = F(0.1 * i);
    decay_ok = v <= prev && v > 0.0;
    prev = v;
  }
  add("decay-function", decay_ok, "F = " + F.describe());
  add("psi-finite", std::isfinite(rep.psi_norm), "||Psi|| = " + fmt(rep.psi_norm));
  return rep;
}

}  // namespace lrlab
