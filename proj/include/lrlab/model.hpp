#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lrlab/lattice.hpp"
#include "lrlab/potential.hpp"

namespace lrlab {

/// Point (p, q) of the phase space over `sites`. Site sites[i] owns entries
/// [i*d, (i+1)*d) of both p and q.
struct PhaseState {
  SiteSet sites;
  int d = 1;
  Vec p;
  Vec q;

  static PhaseState zeros(SiteSet sites, int d);
  /// Flat coordinates (p, q) -> state; y has length 2 * |sites| * d.
  static PhaseState from_flat(SiteSet sites, int d, const Vec& y);
  Vec flat() const;

  std::size_t n_sites() const noexcept { return sites.size(); }
  bool all_finite() const { return p.allFinite() && q.allFinite(); }
  /// Restrict to a subset of sites; extend with zeros to a superset.
  PhaseState restricted_to(const SiteSet& sub) const;
  PhaseState extended_to(const SiteSet& super) const;
};

struct Interaction {
  int k = 0;
  int l = 0;
  PairPotential potential;
  /// Absent for potentials that cannot be certified (non-smooth).
  std::optional<DerivativeCertificate> certificate;
};

/// Masses, force constants and pair potentials on a lattice. Immutable.
class LatticeModel {
public:
  LatticeModel(Lattice lattice, DecayFunction decay, int d, Vec masses, Vec force_constants,
               std::vector<Interaction> interactions, double r_cut);

  /// Couplings c_kl = strength * F(d(k,l)) for every pair k < l with d(k,l) <= r_cut,
  /// all sharing `profile` (its amplitude is taken as 1).
  static LatticeModel with_decay_couplings(Lattice lattice, DecayFunction decay, int d, Vec masses,
                                           Vec force_constants, const PairPotential& profile, double strength,
                                           double r_cut);

  const Lattice& lattice() const noexcept { return lattice_; }
  const DecayFunction& decay() const noexcept { return decay_; }
  int dim() const noexcept { return d_; }
  double r_cut() const noexcept { return r_cut_; }
  const Vec& masses() const noexcept { return masses_; }
  const Vec& force_constants() const noexcept { return nu_; }
  const std::vector<Interaction>& interactions() const noexcept { return interactions_; }

  /// Same model with every coupling amplitude multiplied by s.
  LatticeModel with_scaled_couplings(double s) const;

private:
  Lattice lattice_;
  DecayFunction decay_;
  int d_;
  Vec masses_;
  Vec nu_;
  std::vector<Interaction> interactions_;
  double r_cut_;
};

/// Pair term in local indices (a < b) together with its radial jet at the current positions.
struct LocalPair {
  int a = 0;
  int b = 0;
  PairPotential potential;
};

/// The model restricted to a finite volume, in contiguous local indices.
class LocalSystem {
public:
  LocalSystem(const LatticeModel& model, const SiteSet& volume);

  const SiteSet& sites() const noexcept { return sites_; }
  int n() const noexcept { return static_cast<int>(sites_.size()); }
  int d() const noexcept { return d_; }
  int dof() const noexcept { return n() * d_; }
  const Vec& inv_mass() const noexcept { return inv_mass_; }
  const Vec& nu() const noexcept { return nu_; }
  const std::vector<LocalPair>& pairs() const noexcept { return pairs_; }
  bool interaction_free() const noexcept { return pairs_.empty(); }

  double energy(const Vec& p, const Vec& q) const;
  /// dp = -dU/dq.
  void force(const Vec& q, Vec& dp) const;
  /// dq = p / m.
  void velocity(const Vec& p, Vec& dq) const;

  /// Radial jets of every pair at positions q, in pairs() order.
  void pair_jets(const Vec& q, std::vector<RadialJet>& jets) const;
  /// force() reusing jets already evaluated at q.
  void force_from_jets(const Vec& q, const std::vector<RadialJet>& jets, Vec& dp) const;
  /// out = B(q) * in for a block of columns; `in` has dof() rows.
  void apply_hessian(const Vec& q, const std::vector<RadialJet>& jets, const Mat& in, Mat& out) const;

private:
  SiteSet sites_;
  int d_;
  Vec inv_mass_;
  Vec nu_;
  std::vector<LocalPair> pairs_;
  double self_energy_ = 0.0;
};

void check_state_on(const LatticeModel& model, const SiteSet& volume, const PhaseState& s);

/// sum_k (|p_k|^2 / 2 m_k + nu_k |q_k|^2 / 2) + 1/2 sum_{k,l} V_kl(q_k - q_l).
double hamiltonian(const LatticeModel& model, const SiteSet& volume, const PhaseState& s);

/// Hamilton's equations: returned state holds dp/dt in p and dq/dt in q.
PhaseState force_field(const LatticeModel& model, const SiteSet& volume, const PhaseState& s);

using BlockMap = std::map<std::pair<int, int>, Mat>;

/// Sparse Hessian of the potential energy in global site ids:
/// B_jj = nu_j I + sum_l Hess V_jl(q_j - q_l), B_kj = -Hess V_kj(q_k - q_j).
BlockMap hessian_blocks(const LatticeModel& model, const SiteSet& volume, const PhaseState& s);

struct AssumptionCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct AssumptionReport {
  std::vector<AssumptionCheck> checks;
  double inf_inv_mass = 0.0;
  double sup_inv_mass = 0.0;
  double inf_nu = 0.0;
  double sup_nu = 0.0;
  /// max over stored pairs of C_kl / F(d(k,l)).
  double psi_norm = 0.0;

  bool all_passed() const;
  std::string summary() const;
};

AssumptionReport validate_assumptions(const LatticeModel& model, const SiteSet& volume);

}  // namespace lrlab
