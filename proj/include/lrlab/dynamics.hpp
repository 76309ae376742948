#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "lrlab/model.hpp"

namespace lrlab {

enum class Integrator { RK4, Leapfrog };

std::string to_string(Integrator i);
Integrator integrator_from_string(const std::string& s);

enum class BlockKind { X, Y, Z, W };

std::string to_string(BlockKind k);

struct StepOptions {
  Integrator integrator = Integrator::RK4;
  /// Nominal step; each interval [a, b] is cut into ceil(|b - a| / h) equal steps.
  double h = 1e-3;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<PhaseState> states;
  std::vector<double> energies;
  Integrator integrator = Integrator::RK4;

  /// max_n |E(t_n) - E(t_0)| / max(1, |E(t_0)|).
  double max_relative_energy_drift() const;
};

/// Jacobian of the flow restricted to seed columns J, one snapshot per trajectory node.
/// For k in the volume and j in J:
///   X_kj = dq_k/dq_j,  Y_kj = dp_k/dq_j,  Z_kj = dq_k/dp_j,  W_kj = dp_k/dp_j.
/// Each snapshot stores the full (|volume| d) x (|J| d) matrix per kind.
struct JacobianBlocks {
  SiteSet volume;
  SiteSet seeds;
  int d = 1;
  std::vector<double> times;
  std::vector<Mat> X, Y, Z, W;

  std::size_t size() const noexcept { return times.size(); }
  const Mat& family(BlockKind kind, std::size_t n) const;
  /// d x d block (k, j) of `kind` at snapshot n; k, j are site ids.
  Mat block(BlockKind kind, std::size_t n, int k, int j) const;
  bool full_grid() const { return seeds == volume; }
};

/// Reusable fixed-step integrator for one volume; not thread-safe (owns scratch).
class FlowIntegrator {
public:
  FlowIntegrator(const LatticeModel& model, const SiteSet& volume, StepOptions opts = {});

  const LocalSystem& system() const noexcept { return sys_; }
  const StepOptions& options() const noexcept { return opts_; }

  static long steps_for(double dt, double h);

  /// Advance (p, q) by time dt (any sign).
  void advance(Vec& p, Vec& q, double dt);
  /// Advance (p, q) together with tangent columns: Qt = dq/d(init), Pt = dp/d(init).
  void advance_variational(Vec& p, Vec& q, Mat& Qt, Mat& Pt, double dt);

  void step(Vec& p, Vec& q, double h);
  void step_variational(Vec& p, Vec& q, Mat& Qt, Mat& Pt, double h);

private:
  void derivs(const Vec& p, const Vec& q, Vec& dp, Vec& dq);
  void var_derivs(const Vec& p, const Vec& q, const Mat& Qt, const Mat& Pt, Vec& dp, Vec& dq, Mat& dQ, Mat& dP);

  LocalSystem sys_;
  StepOptions opts_;
  std::vector<RadialJet> jets_;
  Vec kp_[4], kq_[4], tp_, tq_;
  Mat kQ_[4], kP_[4], tQ_, tP_;
};

/// Hamiltonian flow from s0 over [0, T]; stores every `stride`-th node and the final one.
/// Throws IntegrationError on a non-finite state, DomainError on h <= 0.
Trajectory integrate_flow(const LatticeModel& model, const SiteSet& volume, const PhaseState& s0, double T,
                          double h, Integrator integrator = Integrator::RK4, int stride = 1);

/// Final state of the flow at time T.
PhaseState propagate(const LatticeModel& model, const SiteSet& volume, const PhaseState& s0, double T,
                     StepOptions opts = {});

/// States at each requested time (any order, any sign); integration marches outward from 0.
std::vector<PhaseState> propagate_to_times(const LatticeModel& model, const SiteSet& volume, const PhaseState& s0,
                                           const std::vector<double>& times, StepOptions opts = {});

/// Exact flow of the interaction-free Hamiltonian.
PhaseState harmonic_flow(const LatticeModel& model, const SiteSet& volume, const PhaseState& s0, double t);

struct VariationalResult {
  Trajectory trajectory;
  JacobianBlocks blocks;
};

/// Flow plus Jacobian columns for seeds J over [0, T], same node grid as integrate_flow.
VariationalResult integrate_variational(const LatticeModel& model, const SiteSet& volume, const PhaseState& s0,
                                        const SiteSet& seeds, double T, double h,
                                        Integrator integrator = Integrator::RK4, int stride = 1);

/// Flow plus Jacobian columns at each requested time (any order, any sign).
VariationalResult variational_at_times(const LatticeModel& model, const SiteSet& volume, const PhaseState& s0,
                                       const SiteSet& seeds, const std::vector<double>& times,
                                       StepOptions opts = {});

/// Full Jacobian of the flow in (q, p) ordering: [[X, Z], [Y, W]].
Mat assembled_jacobian(const JacobianBlocks& blocks, std::size_t n);

/// ||M^T Omega M - Omega||_max. Throws UnsupportedError unless seeds == volume.
double symplectic_defect(const JacobianBlocks& blocks, std::size_t n);

/// det M. Throws UnsupportedError unless seeds == volume.
double jacobian_determinant(const JacobianBlocks& blocks, std::size_t n);

/// CSV rows "t,site,component,value"; components p0.., q0...
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);
/// CSV rows "t,site,component,value"; components like "X[j=3](0 1)".
void write_jacobian_csv(std::ostream& os, const JacobianBlocks& blocks);

}  // namespace lrlab
