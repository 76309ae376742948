#include "lrlab/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <sstream>

#include "lrlab/errors.hpp"

namespace lrlab {

std::string to_string(Integrator i) { return i == Integrator::RK4 ? "rk4" : "leapfrog"; }

Integrator integrator_from_string(const std::string& s) {
  if (s == "rk4") return Integrator::RK4;
  if (s == "leapfrog") return Integrator::Leapfrog;
  throw DomainError("unknown integrator '" + s + "' (expected rk4 or leapfrog)");
}

std::string to_string(BlockKind k) {
  switch (k) {
    case BlockKind::X: return "X";
    case BlockKind::Y: return "Y";
    case BlockKind::Z: return "Z";
    case BlockKind::W: return "W";
  }
  return "?";
}

double Trajectory::max_relative_energy_drift() const {
  if (energies.empty()) return 0.0;
  const double scale = std::max(1.0, std::abs(energies.front()));
  double worst = 0.0;
  for (double e : energies) worst = std::max(worst, std::abs(e - energies.front()) / scale);
  return worst;
}

const Mat& JacobianBlocks::family(BlockKind kind, std::size_t n) const {
  switch (kind) {
    case BlockKind::X: return X.at(n);
    case BlockKind::Y: return Y.at(n);
    case BlockKind::Z: return Z.at(n);
    case BlockKind::W: return W.at(n);
  }
  throw DomainError("bad block kind");
}

Mat JacobianBlocks::block(BlockKind kind, std::size_t n, int k, int j) const {
  const auto a = volume.position(k);
  const auto b = seeds.position(j);
  if (!a || !b) throw DomainError("JacobianBlocks::block: pair not stored");
  return family(kind, n).block(static_cast<Eigen::Index>(*a) * d, static_cast<Eigen::Index>(*b) * d, d, d);
}

// ---------------------------------------------------------------------------
// FlowIntegrator

FlowIntegrator::FlowIntegrator(const LatticeModel& model, const SiteSet& volume, StepOptions opts)
    : sys_(model, volume), opts_(opts) {
  if (!(opts_.h > 0.0) || !std::isfinite(opts_.h)) throw DomainError("step size h must be > 0");
}

long FlowIntegrator::steps_for(double dt, double h) {
  if (dt == 0.0) return 0;
  return std::max(1L, static_cast<long>(std::ceil(std::abs(dt) / h - 1e-9)));
}

void FlowIntegrator::derivs(const Vec& p, const Vec& q, Vec& dp, Vec& dq) {
  sys_.force(q, dp);
  sys_.velocity(p, dq);
}

void FlowIntegrator::var_derivs(const Vec& p, const Vec& q, const Mat& Qt, const Mat& Pt, Vec& dp, Vec& dq,
                                Mat& dQ, Mat& dP) {
  sys_.pair_jets(q, jets_);
  sys_.force_from_jets(q, jets_, dp);
  sys_.velocity(p, dq);
  const int d = sys_.d();
  dQ.resize(Pt.rows(), Pt.cols());
  for (int i = 0; i < sys_.n(); ++i) dQ.middleRows(i * d, d) = sys_.inv_mass()(i) * Pt.middleRows(i * d, d);
  sys_.apply_hessian(q, jets_, Qt, dP);
  dP = -dP;
}

void FlowIntegrator::step(Vec& p, Vec& q, double h) {
  if (opts_.integrator == Integrator::Leapfrog) {
    sys_.force(q, tp_);
    p += 0.5 * h * tp_;
    sys_.velocity(p, tq_);
    q += h * tq_;
    sys_.force(q, tp_);
    p += 0.5 * h * tp_;
    return;
  }
  derivs(p, q, kp_[0], kq_[0]);
  tp_ = p + 0.5 * h * kp_[0];
  tq_ = q + 0.5 * h * kq_[0];
  derivs(tp_, tq_, kp_[1], kq_[1]);
  tp_ = p + 0.5 * h * kp_[1];
  tq_ = q + 0.5 * h * kq_[1];
  derivs(tp_, tq_, kp_[2], kq_[2]);
  tp_ = p + h * kp_[2];
  tq_ = q + h * kq_[2];
  derivs(tp_, tq_, kp_[3], kq_[3]);
  p += (h / 6.0) * (kp_[0] + 2.0 * kp_[1] + 2.0 * kp_[2] + kp_[3]);
  q += (h / 6.0) * (kq_[0] + 2.0 * kq_[1] + 2.0 * kq_[2] + kq_[3]);
}

void FlowIntegrator::step_variational(Vec& p, Vec& q, Mat& Qt, Mat& Pt, double h) {
  const int d = sys_.d();
  if (opts_.integrator == Integrator::Leapfrog) {
    // Velocity Verlet and its exact tangent map.
    sys_.pair_jets(q, jets_);
    sys_.force_from_jets(q, jets_, tp_);
    sys_.apply_hessian(q, jets_, Qt, tP_);
    p += 0.5 * h * tp_;
    Pt -= 0.5 * h * tP_;
    sys_.velocity(p, tq_);
    q += h * tq_;
    for (int i = 0; i < sys_.n(); ++i) Qt.middleRows(i * d, d) += (h * sys_.inv_mass()(i)) * Pt.middleRows(i * d, d);
    sys_.pair_jets(q, jets_);
    sys_.force_from_jets(q, jets_, tp_);
    sys_.apply_hessian(q, jets_, Qt, tP_);
    p += 0.5 * h * tp_;
    Pt -= 0.5 * h * tP_;
    return;
  }
  var_derivs(p, q, Qt, Pt, kp_[0], kq_[0], kQ_[0], kP_[0]);
  tp_ = p + 0.5 * h * kp_[0];
  tq_ = q + 0.5 * h * kq_[0];
  tQ_ = Qt + 0.5 * h * kQ_[0];
  tP_ = Pt + 0.5 * h * kP_[0];
  var_derivs(tp_, tq_, tQ_, tP_, kp_[1], kq_[1], kQ_[1], kP_[1]);
  tp_ = p + 0.5 * h * kp_[1];
  tq_ = q + 0.5 * h * kq_[1];
  tQ_ = Qt + 0.5 * h * kQ_[1];
  tP_ = Pt + 0.5 * h * kP_[1];
  var_derivs(tp_, tq_, tQ_, tP_, kp_[2], kq_[2], kQ_[2], kP_[2]);
  tp_ = p + h * kp_[2];
  tq_ = q + h * kq_[2];
  tQ_ = Qt + h * kQ_[2];
  tP_ = Pt + h * kP_[2];
  var_derivs(tp_, tq_, tQ_, tP_, kp_[3], kq_[3], kQ_[3], kP_[3]);
  p += (h / 6.0) * (kp_[0] + 2.0 * kp_[1] + 2.0 * kp_[2] + kp_[3]);
  q += (h / 6.0) * (kq_[0] + 2.0 * kq_[1] + 2.0 * kq_[2] + kq_[3]);
  Qt += (h / 6.0) * (kQ_[0] + 2.0 * kQ_[1] + 2.0 * kQ_[2] + kQ_[3]);
  Pt += (h / 6.0) * (kP_[0] + 2.0 * kP_[1] + 2.0 * kP_[2] + kP_[3]);
}

namespace {

[[noreturn]] void blow_up(double t) {
  std::ostringstream os;
  os << "non-finite state at t = " << t << "; reduce h or the coupling strength";
  throw IntegrationError(os.str());
}

}  // namespace

void FlowIntegrator::advance(Vec& p, Vec& q, double dt) {
  const long n = steps_for(dt, opts_.h);
  if (n == 0) return;
  const double h = dt / static_cast<double>(n);
  for (long i = 0; i < n; ++i) step(p, q, h);
  if (!p.allFinite() || !q.allFinite()) blow_up(dt);
}

void FlowIntegrator::advance_variational(Vec& p, Vec& q, Mat& Qt, Mat& Pt, double dt) {
  const long n = steps_for(dt, opts_.h);
  if (n == 0) return;
  const double h = dt / static_cast<double>(n);
  for (long i = 0; i < n; ++i) step_variational(p, q, Qt, Pt, h);
  if (!p.allFinite() || !q.allFinite() || !Qt.allFinite() || !Pt.allFinite()) blow_up(dt);
}

// ---------------------------------------------------------------------------
// Drivers

namespace {

void check_T(double T) {
  if (!std::isfinite(T)) throw DomainError("integration time must be finite");
}

// Tangent columns for seeds J: Qt = [dq/dq_J | dq/dp_J], Pt = [dp/dq_J | dp/dp_J].
void seed_tangent(const SiteSet& volume, const SiteSet& seeds, int d, Mat& Qt, Mat& Pt) {
  if (seeds.empty()) throw DomainError("seed set must be non-empty");
  if (!seeds.subset_of(volume)) throw DomainError("seed set must be contained in the volume");
  const auto dof = static_cast<Eigen::Index>(volume.size()) * d;
  const auto nj = static_cast<Eigen::Index>(seeds.size()) * d;
  Qt = Mat::Zero(dof, 2 * nj);
  Pt = Mat::Zero(dof, 2 * nj);
  for (std::size_t j = 0; j < seeds.size(); ++j) {
    const auto row = static_cast<Eigen::Index>(*volume.position(seeds[j])) * d;
    const auto col = static_cast<Eigen::Index>(j) * d;
    for (int c = 0; c < d; ++c) {
      Qt(row + c, col + c) = 1.0;
      Pt(row + c, nj + col + c) = 1.0;
    }
  }
}

void push_blocks(JacobianBlocks& jb, const Mat& Qt, const Mat& Pt) {
  const auto nj = Qt.cols() / 2;
  jb.X.push_back(Qt.leftCols(nj));
  jb.Z.push_back(Qt.rightCols(nj));
  jb.Y.push_back(Pt.leftCols(nj));
  jb.W.push_back(Pt.rightCols(nj));
}

PhaseState make_state(const SiteSet& volume, int d, const Vec& p, const Vec& q) {
  PhaseState s;
  s.sites = volume;
  s.d = d;
  s.p = p;
  s.q = q;
  return s;
}

// Indices of `times` ordered for marching outward from zero: non-negatives ascending, then negatives descending.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> outward_order(const std::vector<double>& times) {
  std::vector<std::size_t> fwd, bwd;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!std::isfinite(times[i])) throw DomainError("requested times must be finite");
    (times[i] >= 0.0 ? fwd : bwd).push_back(i);
  }
  std::stable_sort(fwd.begin(), fwd.end(), [&](auto a, auto b) { return times[a] < times[b]; });
  std::stable_sort(bwd.begin(), bwd.end(), [&](auto a, auto b) { return times[a] > times[b]; });
  return {fwd, bwd};
}

}  // namespace

Trajectory integrate_flow(const LatticeModel& model, const SiteSet& volume, const PhaseState& s0, double T,
                          double h, Integrator integrator, int stride) {
  check_state_on(model, volume, s0);
  check_T(T);
  if (stride < 1) throw DomainError("stride must be >= 1");
  FlowIntegrator fi(model, volume, {integrator, h});
  Trajectory tr;
  tr.integrator = integrator;
  Vec p = s0.p, q = s0.q;
  tr.times.push_back(0.0);
  tr.states.push_back(s0);
  tr.energies.push_back(fi.system().energy(p, q));
  const long n = FlowIntegrator::steps_for(T, h);
  const double he = n ? T / static_cast<double>(n) : 0.0;
  for (long i = 1; i <= n; ++i) {
    fi.step(p, q, he);
    if (!p.allFinite() || !q.allFinite()) blow_up(he * static_cast<double>(i));
    if (i % stride == 0 || i == n) {
      tr.times.push_back(i == n ? T : he * static_cast<double>(i));
      tr.states.push_back(make_state(volume, model.dim(), p, q));
      tr.energies.push_back(fi.system().energy(p, q));
    }
  }
  return tr;
}

PhaseState propagate(const LatticeModel& model, const SiteSet& volume, const PhaseState& s0, double T,
                     StepOptions opts) {
  check_state_on(model, volume, s0);
  check_T(T);
  FlowIntegrator fi(model, volume, opts);
  Vec p = s0.p, q = s0.q;
  fi.advance(p, q, T);
  return make_state(volume, model.dim(), p, q);
}

std::vector<PhaseState> propagate_to_times(const LatticeModel& model, const SiteSet& volume, const PhaseState& s0,
                                           const std::vector<double>& times, StepOptions opts) {
  check_state_on(model, volume, s0);
  FlowIntegrator fi(model, volume, opts);
  std::vector<PhaseState> out(times.size());
  const auto [fwd, bwd] = outward_order(times);
  for (const auto* branch : {&fwd, &bwd}) {
    Vec p = s0.p, q = s0.q;
    double t = 0.0;
    for (std::size_t i : *branch) {
      fi.advance(p, q, times[i] - t);
      t = times[i];
      out[i] = make_state(volume, model.dim(), p, q);
    }
  }
  return out;
}

PhaseState harmonic_flow(const LatticeModel& model, const SiteSet& volume, const PhaseState& s0, double t) {
  check_state_on(model, volume, s0);
  const int d = model.dim();
  PhaseState out = s0;
  for (std::size_t i = 0; i < volume.size(); ++i) {
    const double m = model.masses()(volume[i]);
    const double w = std::sqrt(model.force_constants()(volume[i]) / m);
    const double c = std::cos(w * t), s = std::sin(w * t);
    for (int k = 0; k < d; ++k) {
      const auto idx = static_cast<Eigen::Index>(i) * d + k;
      const double q0 = s0.q(idx), p0 = s0.p(idx);
      out.q(idx) = c * q0 + s * p0 / (m * w);
      out.p(idx) = -m * w * s * q0 + c * p0;
    }
  }
  return out;
}

VariationalResult integrate_variational(const LatticeModel& model, const SiteSet& volume, const PhaseState& s0,
                                        const SiteSet& seeds, double T, double h, Integrator integrator,
                                        int stride) {
  check_state_on(model, volume, s0);
  check_T(T);
  if (stride < 1) throw DomainError("stride must be >= 1");
  const int d = model.dim();
  FlowIntegrator fi(model, volume, {integrator, h});
  VariationalResult res;
  res.trajectory.integrator = integrator;
  res.blocks.volume = volume;
  res.blocks.seeds = seeds;
  res.blocks.d = d;
  Mat Qt, Pt;
  seed_tangent(volume, seeds, d, Qt, Pt);
  Vec p = s0.p, q = s0.q;
  auto record = [&](double t) {
    res.trajectory.times.push_back(t);
    res.trajectory.states.push_back(make_state(volume, d, p, q));
    res.trajectory.energies.push_back(fi.system().energy(p, q));
    res.blocks.times.push_back(t);
    push_blocks(res.blocks, Qt, Pt);
  };
  record(0.0);
  const long n = FlowIntegrator::steps_for(T, h);
  const double he = n ? T / static_cast<double>(n) : 0.0;
  for (long i = 1; i <= n; ++i) {
    fi.step_variational(p, q, Qt, Pt, he);
    if (!p.allFinite() || !q.allFinite() || !Qt.allFinite() || !Pt.allFinite())
      blow_up(he * static_cast<double>(i));
    if (i % stride == 0 || i == n) record(i == n ? T : he * static_cast<double>(i));
  }
  return res;
}

VariationalResult variational_at_times(const LatticeModel& model, const SiteSet& volume, const PhaseState& s0,
                                       const SiteSet& seeds, const std::vector<double>& times, StepOptions opts) {
  check_state_on(model, volume, s0);
  const int d = model.dim();
  FlowIntegrator fi(model, volume, opts);
  Mat Q0, P0;
  seed_tangent(volume, seeds, d, Q0, P0);
  const std::size_t m = times.size();
  VariationalResult res;
  res.trajectory.integrator = opts.integrator;
  res.trajectory.times = times;
  res.trajectory.states.resize(m);
  res.trajectory.energies.resize(m);
  res.blocks.volume = volume;
  res.blocks.seeds = seeds;
  res.blocks.d = d;
  res.blocks.times = times;
  res.blocks.X.resize(m);
  res.blocks.Y.resize(m);
  res.blocks.Z.resize(m);
  res.blocks.W.resize(m);
  const auto nj = Q0.cols() / 2;
  const auto [fwd, bwd] = outward_order(times);
  for (const auto* branch : {&fwd, &bwd}) {
    Vec p = s0.p, q = s0.q;
    Mat Qt = Q0, Pt = P0;
    double t = 0.0;
    for (std::size_t i : *branch) {
      fi.advance_variational(p, q, Qt, Pt, times[i] - t);
      t = times[i];
      res.trajectory.states[i] = make_state(volume, d, p, q);
      res.trajectory.energies[i] = fi.system().energy(p, q);
      res.blocks.X[i] = Qt.leftCols(nj);
      res.blocks.Z[i] = Qt.rightCols(nj);
      res.blocks.Y[i] = Pt.leftCols(nj);
      res.blocks.W[i] = Pt.rightCols(nj);
    }
  }
  return res;
}

Mat assembled_jacobian(const JacobianBlocks& b, std::size_t n) {
  if (!b.full_grid()) throw UnsupportedError("full Jacobian needs seeds equal to the volume");
  const auto m = b.X.at(n).rows();
  Mat M(2 * m, 2 * m);
  M << b.X[n], b.Z[n], b.Y[n], b.W[n];
  return M;
}

double symplectic_defect(const JacobianBlocks& b, std::size_t n) {
  const Mat M = assembled_jacobian(b, n);
  const auto m = M.rows() / 2;
  Mat J = Mat::Zero(2 * m, 2 * m);
  J.topRightCorner(m, m) = Mat::Identity(m, m);
  J.bottomLeftCorner(m, m) = -Mat::Identity(m, m);
  return (M.transpose() * J * M - J).cwiseAbs().maxCoeff();
}

double jacobian_determinant(const JacobianBlocks& b, std::size_t n) {
  return assembled_jacobian(b, n).partialPivLu().determinant();
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  os << "t,site,component,value\n";
  os.precision(17);
  for (std::size_t n = 0; n < traj.states.size(); ++n) {
    const auto& s = traj.states[n];
    for (std::size_t i = 0; i < s.sites.size(); ++i)
      for (int c = 0; c < s.d; ++c) {
        const auto idx = static_cast<Eigen::Index>(i) * s.d + c;
        os << traj.times[n] << ',' << s.sites[i] << ",p" << c << ',' << s.p(idx) << '\n';
        os << traj.times[n] << ',' << s.sites[i] << ",q" << c << ',' << s.q(idx) << '\n';
      }
  }
}

void write_jacobian_csv(std::ostream& os, const JacobianBlocks& b) {
  os << "t,site,component,value\n";
  os.precision(17);
  const int d = b.d;
  for (std::size_t n = 0; n < b.size(); ++n)
    for (BlockKind kind : {BlockKind::X, BlockKind::Y, BlockKind::Z, BlockKind::W}) {
      const Mat& F = b.family(kind, n);
      for (std::size_t k = 0; k < b.volume.size(); ++k)
        for (std::size_t j = 0; j < b.seeds.size(); ++j)
          for (int r = 0; r < d; ++r)
            for (int c = 0; c < d; ++c)
              os << b.times[n] << ',' << b.volume[k] << ',' << to_string(kind) << "[j=" << b.seeds[j] << "]("
                 << r << ' ' << c << ")," << F(static_cast<Eigen::Index>(k) * d + r, static_cast<Eigen::Index>(j) * d + c)
                 << '\n';
    }
}

}  // namespace lrlab
