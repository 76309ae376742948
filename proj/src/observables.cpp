#include "lrlab/observables.hpp"

#include <cmath>
#include <sstream>

#include "lrlab/errors.hpp"

namespace lrlab {

std::string to_string(ObservableKind k) {
  switch (k) {
    case ObservableKind::Resolvent: return "resolvent";
    case ObservableKind::GaussianLevee: return "gaussian-levee";
    case ObservableKind::CoordinateWindow: return "coordinate-window";
  }
  return "?";
}

namespace {

void check_support(const SiteSet& X, int d) {
  if (X.empty()) throw DomainError("observable support must be non-empty");
  if (d < 1) throw DomainError("observable dimension must be >= 1");
}

Vec join(const Vec& a, const Vec& b) {
  Vec z(a.size() + b.size());
  z << a, b;
  return z;
}

}  // namespace

Observable Observable::resolvent(SiteSet X, int d, Vec x_p, Vec x_q, double lambda, ResolventPart part) {
  check_support(X, d);
  if (lambda == 0.0 || !std::isfinite(lambda)) throw DomainError("resolvent: lambda must be non-zero");
  const auto n = static_cast<Eigen::Index>(X.size()) * d;
  if (x_p.size() != n || x_q.size() != n) throw DomainError("resolvent: direction must cover the support");
  Observable f;
  f.kind_ = ObservableKind::Resolvent;
  f.support_ = std::move(X);
  f.d_ = d;
  f.dir_ = join(x_p, x_q);
  const double xn = f.dir_.norm();
  if (!(xn > 0.0) || !std::isfinite(xn)) throw DomainError("resolvent: direction must be non-zero");
  f.lambda_ = lambda;
  f.part_ = part;
  const double l = std::abs(lambda);
  if (part == ResolventPart::Real) {
    f.sup_ = 1.0 / (2.0 * l);  // |u|/(u^2+l^2) peaks at |u| = l
    f.grad_sup_ = xn / (l * l);  // |u^2-l^2|/(u^2+l^2)^2 peaks at u = 0
  } else {
    f.sup_ = 1.0 / l;
    f.grad_sup_ = xn * 3.0 * std::sqrt(3.0) / (8.0 * l * l);  // 2 l |u|/(u^2+l^2)^2 peaks at |u| = l/sqrt(3)
  }
  return f;
}

Observable Observable::gaussian_levee(SiteSet X, int d, Vec c_p, Vec c_q, double sigma) {
  check_support(X, d);
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw DomainError("gaussian_levee: sigma must be > 0");
  const auto n = static_cast<Eigen::Index>(X.size()) * d;
  if (c_p.size() != n || c_q.size() != n) throw DomainError("gaussian_levee: center must cover the support");
  Observable f;
  f.kind_ = ObservableKind::GaussianLevee;
  f.support_ = std::move(X);
  f.d_ = d;
  f.dir_ = join(c_p, c_q);
  f.sigma_ = sigma;
  f.sup_ = 1.0;
  f.grad_sup_ = std::exp(-0.5) / sigma;  // r exp(-r^2/2s^2)/s^2 peaks at r = s
  return f;
}

Observable Observable::coordinate_window(int site, int component, Coordinate which, int d, double sigma) {
  check_support(SiteSet{site}, d);
  if (component < 0 || component >= d) throw DomainError("coordinate_window: component out of range");
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw DomainError("coordinate_window: sigma must be > 0");
  Observable f;
  f.kind_ = ObservableKind::CoordinateWindow;
  f.support_ = SiteSet{site};
  f.d_ = d;
  f.sigma_ = sigma;
  f.part_ = which == Coordinate::P ? ResolventPart::Real : ResolventPart::Imag;
  f.coord_ = (which == Coordinate::P ? 0 : d) + component;
  f.sup_ = sigma * std::exp(-0.5);
  f.grad_sup_ = 1.0;  // |w'(u)| = |1 - u^2/s^2| exp(-u^2/2s^2) peaks at u = 0
  return f;
}

std::string Observable::describe() const {
  std::ostringstream os;
  os << to_string(kind_) << " on {";
  for (std::size_t i = 0; i < support_.size(); ++i) os << (i ? "," : "") << support_[i];
  os << "}";
  switch (kind_) {
    case ObservableKind::Resolvent:
      os << " lambda=" << lambda_ << (part_ == ResolventPart::Real ? " re" : " im");
      break;
    case ObservableKind::GaussianLevee: os << " sigma=" << sigma_; break;
    case ObservableKind::CoordinateWindow:
      os << ' ' << (coord_ < d_ ? 'p' : 'q') << (coord_ % d_) << " sigma=" << sigma_;
      break;
  }
  return os.str();
}

double Observable::value_local(const Vec& z) const {
  switch (kind_) {
    case ObservableKind::Resolvent: {
      const double u = dir_.dot(z);
      const double den = u * u + lambda_ * lambda_;
      return part_ == ResolventPart::Real ? -u / den : -lambda_ / den;
    }
    case ObservableKind::GaussianLevee:
      return std::exp(-(z - dir_).squaredNorm() / (2.0 * sigma_ * sigma_));
    case ObservableKind::CoordinateWindow: {
      const double u = z(coord_);
      return u * std::exp(-u * u / (2.0 * sigma_ * sigma_));
    }
  }
  return 0.0;
}

Vec Observable::gradient_local(const Vec& z) const {
  switch (kind_) {
    case ObservableKind::Resolvent: {
      const double u = dir_.dot(z);
      const double l2 = lambda_ * lambda_;
      const double den = u * u + l2;
      const double dphi = part_ == ResolventPart::Real ? (u * u - l2) / (den * den) : 2.0 * lambda_ * u / (den * den);
      return dphi * dir_;
    }
    case ObservableKind::GaussianLevee: {
      const double s2 = sigma_ * sigma_;
      const Vec r = z - dir_;
      return (-std::exp(-r.squaredNorm() / (2.0 * s2)) / s2) * r;
    }
    case ObservableKind::CoordinateWindow: {
      Vec g = Vec::Zero(z.size());
      const double u = z(coord_);
      const double v = u * u / (sigma_ * sigma_);
      g(coord_) = (1.0 - v) * std::exp(-0.5 * v);
      return g;
    }
  }
  return Vec::Zero(z.size());
}

Vec Observable::project(const PhaseState& s) const {
  if (s.d != d_) throw DomainError("observable dimension differs from the state");
  const auto n = static_cast<Eigen::Index>(support_.size()) * d_;
  Vec z(2 * n);
  for (std::size_t i = 0; i < support_.size(); ++i) {
    const auto pos = s.sites.position(support_[i]);
    if (!pos) throw DomainError("state does not cover the observable support");
    const auto src = static_cast<Eigen::Index>(*pos) * d_;
    const auto dst = static_cast<Eigen::Index>(i) * d_;
    z.segment(dst, d_) = s.p.segment(src, d_);
    z.segment(n + dst, d_) = s.q.segment(src, d_);
  }
  return z;
}

PhaseState Observable::gradient(const PhaseState& s) const {
  const Vec g = gradient_local(project(s));
  const auto n = static_cast<Eigen::Index>(support_.size()) * d_;
  PhaseState out = PhaseState::zeros(s.sites, s.d);
  for (std::size_t i = 0; i < support_.size(); ++i) {
    const auto dst = static_cast<Eigen::Index>(*s.sites.position(support_[i])) * d_;
    const auto src = static_cast<Eigen::Index>(i) * d_;
    out.p.segment(dst, d_) = g.segment(src, d_);
    out.q.segment(dst, d_) = g.segment(n + src, d_);
  }
  return out;
}

double poisson_bracket_gradients(const PhaseState& df, const PhaseState& dg) {
  if (!(df.sites == dg.sites) || df.d != dg.d) throw DomainError("bracket: gradients live on different sites");
  return df.q.dot(dg.p) - df.p.dot(dg.q);
}

double poisson_bracket_static(const Observable& f, const Observable& g, const PhaseState& s) {
  return poisson_bracket_gradients(f.gradient(s), g.gradient(s));
}

double evolved_bracket_from(const VariationalResult& var, std::size_t n, const Observable& f, const Observable& g,
                            const PhaseState& s0) {
  const JacobianBlocks& B = var.blocks;
  const int d = B.d;
  if (!g.support().subset_of(B.seeds)) throw DomainError("evolved_bracket: seeds must contain the support of g");
  if (!f.support().subset_of(B.volume)) throw DomainError("evolved_bracket: support of f outside the volume");
  const PhaseState& st = var.trajectory.states.at(n);
  const Vec zf = f.project(st);
  const Vec gf = f.gradient_local(zf);
  const Vec zg = g.project(s0);
  const Vec gg = g.gradient_local(zg);
  const auto nf = static_cast<Eigen::Index>(f.support().size()) * d;
  const auto ng = static_cast<Eigen::Index>(g.support().size()) * d;

  // Row covector a = f_q X + f_p Y and b = f_q Z + f_p W over all seed columns.
  const auto cols = B.X[n].cols();
  Eigen::RowVectorXd a = Eigen::RowVectorXd::Zero(cols), b = Eigen::RowVectorXd::Zero(cols);
  for (std::size_t i = 0; i < f.support().size(); ++i) {
    const auto row = static_cast<Eigen::Index>(*B.volume.position(f.support()[i])) * d;
    const auto loc = static_cast<Eigen::Index>(i) * d;
    const auto fp = gf.segment(loc, d);
    const auto fq = gf.segment(nf + loc, d);
    a += fq.transpose() * B.X[n].middleRows(row, d) + fp.transpose() * B.Y[n].middleRows(row, d);
    b += fq.transpose() * B.Z[n].middleRows(row, d) + fp.transpose() * B.W[n].middleRows(row, d);
  }
  double out = 0.0;
  for (std::size_t k = 0; k < g.support().size(); ++k) {
    const auto col = static_cast<Eigen::Index>(*B.seeds.position(g.support()[k])) * d;
    const auto loc = static_cast<Eigen::Index>(k) * d;
    out += a.segment(col, d).dot(gg.segment(loc, d)) - b.segment(col, d).dot(gg.segment(ng + loc, d));
  }
  return out;
}

std::vector<double> evolved_bracket_series(const LatticeModel& model, const SiteSet& volume, const Observable& f,
                                           const Observable& g, const std::vector<double>& times,
                                           const PhaseState& s0, StepOptions opts) {
  if (!f.support().subset_of(volume) || !g.support().subset_of(volume))
    throw DomainError("evolved_bracket: supports must lie inside the volume");
  const VariationalResult var = variational_at_times(model, volume, s0, g.support(), times, opts);
  std::vector<double> out(times.size());
  for (std::size_t n = 0; n < times.size(); ++n) out[n] = evolved_bracket_from(var, n, f, g, s0);
  return out;
}

double evolved_bracket(const LatticeModel& model, const SiteSet& volume, const Observable& f, const Observable& g,
                       double t, const PhaseState& s0, StepOptions opts) {
  return evolved_bracket_series(model, volume, f, g, {t}, s0, opts).front();
}

}  // namespace lrlab
