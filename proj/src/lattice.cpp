#include "lrlab/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "lrlab/errors.hpp"

namespace lrlab {

// ---------------------------------------------------------------------------
// SiteSet

SiteSet::SiteSet(std::initializer_list<int> sites) : SiteSet(std::vector<int>(sites)) {}

SiteSet::SiteSet(std::vector<int> sites) : sites_(std::move(sites)) {
  std::sort(sites_.begin(), sites_.end());
  sites_.erase(std::unique(sites_.begin(), sites_.end()), sites_.end());
}

SiteSet SiteSet::range(int first, int last) {
  std::vector<int> v;
  for (int s = first; s <= last; ++s) v.push_back(s);
  return SiteSet(std::move(v));
}

bool SiteSet::contains(int site) const { return std::binary_search(sites_.begin(), sites_.end(), site); }

std::optional<std::size_t> SiteSet::position(int site) const {
  auto it = std::lower_bound(sites_.begin(), sites_.end(), site);
  if (it == sites_.end() || *it != site) return std::nullopt;
  return static_cast<std::size_t>(it - sites_.begin());
}

bool SiteSet::subset_of(const SiteSet& other) const {
  return std::includes(other.sites_.begin(), other.sites_.end(), sites_.begin(), sites_.end());
}

bool SiteSet::disjoint_from(const SiteSet& other) const {
  for (int s : sites_)
    if (other.contains(s)) return false;
  return true;
}

SiteSet SiteSet::set_union(const SiteSet& other) const {
  std::vector<int> out;
  std::set_union(sites_.begin(), sites_.end(), other.sites_.begin(), other.sites_.end(), std::back_inserter(out));
  return SiteSet(std::move(out));
}

SiteSet SiteSet::set_difference(const SiteSet& other) const {
  std::vector<int> out;
  std::set_difference(sites_.begin(), sites_.end(), other.sites_.begin(), other.sites_.end(),
                      std::back_inserter(out));
  return SiteSet(std::move(out));
}

// ---------------------------------------------------------------------------
// Lattice

Lattice::Lattice(Mat coords, std::string family, std::vector<int> shape)
    : coords_(std::move(coords)), family_(std::move(family)), shape_(std::move(shape)) {
  const int n = size();
  dist_.resize(n, n);
  for (int a = 0; a < n; ++a) {
    dist_(a, a) = 0.0;
    for (int b = a + 1; b < n; ++b) {
      const double d = (coords_.row(a) - coords_.row(b)).norm();
      dist_(a, b) = d;
      dist_(b, a) = d;
    }
  }
}

Lattice Lattice::chain(int n, int origin) {
  if (n < 1) throw DomainError("chain: need at least one site");
  Mat c(n, 1);
  for (int i = 0; i < n; ++i) c(i, 0) = origin + i;
  return Lattice(std::move(c), "chain", {n, origin});
}

Lattice Lattice::grid(int nx, int ny) {
  if (nx < 1 || ny < 1) throw DomainError("grid: extents must be positive");
  Mat c(nx * ny, 2);
  for (int iy = 0; iy < ny; ++iy)
    for (int ix = 0; ix < nx; ++ix) {
      c(iy * nx + ix, 0) = ix;
      c(iy * nx + ix, 1) = iy;
    }
  return Lattice(std::move(c), "grid", {nx, ny});
}

Lattice Lattice::from_points(Mat coords) {
  if (coords.rows() < 1 || coords.cols() < 1) throw DomainError("points: empty coordinate list");
  if (!coords.allFinite()) throw DomainError("points: non-finite coordinate");
  return Lattice(std::move(coords), "points", {});
}

Lattice Lattice::random_points(int n, int dim, double box, double min_separation, std::uint64_t seed) {
  if (n < 1 || dim < 1 || !(box > 0.0)) throw DomainError("random_points: bad extents");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, box);
  Mat c(n, dim);
  int placed = 0;
  long attempts = 0;
  while (placed < n) {
    if (++attempts > 1000000L) throw DomainError("random_points: cannot honour min_separation in box");
    Eigen::RowVectorXd p(dim);
    for (int k = 0; k < dim; ++k) p(k) = u(rng);
    bool ok = true;
    for (int i = 0; i < placed && ok; ++i) ok = (c.row(i) - p).norm() >= min_separation;
    if (ok) c.row(placed++) = p;
  }
  return Lattice(std::move(c), "points", {});
}

SiteSet Lattice::all_sites() const { return SiteSet::range(0, size() - 1); }

SiteSet Lattice::ball(int center, double radius) const {
  std::vector<int> v;
  for (int s = 0; s < size(); ++s)
    if (dist_(center, s) <= radius) v.push_back(s);
  return SiteSet(std::move(v));
}

std::optional<int> Lattice::find_site(const Vec& point) const {
  if (point.size() != coords_.cols()) return std::nullopt;
  for (int s = 0; s < size(); ++s)
    if ((coords_.row(s).transpose() - point).cwiseAbs().maxCoeff() == 0.0) return s;
  return std::nullopt;
}

std::optional<Lattice> Lattice::doubled() const {
  if (family_ == "chain") return chain(2 * shape_[0], shape_[1]);
  if (family_ == "grid") return grid(2 * shape_[0], 2 * shape_[1]);
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// DecayFunction

DecayFunction DecayFunction::power_law(double exponent) {
  if (!(exponent >= 0.0) || !std::isfinite(exponent)) throw DomainError("power_law: exponent must be >= 0");
  DecayFunction F;
  F.family_ = DecayFamily::PowerLaw;
  F.exponent_ = exponent;
  return F;
}

DecayFunction DecayFunction::exp_power_law(double exponent, double rate) {
  if (!(rate >= 0.0)) throw DomainError("exp_power_law: rate must be >= 0");
  DecayFunction F = power_law(exponent);
  F.family_ = rate > 0.0 ? DecayFamily::ExpPowerLaw : DecayFamily::PowerLaw;
  F.rate_ = rate;
  return F;
}

DecayFunction DecayFunction::tabulated(std::vector<double> r, std::vector<double> values, double rate) {
  if (r.empty() || r.size() != values.size()) throw DomainError("tabulated: r and values must match and be non-empty");
  if (r.front() != 0.0 || values.front() != 1.0) throw DomainError("tabulated: table must start at (0, 1)");
  for (std::size_t i = 1; i < r.size(); ++i) {
    if (!(r[i] > r[i - 1])) throw DomainError("tabulated: r must be strictly increasing");
    if (!(values[i] <= values[i - 1])) throw DomainError("tabulated: values must be non-increasing");
  }
  if (!(values.back() > 0.0)) throw DomainError("tabulated: values must stay in (0, 1]");
  if (!(rate >= 0.0)) throw DomainError("tabulated: rate must be >= 0");
  DecayFunction F;
  F.family_ = DecayFamily::Tabulated;
  F.rate_ = rate;
  F.table_r_ = std::move(r);
  F.table_v_ = std::move(values);
  return F;
}

DecayFunction DecayFunction::default_for_dimension(int ell, double rate) {
  return exp_power_law(static_cast<double>(ell + 1), rate);
}

double DecayFunction::operator()(double r) const {
  double base;
  if (family_ == DecayFamily::Tabulated) {
    auto it = std::upper_bound(table_r_.begin(), table_r_.end(), r);
    if (it == table_r_.end()) {
      base = table_v_.back();
    } else {
      const auto i = static_cast<std::size_t>(it - table_r_.begin());
      const double w = (r - table_r_[i - 1]) / (table_r_[i] - table_r_[i - 1]);
      base = (1.0 - w) * table_v_[i - 1] + w * table_v_[i];
    }
  } else {
    base = exponent_ == 0.0 ? 1.0 : std::pow(1.0 + r, -exponent_);
  }
  return rate_ == 0.0 ? base : base * std::exp(-rate_ * r);
}

std::string DecayFunction::describe() const {
  std::ostringstream os;
  os.precision(17);
  switch (family_) {
    case DecayFamily::PowerLaw: os << "(1+r)^-" << exponent_; break;
    case DecayFamily::ExpPowerLaw: os << "exp(-" << rate_ << " r)(1+r)^-" << exponent_; break;
    case DecayFamily::Tabulated:
      os << "tabulated(" << table_r_.size() << " nodes)";
      if (rate_ > 0.0) os << " exp(-" << rate_ << " r)";
      break;
  }
  return os.str();
}

DecayFunction weight_decay(const DecayFunction& F, double mu) {
  if (!(mu > 0.0) || !std::isfinite(mu)) throw DomainError("weight_decay: mu must be > 0");
  DecayFunction out = F;
  out.rate_ = F.rate_ + mu;
  if (out.family_ == DecayFamily::PowerLaw) out.family_ = DecayFamily::ExpPowerLaw;
  return out;
}

// ---------------------------------------------------------------------------
// Geometry constants

namespace {
void require_nonempty(const SiteSet& s, const char* what) {
  if (s.empty()) throw DomainError(std::string(what) + ": site set must be non-empty");
}
}  // namespace

double norm_F(const Lattice& lat, const DecayFunction& F, const SiteSet& sites) {
  require_nonempty(sites, "norm_F");
  double best = 0.0;
  for (int y : sites) {
    double sum = 0.0;
    for (int x : sites) sum += F(lat.distance(x, y));
    best = std::max(best, sum);
  }
  return best;
}

double convolution_constant(const Lattice& lat, const DecayFunction& F, const SiteSet& sites) {
  require_nonempty(sites, "convolution_constant");
  const auto& s = sites.sites();
  const std::size_t n = s.size();
  Mat w(n, n);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) w(a, b) = F(lat.distance(s[a], s[b]));
  // (w*w)(x,y) = sum_z F(d(x,z)) F(d(z,y))
  const Mat conv = w * w;
  double best = 0.0;
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) best = std::max(best, conv(a, b) / w(a, b));
  return best;
}

double interaction_weight_D(const Lattice& lat, const DecayFunction& F, const SiteSet& X, const SiteSet& Y) {
  require_nonempty(X, "interaction_weight_D");
  require_nonempty(Y, "interaction_weight_D");
  double sum = 0.0;
  for (int x : X)
    for (int y : Y) sum += F(lat.distance(x, y));
  return sum;
}

double dist_sets(const Lattice& lat, const SiteSet& X, const SiteSet& Y) {
  require_nonempty(X, "dist_sets");
  require_nonempty(Y, "dist_sets");
  double best = std::numeric_limits<double>::infinity();
  for (int x : X)
    for (int y : Y) best = std::min(best, lat.distance(x, y));
  return best;
}

}  // namespace lrlab
