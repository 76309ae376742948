#pragma once

#include <cstdint>
#include <initializer_list>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace lrlab {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Sorted, duplicate-free set of site indices into a Lattice.
class SiteSet {
public:
  SiteSet() = default;
  SiteSet(std::initializer_list<int> sites);
  explicit SiteSet(std::vector<int> sites);

  /// Sites first, first+1, ..., last.
  static SiteSet range(int first, int last);

  const std::vector<int>& sites() const noexcept { return sites_; }
  std::size_t size() const noexcept { return sites_.size(); }
  bool empty() const noexcept { return sites_.empty(); }
  int operator[](std::size_t i) const { return sites_[i]; }
  auto begin() const noexcept { return sites_.begin(); }
  auto end() const noexcept { return sites_.end(); }

  bool contains(int site) const;
  /// Position of `site` in the sorted list, if present.
  std::optional<std::size_t> position(int site) const;
  bool subset_of(const SiteSet& other) const;
  bool disjoint_from(const SiteSet& other) const;

  SiteSet set_union(const SiteSet& other) const;
  SiteSet set_difference(const SiteSet& other) const;

  bool operator==(const SiteSet& other) const = default;

private:
  std::vector<int> sites_;
};

/// Finite site set embedded in R^ell with the Euclidean metric of the embedding.
class Lattice {
public:
  /// n sites at integer positions origin, origin+1, ..., origin+n-1.
  static Lattice chain(int n, int origin = 0);
  /// nx*ny sites of Z^2, site index = iy*nx + ix.
  static Lattice grid(int nx, int ny);
  /// Explicit coordinates, one row per site.
  static Lattice from_points(Mat coords);
  /// n points uniform in [0, box)^dim, rejecting points closer than min_separation.
  static Lattice random_points(int n, int dim, double box, double min_separation, std::uint64_t seed);

  int size() const noexcept { return static_cast<int>(coords_.rows()); }
  int embedding_dim() const noexcept { return static_cast<int>(coords_.cols()); }
  const Mat& coords() const noexcept { return coords_; }
  const std::string& family() const noexcept { return family_; }

  double distance(int a, int b) const { return dist_(a, b); }
  SiteSet all_sites() const;
  /// All sites within `radius` of `center` (inclusive).
  SiteSet ball(int center, double radius) const;
  /// Site whose coordinates equal `point` exactly, if any.
  std::optional<int> find_site(const Vec& point) const;
  /// Same family with every linear extent doubled; nullopt for point clouds.
  std::optional<Lattice> doubled() const;

private:
  Lattice(Mat coords, std::string family, std::vector<int> shape);

  Mat coords_;
  Mat dist_;
  std::string family_;
  std::vector<int> shape_;
};

enum class DecayFamily { PowerLaw, ExpPowerLaw, Tabulated };

/// Non-increasing weight F on distances with F(0) = 1 and range (0, 1].
///
/// Every family is represented as base(r) * exp(-rate * r); power-law base is
/// (1 + r)^(-exponent), tabulated base interpolates linearly and holds its last
/// value beyond the table.
class DecayFunction {
public:
  static DecayFunction power_law(double exponent);
  static DecayFunction exp_power_law(double exponent, double rate);
  static DecayFunction tabulated(std::vector<double> r, std::vector<double> values, double rate = 0.0);
  /// (1 + r)^(-(ell+1)), optionally times exp(-rate r).
  static DecayFunction default_for_dimension(int ell, double rate = 0.0);

  double operator()(double r) const;

  DecayFamily family() const noexcept { return family_; }
  double exponent() const noexcept { return exponent_; }
  double rate() const noexcept { return rate_; }
  std::string describe() const;

private:
  friend DecayFunction weight_decay(const DecayFunction& F, double mu);
  DecayFunction() = default;

  DecayFamily family_ = DecayFamily::PowerLaw;
  double exponent_ = 0.0;
  double rate_ = 0.0;
  std::vector<double> table_r_;
  std::vector<double> table_v_;
};

/// F_mu(r) = exp(-mu r) F(r). Throws DomainError for mu <= 0.
DecayFunction weight_decay(const DecayFunction& F, double mu);

/// max_{y in sites} sum_{x in sites} F(d(x,y)); the truncation value of ||F||.
double norm_F(const Lattice& lat, const DecayFunction& F, const SiteSet& sites);

/// Tightest C_F on the truncation:
/// max_{x,y} sum_z F(d(x,z)) F(d(z,y)) / F(d(x,y)).
double convolution_constant(const Lattice& lat, const DecayFunction& F, const SiteSet& sites);

/// D(X,Y) = sum_{x in X} sum_{y in Y} F(d(x,y)).
double interaction_weight_D(const Lattice& lat, const DecayFunction& F, const SiteSet& X, const SiteSet& Y);

/// min_{x in X, y in Y} d(x,y).
double dist_sets(const Lattice& lat, const SiteSet& X, const SiteSet& Y);

}  // namespace lrlab
