#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "lrlab/model.hpp"

namespace lrlab {

struct SamplerSpec {
  int n = 512;           ///< quasi-random points
  double radius = 5.0;   ///< l2 radius of the ball around the origin
  std::uint64_t seed = 1;
  int refine = 200;      ///< Nelder-Mead evaluations from the best sample (0 disables)
  int workers = 1;
};

/// Run body(i) for i in [0, n) on up to `workers` threads. Each index is visited exactly once;
/// callers write into per-index slots and reduce afterwards in index order.
void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& body);

/// Number of hardware threads, at least 1.
int default_workers();

/// Scrambled Halton points in [0,1)^dim (one per row). Prefixes are nested: the first n rows do not
/// depend on the requested count.
Mat scrambled_halton(int n, int dim, std::uint64_t seed);

/// Quasi-random points in the closed l2 ball of `radius` in R^dim (one per row).
Mat quasi_random_ball(int n, int dim, double radius, std::uint64_t seed);

/// Estimate of sup |q(x)| over the ball: max over the point set, then refinement.
/// It is a lower bound on the true supremum.
struct SupEstimate {
  double value = 0.0;
  Vec argmax;
  double sample_value = 0.0;  ///< before refinement
  int evaluations = 0;
};

using ScalarQuantity = std::function<double(const Vec&)>;

SupEstimate sup_norm_estimate(int dim, const ScalarQuantity& q, const SamplerSpec& spec);

/// Same over phase states on `sites` (flat coordinates p then q).
SupEstimate sup_norm_estimate(const SiteSet& sites, int d, const std::function<double(const PhaseState&)>& q,
                              const SamplerSpec& spec);

/// Several outputs sharing the sample set: all(x) returns m values at once, single(x, j) returns output j.
/// Each output is refined separately with `single`.
std::vector<SupEstimate> sup_norm_estimate_multi(int dim, std::size_t m,
                                                 const std::function<std::vector<double>(const Vec&)>& all,
                                                 const std::function<double(const Vec&, std::size_t)>& single,
                                                 const SamplerSpec& spec);

/// Maximise |q| over the ball with a projected Nelder-Mead search started at x0.
SupEstimate refine_maximum(const ScalarQuantity& q, const Vec& x0, double radius, int max_evaluations);

}  // namespace lrlab
