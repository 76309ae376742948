#include "lrlab/sampler.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <cmath>
#include <numeric>
#include <random>
#include <thread>

#include <boost/math/distributions/normal.hpp>

#include "lrlab/errors.hpp"

namespace lrlab {

int default_workers() { return std::max(1, static_cast<int>(std::thread::hardware_concurrency())); }

void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& body) {
  const std::size_t w = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, workers)));
  if (w <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::atomic<bool> failed{false};
  auto run = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n || failed.load()) return;
      try {
        body(i);
      } catch (...) {
        if (!failed.exchange(true)) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t k = 0; k < w; ++k) pool.emplace_back(run);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

namespace {

std::vector<int> first_primes(int count) {
  std::vector<int> primes;
  for (int c = 2; static_cast<int>(primes.size()) < count; ++c) {
    bool prime = true;
    for (int p : primes) {
      if (p * p > c) break;
      if (c % p == 0) {
        prime = false;
        break;
      }
    }
    if (prime) primes.push_back(c);
  }
  return primes;
}

}  // namespace

Mat scrambled_halton(int n, int dim, std::uint64_t seed) {
  if (n < 0 || dim < 1) throw DomainError("scrambled_halton: bad sizes");
  const std::vector<int> bases = first_primes(dim);
  std::mt19937_64 rng(seed);
  // One random digit permutation per base; zero stays fixed so trailing digits vanish.
  std::vector<std::vector<int>> perm(static_cast<std::size_t>(dim));
  for (int k = 0; k < dim; ++k) {
    auto& p = perm[static_cast<std::size_t>(k)];
    p.resize(static_cast<std::size_t>(bases[static_cast<std::size_t>(k)]));
    std::iota(p.begin(), p.end(), 0);
    std::shuffle(p.begin() + 1, p.end(), rng);
  }
  Mat out(n, dim);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < dim; ++k) {
      const int b = bases[static_cast<std::size_t>(k)];
      const auto& p = perm[static_cast<std::size_t>(k)];
      std::uint64_t idx = static_cast<std::uint64_t>(i) + 1;
      double f = 1.0, x = 0.0;
      while (idx > 0) {
        f /= b;
        x += f * p[static_cast<std::size_t>(idx % static_cast<std::uint64_t>(b))];
        idx /= static_cast<std::uint64_t>(b);
      }
      out(i, k) = x;
    }
  return out;
}

Mat quasi_random_ball(int n, int dim, double radius, std::uint64_t seed) {
  if (!(radius > 0.0)) throw DomainError("sampler radius must be > 0");
  const Mat u = scrambled_halton(n, dim + 1, seed);
  const boost::math::normal_distribution<double> normal;
  Mat out(n, dim);
  for (int i = 0; i < n; ++i) {
    Vec g(dim);
    for (int k = 0; k < dim; ++k) g(k) = boost::math::quantile(normal, std::clamp(u(i, k), 1e-12, 1.0 - 1e-12));
    const double gn = g.norm();
    const double r = radius * std::pow(u(i, dim), 1.0 / dim);
    if (gn > 0.0)
      out.row(i) = (r / gn) * g.transpose();
    else
      out.row(i).setZero();
  }
  return out;
}

SupEstimate refine_maximum(const ScalarQuantity& q, const Vec& x0, double radius, int max_evaluations) {
  const auto dim = x0.size();
  auto project = [&](Vec x) {
    const double n = x.norm();
    if (n > radius) x *= radius / n;
    return x;
  };
  int evals = 0;
  auto cost = [&](const Vec& x) {
    ++evals;
    const double v = std::abs(q(x));
    return std::isfinite(v) ? -v : 0.0;
  };
  SupEstimate best;
  best.argmax = project(x0);
  if (max_evaluations <= 0) {
    best.value = std::abs(q(best.argmax));
    best.evaluations = 1;
    best.sample_value = best.value;
    return best;
  }

  std::vector<Vec> simplex;
  std::vector<double> f;
  simplex.push_back(best.argmax);
  f.push_back(cost(simplex[0]));
  const double step = 0.1 * radius;
  for (Eigen::Index k = 0; k < dim && evals < max_evaluations; ++k) {
    Vec x = simplex[0];
    x(k) += (x(k) > 0.0 ? -step : step);
    simplex.push_back(project(x));
    f.push_back(cost(simplex.back()));
  }
  best.sample_value = -f[0];

  if (static_cast<Eigen::Index>(simplex.size()) == dim + 1) {
    std::vector<std::size_t> order(simplex.size());
    while (evals < max_evaluations) {
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return f[a] < f[b]; });
      const std::size_t hi = order.back(), lo = order.front(), second = order[order.size() - 2];
      Vec centroid = Vec::Zero(dim);
      for (std::size_t i = 0; i < simplex.size(); ++i)
        if (i != hi) centroid += simplex[i];
      centroid /= static_cast<double>(dim);
      const Vec xr = project(centroid + (centroid - simplex[hi]));
      const double fr = cost(xr);
      if (fr < f[lo]) {
        const Vec xe = project(centroid + 2.0 * (centroid - simplex[hi]));
        const double fe = evals < max_evaluations ? cost(xe) : fr;
        if (fe < fr) {
          simplex[hi] = xe;
          f[hi] = fe;
        } else {
          simplex[hi] = xr;
          f[hi] = fr;
        }
      } else if (fr < f[second]) {
        simplex[hi] = xr;
        f[hi] = fr;
      } else {
        const bool outside = fr < f[hi];
        const Vec xc = outside ? Vec(centroid + 0.5 * (xr - centroid)) : Vec(centroid + 0.5 * (simplex[hi] - centroid));
        if (evals >= max_evaluations) break;
        const double fc = cost(xc);
        if (fc < std::min(fr, f[hi])) {
          simplex[hi] = xc;
          f[hi] = fc;
        } else {
          for (std::size_t i = 0; i < simplex.size() && evals < max_evaluations; ++i) {
            if (i == lo) continue;
            simplex[i] = simplex[lo] + 0.5 * (simplex[i] - simplex[lo]);
            f[i] = cost(simplex[i]);
          }
        }
      }
    }
  }
  std::size_t arg = 0;
  for (std::size_t i = 1; i < f.size(); ++i)
    if (f[i] < f[arg]) arg = i;
  best.value = -f[arg];
  best.argmax = simplex[arg];
  best.evaluations = evals;
  return best;
}

SupEstimate sup_norm_estimate(int dim, const ScalarQuantity& q, const SamplerSpec& spec) {
  const std::size_t m = 1;
  auto all = [&](const Vec& x) { return std::vector<double>{q(x)}; };
  auto single = [&](const Vec& x, std::size_t) { return q(x); };
  return sup_norm_estimate_multi(dim, m, all, single, spec).front();
}

SupEstimate sup_norm_estimate(const SiteSet& sites, int d, const std::function<double(const PhaseState&)>& q,
                              const SamplerSpec& spec) {
  const int dim = 2 * static_cast<int>(sites.size()) * d;
  return sup_norm_estimate(dim, [&](const Vec& x) { return q(PhaseState::from_flat(sites, d, x)); }, spec);
}

std::vector<SupEstimate> sup_norm_estimate_multi(int dim, std::size_t m,
                                                 const std::function<std::vector<double>(const Vec&)>& all,
                                                 const std::function<double(const Vec&, std::size_t)>& single,
                                                 const SamplerSpec& spec) {
  if (spec.n < 1) throw DomainError("sampler needs at least one point");
  const Mat pts = quasi_random_ball(spec.n, dim, spec.radius, spec.seed);
  const auto n = static_cast<std::size_t>(spec.n);
  std::vector<std::vector<double>> vals(n);
  parallel_for(n, spec.workers, [&](std::size_t i) {
    vals[i] = all(pts.row(static_cast<Eigen::Index>(i)).transpose());
    if (vals[i].size() != m) throw DomainError("sampler quantity returned the wrong number of outputs");
  });

  std::vector<SupEstimate> out(m);
  for (std::size_t j = 0; j < m; ++j) {
    std::size_t arg = 0;
    double best = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double v = std::abs(vals[i][j]);
      if (v > best) {
        best = v;
        arg = i;
      }
    }
    out[j].value = best;
    out[j].sample_value = best;
    out[j].argmax = pts.row(static_cast<Eigen::Index>(arg)).transpose();
    out[j].evaluations = spec.n;
  }
  if (spec.refine > 0) {
    parallel_for(m, spec.workers, [&](std::size_t j) {
      const SupEstimate r = refine_maximum([&](const Vec& x) { return single(x, j); }, out[j].argmax, spec.radius,
                                           spec.refine);
      out[j].evaluations += r.evaluations;
      if (r.value > out[j].value) {
        out[j].value = r.value;
        out[j].argmax = r.argmax;
      }
    });
  }
  return out;
}

}  // namespace lrlab
