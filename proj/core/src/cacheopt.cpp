#include "fdiscc/cacheopt.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace fdiscc {

namespace {

double entry(const std::vector<double>& v, int i) { return v.size() == 1 ? v[0] : v[static_cast<std::size_t>(i)]; }

void check(const CacheConfig& cache) {
  if (cache.n_files < 1) throw InvalidArgument("cache: n_files must be >= 1");
  if (!(cache.capacity >= 0.0)) throw InvalidArgument("cache: capacity must be >= 0");
  if (cache.lengths.size() != 1 && static_cast<int>(cache.lengths.size()) != cache.n_files) {
    throw InvalidArgument("cache: lengths must have n_files entries");
  }
  for (double q : cache.lengths) {
    if (!(q > 0.0)) throw InvalidArgument("cache: file lengths must be > 0");
  }
}

}  // namespace

RVec zipf_popularity(int n_files, double skew) {
  if (n_files < 1) throw InvalidArgument("zipf_popularity: n_files must be >= 1");
  if (!(skew >= 0.0)) throw InvalidArgument("zipf_popularity: skew must be >= 0");
  RVec c(n_files);
  for (int v = 0; v < n_files; ++v) c(v) = std::pow(static_cast<double>(v + 1), -skew);
  return c / c.sum();
}

double uncached_mass(const RVec& e, const RVec& popularity) {
  if (e.size() != popularity.size()) throw InvalidArgument("uncached_mass: size mismatch");
  return ((RVec::Ones(e.size()) - e).array() * popularity.array()).sum();
}

CacheSolution solve_caching(const CacheConfig& cache) {
  check(cache);
  const int n = cache.n_files;
  const RVec c = zipf_popularity(n, cache.skew);
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return c(a) / entry(cache.lengths, a) > c(b) / entry(cache.lengths, b);
  });

  CacheSolution sol;
  sol.e = RVec::Zero(n);
  double room = cache.capacity;
  bool priced = false;
  for (int v : order) {
    const double q = entry(cache.lengths, v);
    if (room >= q) {
      sol.e(v) = 1.0;
      room -= q;
      continue;
    }
    sol.e(v) = std::max(0.0, room / q);
    room = 0.0;
    if (!priced) {
      sol.dual_price = c(v) / q;
      priced = true;
    }
  }
  sol.objective = uncached_mass(sol.e, c);
  return sol;
}

CacheSolution random_caching(const CacheConfig& cache, std::mt19937_64& rng) {
  check(cache);
  const int n = cache.n_files;
  const RVec c = zipf_popularity(n, cache.skew);
  // Weighted sampling without replacement: sort by log(u) / c_v, descending.
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<std::pair<double, int>> keys;
  keys.reserve(static_cast<std::size_t>(n));
  for (int v = 0; v < n; ++v) {
    double u = unif(rng);
    while (u <= 0.0) u = unif(rng);
    keys.emplace_back(c(v) > 0.0 ? std::log(u) / c(v) : -HUGE_VAL, v);
  }
  std::stable_sort(keys.begin(), keys.end(), [](const auto& a, const auto& b) { return a.first > b.first; });

  CacheSolution sol;
  sol.e = RVec::Zero(n);
  double room = cache.capacity;
  for (const auto& [key, v] : keys) {
    const double q = entry(cache.lengths, v);
    if (q <= room) {
      sol.e(v) = 1.0;
      room -= q;
    }
  }
  sol.objective = uncached_mass(sol.e, c);
  return sol;
}

}  // namespace fdiscc
