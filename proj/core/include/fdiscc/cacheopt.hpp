#pragma once

#include <random>
#include <vector>

#include "fdiscc/config.hpp"
#include "fdiscc/types.hpp"

namespace fdiscc {

/// Zipf request probabilities c_v = v^-skew / sum_i i^-skew, v = 1..n_files.
RVec zipf_popularity(int n_files, double skew);

struct CacheSolution {
  RVec e;                   // placement in [0, 1]
  double objective = 0.0;   // sum_v (1 - e_v) c_v, the uncached request mass
  double dual_price = 0.0;  // capacity multiplier; certifies optimality
};

/// Exact LP solution of the placement problem (fractional knapsack):
/// fill by decreasing c_v / q_v, ties broken by smaller index.
CacheSolution solve_caching(const CacheConfig& cache);

/// Popularity-proportional random placement: files are drawn without
/// replacement with probability proportional to c_v and cached whole while
/// they fit.
CacheSolution random_caching(const CacheConfig& cache, std::mt19937_64& rng);

/// Objective sum_v (1 - e_v) c_v for an arbitrary placement.
double uncached_mass(const RVec& e, const RVec& popularity);

}  // namespace fdiscc
