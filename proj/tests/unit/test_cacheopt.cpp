#include <doctest.h>

#include <numeric>

#include "fdiscc/cacheopt.hpp"
#include "oracles.hpp"

using namespace fdiscc;
using namespace fdiscc::test;

TEST_SUITE("cacheopt") {

TEST_CASE("Zipf popularity") {
  const RVec u = zipf_popularity(2, 0.0);
  CHECK(u(0) == doctest::Approx(0.5));
  CHECK(u(1) == doctest::Approx(0.5));
  CHECK(zipf_popularity(1, 2.3)(0) == doctest::Approx(1.0));
  const RVec z = zipf_popularity(3, 1.0);
  CHECK(z(0) == doctest::Approx(6.0 / 11.0).epsilon(1e-14));
  CHECK(z(1) == doctest::Approx(3.0 / 11.0).epsilon(1e-14));
  CHECK(z(2) == doctest::Approx(2.0 / 11.0).epsilon(1e-14));
  const RVec big = zipf_popularity(1000, 1.4);
  CHECK(big.sum() == doctest::Approx(1.0).epsilon(1e-12));
  for (int v = 1; v < 1000; ++v) CHECK(big(v) <= big(v - 1));
  CHECK_THROWS_AS(zipf_popularity(0, 1.0), InvalidArgument);
  CHECK_THROWS_AS(zipf_popularity(3, -1.0), InvalidArgument);
}

TEST_CASE("hand-solved placements") {
  CacheConfig c;
  c.n_files = 3;
  c.skew = 1.0;
  c.lengths = {2.0, 2.0, 2.0};
  c.capacity = 3.0;
  const CacheSolution s = solve_caching(c);
  CHECK(s.e(0) == doctest::Approx(1.0));
  CHECK(s.e(1) == doctest::Approx(0.5));
  CHECK(s.e(2) == doctest::Approx(0.0));
  CHECK(s.objective == doctest::Approx(3.5 / 11.0).epsilon(1e-14));

  c.capacity = 100.0;
  const CacheSolution all = solve_caching(c);
  CHECK(all.e.minCoeff() == 1.0);
  CHECK(all.objective == doctest::Approx(0.0));

  c.capacity = 0.0;
  const CacheSolution none = solve_caching(c);
  CHECK(none.e.maxCoeff() == 0.0);
  CHECK(none.objective == doctest::Approx(1.0));
}

TEST_CASE("reference instance caches the ten most popular files") {
  const SystemConfig cfg = default_config();
  CHECK(cfg.cache.n_files == 1000);
  CHECK(cfg.cache.capacity == 1e6);
  CHECK(cfg.cache.lengths[0] == 1e5);
  const CacheSolution s = solve_caching(cfg.cache);
  for (int v = 0; v < 1000; ++v) CHECK(s.e(v) == (v < 10 ? 1.0 : 0.0));
}

TEST_CASE("greedy matches the LP vertex enumeration") {
  std::mt19937_64 rng(2024);
  int exact = 0;
  for (int inst = 0; inst < 100; ++inst) {
    CacheConfig c;
    c.n_files = inst < 5 ? 20 : 1 + static_cast<int>(rng() % 16);
    c.skew = uniform(0.0, 2.0, rng);
    c.lengths.clear();
    for (int v = 0; v < c.n_files; ++v) c.lengths.push_back(uniform(0.5, 5.0, rng));
    const double total = std::accumulate(c.lengths.begin(), c.lengths.end(), 0.0);
    c.capacity = uniform(0.0, 1.1 * total, rng);
    const CacheSolution s = solve_caching(c);
    const Vertex o = vertex_oracle(zipf_popularity(c.n_files, c.skew), c.lengths, c.capacity);
    const bool same = std::abs(s.objective - o.objective) <= 1e-12 && (s.e - o.e).lpNorm<Eigen::Infinity>() <= 1e-9;
    CHECK_MESSAGE(same, "instance " << inst);
    exact += same;
    double stored = 0.0;
    int fractional = 0;
    for (int v = 0; v < c.n_files; ++v) {
      stored += c.lengths[v] * s.e(v);
      fractional += s.e(v) > 0.0 && s.e(v) < 1.0;
    }
    CHECK(stored <= c.capacity * (1.0 + 1e-12));
    CHECK(fractional <= 1);
  }
  CHECK(exact == 100);
}

TEST_CASE("dual price certifies optimality") {
  std::mt19937_64 rng(5);
  for (int inst = 0; inst < 20; ++inst) {
    CacheConfig c;
    c.n_files = 12;
    c.skew = uniform(0.5, 1.5, rng);
    c.lengths.clear();
    for (int v = 0; v < c.n_files; ++v) c.lengths.push_back(uniform(1.0, 3.0, rng));
    c.capacity = 8.0;
    const CacheSolution s = solve_caching(c);
    const RVec pop = zipf_popularity(c.n_files, c.skew);
    // Lagrangian bound: min over the box of sum (1 - e) c + price (q e - F).
    double bound = -s.dual_price * c.capacity;
    for (int v = 0; v < c.n_files; ++v) bound += pop(v) - std::max(0.0, pop(v) - s.dual_price * c.lengths[v]);
    CHECK(s.objective == doctest::Approx(bound).epsilon(1e-12));
  }
}

TEST_CASE("objective is nonincreasing in capacity") {
  CacheConfig c;
  c.n_files = 50;
  c.skew = 1.1;
  c.lengths = {1.0};
  double prev = HUGE_VAL;
  for (double cap = 0.0; cap <= 60.0; cap += 0.7) {
    c.capacity = cap;
    const double obj = solve_caching(c).objective;
    CHECK(obj <= prev + 1e-15);
    prev = obj;
  }
}

TEST_CASE("random placement is whole-file, feasible and seeded") {
  CacheConfig c = default_config().cache;
  std::mt19937_64 a(3);
  std::mt19937_64 b(3);
  const CacheSolution x = random_caching(c, a);
  const CacheSolution y = random_caching(c, b);
  CHECK((x.e - y.e).norm() == 0.0);
  double stored = 0.0;
  for (int v = 0; v < c.n_files; ++v) {
    CHECK((x.e(v) == 0.0 || x.e(v) == 1.0));
    stored += c.lengths[v] * x.e(v);
  }
  CHECK(stored <= c.capacity);
  CHECK(x.e.sum() == 10.0);
  CHECK(x.objective >= solve_caching(c).objective);
  CHECK(x.objective == doctest::Approx(uncached_mass(x.e, zipf_popularity(c.n_files, c.skew))));
}

TEST_CASE("random placement favours popular files") {
  CacheConfig c = default_config().cache;
  std::mt19937_64 rng(17);
  int top = 0;
  int tail = 0;
  for (int i = 0; i < 300; ++i) {
    const RVec e = random_caching(c, rng).e;
    top += static_cast<int>(e(0));
    tail += static_cast<int>(e(999));
  }
  CHECK(top > 250);
  CHECK(tail < 10);
}

}
