#include <doctest.h>

#include "fdiscc/wmmse.hpp"
#include "oracles.hpp"

using namespace fdiscc;
using namespace fdiscc::test;

namespace {

AuxVars perturb(const AuxVars& a, double scale, std::mt19937_64& rng) {
  AuxVars b = a;
  for (int k = 0; k < b.alpha1.size(); ++k) {
    b.alpha1(k) = std::max(0.0, b.alpha1(k) * (1.0 + scale * uniform(-1.0, 1.0, rng)));
    b.beta1[k] *= cd(1.0, 0.0) + scale * cn(rng);
  }
  for (int l = 0; l < b.alpha2.size(); ++l) {
    b.alpha2(l) = std::max(0.0, b.alpha2(l) * (1.0 + scale * uniform(-1.0, 1.0, rng)));
    b.beta2[l] *= cd(1.0, 0.0) + scale * cn(rng);
  }
  return b;
}

}  // namespace

TEST_SUITE("wmmse") {

TEST_CASE("closed-form auxiliaries beat a 1000-point grid") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const Scenario sc = scenario(seed);
    std::mt19937_64 rng(seed);
    CHECK(aux_grid_excess(sc, random_solution(sc, rng)) <= 1e-12);
  }
}

TEST_CASE("surrogate is tight at the closed-form auxiliaries") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    for (Duplex d : {Duplex::full, Duplex::half}) {
      const Scenario sc = scenario(seed, default_config(), d);
      std::mt19937_64 rng(seed);
      const Solution sol = random_solution(sc, rng);
      const AuxVars aux = update_aux(sc, sol);
      for (int k = 0; k < sc.n_cm(); ++k) {
        const double exact = std::log2(1.0 + downlink_sinr(sc, sol, k));
        CHECK(std::abs(surrogate_com(sc, sol, aux, k) - exact) <= 1e-9 * std::max(1.0, exact));
      }
      for (int l = 0; l < sc.n_cp(); ++l) {
        const double exact = std::log2(1.0 + offload_sinr(sc, sol, l));
        CHECK(std::abs(surrogate_off(sc, sol, aux, l) - exact) <= 1e-9 * std::max(1.0, exact));
      }
    }
  }
}

TEST_CASE("surrogate is a lower bound for perturbed auxiliaries") {
  const Scenario sc = scenario(4);
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 1000; ++trial) {
    const Solution sol = random_solution(sc, rng);
    const AuxVars aux = perturb(update_aux(sc, sol), uniform(0.0, 1.0, rng), rng);
    for (int k = 0; k < sc.n_cm(); ++k) {
      const double exact = std::log1p(downlink_sinr(sc, sol, k));
      CHECK(surrogate_com_nats(sc, sol, aux, k) <= exact * (1.0 + 1e-12) + 1e-14);
    }
    for (int l = 0; l < sc.n_cp(); ++l) {
      const double exact = std::log1p(offload_sinr(sc, sol, l));
      CHECK(surrogate_off_nats(sc, sol, aux, l) <= exact * (1.0 + 1e-12) + 1e-14);
    }
  }
}

TEST_CASE("surrogate objective adds compute and applies the duplex weight") {
  for (Duplex d : {Duplex::full, Duplex::half}) {
    const Scenario sc = scenario(6, default_config(), d);
    std::mt19937_64 rng(2);
    const Solution sol = random_solution(sc, rng);
    const AuxVars aux = update_aux(sc, sol);
    CHECK(surrogate_objective(sc, sol, aux) == doctest::Approx(normalized_objective(sc, sol)).epsilon(1e-10));
  }
}

TEST_CASE("zero beams and zero uplink power") {
  const Scenario sc = scenario(8);
  std::mt19937_64 rng(3);
  Solution sol = random_solution(sc, rng);
  for (auto& w : sol.w) w.setZero();
  sol.p.setZero();
  const AuxVars aux = update_aux(sc, sol);
  for (int k = 0; k < sc.n_cm(); ++k) {
    CHECK(aux.alpha1(k) == 0.0);
    CHECK(aux.beta1[k] == cd{});
    CHECK(surrogate_com(sc, sol, aux, k) == 0.0);
  }
  for (int l = 0; l < sc.n_cp(); ++l) {
    CHECK(aux.alpha2(l) == 0.0);
    CHECK(std::isfinite(std::abs(aux.beta2[l])));
    CHECK(surrogate_off(sc, sol, aux, l) == doctest::Approx(0.0));
  }
}

}
