#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "fdiscc/channels.hpp"
#include "fdiscc/config.hpp"
#include "fdiscc/sysmodel.hpp"

namespace fdiscc::test {

inline cd cn(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, std::sqrt(0.5));
  const double re = n(rng);
  return {re, n(rng)};
}

inline CVec cn_vec(int n, std::mt19937_64& rng) {
  CVec v(n);
  for (int i = 0; i < n; ++i) v(i) = cn(rng);
  return v;
}

inline CMat cn_mat(int r, int c, std::mt19937_64& rng) {
  CMat m(r, c);
  for (int j = 0; j < c; ++j)
    for (int i = 0; i < r; ++i) m(i, j) = cn(rng);
  return m;
}

inline CMat random_psd(int n, int rank, std::mt19937_64& rng) {
  const CMat a = cn_mat(n, rank, rng);
  return a * a.adjoint();
}

inline CMat random_hermitian(int n, std::mt19937_64& rng) {
  const CMat a = cn_mat(n, n, rng);
  return 0.5 * (a + a.adjoint());
}

inline CVec unit_modulus(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 2.0 * std::numbers::pi);
  CVec v(n);
  for (int i = 0; i < n; ++i) v(i) = std::polar(1.0, u(rng));
  return v;
}

inline double uniform(double lo, double hi, std::mt19937_64& rng) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline Scenario scenario(std::uint64_t seed, SystemConfig cfg = default_config(), Duplex d = Duplex::full) {
  cfg.seed = seed;
  cfg.finalize();
  ChannelSet ch = draw_channels(cfg);
  return Scenario{cfg, ch, d};
}

/// Random feasible point: beams at full power, random combiners and phases,
/// uplink power and CPU frequency sharing the energy budget.
inline Solution random_solution(const Scenario& sc, std::mt19937_64& rng) {
  const auto& cfg = sc.cfg;
  Solution s;
  double total = 0.0;
  for (int k = 0; k <= sc.n_cm(); ++k) {
    s.w.push_back(cn_vec(sc.ch.n_tx(), rng));
    total += s.w.back().squaredNorm();
  }
  for (auto& w : s.w) w *= std::sqrt(cfg.p_bs_watt / total);
  for (int l = 0; l < sc.n_cp(); ++l) s.u.push_back(cn_vec(sc.ch.n_rx(), rng));
  s.phi = unit_modulus(sc.ch.m_passive(), rng);
  s.p = RVec::Zero(sc.n_cp());
  s.f = RVec::Zero(sc.n_cp());
  for (int l = 0; l < sc.n_cp(); ++l) {
    const double share = uniform(0.0, 1.0, rng);
    const double e = cfg.e_max_joule[l];
    s.p(l) = share * e / cfg.coherence_time_s;
    s.f(l) = std::cbrt((1.0 - share) * e / (cfg.coherence_time_s * cfg.zeta));
  }
  s.e = RVec::Zero(cfg.cache.n_files);
  return s;
}

inline double rel_diff(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300}); }

}  // namespace fdiscc::test
