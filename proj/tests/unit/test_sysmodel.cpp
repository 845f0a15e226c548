#include <doctest.h>

#include "fdiscc/cacheopt.hpp"
#include "fdiscc/sysmodel.hpp"
#include "support.hpp"

using namespace fdiscc;
using namespace fdiscc::test;

namespace {

// Naive entrywise evaluation of the composite channels from raw links.
cd naive_h(const ChannelSet& ch, const CVec& phi, int k, int t) {
  cd v = 0.0;
  for (int m = 0; m < ch.m_passive(); ++m) v += std::conj(ch.h_pu[k](m)) * phi(m) * ch.g_t(m, t);
  return v;
}

cd naive_ebar(const ChannelSet& ch, const CVec& phi, int l, int k) {
  cd v = ch.e_direct(l, k);
  for (int m = 0; m < ch.m_passive(); ++m) v += std::conj(ch.h_pu[k](m)) * phi(m) * ch.g_pu[l](m);
  return v;
}

cd naive_g(const ChannelSet& ch, const CVec& phi, int l, int r) {
  cd v = 0.0;
  for (int m = 0; m < ch.m_passive(); ++m) v += std::conj(ch.g_r(m, r)) * phi(m) * ch.g_pu[l](m);
  return v;
}

double naive_downlink_sinr(const Scenario& sc, const Solution& s, int k) {
  const ChannelSet& ch = sc.ch;
  auto gain = [&](const CVec& w) {
    cd v = 0.0;
    for (int t = 0; t < ch.n_tx(); ++t) v += naive_h(ch, s.phi, k, t) * w(t);
    return std::norm(v);
  };
  double den = sc.cfg.noise_ue_watt;
  for (std::size_t j = 0; j < s.w.size(); ++j) {
    if (static_cast<int>(j) != k + 1) den += gain(s.w[j]);
  }
  for (int l = 0; l < sc.n_cp(); ++l) den += sc.cci_factor() * sc.cci_factor() * s.p(l) * std::norm(naive_ebar(ch, s.phi, l, k));
  return gain(s.w[k + 1]) / den;
}

double naive_offload_sinr(const Scenario& sc, const Solution& s, int l) {
  const ChannelSet& ch = sc.ch;
  auto gain = [&](int j) {
    cd v = 0.0;
    for (int r = 0; r < ch.n_rx(); ++r) v += std::conj(s.u[l](r)) * naive_g(ch, s.phi, j, r);
    return std::norm(v);
  };
  double den = s.u[l].squaredNorm() * sc.cfg.noise_bs_watt;
  for (int j = 0; j < sc.n_cp(); ++j) {
    if (j != l) den += s.p(j) * gain(j);
  }
  for (const auto& w : s.w) den += sc.si_factor() * std::norm((s.u[l].adjoint() * ch.h_si * w)(0));
  return s.p(l) * gain(l) / den;
}

double naive_radar_sinr(const Scenario& sc, const Solution& s) {
  const ChannelSet& ch = sc.ch;
  double echo = 0.0;
  for (const auto& w : s.w) {
    CVec at_irs = CVec::Zero(ch.m_passive());
    for (int m = 0; m < ch.m_passive(); ++m)
      for (int t = 0; t < ch.n_tx(); ++t) at_irs(m) += s.phi(m) * ch.g_t(m, t) * w(t);
    const cd toward_target = ch.a_passive.dot(at_irs);
    echo += std::norm(ch.eta_rt * toward_target) * ch.a_active.squaredNorm();
  }
  double den = sc.cfg.noise_irs_watt;
  for (int l = 0; l < sc.n_cp(); ++l) den += s.p(l) * sc.ch.g_au[l].squaredNorm();
  return echo / den;
}

}  // namespace

TEST_SUITE("sysmodel") {

TEST_CASE("composite channels match the naive triple product") {
  const Scenario sc = scenario(3);
  std::mt19937_64 rng(1);
  const CVec phi = unit_modulus(sc.ch.m_passive(), rng);
  const Composite c = composite_channels(sc.ch, phi);
  for (int k = 0; k < sc.n_cm(); ++k)
    for (int t = 0; t < sc.ch.n_tx(); ++t) CHECK(std::abs(c.h[k](t) - naive_h(sc.ch, phi, k, t)) < 1e-12 * std::abs(c.h[k](t)) + 1e-300);
  for (int l = 0; l < sc.n_cp(); ++l) {
    for (int k = 0; k < sc.n_cm(); ++k) CHECK(std::abs(c.ebar(l, k) - naive_ebar(sc.ch, phi, l, k)) <= 1e-12 * std::abs(c.ebar(l, k)));
    for (int r = 0; r < sc.ch.n_rx(); ++r) CHECK(std::abs(c.g[l](r) - naive_g(sc.ch, phi, l, r)) <= 1e-12 * std::abs(c.g[l](r)));
  }
  CHECK_THROWS_AS(composite_channels(sc.ch, CVec::Ones(3)), InvalidArgument);
}

TEST_CASE("SINRs match brute-force evaluation") {
  std::mt19937_64 rng(2);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    for (Duplex d : {Duplex::full, Duplex::half}) {
      const Scenario sc = scenario(seed, default_config(), d);
      const Solution s = random_solution(sc, rng);
      for (int k = 0; k < sc.n_cm(); ++k) CHECK(rel_diff(downlink_sinr(sc, s, k), naive_downlink_sinr(sc, s, k)) < 1e-10);
      for (int l = 0; l < sc.n_cp(); ++l) CHECK(rel_diff(offload_sinr(sc, s, l), naive_offload_sinr(sc, s, l)) < 1e-10);
      CHECK(rel_diff(radar_sinr(sc, s), naive_radar_sinr(sc, s)) < 1e-10);
    }
  }
}

TEST_CASE("downlink and radar SINR agree with a symbol-level simulation") {
  const Scenario sc = scenario(9);
  std::mt19937_64 rng(3);
  const Solution s = random_solution(sc, rng);
  const Composite c = composite_channels(sc.ch, s.phi);
  const int n = 1000000;
  const int k = 0;
  double sig = 0.0;
  double rest = 0.0;
  double echo = 0.0;
  double intf = 0.0;
  std::vector<cd> h_w;
  for (const auto& w : s.w) h_w.push_back((c.h[k] * w)(0));
  const CMat gsg = sc.ch.g_s * s.phi.asDiagonal() * sc.ch.g_t;
  std::vector<CVec> echo_dirs;
  for (const auto& w : s.w) echo_dirs.push_back(gsg * w);
  for (int i = 0; i < n; ++i) {
    cd desired = 0.0;
    cd other = std::sqrt(sc.cfg.noise_ue_watt) * cn(rng);
    CVec e = CVec::Zero(sc.ch.m_active());
    for (std::size_t j = 0; j < s.w.size(); ++j) {
      const cd x = cn(rng);
      if (static_cast<int>(j) == k + 1) {
        desired = h_w[j] * x;
      } else {
        other += h_w[j] * x;
      }
      e += echo_dirs[j] * x;
    }
    cd ul = std::sqrt(sc.cfg.noise_irs_watt) * cn(rng);
    for (int l = 0; l < sc.n_cp(); ++l) {
      const cd sl = cn(rng);
      other += c.ebar(l, k) * std::sqrt(s.p(l)) * sl;
      ul += std::sqrt(s.p(l) * sc.ch.g_au[l].squaredNorm()) * sl;
    }
    sig += std::norm(desired);
    rest += std::norm(other);
    echo += e.squaredNorm();
    intf += std::norm(ul);
  }
  CHECK(rel_diff(sig / rest, downlink_sinr(sc, s, k)) < 0.01);
  CHECK(rel_diff(echo / intf, radar_sinr(sc, s)) < 0.01);
}

TEST_CASE("degenerate SINR cases") {
  SystemConfig cfg = default_config();
  cfg.n_cm = 1;
  cfg.n_cp = 0;
  const Scenario sc = scenario(4, cfg);
  std::mt19937_64 rng(4);
  Solution s = random_solution(sc, rng);
  s.w[0].setZero();
  const cd hw = (composite_channels(sc.ch, s.phi).h[0] * s.w[1])(0);
  CHECK(downlink_sinr(sc, s, 0) == doctest::Approx(std::norm(hw) / cfg.noise_ue_watt).epsilon(1e-12));
  s.w[1].setZero();
  CHECK(downlink_sinr(sc, s, 0) == 0.0);

  const CVec echo = sc.ch.g_s * s.phi.asDiagonal() * sc.ch.g_t * s.w[0];
  s.w[0] = CVec::Ones(sc.ch.n_tx());
  const CVec e0 = sc.ch.g_s * s.phi.asDiagonal() * sc.ch.g_t * s.w[0];
  CHECK(radar_sinr(sc, s) == doctest::Approx(e0.squaredNorm() / cfg.noise_irs_watt).epsilon(1e-12));
  CHECK(echo.squaredNorm() == 0.0);

  SystemConfig one = default_config();
  one.n_cp = 1;
  const Scenario s1 = scenario(5, one);
  Solution t = random_solution(s1, rng);
  for (auto& w : t.w) w.setZero();
  const cd ug = t.u[0].dot(composite_channels(s1.ch, t.phi).g[0]);
  CHECK(offload_sinr(s1, t, 0) ==
        doctest::Approx(t.p(0) * std::norm(ug) / (t.u[0].squaredNorm() * one.noise_bs_watt)).epsilon(1e-12));
  const CVec g = composite_channels(s1.ch, t.phi).g[0];
  CVec orth = cn_vec(s1.ch.n_rx(), rng);
  orth -= g * (g.dot(orth) / g.squaredNorm());
  t.u[0] = orth;
  CHECK(offload_sinr(s1, t, 0) < 1e-20);
}

TEST_CASE("SINRs are invariant to a common beam rotation") {
  const Scenario sc = scenario(6);
  std::mt19937_64 rng(6);
  const Solution s = random_solution(sc, rng);
  Solution r = s;
  for (auto& w : r.w) w *= std::polar(1.0, 1.234);
  for (int k = 0; k < sc.n_cm(); ++k) CHECK(rel_diff(downlink_sinr(sc, s, k), downlink_sinr(sc, r, k)) < 1e-12);
  for (int l = 0; l < sc.n_cp(); ++l) CHECK(rel_diff(offload_sinr(sc, s, l), offload_sinr(sc, r, l)) < 1e-12);
  CHECK(rel_diff(radar_sinr(sc, s), radar_sinr(sc, r)) < 1e-12);
}

TEST_CASE("local computation") {
  const auto zero = local_rate_energy(0.0, 1000.0, 1.0, 1e-26);
  CHECK(zero.rate == 0.0);
  CHECK(zero.energy == 0.0);
  const auto big = local_rate_energy(1e9, 1000.0, 1.0, 1e-26);
  CHECK(big.rate == doctest::Approx(1e6));
  CHECK(big.energy == doctest::Approx(10.0));
  CHECK(local_rate_energy(737.0, 737.0, 1.0, 1e-26).rate == doctest::Approx(1.0));
  CHECK_THROWS_AS(local_rate_energy(1.0, 0.0, 1.0, 1e-26), InvalidArgument);
}

TEST_CASE("backhaul cost") {
  CacheConfig c;
  c.n_files = 3;
  c.skew = 1.0;
  c.lengths = {1.0};
  c.backhaul_price = {1.0};
  c.backhaul_rate = {1e8, 5e7};
  CHECK(backhaul_cost(RVec::Ones(3), c, 1.0) == 0.0);
  const RVec e = (RVec(3) << 1.0, 0.0, 0.0).finished();
  CHECK(backhaul_cost(e, c, 1.0) == doctest::Approx(5.0 / 11.0 * 1.5e8).epsilon(1e-12));
  CHECK(backhaul_cost(e, c, 2.0) == doctest::Approx(2.0 * 5.0 / 11.0 * 1.5e8).epsilon(1e-12));

  CacheConfig single;
  single.n_files = 1;
  single.backhaul_rate = {7e7};
  CHECK(backhaul_cost(RVec::Zero(1), single, 1.0) == doctest::Approx(7e7));
  CHECK_THROWS_AS(backhaul_cost(RVec::Zero(2), single, 1.0), InvalidArgument);
}

TEST_CASE("utility is the sum of its reported parts") {
  std::mt19937_64 rng(8);
  for (Duplex d : {Duplex::full, Duplex::half}) {
    const Scenario sc = scenario(8, default_config(), d);
    Solution s = random_solution(sc, rng);
    s.e = solve_caching(sc.cfg.cache).e;
    const Metrics m = evaluate(sc, s);
    const double wt = sc.throughput_weight();
    double bits = 0.0;
    for (int k = 0; k < sc.n_cm(); ++k) {
      CHECK(m.rate_com[k] == doctest::Approx(wt * sc.cfg.bandwidth_hz * std::log2(1.0 + m.r_com[k])));
      bits += m.rate_com[k];
    }
    for (int l = 0; l < sc.n_cp(); ++l) bits += m.rate_off[l] + m.rate_loc[l];
    bits *= sc.cfg.coherence_time_s;
    CHECK(m.sum_bits == doctest::Approx(bits).epsilon(1e-12));
    CHECK(m.d_total == doctest::Approx(backhaul_cost(s.e, sc.cfg.cache, sc.cfg.coherence_time_s)).epsilon(1e-12));
    CHECK(m.utility == doctest::Approx(m.sum_bits - m.d_total).epsilon(1e-12));
    CHECK(normalized_objective(sc, s) ==
          doctest::Approx(m.sum_bits / (sc.cfg.coherence_time_s * sc.cfg.bandwidth_hz)).epsilon(1e-12));
  }
}

TEST_CASE("all-zero decisions with full caching have zero utility") {
  SystemConfig cfg = default_config();
  cfg.cache.capacity = 1e9;
  const Scenario sc = scenario(2, cfg);
  Solution s;
  s.w.assign(sc.n_cm() + 1, CVec::Zero(sc.ch.n_tx()));
  s.u.assign(sc.n_cp(), CVec::Ones(sc.ch.n_rx()));
  s.phi = CVec::Ones(sc.ch.m_passive());
  s.p = RVec::Zero(sc.n_cp());
  s.f = RVec::Zero(sc.n_cp());
  s.e = RVec::Ones(cfg.cache.n_files);
  CHECK(evaluate(sc, s).utility == 0.0);
}

TEST_CASE("half duplex removes interference and halves rates") {
  std::mt19937_64 rng(10);
  const Scenario fd = scenario(10);
  const Scenario hd = scenario(10, default_config(), Duplex::half);
  const Solution s = random_solution(fd, rng);
  const Metrics mh = evaluate(hd, s);
  const Composite c = composite_channels(hd.ch, s.phi);
  for (int k = 0; k < hd.n_cm(); ++k) {
    double den = hd.cfg.noise_ue_watt;
    for (std::size_t j = 0; j < s.w.size(); ++j) {
      if (static_cast<int>(j) != k + 1) den += std::norm((c.h[k] * s.w[j])(0));
    }
    const double r = std::norm((c.h[k] * s.w[k + 1])(0)) / den;
    CHECK(mh.r_com[k] == doctest::Approx(r).epsilon(1e-12));
    CHECK(mh.rate_com[k] == doctest::Approx(0.5 * hd.cfg.bandwidth_hz * std::log2(1.0 + r)).epsilon(1e-12));
  }
  CHECK(evaluate(fd, s).r_com[0] < mh.r_com[0]);
}

TEST_CASE("constraint residuals") {
  const Scenario sc = scenario(12);
  std::mt19937_64 rng(12);
  Solution s = random_solution(sc, rng);
  s.e = solve_caching(sc.cfg.cache).e;
  Residuals r = constraint_residuals(sc, s);
  CHECK(r.power < 1e-12);
  CHECK(r.unit_modulus < 1e-12);
  CHECK(r.energy < 1e-12);
  CHECK(r.cache < 1e-12);

  s.w[0] *= 2.0;
  s.phi(3) *= 1.5;
  s.p(0) += 1.0;
  s.e.setOnes();
  r = constraint_residuals(sc, s);
  CHECK(r.power > 0.0);
  CHECK(r.unit_modulus == doctest::Approx(0.5));
  CHECK(r.energy >= 1.0 - 1e-9);
  CHECK(r.cache > 0.0);

  Solution quiet = random_solution(sc, rng);
  for (auto& w : quiet.w) w.setZero();
  CHECK(constraint_residuals(sc, quiet).radar == doctest::Approx(1.0));
}

TEST_CASE("metrics CSV columns line up with values") {
  const Scenario sc = scenario(13);
  std::mt19937_64 rng(13);
  const Solution s = random_solution(sc, rng);
  const Metrics m = evaluate(sc, s);
  CHECK(metrics_csv_header(sc.n_cm(), sc.n_cp()).size() == metrics_csv_row(m).size());
}

}
