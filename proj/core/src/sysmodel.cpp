#include "fdiscc/sysmodel.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fdiscc/cacheopt.hpp"

namespace fdiscc {

namespace {

void check_solution(const Scenario& sc, const Solution& sol) {
  const int k = sc.n_cm();
  const int l = sc.n_cp();
  if (static_cast<int>(sol.w.size()) != k + 1) throw InvalidArgument("solution: expected K + 1 transmit beams");
  if (static_cast<int>(sol.u.size()) != l) throw InvalidArgument("solution: expected L receive combiners");
  if (sol.p.size() != l || sol.f.size() != l) throw InvalidArgument("solution: p and f must have L entries");
  if (sol.phi.size() != sc.ch.m_passive()) throw InvalidArgument("solution: phi must have M entries");
}

std::string num(double v) {
  std::ostringstream s;
  s.precision(17);
  s << v;
  return s.str();
}

}  // namespace

Composite composite_channels(const ChannelSet& ch, const CVec& phi, double cci_factor) {
  if (phi.size() != ch.m_passive()) throw InvalidArgument("composite_channels: phi size mismatch");
  Composite c;
  c.h.reserve(ch.h_pu.size());
  for (const auto& h : ch.h_pu) {
    const CVec a = h.conjugate().cwiseProduct(phi);
    c.h.push_back(a.transpose() * ch.g_t);
  }
  c.ebar = CMat::Zero(ch.n_cp(), ch.n_cm());
  for (int l = 0; l < ch.n_cp(); ++l) {
    const CVec pg = phi.cwiseProduct(ch.g_pu[l]);
    for (int k = 0; k < ch.n_cm(); ++k) {
      c.ebar(l, k) = cci_factor * (ch.e_direct(l, k) + ch.h_pu[k].dot(pg));
    }
    c.g.push_back(ch.g_r.adjoint() * pg);
  }
  return c;
}

double radar_echo_power(const ChannelSet& ch, const CVec& phi, const std::vector<CVec>& w) {
  double total = 0.0;
  for (const auto& wk : w) {
    const CVec reflected = phi.cwiseProduct(ch.g_t * wk);
    total += (ch.g_s * reflected).squaredNorm();
  }
  return total;
}

double self_interference_power(const ChannelSet& ch, const CVec& u, const std::vector<CVec>& w) {
  double total = 0.0;
  for (const auto& wk : w) total += std::norm(u.dot(ch.h_si * wk));
  return total;
}

double downlink_sinr(const Scenario& sc, const Solution& sol, int k) {
  check_solution(sc, sol);
  if (k < 0 || k >= sc.n_cm()) throw InvalidArgument("downlink_sinr: user index out of range");
  const Composite comp = composite_channels(sc.ch, sol.phi, sc.cci_factor());
  const CRow& h = comp.h[k];
  double signal = 0.0;
  double interference = sc.cfg.noise_ue_watt;
  for (std::size_t j = 0; j < sol.w.size(); ++j) {
    const double pw = std::norm((h * sol.w[j])(0));
    if (static_cast<int>(j) == k + 1) {
      signal = pw;
    } else {
      interference += pw;
    }
  }
  for (int l = 0; l < sc.n_cp(); ++l) interference += sol.p(l) * std::norm(comp.ebar(l, k));
  return signal / interference;
}

double radar_sinr(const Scenario& sc, const Solution& sol) {
  check_solution(sc, sol);
  double denom = sc.cfg.noise_irs_watt;
  for (int l = 0; l < sc.n_cp(); ++l) denom += sol.p(l) * sc.ch.g_au[l].squaredNorm();
  return radar_echo_power(sc.ch, sol.phi, sol.w) / denom;
}

double offload_sinr(const Scenario& sc, const Solution& sol, int l) {
  check_solution(sc, sol);
  if (l < 0 || l >= sc.n_cp()) throw InvalidArgument("offload_sinr: user index out of range");
  const Composite comp = composite_channels(sc.ch, sol.phi, sc.cci_factor());
  const CVec& u = sol.u[l];
  const double signal = sol.p(l) * std::norm(u.dot(comp.g[l]));
  if (signal == 0.0) return 0.0;
  double interference = u.squaredNorm() * sc.cfg.noise_bs_watt;
  for (int j = 0; j < sc.n_cp(); ++j) {
    if (j != l) interference += sol.p(j) * std::norm(u.dot(comp.g[j]));
  }
  interference += sc.si_factor() * self_interference_power(sc.ch, u, sol.w);
  return signal / interference;
}

LocalCompute local_rate_energy(double f_hz, double eps_cycles_per_bit, double t_s, double zeta) {
  if (!(eps_cycles_per_bit > 0.0)) throw InvalidArgument("local_rate_energy: eps must be > 0");
  return {f_hz / eps_cycles_per_bit, t_s * zeta * f_hz * f_hz * f_hz};
}

double backhaul_cost(const RVec& e, const CacheConfig& cache, double t_s) {
  if (e.size() != cache.n_files) throw InvalidArgument("backhaul_cost: placement size mismatch");
  const RVec c = zipf_popularity(cache.n_files, cache.skew);
  double rate_sum = 0.0;
  for (double r : cache.backhaul_rate) rate_sum += r;
  double priced = 0.0;
  for (int v = 0; v < cache.n_files; ++v) {
    const double price = cache.backhaul_price.size() == 1 ? cache.backhaul_price[0] : cache.backhaul_price[v];
    priced += price * (1.0 - e(v)) * c(v);
  }
  return t_s * priced * rate_sum;
}

Metrics evaluate(const Scenario& sc, const Solution& sol) {
  check_solution(sc, sol);
  const auto& cfg = sc.cfg;
  const double wt = sc.throughput_weight();
  const double b = cfg.bandwidth_hz;
  const double t = cfg.coherence_time_s;
  Metrics m;
  double per_second = 0.0;
  for (int k = 0; k < sc.n_cm(); ++k) {
    const double r = downlink_sinr(sc, sol, k);
    m.r_com.push_back(r);
    m.rate_com.push_back(wt * b * std::log2(1.0 + r));
    per_second += m.rate_com.back();
  }
  for (int l = 0; l < sc.n_cp(); ++l) {
    const double r = offload_sinr(sc, sol, l);
    m.r_off.push_back(r);
    m.rate_off.push_back(wt * b * std::log2(1.0 + r));
    const auto loc = local_rate_energy(sol.f(l), cfg.eps_cycles_per_bit[l], t, cfg.zeta);
    m.rate_loc.push_back(loc.rate);
    m.energy_loc.push_back(loc.energy);
    per_second += m.rate_off.back() + loc.rate;
  }
  m.r_tar = radar_sinr(sc, sol);
  m.sum_bits = t * per_second;
  m.d_total = sol.e.size() == cfg.cache.n_files ? backhaul_cost(sol.e, cfg.cache, t)
                                                 : backhaul_cost(RVec::Zero(cfg.cache.n_files), cfg.cache, t);
  m.utility = m.sum_bits - m.d_total;
  return m;
}

double normalized_objective(const Scenario& sc, const Solution& sol) {
  check_solution(sc, sol);
  const double wt = sc.throughput_weight();
  double total = 0.0;
  for (int k = 0; k < sc.n_cm(); ++k) total += wt * std::log2(1.0 + downlink_sinr(sc, sol, k));
  for (int l = 0; l < sc.n_cp(); ++l) {
    total += wt * std::log2(1.0 + offload_sinr(sc, sol, l));
    total += sol.f(l) / (sc.cfg.eps_cycles_per_bit[l] * sc.cfg.bandwidth_hz);
  }
  return total;
}

Residuals constraint_residuals(const Scenario& sc, const Solution& sol) {
  check_solution(sc, sol);
  const auto& cfg = sc.cfg;
  Residuals r;
  double power = 0.0;
  for (const auto& w : sol.w) power += w.squaredNorm();
  r.power = std::max(0.0, power / cfg.p_bs_watt - 1.0);
  r.radar = std::max(0.0, 1.0 - radar_sinr(sc, sol) / cfg.gamma_tar_linear);
  for (Eigen::Index m = 0; m < sol.phi.size(); ++m) {
    r.unit_modulus = std::max(r.unit_modulus, std::abs(1.0 - std::abs(sol.phi(m))));
  }
  for (int l = 0; l < sc.n_cp(); ++l) {
    const double used = cfg.coherence_time_s * (sol.p(l) + cfg.zeta * std::pow(sol.f(l), 3));
    r.energy = std::max({r.energy, used - cfg.e_max_joule[l], -sol.p(l), -sol.f(l)});
  }
  if (sol.e.size() == cfg.cache.n_files) {
    double stored = 0.0;
    double bounds = 0.0;
    for (int v = 0; v < cfg.cache.n_files; ++v) {
      const double q = cfg.cache.lengths.size() == 1 ? cfg.cache.lengths[0] : cfg.cache.lengths[v];
      stored += q * sol.e(v);
      bounds = std::max({bounds, -sol.e(v), sol.e(v) - 1.0});
    }
    r.cache = std::max(bounds, (stored - cfg.cache.capacity) / std::max(cfg.cache.capacity, 1.0));
  }
  return r;
}

std::vector<std::string> metrics_csv_header(int n_cm, int n_cp) {
  std::vector<std::string> h;
  for (int k = 0; k < n_cm; ++k) h.push_back("r_com_" + std::to_string(k));
  for (int k = 0; k < n_cm; ++k) h.push_back("rate_com_" + std::to_string(k));
  for (int l = 0; l < n_cp; ++l) h.push_back("r_off_" + std::to_string(l));
  for (int l = 0; l < n_cp; ++l) h.push_back("rate_off_" + std::to_string(l));
  h.push_back("r_tar");
  for (int l = 0; l < n_cp; ++l) h.push_back("rate_loc_" + std::to_string(l));
  for (int l = 0; l < n_cp; ++l) h.push_back("energy_loc_" + std::to_string(l));
  h.insert(h.end(), {"sum_bits", "d_total", "utility"});
  return h;
}

std::vector<std::string> metrics_csv_row(const Metrics& m) {
  std::vector<std::string> row;
  for (double v : m.r_com) row.push_back(num(v));
  for (double v : m.rate_com) row.push_back(num(v));
  for (double v : m.r_off) row.push_back(num(v));
  for (double v : m.rate_off) row.push_back(num(v));
  row.push_back(num(m.r_tar));
  for (double v : m.rate_loc) row.push_back(num(v));
  for (double v : m.energy_loc) row.push_back(num(v));
  row.push_back(num(m.sum_bits));
  row.push_back(num(m.d_total));
  row.push_back(num(m.utility));
  return row;
}

}  // namespace fdiscc
