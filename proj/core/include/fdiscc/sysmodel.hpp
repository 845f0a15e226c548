#pragma once

#include <string>
#include <vector>

#include "fdiscc/channels.hpp"
#include "fdiscc/config.hpp"
#include "fdiscc/types.hpp"

namespace fdiscc {

enum class Duplex { full, half };

/// Config + channel realization + duplex mode. In half-duplex the uplink
/// interference seen by CM-UEs and the residual self-interference vanish and
/// both throughput sums are weighted by 1/2 (two equal orthogonal slots).
struct Scenario {
  SystemConfig cfg;
  ChannelSet ch;
  Duplex duplex = Duplex::full;

  double cci_factor() const { return duplex == Duplex::full ? 1.0 : 0.0; }
  double si_factor() const { return duplex == Duplex::full ? 1.0 : 0.0; }
  double throughput_weight() const { return duplex == Duplex::full ? 1.0 : 0.5; }
  int n_cm() const { return ch.n_cm(); }
  int n_cp() const { return ch.n_cp(); }
};

/// Decision variables. w[0] is the dedicated sensing beam and w[k + 1] serves
/// CM-UE k (0-based), so w.size() == K + 1.
struct Solution {
  std::vector<CVec> w;
  std::vector<CVec> u;  // L receive combiners, length N_r
  CVec phi;             // IRS reflection coefficients, Phi = diag(phi)
  RVec f;               // CPU frequency per CP-UE, Hz
  RVec p;               // uplink power per CP-UE, W
  RVec e;               // caching probability per file
};

/// Effective channels for a fixed phase vector.
struct Composite {
  std::vector<CRow> h;  // K rows of length N_t: h_pu[k]^H Phi G_t
  CMat ebar;            // L x K: e_direct(l,k) + h_pu[k]^H Phi g_pu[l] (scaled by cci)
  std::vector<CVec> g;  // L vectors of length N_r: G_r^H Phi g_pu[l]
};

Composite composite_channels(const ChannelSet& ch, const CVec& phi, double cci_factor = 1.0);

/// Downlink SINR of CM-UE k (0-based).
double downlink_sinr(const Scenario& sc, const Solution& sol, int k);
/// Radar SINR at the IRS sensing elements (symbol expectation).
double radar_sinr(const Scenario& sc, const Solution& sol);
/// Offloading SINR of CP-UE l after receive combining.
double offload_sinr(const Scenario& sc, const Solution& sol, int l);

/// Echo power sum_k ||G_s Phi G_t w_k||^2.
double radar_echo_power(const ChannelSet& ch, const CVec& phi, const std::vector<CVec>& w);
/// sum_k |u^H H_SI w_k|^2 (before the duplex factor).
double self_interference_power(const ChannelSet& ch, const CVec& u, const std::vector<CVec>& w);

struct LocalCompute {
  double rate = 0.0;    // bit/s
  double energy = 0.0;  // J
};
LocalCompute local_rate_energy(double f_hz, double eps_cycles_per_bit, double t_s, double zeta);

/// Expected backhaul bits T * sum_v rho_v * sum_l (1 - e_v) c_v R_{0,l}.
double backhaul_cost(const RVec& e, const CacheConfig& cache, double t_s);

struct Metrics {
  std::vector<double> r_com, rate_com;  // rates already include the duplex weight
  std::vector<double> r_off, rate_off;
  double r_tar = 0.0;
  std::vector<double> rate_loc, energy_loc;
  double sum_bits = 0.0;
  double d_total = 0.0;
  double utility = 0.0;
};

/// Fills every metric; utility is the system objective in bits.
Metrics evaluate(const Scenario& sc, const Solution& sol);

/// The bandwidth-normalized objective
///   sum_k wt*log2(1 + r_k) + sum_l (wt*log2(1 + r_l) + f_l / (eps_l B)),
/// i.e. the throughput part of the utility divided by T*B.
double normalized_objective(const Scenario& sc, const Solution& sol);

/// Constraint violations (0 when satisfied). Radar is relative to the threshold.
struct Residuals {
  double power = 0.0;
  double radar = 0.0;
  double unit_modulus = 0.0;
  double energy = 0.0;
  double cache = 0.0;
};
Residuals constraint_residuals(const Scenario& sc, const Solution& sol);

/// Fixed CSV column order for Metrics (per-user columns for K, L users).
std::vector<std::string> metrics_csv_header(int n_cm, int n_cp);
std::vector<std::string> metrics_csv_row(const Metrics& m);

}  // namespace fdiscc
