#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "fdiscc/types.hpp"

namespace fdiscc {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

double distance(Point a, Point b);

/// Content library and backhaul parameters.
struct CacheConfig {
  int n_files = 1000;                       // V
  double capacity = 1e6;                    // F
  std::vector<double> lengths{1e5};         // q_v (broadcast when a single value)
  std::vector<double> backhaul_price{1.0};  // rho_v
  double skew = 1.4;                        // Zipf exponent
  std::vector<double> backhaul_rate{1e8};   // R_{0,l}, bit/s
};

struct Geometry {
  Point bs{-50.0, 0.0};
  Point irs{0.0, 6.0};
  double user_x_min = 10.0;
  double user_x_max = 40.0;
  double user_y_min = 0.0;
  double user_y_max = 1.0;
  double target_distance_m = 3.0;
  double theta_rad = 40.0 * std::numbers::pi / 180.0;
};

/// Every scenario constant. Defaults are the desk-scale reference scenario
/// (M = 16); `paper_scale()` switches to the full-size IRS.
struct SystemConfig {
  int n_tx = 4;
  int n_rx = 4;
  int m_passive = 16;
  int m_active = 10;
  int n_cm = 2;
  int n_cp = 2;

  double bandwidth_hz = 1e6;
  double coherence_time_s = 1.0;
  double p_bs_watt = 1.0;                    // 30 dBm
  double gamma_tar_linear = 5.011872336272722;  // 7 dB
  std::vector<double> e_max_joule{0.01};
  double zeta = 1e-26;
  std::vector<double> eps_cycles_per_bit{1000.0};
  double noise_bs_watt = 1e-12;   // -90 dBm
  double noise_ue_watt = 1e-12;
  double noise_irs_watt = 1e-12;

  CacheConfig cache;
  Geometry geometry;

  double pathloss = 1e-3;  // Lambda, linear gain at d0
  double d0_m = 1.0;
  double exp_br = 2.2;
  double exp_ru = 2.5;
  double exp_rt = 2.2;
  double exp_mp = 3.9;
  double rician_k_db = 3.0;
  double si_power_db = -110.0;
  // Target reflection coefficient magnitude; <= 0 means "derive from the
  // IRS-target path loss" during finalize().
  double eta_rt = 0.0;

  std::uint64_t seed = 1;

  /// Broadcasts single-valued per-user / per-file lists to their counts and
  /// derives eta_rt. Idempotent.
  void finalize();
  /// Throws ConfigError naming the first offending key.
  void validate() const;
};

SystemConfig default_config();
SystemConfig paper_scale(SystemConfig cfg);

/// Applies one `key = value` assignment (dB-suffixed keys are converted).
void apply_config_value(SystemConfig& cfg, const std::string& key, const std::string& value);

/// Parses a `key = value` file ('#' comments). "default" yields default_config().
SystemConfig load_config(const std::string& path);
SystemConfig parse_config(std::istream& in, SystemConfig base = default_config());

/// Writes the config back in the same key = value format.
void write_config(const SystemConfig& cfg, std::ostream& out);

}  // namespace fdiscc
