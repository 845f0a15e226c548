#include "fdiscc/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

namespace fdiscc {

double distance(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

namespace {

void broadcast(std::vector<double>& v, int n, const char* key) {
  if (n < 0) return;
  if (n == 0) {
    v.clear();
    return;
  }
  if (v.empty()) throw ConfigError(key, "empty list");
  if (static_cast<int>(v.size()) == n) return;
  const bool uniform = std::all_of(v.begin(), v.end(), [&](double x) { return x == v.front(); });
  if (!uniform) {
    throw ConfigError(key, "expected " + std::to_string(n) + " values, got " + std::to_string(v.size()));
  }
  v.assign(static_cast<std::size_t>(n), v.front());
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

double parse_double(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc{} || ptr != t.data() + t.size() || !std::isfinite(v)) {
    throw ConfigError(key, "not a number: '" + t + "'");
  }
  return v;
}

int parse_int(const std::string& key, const std::string& text) {
  const double v = parse_double(key, text);
  if (v != std::floor(v) || std::abs(v) > 1e9) throw ConfigError(key, "not an integer: '" + trim(text) + "'");
  return static_cast<int>(v);
}

std::vector<double> parse_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_double(key, item));
  if (out.empty()) throw ConfigError(key, "empty list");
  return out;
}

using Setter = std::function<void(SystemConfig&, const std::string&, const std::string&)>;

template <class F>
Setter num(F f) {
  return [f](SystemConfig& c, const std::string& k, const std::string& v) { f(c, parse_double(k, v)); };
}
template <class F>
Setter integer(F f) {
  return [f](SystemConfig& c, const std::string& k, const std::string& v) { f(c, parse_int(k, v)); };
}
template <class F>
Setter list(F f) {
  return [f](SystemConfig& c, const std::string& k, const std::string& v) { f(c, parse_list(k, v)); };
}

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"n_tx", integer([](SystemConfig& c, int v) { c.n_tx = v; })},
      {"n_rx", integer([](SystemConfig& c, int v) { c.n_rx = v; })},
      {"m_passive", integer([](SystemConfig& c, int v) { c.m_passive = v; })},
      {"m_active", integer([](SystemConfig& c, int v) { c.m_active = v; })},
      {"n_cm", integer([](SystemConfig& c, int v) { c.n_cm = v; })},
      {"n_cp", integer([](SystemConfig& c, int v) { c.n_cp = v; })},
      {"bandwidth_hz", num([](SystemConfig& c, double v) { c.bandwidth_hz = v; })},
      {"coherence_time_s", num([](SystemConfig& c, double v) { c.coherence_time_s = v; })},
      {"p_bs_watt", num([](SystemConfig& c, double v) { c.p_bs_watt = v; })},
      {"p_bs_dbm", num([](SystemConfig& c, double v) { c.p_bs_watt = dbm_to_watt(v); })},
      {"gamma_tar_linear", num([](SystemConfig& c, double v) { c.gamma_tar_linear = v; })},
      {"gamma_tar_db", num([](SystemConfig& c, double v) { c.gamma_tar_linear = db_to_linear(v); })},
      {"e_max_joule", list([](SystemConfig& c, std::vector<double> v) { c.e_max_joule = std::move(v); })},
      {"zeta", num([](SystemConfig& c, double v) { c.zeta = v; })},
      {"eps_cycles_per_bit", list([](SystemConfig& c, std::vector<double> v) { c.eps_cycles_per_bit = std::move(v); })},
      {"noise_bs_watt", num([](SystemConfig& c, double v) { c.noise_bs_watt = v; })},
      {"noise_ue_watt", num([](SystemConfig& c, double v) { c.noise_ue_watt = v; })},
      {"noise_irs_watt", num([](SystemConfig& c, double v) { c.noise_irs_watt = v; })},
      {"noise_bs_dbm", num([](SystemConfig& c, double v) { c.noise_bs_watt = dbm_to_watt(v); })},
      {"noise_ue_dbm", num([](SystemConfig& c, double v) { c.noise_ue_watt = dbm_to_watt(v); })},
      {"noise_irs_dbm", num([](SystemConfig& c, double v) { c.noise_irs_watt = dbm_to_watt(v); })},
      {"cache.n_files", integer([](SystemConfig& c, int v) { c.cache.n_files = v; })},
      {"cache.capacity", num([](SystemConfig& c, double v) { c.cache.capacity = v; })},
      {"cache.lengths", list([](SystemConfig& c, std::vector<double> v) { c.cache.lengths = std::move(v); })},
      {"cache.backhaul_price", list([](SystemConfig& c, std::vector<double> v) { c.cache.backhaul_price = std::move(v); })},
      {"cache.skew", num([](SystemConfig& c, double v) { c.cache.skew = v; })},
      {"cache.backhaul_rate", list([](SystemConfig& c, std::vector<double> v) { c.cache.backhaul_rate = std::move(v); })},
      {"cache.backhaul_rate_mbps", list([](SystemConfig& c, std::vector<double> v) {
         for (double& x : v) x *= 1e6;
         c.cache.backhaul_rate = std::move(v);
       })},
      {"geometry.bs_x", num([](SystemConfig& c, double v) { c.geometry.bs.x = v; })},
      {"geometry.bs_y", num([](SystemConfig& c, double v) { c.geometry.bs.y = v; })},
      {"geometry.irs_x", num([](SystemConfig& c, double v) { c.geometry.irs.x = v; })},
      {"geometry.irs_y", num([](SystemConfig& c, double v) { c.geometry.irs.y = v; })},
      {"geometry.user_x_min", num([](SystemConfig& c, double v) { c.geometry.user_x_min = v; })},
      {"geometry.user_x_max", num([](SystemConfig& c, double v) { c.geometry.user_x_max = v; })},
      {"geometry.user_y_min", num([](SystemConfig& c, double v) { c.geometry.user_y_min = v; })},
      {"geometry.user_y_max", num([](SystemConfig& c, double v) { c.geometry.user_y_max = v; })},
      {"geometry.target_distance_m", num([](SystemConfig& c, double v) { c.geometry.target_distance_m = v; })},
      {"geometry.theta_rad", num([](SystemConfig& c, double v) { c.geometry.theta_rad = v; })},
      {"geometry.theta_deg", num([](SystemConfig& c, double v) { c.geometry.theta_rad = v * std::numbers::pi / 180.0; })},
      {"pathloss", num([](SystemConfig& c, double v) { c.pathloss = v; })},
      {"pathloss_db", num([](SystemConfig& c, double v) { c.pathloss = db_to_linear(v); })},
      {"d0_m", num([](SystemConfig& c, double v) { c.d0_m = v; })},
      {"exp_br", num([](SystemConfig& c, double v) { c.exp_br = v; })},
      {"exp_ru", num([](SystemConfig& c, double v) { c.exp_ru = v; })},
      {"exp_rt", num([](SystemConfig& c, double v) { c.exp_rt = v; })},
      {"exp_mp", num([](SystemConfig& c, double v) { c.exp_mp = v; })},
      {"rician_k_db", num([](SystemConfig& c, double v) { c.rician_k_db = v; })},
      {"si_power_db", num([](SystemConfig& c, double v) { c.si_power_db = v; })},
      {"eta_rt", num([](SystemConfig& c, double v) { c.eta_rt = v; })},
      {"seed", [](SystemConfig& c, const std::string& k, const std::string& v) {
         const std::string t = trim(v);
         std::uint64_t s = 0;
         auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), s);
         if (ec != std::errc{} || ptr != t.data() + t.size()) throw ConfigError(k, "not an unsigned integer: '" + t + "'");
         c.seed = s;
       }},
  };
  return table;
}

}  // namespace

void SystemConfig::finalize() {
  broadcast(e_max_joule, n_cp, "e_max_joule");
  broadcast(eps_cycles_per_bit, n_cp, "eps_cycles_per_bit");
  broadcast(cache.backhaul_rate, n_cp, "cache.backhaul_rate");
  broadcast(cache.lengths, cache.n_files, "cache.lengths");
  broadcast(cache.backhaul_price, cache.n_files, "cache.backhaul_price");
  if (!(eta_rt > 0.0) && geometry.target_distance_m > 0.0 && d0_m > 0.0) {
    // Round trip through a unit-RCS point target at the IRS-target distance.
    eta_rt = std::sqrt(pathloss * std::pow(geometry.target_distance_m / d0_m, -exp_rt));
  }
}

void SystemConfig::validate() const {
  auto positive_count = [](int v, const char* key) {
    if (v < 1) throw ConfigError(key, "must be >= 1");
  };
  positive_count(n_tx, "n_tx");
  positive_count(n_rx, "n_rx");
  positive_count(m_passive, "m_passive");
  positive_count(m_active, "m_active");
  if (n_cm < 0) throw ConfigError("n_cm", "must be >= 0");
  if (n_cp < 0) throw ConfigError("n_cp", "must be >= 0");
  auto positive = [](double v, const char* key) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(key, "must be > 0");
  };
  positive(bandwidth_hz, "bandwidth_hz");
  positive(coherence_time_s, "coherence_time_s");
  positive(p_bs_watt, "p_bs_watt");
  positive(gamma_tar_linear, "gamma_tar_linear");
  positive(zeta, "zeta");
  positive(noise_bs_watt, "noise_bs_watt");
  positive(noise_ue_watt, "noise_ue_watt");
  positive(noise_irs_watt, "noise_irs_watt");
  positive(pathloss, "pathloss");
  positive(d0_m, "d0_m");
  positive(eta_rt, "eta_rt");
  positive(geometry.target_distance_m, "geometry.target_distance_m");
  if (static_cast<int>(e_max_joule.size()) != n_cp) throw ConfigError("e_max_joule", "size must equal n_cp");
  if (static_cast<int>(eps_cycles_per_bit.size()) != n_cp) throw ConfigError("eps_cycles_per_bit", "size must equal n_cp");
  for (double v : e_max_joule) positive(v, "e_max_joule");
  for (double v : eps_cycles_per_bit) positive(v, "eps_cycles_per_bit");
  if (!(geometry.theta_rad >= 0.0 && geometry.theta_rad < std::numbers::pi)) {
    throw ConfigError("geometry.theta_rad", "must lie in [0, pi)");
  }
  if (geometry.user_x_min > geometry.user_x_max) throw ConfigError("geometry.user_x_min", "exceeds user_x_max");
  if (geometry.user_y_min > geometry.user_y_max) throw ConfigError("geometry.user_y_min", "exceeds user_y_max");

  if (cache.n_files < 1) throw ConfigError("cache.n_files", "must be >= 1");
  if (!(cache.capacity >= 0.0)) throw ConfigError("cache.capacity", "must be >= 0");
  if (!(cache.skew >= 0.0)) throw ConfigError("cache.skew", "must be >= 0");
  if (static_cast<int>(cache.lengths.size()) != cache.n_files) throw ConfigError("cache.lengths", "size must equal cache.n_files");
  if (static_cast<int>(cache.backhaul_price.size()) != cache.n_files) {
    throw ConfigError("cache.backhaul_price", "size must equal cache.n_files");
  }
  if (static_cast<int>(cache.backhaul_rate.size()) != n_cp) throw ConfigError("cache.backhaul_rate", "size must equal n_cp");
  for (double v : cache.lengths) positive(v, "cache.lengths");
  for (double v : cache.backhaul_price) {
    if (!(v >= 0.0)) throw ConfigError("cache.backhaul_price", "must be >= 0");
  }
  for (double v : cache.backhaul_rate) {
    if (!(v >= 0.0)) throw ConfigError("cache.backhaul_rate", "must be >= 0");
  }
}

SystemConfig default_config() {
  SystemConfig cfg;
  cfg.finalize();
  return cfg;
}

SystemConfig paper_scale(SystemConfig cfg) {
  cfg.m_passive = 50;
  cfg.m_active = 10;
  cfg.finalize();
  return cfg;
}

void apply_config_value(SystemConfig& cfg, const std::string& key, const std::string& value) {
  const auto& table = setters();
  auto it = table.find(key);
  if (it == table.end()) throw ConfigError(key, "unknown key");
  it->second(cfg, key, value);
}

SystemConfig parse_config(std::istream& in, SystemConfig base) {
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno), "expected key = value");
    apply_config_value(base, trim(std::string_view(t).substr(0, eq)), t.substr(eq + 1));
  }
  // Re-derive the reflection coefficient unless given explicitly.
  base.finalize();
  base.validate();
  return base;
}

SystemConfig load_config(const std::string& path) {
  if (path.empty() || path == "default") return default_config();
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open '" + path + "'");
  return parse_config(in);
}

void write_config(const SystemConfig& c, std::ostream& out) {
  auto join = [](const std::vector<double>& v) {
    std::ostringstream s;
    s << std::setprecision(17);
    const bool uniform = std::all_of(v.begin(), v.end(), [&](double x) { return x == v.front(); });
    if (uniform && !v.empty()) {
      s << v.front();
    } else {
      for (std::size_t i = 0; i < v.size(); ++i) s << (i ? "," : "") << v[i];
    }
    return s.str();
  };
  out << std::setprecision(17);
  out << "n_tx = " << c.n_tx << "\nn_rx = " << c.n_rx << "\nm_passive = " << c.m_passive
      << "\nm_active = " << c.m_active << "\nn_cm = " << c.n_cm << "\nn_cp = " << c.n_cp
      << "\nbandwidth_hz = " << c.bandwidth_hz << "\ncoherence_time_s = " << c.coherence_time_s
      << "\np_bs_watt = " << c.p_bs_watt << "\ngamma_tar_linear = " << c.gamma_tar_linear
      << "\ne_max_joule = " << join(c.e_max_joule) << "\nzeta = " << c.zeta
      << "\neps_cycles_per_bit = " << join(c.eps_cycles_per_bit) << "\nnoise_bs_watt = " << c.noise_bs_watt
      << "\nnoise_ue_watt = " << c.noise_ue_watt << "\nnoise_irs_watt = " << c.noise_irs_watt
      << "\ncache.n_files = " << c.cache.n_files << "\ncache.capacity = " << c.cache.capacity
      << "\ncache.lengths = " << join(c.cache.lengths) << "\ncache.backhaul_price = " << join(c.cache.backhaul_price)
      << "\ncache.skew = " << c.cache.skew << "\ncache.backhaul_rate = " << join(c.cache.backhaul_rate)
      << "\ngeometry.bs_x = " << c.geometry.bs.x << "\ngeometry.bs_y = " << c.geometry.bs.y
      << "\ngeometry.irs_x = " << c.geometry.irs.x << "\ngeometry.irs_y = " << c.geometry.irs.y
      << "\ngeometry.user_x_min = " << c.geometry.user_x_min << "\ngeometry.user_x_max = " << c.geometry.user_x_max
      << "\ngeometry.user_y_min = " << c.geometry.user_y_min << "\ngeometry.user_y_max = " << c.geometry.user_y_max
      << "\ngeometry.target_distance_m = " << c.geometry.target_distance_m
      << "\ngeometry.theta_rad = " << c.geometry.theta_rad << "\npathloss = " << c.pathloss << "\nd0_m = " << c.d0_m
      << "\nexp_br = " << c.exp_br << "\nexp_ru = " << c.exp_ru << "\nexp_rt = " << c.exp_rt
      << "\nexp_mp = " << c.exp_mp << "\nrician_k_db = " << c.rician_k_db << "\nsi_power_db = " << c.si_power_db
      << "\neta_rt = " << c.eta_rt << "\nseed = " << c.seed << "\n";
}

}  // namespace fdiscc
