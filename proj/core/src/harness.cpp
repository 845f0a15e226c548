#include "fdiscc/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include <json.hpp>

namespace fdiscc {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t\r\n") - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double to_double(const std::string& key, const std::string& s) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size() || !std::isfinite(v)) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(key, "not a number: '" + s + "'");
  }
}

bool is_integer(double v) { return std::floor(v) == v; }

// Shortest text that reads back to the same double.
std::string fmt(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

nlohmann::json complex_array(const CVec& v) {
  nlohmann::json a = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back({v(i).real(), v(i).imag()});
  return a;
}

nlohmann::json residuals_json(const Residuals& r) {
  return {{"power", r.power}, {"radar", r.radar}, {"unit_modulus", r.unit_modulus}, {"energy", r.energy},
          {"cache", r.cache}};
}

}  // namespace

std::string to_string(SweepParameter p) {
  switch (p) {
    case SweepParameter::m_passive: return "m_passive";
    case SweepParameter::p_bs_dbm: return "p_bs_dbm";
    case SweepParameter::gamma_tar_db: return "gamma_tar_db";
    case SweepParameter::backhaul_mbps: return "backhaul_mbps";
    case SweepParameter::skew: return "skew";
    case SweepParameter::n_tx: return "n_tx";
  }
  return "unknown";
}

SweepParameter parse_sweep_parameter(const std::string& name) {
  for (auto p : {SweepParameter::m_passive, SweepParameter::p_bs_dbm, SweepParameter::gamma_tar_db,
                 SweepParameter::backhaul_mbps, SweepParameter::skew, SweepParameter::n_tx}) {
    if (to_string(p) == name) return p;
  }
  throw ConfigError("parameter", "unknown sweep parameter '" + name + "'");
}

void apply_sweep_value(SystemConfig& cfg, SweepParameter p, double value) {
  switch (p) {
    case SweepParameter::m_passive:
      if (!(value >= 1.0) || !is_integer(value)) throw ConfigError("values", "m_passive must be a positive integer");
      cfg.m_passive = static_cast<int>(value);
      break;
    case SweepParameter::p_bs_dbm: cfg.p_bs_watt = dbm_to_watt(value); break;
    case SweepParameter::gamma_tar_db: cfg.gamma_tar_linear = db_to_linear(value); break;
    case SweepParameter::backhaul_mbps:
      if (!(value >= 0.0)) throw ConfigError("values", "backhaul rate must be >= 0");
      cfg.cache.backhaul_rate.assign(std::max<std::size_t>(1, cfg.cache.backhaul_rate.size()), value * 1e6);
      break;
    case SweepParameter::skew:
      if (!(value >= 0.0)) throw ConfigError("values", "skew must be >= 0");
      cfg.cache.skew = value;
      break;
    case SweepParameter::n_tx:
      if (!(value >= 1.0) || !is_integer(value)) throw ConfigError("values", "n_tx must be a positive integer");
      cfg.n_tx = static_cast<int>(value);
      break;
  }
  cfg.finalize();
  cfg.validate();
}

void SweepSpec::validate() const {
  if (values.empty()) throw ConfigError("values", "at least one value required");
  if (schemes.empty()) throw ConfigError("schemes", "at least one scheme required");
  if (n_seeds < 1) throw ConfigError("n_seeds", "must be >= 1");
  if (max_iter < 1) throw ConfigError("max_iter", "must be >= 1");
  SystemConfig probe = default_config();
  for (double v : values) apply_sweep_value(probe, parameter, v);
}

SweepSpec parse_sweep(std::istream& in) {
  SweepSpec spec;
  std::string line;
  bool have_parameter = false;
  while (std::getline(in, line)) {
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(line, "expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key == "parameter") {
      spec.parameter = parse_sweep_parameter(val);
      have_parameter = true;
    } else if (key == "values") {
      spec.values.clear();
      for (const auto& s : split(val, ',')) spec.values.push_back(to_double(key, s));
    } else if (key == "schemes") {
      spec.schemes.clear();
      if (val == "all") {
        spec.schemes = all_schemes();
      } else {
        for (const auto& s : split(val, ',')) {
          const auto sch = parse_scheme(s);
          if (!sch) throw ConfigError(key, "unknown scheme '" + s + "'");
          spec.schemes.push_back(*sch);
        }
      }
    } else if (key == "n_seeds") {
      const double v = to_double(key, val);
      if (!is_integer(v)) throw ConfigError(key, "must be an integer");
      spec.n_seeds = static_cast<int>(v);
    } else if (key == "first_seed") {
      const double v = to_double(key, val);
      if (!is_integer(v) || v < 0) throw ConfigError(key, "must be a non-negative integer");
      spec.first_seed = static_cast<std::uint64_t>(v);
    } else if (key == "max_iter") {
      const double v = to_double(key, val);
      if (!is_integer(v)) throw ConfigError(key, "must be an integer");
      spec.max_iter = static_cast<int>(v);
    } else if (key == "output") {
      spec.output = val;
    } else if (key == "config") {
      spec.config = val;
    } else if (key == "paper_scale") {
      if (val != "true" && val != "false" && val != "1" && val != "0") throw ConfigError(key, "expected true or false");
      spec.paper_scale = val == "true" || val == "1";
    } else {
      throw ConfigError(key, "unknown key");
    }
  }
  if (!have_parameter) throw ConfigError("parameter", "missing");
  spec.validate();
  return spec;
}

SweepSpec load_sweep(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("sweep", "cannot open '" + path + "'");
  return parse_sweep(in);
}

RunRow make_row(const RunResult& r, std::uint64_t seed, const std::string& parameter, double value) {
  RunRow row;
  row.seed = seed;
  row.scheme = r.scheme;
  row.parameter = parameter;
  row.value = value;
  row.status = r.status;
  row.utility = r.metrics.utility;
  row.sum_bits = r.metrics.sum_bits;
  row.d_total = r.metrics.d_total;
  row.residuals = r.residuals;
  row.iterations = r.iterations;
  row.wall_ms = r.wall_ms;
  return row;
}

const std::vector<std::string>& run_csv_header() {
  static const std::vector<std::string> h = {
      "seed",       "scheme",    "parameter", "value",        "status",           "utility",    "sum_bits",
      "d_total",    "res_power", "res_radar", "res_unit_modulus", "res_energy", "res_cache", "iterations",
      "wall_ms"};
  return h;
}

void write_csv_header(std::ostream& out) {
  const auto& h = run_csv_header();
  for (std::size_t i = 0; i < h.size(); ++i) out << (i ? "," : "") << h[i];
  out << '\n';
}

void write_csv_row(std::ostream& out, const RunRow& r) {
  out << r.seed << ',' << to_string(r.scheme) << ',' << r.parameter << ',' << fmt(r.value) << ','
      << to_string(r.status) << ',' << fmt(r.utility) << ',' << fmt(r.sum_bits) << ',' << fmt(r.d_total) << ','
      << fmt(r.residuals.power) << ',' << fmt(r.residuals.radar) << ',' << fmt(r.residuals.unit_modulus) << ','
      << fmt(r.residuals.energy) << ',' << fmt(r.residuals.cache) << ',' << r.iterations << ',' << fmt(r.wall_ms)
      << '\n';
}

std::vector<RunRow> run_sweep(const SweepSpec& spec, const SystemConfig& base, unsigned n_workers) {
  spec.validate();
  struct Cell {
    double value;
    Scheme scheme;
    std::uint64_t seed;
  };
  std::vector<Cell> cells;
  for (double v : spec.values)
    for (Scheme s : spec.schemes)
      for (int i = 0; i < spec.n_seeds; ++i) cells.push_back({v, s, spec.first_seed + static_cast<std::uint64_t>(i)});

  SystemConfig start = spec.paper_scale ? paper_scale(base) : base;
  std::vector<RunRow> rows(cells.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      try {
        const Cell& c = cells[i];
        SystemConfig cfg = start;
        apply_sweep_value(cfg, spec.parameter, c.value);
        cfg.seed = c.seed;
        const ChannelSet ch = draw_channels(cfg);
        RunOptions opts;
        opts.max_iter = spec.max_iter;
        rows[i] = make_row(evaluate_baseline(cfg, ch, c.scheme, opts), c.seed, to_string(spec.parameter), c.value);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  if (n_workers == 0) n_workers = std::max(1u, std::thread::hardware_concurrency());
  n_workers = static_cast<unsigned>(std::min<std::size_t>(n_workers, std::max<std::size_t>(1, cells.size())));
  std::vector<std::thread> pool;
  for (unsigned i = 1; i < n_workers; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return rows;
}

double quantile(std::vector<double> v, double q) {
  if (v.empty()) throw InvalidArgument("quantile: empty sample");
  if (!(q >= 0.0 && q <= 1.0)) throw InvalidArgument("quantile: q must lie in [0, 1]");
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

double median(std::vector<double> v) { return quantile(std::move(v), 0.5); }

std::vector<Aggregate> aggregate(const std::vector<RunRow>& rows) {
  std::vector<std::pair<Scheme, double>> keys;
  std::vector<std::vector<const RunRow*>> groups;
  for (const auto& r : rows) {
    auto it = std::find(keys.begin(), keys.end(), std::make_pair(r.scheme, r.value));
    if (it == keys.end()) {
      keys.emplace_back(r.scheme, r.value);
      groups.emplace_back();
      it = keys.end() - 1;
    }
    groups[static_cast<std::size_t>(it - keys.begin())].push_back(&r);
  }
  std::vector<Aggregate> out;
  for (std::size_t g = 0; g < keys.size(); ++g) {
    std::vector<double> u, b;
    for (const RunRow* r : groups[g]) {
      u.push_back(r->utility);
      b.push_back(r->sum_bits);
    }
    Aggregate a;
    a.scheme = keys[g].first;
    a.value = keys[g].second;
    a.count = u.size();
    a.median_utility = median(u);
    a.iqr_utility = quantile(u, 0.75) - quantile(u, 0.25);
    a.median_sum_bits = median(b);
    a.iqr_sum_bits = quantile(b, 0.75) - quantile(b, 0.25);
    out.push_back(a);
  }
  return out;
}

void write_aggregate_csv(std::ostream& out, const std::vector<Aggregate>& agg) {
  out << "scheme,value,count,median_utility,iqr_utility,median_sum_bits,iqr_sum_bits\n";
  for (const auto& a : agg) {
    out << to_string(a.scheme) << ',' << fmt(a.value) << ',' << a.count << ',' << fmt(a.median_utility) << ','
        << fmt(a.iqr_utility) << ',' << fmt(a.median_sum_bits) << ',' << fmt(a.iqr_sum_bits) << '\n';
  }
}

std::string run_result_json(const RunResult& r) {
  using nlohmann::json;
  json j;
  j["scheme"] = to_string(r.scheme);
  j["status"] = to_string(r.status);
  j["iterations"] = r.iterations;
  j["wall_ms"] = r.wall_ms;
  const Metrics& m = r.metrics;
  j["metrics"] = {{"r_com", m.r_com},       {"rate_com", m.rate_com}, {"r_off", m.r_off},
                  {"rate_off", m.rate_off}, {"r_tar", m.r_tar},       {"rate_loc", m.rate_loc},
                  {"energy_loc", m.energy_loc}, {"sum_bits", m.sum_bits}, {"d_total", m.d_total},
                  {"utility", m.utility}};
  j["residuals"] = residuals_json(r.residuals);
  json sol;
  sol["w"] = json::array();
  for (const auto& w : r.solution.w) sol["w"].push_back(complex_array(w));
  sol["u"] = json::array();
  for (const auto& u : r.solution.u) sol["u"].push_back(complex_array(u));
  sol["phi"] = complex_array(r.solution.phi);
  sol["p"] = std::vector<double>(r.solution.p.data(), r.solution.p.data() + r.solution.p.size());
  sol["f"] = std::vector<double>(r.solution.f.data(), r.solution.f.data() + r.solution.f.size());
  sol["e"] = std::vector<double>(r.solution.e.data(), r.solution.e.data() + r.solution.e.size());
  j["solution"] = std::move(sol);
  j["trace"] = json::array();
  for (const auto& t : r.trace) {
    j["trace"].push_back({{"iter", t.iter},
                          {"surrogate", t.surrogate},
                          {"utility", t.utility},
                          {"residuals", residuals_json(t.residuals)},
                          {"wall_ms", t.wall_ms},
                          {"phase_accepted", t.phase_accepted},
                          {"tx_accepted", t.tx_accepted},
                          {"admm_iterations", t.admm_iterations}});
  }
  return j.dump(2);
}

void write_trace_csv(std::ostream& out, const RunResult& r) {
  out << "iter,surrogate,utility,res_power,res_radar,res_unit_modulus,res_energy,res_cache,wall_ms,phase_accepted,"
         "tx_accepted,admm_iterations\n";
  for (const auto& t : r.trace) {
    out << t.iter << ',' << fmt(t.surrogate) << ',' << fmt(t.utility) << ',' << fmt(t.residuals.power) << ','
        << fmt(t.residuals.radar) << ',' << fmt(t.residuals.unit_modulus) << ',' << fmt(t.residuals.energy) << ','
        << fmt(t.residuals.cache) << ',' << fmt(t.wall_ms) << ',' << t.phase_accepted << ',' << t.tx_accepted << ','
        << t.admm_iterations << '\n';
  }
}

}  // namespace fdiscc
