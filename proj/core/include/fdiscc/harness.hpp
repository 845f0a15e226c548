#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "fdiscc/orchestrator.hpp"

namespace fdiscc {

/// Swept axes. Values are given in the units of the name (dBm, dB, Mbps).
enum class SweepParameter { m_passive, p_bs_dbm, gamma_tar_db, backhaul_mbps, skew, n_tx };

std::string to_string(SweepParameter p);
SweepParameter parse_sweep_parameter(const std::string& name);
/// Applies one swept value to a config (and re-finalizes it).
void apply_sweep_value(SystemConfig& cfg, SweepParameter p, double value);

struct SweepSpec {
  SweepParameter parameter = SweepParameter::m_passive;
  std::vector<double> values;
  std::vector<Scheme> schemes{Scheme::proposed};
  int n_seeds = 10;
  std::uint64_t first_seed = 1;
  std::string output;  // CSV path; empty means none
  std::string config = "default";
  bool paper_scale = false;
  int max_iter = 50;

  void validate() const;
};

/// key = value file: parameter, values, schemes, n_seeds, first_seed, output, config.
SweepSpec parse_sweep(std::istream& in);
SweepSpec load_sweep(const std::string& path);

/// One CSV row per run.
struct RunRow {
  std::uint64_t seed = 0;
  Scheme scheme = Scheme::proposed;
  std::string parameter;  // swept parameter name, or "none"
  double value = 0.0;
  RunStatus status = RunStatus::max_iter;
  double utility = 0.0;
  double sum_bits = 0.0;
  double d_total = 0.0;
  Residuals residuals;
  int iterations = 0;
  double wall_ms = 0.0;
};

RunRow make_row(const RunResult& r, std::uint64_t seed, const std::string& parameter, double value);

const std::vector<std::string>& run_csv_header();
void write_csv_header(std::ostream& out);
void write_csv_row(std::ostream& out, const RunRow& row);

/// Runs every (value, scheme, seed) cell on a worker pool; rows come back in
/// deterministic (value, scheme, seed) order regardless of scheduling.
std::vector<RunRow> run_sweep(const SweepSpec& spec, const SystemConfig& base, unsigned n_workers = 0);

struct Aggregate {
  Scheme scheme = Scheme::proposed;
  double value = 0.0;
  std::size_t count = 0;
  double median_utility = 0.0;
  double iqr_utility = 0.0;
  double median_sum_bits = 0.0;
  double iqr_sum_bits = 0.0;
};

/// Per-(scheme, value) median and interquartile range, in first-seen order.
std::vector<Aggregate> aggregate(const std::vector<RunRow>& rows);
void write_aggregate_csv(std::ostream& out, const std::vector<Aggregate>& agg);

/// Median and quantile (linear interpolation between order statistics).
double median(std::vector<double> v);
double quantile(std::vector<double> v, double q);

/// Structured run output and per-iteration trace.
std::string run_result_json(const RunResult& r);
void write_trace_csv(std::ostream& out, const RunResult& r);

}  // namespace fdiscc
