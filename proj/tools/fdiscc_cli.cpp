#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <stdexcept>
#include <string>

#include <CLI11.hpp>

#include "fdiscc/channels.hpp"
#include "fdiscc/config.hpp"
#include "fdiscc/harness.hpp"
#include "fdiscc/orchestrator.hpp"

namespace fs = std::filesystem;
using namespace fdiscc;

namespace {

constexpr int kOk = 0;
constexpr int kInfeasible = 1;
constexpr int kUsage = 2;

struct RunArgs {
  std::string config = "default";
  std::uint64_t seed = 1;
  std::string scheme = "proposed";
  std::string out = ".";
  int max_iter = 50;
  bool paper_scale = false;
};

std::ofstream open_output(const fs::path& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  return f;
}

SystemConfig load(const std::string& path, bool paper) {
  SystemConfig cfg = load_config(path);
  return paper ? paper_scale(cfg) : cfg;
}

void print_metrics(const RunResult& r) {
  const Metrics& m = r.metrics;
  std::cout << std::setprecision(10);
  std::cout << "scheme      " << to_string(r.scheme) << '\n'
            << "status      " << to_string(r.status) << '\n'
            << "iterations  " << r.iterations << '\n'
            << "utility     " << m.utility << " bit\n"
            << "sum_bits    " << m.sum_bits << " bit\n"
            << "d_total     " << m.d_total << " bit\n"
            << "radar_sinr  " << m.r_tar << '\n';
  for (std::size_t k = 0; k < m.r_com.size(); ++k)
    std::cout << "com[" << k << "]      sinr " << m.r_com[k] << "  rate " << m.rate_com[k] << " bit/s\n";
  for (std::size_t l = 0; l < m.r_off.size(); ++l)
    std::cout << "cp[" << l << "]       sinr " << m.r_off[l] << "  offload " << m.rate_off[l] << " bit/s  local "
              << m.rate_loc[l] << " bit/s  energy " << m.energy_loc[l] << " J\n";
  const Residuals& res = r.residuals;
  std::cout << "residuals   power " << res.power << "  radar " << res.radar << "  unit_modulus " << res.unit_modulus
            << "  energy " << res.energy << "  cache " << res.cache << '\n'
            << "wall_ms     " << r.wall_ms << '\n';
}

int cmd_run(const RunArgs& a) {
  const auto scheme = parse_scheme(a.scheme);
  if (!scheme) {
    std::cerr << "error: unknown scheme '" << a.scheme << "'\n";
    return kUsage;
  }
  SystemConfig cfg = load(a.config, a.paper_scale);
  cfg.seed = a.seed;
  const ChannelSet ch = draw_channels(cfg);
  RunOptions opts;
  opts.max_iter = a.max_iter;
  const RunResult r = evaluate_baseline(cfg, ch, *scheme, opts);
  print_metrics(r);

  fs::create_directories(a.out);
  const std::string stem = to_string(r.scheme) + "_seed" + std::to_string(a.seed);
  std::ofstream trace = open_output(fs::path(a.out) / (stem + "_trace.csv"));
  write_trace_csv(trace, r);
  std::ofstream json = open_output(fs::path(a.out) / (stem + ".json"));
  json << run_result_json(r) << '\n';
  return r.status == RunStatus::infeasible_sensing ? kInfeasible : kOk;
}

int cmd_sweep(const std::string& spec_path, const std::string& out, unsigned workers) {
  SweepSpec spec = load_sweep(spec_path);
  if (!out.empty()) spec.output = out;
  if (spec.output.empty()) spec.output = "sweep.csv";
  const SystemConfig base = load_config(spec.config);
  const auto rows = run_sweep(spec, base, workers);

  const fs::path path(spec.output);
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream csv = open_output(path);
  write_csv_header(csv);
  for (const auto& r : rows) write_csv_row(csv, r);
  fs::path agg_path = path;
  agg_path.replace_filename(path.stem().string() + "_agg.csv");
  std::ofstream agg = open_output(agg_path);
  write_aggregate_csv(agg, aggregate(rows));

  std::size_t infeasible = 0;
  for (const auto& r : rows) infeasible += r.status == RunStatus::infeasible_sensing;
  std::cout << rows.size() << " rows -> " << path.string() << ", aggregate -> " << agg_path.string() << '\n';
  if (infeasible) std::cout << infeasible << " runs infeasible (sensing)\n";
  return kOk;
}

int cmd_selftest(const std::string& config, int n_seeds, int max_iter) {
  const SystemConfig base = load_config(config);
  int failures = 0;
  for (int s = 1; s <= n_seeds; ++s) {
    SystemConfig cfg = base;
    cfg.seed = static_cast<std::uint64_t>(s);
    const ChannelSet ch = draw_channels(cfg);
    RunOptions opts;
    opts.max_iter = max_iter;
    const RunResult r = evaluate_baseline(cfg, ch, Scheme::proposed, opts);
    const RunResult again = evaluate_baseline(cfg, ch, Scheme::proposed, opts);

    bool monotone = true;
    for (std::size_t i = 1; i < r.trace.size(); ++i) {
      const double prev = r.trace[i - 1].surrogate;
      if (r.trace[i].surrogate < prev - 1e-8 * std::max(1.0, std::abs(prev))) monotone = false;
    }
    const Residuals& res = r.residuals;
    const bool feasible = r.status != RunStatus::infeasible_sensing && res.power <= 1e-9 && res.radar <= 1e-6 &&
                          res.unit_modulus <= 1e-4 && res.energy <= 1e-9 && res.cache <= 1e-12;
    const bool deterministic = again.metrics.utility == r.metrics.utility && again.iterations == r.iterations;
    const auto line = [&](const char* what, bool ok) {
      std::cout << (ok ? "PASS" : "FAIL") << "  seed " << s << "  " << what << '\n';
      failures += !ok;
    };
    line("monotone trace", monotone);
    line("feasible solution", feasible);
    line("deterministic", deterministic);
  }
  std::cout << (failures ? "selftest FAILED" : "selftest passed") << '\n';
  return failures ? kInfeasible : kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Full-duplex IRS sensing, communication, computing and caching optimizer"};
  app.require_subcommand(1);

  RunArgs run_args;
  auto* run = app.add_subcommand("run", "Optimize a single scenario");
  run->add_option("--config", run_args.config, "Config file or 'default'");
  run->add_option("--seed", run_args.seed, "Channel and initialization seed");
  run->add_option("--scheme", run_args.scheme, "proposed | full_offloading | fixed_phase | hd | random_caching | no_caching");
  run->add_option("--out", run_args.out, "Output directory for trace and JSON result");
  run->add_option("--max-iter", run_args.max_iter, "Outer iteration cap")->check(CLI::PositiveNumber);
  run->add_flag("--paper-scale", run_args.paper_scale, "Use the full-size IRS (M = 50, M_a = 10)");

  std::string sweep_path, sweep_out;
  unsigned workers = 0;
  auto* sweep = app.add_subcommand("sweep", "Run a parameter sweep from a spec file");
  sweep->add_option("spec", sweep_path, "Sweep spec file")->required();
  sweep->add_option("--out", sweep_out, "Row CSV path (overrides the spec)");
  sweep->add_option("--workers", workers, "Worker threads (0 = hardware concurrency)");

  std::string st_config = "default";
  int st_seeds = 3, st_iter = 50;
  auto* selftest = app.add_subcommand("selftest", "Check invariants on a few seeds");
  selftest->add_option("--config", st_config, "Config file or 'default'");
  selftest->add_option("--seeds", st_seeds, "Number of seeds")->check(CLI::PositiveNumber);
  selftest->add_option("--max-iter", st_iter, "Outer iteration cap")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (*run) return cmd_run(run_args);
    if (*sweep) return cmd_sweep(sweep_path, sweep_out, workers);
    if (*selftest) return cmd_selftest(st_config, st_seeds, st_iter);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInfeasible;
  }
  return kUsage;
}
