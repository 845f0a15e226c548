#pragma once

#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "fdiscc/beamforming.hpp"
#include "fdiscc/phaseadmm.hpp"
#include "fdiscc/sysmodel.hpp"

namespace fdiscc {

enum class Scheme { proposed, full_offloading, fixed_phase, hd, random_caching, no_caching };

std::string to_string(Scheme s);
std::optional<Scheme> parse_scheme(std::string_view name);
std::vector<Scheme> all_schemes();

enum class CacheMode { optimal, random, none };

struct RunOptions {
  int max_iter = 50;
  double rel_tol = 1e-4;  // relative improvement threshold
  int patience = 3;       // consecutive small improvements before stopping
  bool optimize_phase = true;
  bool full_offloading = false;
  CacheMode cache = CacheMode::optimal;
  PhaseOptions phase;
  TxOptions tx;
  /// Optional fixed starting phase (used by the fixed-phase baseline).
  std::optional<CVec> phi_init;
  /// Without phi_init: start from fixed_phase() when true, random phases otherwise.
  bool aligned_start = true;
  /// Skip the phase block until the other blocks stall, then run the full
  /// cycle. Warm-up iterations are part of the trace and of max_iter.
  bool staged_phase = true;
  int phase_passes = 1;
};

enum class RunStatus { converged, max_iter, infeasible_sensing };
const char* to_string(RunStatus s);

/// One row per BCA iteration; row 0 is the initial point.
struct IterationTrace {
  int iter = 0;
  double surrogate = 0.0;  // normalized objective (bits/Hz), tight at refreshed auxiliaries
  double utility = 0.0;    // system utility, bits
  Residuals residuals;
  double wall_ms = 0.0;
  bool phase_accepted = false;
  bool tx_accepted = false;
  int admm_iterations = 0;
};

struct RunResult {
  Scheme scheme = Scheme::proposed;
  RunStatus status = RunStatus::max_iter;
  Solution solution;
  Metrics metrics;
  Residuals residuals;
  std::vector<IterationTrace> trace;
  std::vector<PhaseTraceRow> admm_trace;
  int iterations = 0;
  double wall_ms = 0.0;
};

struct InitResult {
  Solution solution;
  bool sensing_feasible = true;
};

/// Feasible starting point: random unit-modulus phases (unless given), matched
/// filter user beams, a sensing beam along the dominant echo direction, uplink
/// power limited by the radar margin and CPU frequency from the leftover
/// energy. Power is shifted to the sensing beam until the radar threshold holds.
InitResult initialize(const Scenario& sc, std::mt19937_64& rng,
                      const std::optional<CVec>& phi = std::nullopt, bool full_offloading = false);

/// Block coordinate ascent: aux -> phase (ADMM) -> transmit beams (SDR) ->
/// receive combiners -> power and CPU, until the objective stalls.
RunResult run(const Scenario& sc, const RunOptions& opts = {});

/// Phase aligning the cascaded channel of the strongest CM-UE (or the target
/// when there are no CM-UEs).
CVec fixed_phase(const ChannelSet& ch);

/// Runs a comparison scheme by freezing a block or switching the model.
RunResult evaluate_baseline(const SystemConfig& cfg, const ChannelSet& ch, Scheme scheme,
                            RunOptions opts = {});

}  // namespace fdiscc
