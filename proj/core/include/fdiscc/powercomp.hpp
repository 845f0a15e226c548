#pragma once

#include <vector>

#include "fdiscc/sysmodel.hpp"
#include "fdiscc/wmmse.hpp"

namespace fdiscc {

/// Coefficients of the power / CPU block (throughput parts in nats):
///   Rcom_k = b10_k - c1_k sum_l p_l b11_{k,l}   (throughput terms carry the duplex weight)
///   Roff_l = b2_l + sqrt(p_l) b6_l - p_l b7_l
///   radar:  sum_l p_l b9_l <= c8
/// compute_gain_l is the weight of f_l in the same units, ln 2 / (eps_l B).
struct PowerCoeffs {
  RVec b2, b6, b7, b9;
  RVec b10, c1;
  RMat b11;  // K x L
  double c8 = 0.0;
  RVec compute_gain;
  RVec e_max;
  double t_s = 1.0;
  double zeta = 1e-26;

  /// Linear price of p_l in the objective: b7_l + sum_k c1_k b11_{k,l}.
  double linear_price(int l) const;
  /// P18 objective sum_l (b6 sqrt(p) - price p + gain f).
  double objective(const RVec& p, const RVec& f) const;
};

/// full_offloading forces f = 0 (compute_gain = 0).
PowerCoeffs assemble_power_coeffs(const Scenario& sc, const Solution& sol, const AuxVars& aux,
                                  bool full_offloading = false);

enum class PowerStatus { optimal, infeasible_sensing };

struct PowerResult {
  PowerStatus status = PowerStatus::optimal;
  RVec p;
  RVec f;
  double mu = 0.0;  // radar coupling multiplier
  RVec nu;          // energy multipliers
  double objective = 0.0;
  int bisection_iterations = 0;
};

/// Exact solution of the separable concave program via bisection on the
/// coupling multiplier with per-user one-dimensional solves.
PowerResult solve_power_compute(const PowerCoeffs& c);

}  // namespace fdiscc
