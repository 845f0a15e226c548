#pragma once

#include <vector>

#include "fdiscc/sysmodel.hpp"

namespace fdiscc {

/// WMMSE auxiliaries; alpha1/beta1 per CM-UE, alpha2/beta2 per CP-UE.
struct AuxVars {
  RVec alpha1;
  std::vector<cd> beta1;
  RVec alpha2;
  std::vector<cd> beta2;
};

/// Closed-form maximizers: alpha = SINR, beta = sqrt(1 + alpha) * signal / total power.
AuxVars update_aux(const Scenario& sc, const Solution& sol);

/// Total received power at CM-UE k including the desired signal.
double downlink_total_power(const Scenario& sc, const Solution& sol, const Composite& comp, int k);
/// Total power after combining for CP-UE l including the desired signal.
double uplink_total_power(const Scenario& sc, const Solution& sol, const Composite& comp, int l);

/// WMMSE surrogate of log(1 + SINR) in natural-log units.
double surrogate_com_nats(const Scenario& sc, const Solution& sol, const AuxVars& aux, int k);
double surrogate_off_nats(const Scenario& sc, const Solution& sol, const AuxVars& aux, int l);

/// The same surrogates expressed in bits (divided by ln 2): equal to
/// log2(1 + SINR) at aux = update_aux(sol) and a lower bound elsewhere.
double surrogate_com(const Scenario& sc, const Solution& sol, const AuxVars& aux, int k);
double surrogate_off(const Scenario& sc, const Solution& sol, const AuxVars& aux, int l);

/// sum_k surrogate_com + sum_l surrogate_off in nats (unweighted).
double surrogate_throughput_nats(const Scenario& sc, const Solution& sol, const AuxVars& aux);

/// Normalized objective with throughput replaced by surrogates (bits):
///   wt * (sum surrogate_com + sum surrogate_off) + sum f_l / (eps_l B).
double surrogate_objective(const Scenario& sc, const Solution& sol, const AuxVars& aux);

}  // namespace fdiscc
