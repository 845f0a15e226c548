#pragma once

#include <optional>
#include <random>
#include <vector>

#include "fdiscc/conic.hpp"
#include "fdiscc/sysmodel.hpp"
#include "fdiscc/wmmse.hpp"

namespace fdiscc {

/// Coefficients of the surrogate throughput in the transmit beams (nats):
///   Rcom_k = b3_k + sqrt(1+alpha1_k) Tr(Omega_k Wt_k) - |beta1_k|^2 sum_k' Tr(H_k W_k')
///   Roff_l = b4_l - |beta2_l|^2 Tr(Z_l sum_k W_k)
/// with Wt_k = [w_k; 1][w_k; 1]^H and W_k its leading N_t x N_t block.
/// Radar: Tr(Omega_0 sum_k W_k) >= b0.
struct TxCoeffs {
  int n_tx = 0;
  std::vector<CMat> omega;  // K blocks, (N_t+1) x (N_t+1)
  CMat omega0;              // N_t x N_t
  std::vector<CMat> h_mat;  // K blocks, h_k^H h_k
  std::vector<CMat> z_mat;  // L blocks, H_SI^H u_l u_l^H H_SI (times the SI factor)
  std::vector<double> b3, b4;
  std::vector<double> com_gain;  // sqrt(1 + alpha1_k)
  std::vector<double> beta1_sq, beta2_sq;
  double b0 = 0.0;

  /// sum_k |beta1_k|^2 H_k + sum_l |beta2_l|^2 Z_l: the penalty every beam pays.
  CMat interference_weight() const;
};

TxCoeffs assemble_tx_coeffs(const Scenario& sc, const Solution& sol, const AuxVars& aux);

/// sum Rcom + sum Roff (nats) for rank-one beams w (size K + 1).
double tx_surrogate(const TxCoeffs& c, const std::vector<CVec>& w);
/// Relaxed objective (constants b3, b4 excluded) for lifted blocks
/// (block 0: W_0, N_t x N_t; block k: Wt_k, (N_t+1) x (N_t+1)).
double sdr_objective(const TxCoeffs& c, const std::vector<CMat>& blocks);
/// Same objective evaluated at rank-one beams.
double rank_one_objective(const TxCoeffs& c, const std::vector<CVec>& w);

enum class TxStatus { ok, infeasible_sensing, solver_failure };

struct TxSdrResult {
  TxStatus status = TxStatus::ok;
  std::vector<CMat> blocks;
  double bound = 0.0;  // relaxed optimum of sdr_objective
  conic::Status solver_status = conic::Status::optimal;
};

TxSdrResult solve_tx_sdr(const TxCoeffs& c, double p_bs);

struct RandomizeResult {
  TxStatus status = TxStatus::ok;
  std::vector<CVec> w;
  double objective = 0.0;  // rank_one_objective
  bool rank_one = false;   // principal eigenvectors were exact
};

/// Gaussian randomization around the relaxed solution: each draw is rescaled
/// to its best power level within the budget and the radar constraint, and the
/// best feasible candidate is kept (the principal-eigenvector candidate is
/// always included).
RandomizeResult gaussian_randomize(const TxSdrResult& sdr, const TxCoeffs& c, double p_bs,
                                   int n_draws, std::mt19937_64& rng);

struct TxOptions {
  int n_draws = 200;
};

struct TxUpdate {
  std::vector<CVec> w;
  bool accepted = false;
  TxStatus status = TxStatus::ok;
  double bound = 0.0;
};

/// SDR + randomization with a monotonicity safeguard against the incumbent beams.
TxUpdate optimize_tx(const Scenario& sc, const Solution& sol, const AuxVars& aux,
                     std::mt19937_64& rng, const TxOptions& opts = {});

/// Roff_l = b5_l + 2 Re{u_l^H t5_l} - u_l^H T5_l u_l.
struct RxCoeffs {
  std::vector<CMat> t5_mat;
  std::vector<CVec> t5;
  std::vector<double> b5;
};

RxCoeffs assemble_rx_coeffs(const Scenario& sc, const Solution& sol, const AuxVars& aux);
double rx_objective(const RxCoeffs& c, int l, const CVec& u);
/// u_l = T5_l^{-1} t5_l; nullopt when T5_l is singular (beta2_l = 0).
std::optional<CVec> solve_rx(const RxCoeffs& c, int l);
/// Updates every combiner, keeping the incumbent where the closed form does not apply.
std::vector<CVec> optimize_rx(const Scenario& sc, const Solution& sol, const AuxVars& aux);

}  // namespace fdiscc
