#pragma once

#include <cstdint>
#include <vector>

#include "fdiscc/sysmodel.hpp"
#include "fdiscc/wmmse.hpp"

namespace fdiscc {

/// Quadratic forms of the surrogate throughput and the radar constraint in phi:
///   sum_k Rcom_k + sum_l Roff_l = -phi^H T12 phi + 2 Re{t12^H phi} + b12   (nats)
///   radar:  b0 - phi^H T0 phi <= 0
struct PhaseCoeffs {
  CMat t12_mat;
  CVec t12;
  double b12 = 0.0;
  CMat t0_mat;
  double b0 = 0.0;

  double throughput(const CVec& phi) const;
  double radar_margin(const CVec& phi) const { return (phi.adjoint() * t0_mat * phi).real()(0) - b0; }
};

PhaseCoeffs assemble_phase_coeffs(const Scenario& sc, const Solution& sol, const AuxVars& aux);

/// Tangent minorant of phi^H T0 phi at phi0 turned into an affine constraint
///   -2 Re{d^H phi} + e <= 0,  d = T0 phi0,  e = phi0^H T0 phi0 + b0.
struct LinearizedRadar {
  CVec d;
  double e = 0.0;
  double value(const CVec& phi) const { return -2.0 * d.dot(phi).real() + e; }
};

LinearizedRadar mm_linearize_radar(const PhaseCoeffs& coeffs, const CVec& phi0);

struct AdmmState {
  CVec phi;
  CVec psi;     // unit modulus
  CVec lambda;  // scaled dual
  double rho = 1.0;
};

/// phi-subproblem: minimize the quadratic plus (1/(2 rho)) ||phi - psi + rho lambda||^2
/// under the linearized radar constraint. `feasible` is false if the
/// subproblem had no solution.
struct PhiStep {
  CVec phi;
  bool feasible = true;
};
PhiStep admm_phi_step(const PhaseCoeffs& coeffs, const AdmmState& state, const LinearizedRadar& lin);

/// Projection onto unit modulus: exp(j * angle(phi + rho * lambda)).
CVec psi_step(const CVec& phi, const CVec& lambda, double rho);

/// lambda + (phi - psi) / rho.
CVec dual_step(const AdmmState& state);

struct PhaseOptions {
  double rho_init = 1.0;
  double rho_decay = 0.8;
  double rho_floor = 1e-6;
  double consensus_tol = 1e-5;  // ||phi - psi||_inf
  int max_inner = 200;
};

struct PhaseTraceRow {
  int outer = 0;  // BCA iteration, filled by the caller
  int iter = 0;
  double residual = 0.0;  // ||phi - psi||_2
  double surrogate = 0.0; // throughput at psi, nats
  double rho = 0.0;
};

struct PhaseResult {
  CVec phi;
  bool accepted = false;       // false: the incumbent was kept
  bool subproblem_infeasible = false;
  int inner_iterations = 0;
  double final_residual = 0.0;
  std::vector<PhaseTraceRow> trace;
};

/// ADMM over (phi, psi, lambda) with a geometric penalty schedule; the unit
/// modulus copy psi is returned if it keeps the radar constraint and does not
/// lower the surrogate, otherwise the input phase is kept.
PhaseResult optimize_phase(const Scenario& sc, const Solution& sol, const AuxVars& aux,
                           const PhaseOptions& opts = {});

}  // namespace fdiscc
