#include "fdiscc/phaseadmm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

#include "fdiscc/conic.hpp"

namespace fdiscc {

double PhaseCoeffs::throughput(const CVec& phi) const {
  return -(phi.adjoint() * t12_mat * phi)(0).real() + 2.0 * t12.dot(phi).real() + b12;
}

PhaseCoeffs assemble_phase_coeffs(const Scenario& sc, const Solution& sol, const AuxVars& aux) {
  const ChannelSet& ch = sc.ch;
  const int m = ch.m_passive();
  const double cci2 = sc.cci_factor() * sc.cci_factor();
  PhaseCoeffs c;
  c.t12_mat = CMat::Zero(m, m);
  c.t12 = CVec::Zero(m);
  c.b12 = 0.0;

  // Reflected transmit signals G_t w_j; h_k w_j = v_kj^H phi with v_kj = h_pu,k o conj(G_t w_j).
  std::vector<CVec> gw;
  for (const auto& w : sol.w) gw.push_back(ch.g_t * w);

  for (int k = 0; k < sc.n_cm(); ++k) {
    const double alpha = aux.alpha1(k);
    const cd beta = aux.beta1[k];
    const double bb = std::norm(beta);
    for (std::size_t j = 0; j < gw.size(); ++j) {
      const CVec v = ch.h_pu[k].cwiseProduct(gw[j].conjugate());
      c.t12_mat += bb * v * v.adjoint();
      if (static_cast<int>(j) == k + 1) c.t12 += std::sqrt(1.0 + alpha) * beta * v;
    }
    double b = std::log1p(alpha) - alpha - bb * sc.cfg.noise_ue_watt;
    for (int l = 0; l < sc.n_cp(); ++l) {
      const CVec a = ch.h_pu[k].cwiseProduct(ch.g_pu[l].conjugate());
      const double w = bb * sol.p(l) * cci2;
      c.t12_mat += w * a * a.adjoint();
      c.t12 -= w * ch.e_direct(l, k) * a;
      b -= w * std::norm(ch.e_direct(l, k));
    }
    c.b12 += b;
  }

  for (int l = 0; l < sc.n_cp(); ++l) {
    const double alpha = aux.alpha2(l);
    const cd beta = aux.beta2[l];
    const double bb = std::norm(beta);
    const CVec gru = ch.g_r * sol.u[l];
    for (int j = 0; j < sc.n_cp(); ++j) {
      const CVec y = ch.g_pu[j].conjugate().cwiseProduct(gru);
      c.t12_mat += bb * sol.p(j) * y * y.adjoint();
      if (j == l) c.t12 += std::sqrt(1.0 + alpha) * beta * std::sqrt(std::max(sol.p(l), 0.0)) * y;
    }
    const double si = sc.si_factor() * self_interference_power(ch, sol.u[l], sol.w);
    c.b12 += std::log1p(alpha) - alpha - bb * (si + sol.u[l].squaredNorm() * sc.cfg.noise_bs_watt);
  }
  c.t12_mat = conic::hermitian_part(c.t12_mat);

  c.t0_mat = CMat::Zero(m, m);
  for (const auto& g : gw) {
    const CMat t01 = ch.g_s * g.asDiagonal();
    c.t0_mat += t01.adjoint() * t01;
  }
  c.t0_mat = conic::hermitian_part(c.t0_mat);
  double ul = sc.cfg.noise_irs_watt;
  for (int l = 0; l < sc.n_cp(); ++l) ul += sol.p(l) * ch.g_au[l].squaredNorm();
  c.b0 = sc.cfg.gamma_tar_linear * ul;
  return c;
}

LinearizedRadar mm_linearize_radar(const PhaseCoeffs& coeffs, const CVec& phi0) {
  LinearizedRadar lin;
  lin.d = coeffs.t0_mat * phi0;
  lin.e = (phi0.adjoint() * lin.d)(0).real() + coeffs.b0;
  return lin;
}

PhiStep admm_phi_step(const PhaseCoeffs& coeffs, const AdmmState& state, const LinearizedRadar& lin) {
  if (!(state.rho > 0.0)) throw InvalidArgument("admm_phi_step: rho must be > 0");
  conic::QcqpProblem prob;
  prob.a = coeffs.t12_mat;
  prob.b = coeffs.t12;
  prob.c = -coeffs.b12;
  prob.prox_weight = 1.0 / (2.0 * state.rho);
  prob.prox_center = state.psi - state.rho * state.lambda;
  prob.d.push_back(-2.0 * lin.d);
  prob.e.push_back(lin.e);
  const auto res = conic::solve_qcqp(prob);
  PhiStep step;
  step.phi = res.x;
  step.feasible = res.status != conic::Status::infeasible;
  return step;
}

CVec psi_step(const CVec& phi, const CVec& lambda, double rho) {
  const CVec v = phi + rho * lambda;
  CVec psi(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) psi(i) = std::polar(1.0, std::arg(v(i)));
  return psi;
}

CVec dual_step(const AdmmState& state) { return state.lambda + (state.phi - state.psi) / state.rho; }

PhaseResult optimize_phase(const Scenario& sc, const Solution& sol, const AuxVars& aux, const PhaseOptions& opts) {
  const PhaseCoeffs coeffs = assemble_phase_coeffs(sc, sol, aux);
  PhaseResult out;
  out.phi = sol.phi;

  const double base = coeffs.throughput(sol.phi);
  auto radar_ok = [&](const CVec& psi) {
    return (psi.adjoint() * coeffs.t0_mat * psi)(0).real() >= coeffs.b0 * (1.0 - 1e-9);
  };

  AdmmState st;
  st.phi = sol.phi;
  st.psi = sol.phi;
  st.lambda = CVec::Zero(sol.phi.size());
  // Penalty relative to the curvature of the quadratic.
  const double curvature = std::max({Eigen::SelfAdjointEigenSolver<CMat>(conic::hermitian_part(coeffs.t12_mat), Eigen::EigenvaluesOnly)
                                         .eigenvalues()
                                         .maxCoeff(),
                                     coeffs.t12.norm() / std::sqrt(static_cast<double>(sol.phi.size())),
                                     std::numeric_limits<double>::min()});
  st.rho = opts.rho_init / curvature;
  const double rho_floor = opts.rho_floor / curvature;

  CVec best;
  double best_value = base;
  for (int it = 1; it <= opts.max_inner; ++it) {
    const LinearizedRadar lin = mm_linearize_radar(coeffs, st.phi);
    const PhiStep step = admm_phi_step(coeffs, st, lin);
    if (!step.feasible) {
      out.subproblem_infeasible = true;
      break;
    }
    st.phi = step.phi;
    st.psi = psi_step(st.phi, st.lambda, st.rho);
    st.lambda = dual_step(st);
    const double residual = (st.phi - st.psi).norm();
    const double value = coeffs.throughput(st.psi);
    out.trace.push_back({0, it, residual, value, st.rho});
    out.inner_iterations = it;
    out.final_residual = residual;
    if (value > best_value && radar_ok(st.psi)) {
      best = st.psi;
      best_value = value;
    }
    if ((st.phi - st.psi).lpNorm<Eigen::Infinity>() <= opts.consensus_tol) break;
    st.rho = std::max(st.rho * opts.rho_decay, rho_floor);
  }

  if (out.subproblem_infeasible) return out;
  if (coeffs.throughput(st.psi) >= base && radar_ok(st.psi)) {
    out.phi = st.psi;
    out.accepted = true;
  } else if (best.size()) {
    out.phi = best;
    out.accepted = true;
  }
  return out;
}

}  // namespace fdiscc
