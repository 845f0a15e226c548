#include "fdiscc/beamforming.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fdiscc {

namespace {

CMat pad(const CMat& a) {
  const Eigen::Index n = a.rows();
  CMat out = CMat::Zero(n + 1, n + 1);
  out.topLeftCorner(n, n) = a;
  return out;
}

double quad(const CMat& a, const CVec& x) { return (x.adjoint() * a * x)(0).real(); }

double total_power(const std::vector<CVec>& w) {
  double p = 0.0;
  for (const auto& v : w) p += v.squaredNorm();
  return p;
}

double echo(const TxCoeffs& c, const std::vector<CVec>& w) {
  double e = 0.0;
  for (const auto& v : w) e += quad(c.omega0, v);
  return e;
}

// Linear part sum_k gain_k Tr(Omega_k Wt_k) at rank one.
double linear_gain(const TxCoeffs& c, const std::vector<CVec>& w) {
  double a = 0.0;
  for (std::size_t k = 0; k < c.omega.size(); ++k) {
    CVec wt(c.n_tx + 1);
    wt << w[k + 1], cd(1.0, 0.0);
    a += c.com_gain[k] * quad(c.omega[k], wt);
  }
  return a;
}

struct Scaled {
  bool feasible = false;
  std::vector<CVec> w;
  double objective = -std::numeric_limits<double>::infinity();
};

// Best common scale s of the beams under power and radar constraints.
Scaled best_scale(const TxCoeffs& c, const CMat& q, std::vector<CVec> w, double p_bs) {
  Scaled out;
  const double pw = total_power(w);
  if (!(pw > 0.0)) return out;
  const double a = linear_gain(c, w);
  double qq = 0.0;
  for (const auto& v : w) qq += quad(q, v);
  const double r = echo(c, w);
  const double s_max = std::sqrt(p_bs / pw);
  double s_min = 0.0;
  if (c.b0 > 0.0) {
    if (!(r > 0.0)) return out;
    s_min = std::sqrt(c.b0 / r);
  }
  if (s_min > s_max * (1.0 + 1e-12)) return out;
  s_min = std::min(s_min, s_max);
  double s = s_max;
  if (qq > 0.0) s = a > 0.0 ? a / (2.0 * qq) : 0.0;
  s = std::clamp(s, s_min, s_max);
  for (auto& v : w) v *= s;
  out.feasible = true;
  out.objective = s * a - s * s * qq;
  out.w = std::move(w);
  return out;
}

struct EigenFactor {
  CMat root;  // W = root * root^H
  CVec principal;
  double lambda1 = 0.0;
  double ratio = 0.0;  // lambda2 / lambda1
};

EigenFactor factor(const CMat& w) {
  Eigen::SelfAdjointEigenSolver<CMat> es(conic::hermitian_part(w));
  const RVec ev = es.eigenvalues().cwiseMax(0.0);
  EigenFactor f;
  f.root = es.eigenvectors() * ev.cwiseSqrt().asDiagonal();
  const Eigen::Index n = ev.size();
  f.lambda1 = ev(n - 1);
  f.principal = es.eigenvectors().col(n - 1);
  f.ratio = n > 1 && f.lambda1 > 0.0 ? ev(n - 2) / f.lambda1 : 0.0;
  return f;
}

// Homogenized vector [w; t] -> w with the phase of t removed.
CVec dehomogenize(const CVec& x, int n) {
  const cd t = x(n);
  const double ph = std::abs(t) > 0.0 ? std::arg(t) : 0.0;
  return x.head(n) * std::polar(1.0, -ph);
}

}  // namespace

CMat TxCoeffs::interference_weight() const {
  CMat q = CMat::Zero(n_tx, n_tx);
  for (std::size_t k = 0; k < h_mat.size(); ++k) q += beta1_sq[k] * h_mat[k];
  for (std::size_t l = 0; l < z_mat.size(); ++l) q += beta2_sq[l] * z_mat[l];
  return q;
}

TxCoeffs assemble_tx_coeffs(const Scenario& sc, const Solution& sol, const AuxVars& aux) {
  const ChannelSet& ch = sc.ch;
  const Composite comp = composite_channels(ch, sol.phi, sc.cci_factor());
  TxCoeffs c;
  c.n_tx = ch.n_tx();
  const int n = c.n_tx;
  for (int k = 0; k < sc.n_cm(); ++k) {
    const double alpha = aux.alpha1(k);
    const cd beta = aux.beta1[k];
    const CRow bh = std::conj(beta) * comp.h[k];
    CMat om = CMat::Zero(n + 1, n + 1);
    om.block(n, 0, 1, n) = bh;
    om.block(0, n, n, 1) = bh.adjoint();
    c.omega.push_back(om);
    c.h_mat.push_back(comp.h[k].adjoint() * comp.h[k]);
    c.com_gain.push_back(std::sqrt(1.0 + alpha));
    c.beta1_sq.push_back(std::norm(beta));
    double uplink = sc.cfg.noise_ue_watt;
    for (int l = 0; l < sc.n_cp(); ++l) uplink += sol.p(l) * std::norm(comp.ebar(l, k));
    c.b3.push_back(std::log1p(alpha) - alpha - std::norm(beta) * uplink);
  }
  for (int l = 0; l < sc.n_cp(); ++l) {
    const double alpha = aux.alpha2(l);
    const cd beta = aux.beta2[l];
    const CVec hu = ch.h_si.adjoint() * sol.u[l];
    c.z_mat.push_back(sc.si_factor() * hu * hu.adjoint());
    c.beta2_sq.push_back(std::norm(beta));
    const cd signal = std::sqrt(std::max(sol.p(l), 0.0)) * sol.u[l].dot(comp.g[l]);
    double rest = sol.u[l].squaredNorm() * sc.cfg.noise_bs_watt;
    for (int j = 0; j < sc.n_cp(); ++j) rest += sol.p(j) * std::norm(sol.u[l].dot(comp.g[j]));
    c.b4.push_back(std::log1p(alpha) - alpha + 2.0 * std::sqrt(1.0 + alpha) * (std::conj(beta) * signal).real() -
                   std::norm(beta) * rest);
  }
  const CMat gsg = ch.g_s * sol.phi.asDiagonal() * ch.g_t;
  c.omega0 = conic::hermitian_part(gsg.adjoint() * gsg);
  double ul = sc.cfg.noise_irs_watt;
  for (int l = 0; l < sc.n_cp(); ++l) ul += sol.p(l) * ch.g_au[l].squaredNorm();
  c.b0 = sc.cfg.gamma_tar_linear * ul;
  return c;
}

double rank_one_objective(const TxCoeffs& c, const std::vector<CVec>& w) {
  const CMat q = c.interference_weight();
  double v = linear_gain(c, w);
  for (const auto& x : w) v -= quad(q, x);
  return v;
}

double tx_surrogate(const TxCoeffs& c, const std::vector<CVec>& w) {
  double v = rank_one_objective(c, w);
  for (double b : c.b3) v += b;
  for (double b : c.b4) v += b;
  return v;
}

double sdr_objective(const TxCoeffs& c, const std::vector<CMat>& blocks) {
  const CMat q = c.interference_weight();
  const int n = c.n_tx;
  double v = -(q * blocks[0]).trace().real();
  for (std::size_t k = 0; k < c.omega.size(); ++k) {
    v += c.com_gain[k] * (c.omega[k] * blocks[k + 1]).trace().real();
    v -= (q * blocks[k + 1].topLeftCorner(n, n)).trace().real();
  }
  return v;
}

TxSdrResult solve_tx_sdr(const TxCoeffs& c, double p_bs) {
  const int n = c.n_tx;
  const std::size_t n_cm = c.omega.size();
  TxSdrResult out;
  const double lmax = Eigen::SelfAdjointEigenSolver<CMat>(c.omega0, Eigen::EigenvaluesOnly).eigenvalues().maxCoeff();
  if (p_bs <= 0.0 || p_bs * lmax < c.b0) {
    if (c.b0 > 0.0 || p_bs < 0.0) {
      out.status = TxStatus::infeasible_sensing;
      return out;
    }
    out.blocks.push_back(CMat::Zero(n, n));
    for (std::size_t k = 0; k < n_cm; ++k) {
      CMat b = CMat::Zero(n + 1, n + 1);
      b(n, n) = 1.0;
      out.blocks.push_back(b);
    }
    out.bound = sdr_objective(c, out.blocks);
    return out;
  }

  const CMat q = c.interference_weight();
  conic::SdpProblem prob;
  prob.add_block(n);
  prob.objective[0] = q;
  for (std::size_t k = 0; k < n_cm; ++k) {
    const int b = prob.add_block(n + 1);
    prob.objective[b] = pad(q) - c.com_gain[k] * c.omega[k];
  }
  conic::SdpConstraint power;
  power.sense = conic::Sense::less_equal;
  power.rhs = p_bs;
  conic::SdpConstraint radar;
  radar.sense = conic::Sense::greater_equal;
  // Slight margin so the extracted rank-one beams keep the radar threshold.
  // The row is divided by lambda_max(Omega_0) so its coefficients are O(1).
  const double unit = lmax > 0.0 ? 1.0 / lmax : 1.0;
  radar.rhs = unit * (p_bs * lmax >= c.b0 * (1.0 + 1e-5) ? c.b0 * (1.0 + 1e-6) : c.b0);
  const CMat omega0 = unit * c.omega0;
  power.terms.push_back({0, CMat::Identity(n, n)});
  radar.terms.push_back({0, omega0});
  for (std::size_t k = 0; k < n_cm; ++k) {
    const int b = static_cast<int>(k) + 1;
    power.terms.push_back({b, pad(CMat::Identity(n, n))});
    radar.terms.push_back({b, pad(omega0)});
  }
  prob.constraints.push_back(power);
  for (std::size_t k = 0; k < n_cm; ++k) prob.fix_entry(static_cast<int>(k) + 1, n, n, 1.0);

  // The radar row is added only when the solution without it violates it.
  auto echo_of = [&](const std::vector<CMat>& x) {
    double v = (omega0 * x[0]).trace().real();
    for (std::size_t k = 1; k < x.size(); ++k) v += (omega0 * x[k].topLeftCorner(n, n)).trace().real();
    return v;
  };
  auto res = conic::solve_sdp(prob);
  if (res.status != conic::Status::optimal || res.x.size() != n_cm + 1 || echo_of(res.x) < radar.rhs) {
    prob.constraints.push_back(radar);
    res = conic::solve_sdp(prob);
  }
  out.solver_status = res.status;
  if (res.status == conic::Status::infeasible) {
    out.status = TxStatus::infeasible_sensing;
    return out;
  }
  if (res.x.size() != n_cm + 1) {
    out.status = TxStatus::solver_failure;
    return out;
  }
  out.blocks = res.x;
  out.bound = sdr_objective(c, out.blocks);
  return out;
}

RandomizeResult gaussian_randomize(const TxSdrResult& sdr, const TxCoeffs& c, double p_bs, int n_draws,
                                   std::mt19937_64& rng) {
  RandomizeResult out;
  if (sdr.status != TxStatus::ok || sdr.blocks.empty()) {
    out.status = sdr.status == TxStatus::ok ? TxStatus::solver_failure : sdr.status;
    return out;
  }
  const int n = c.n_tx;
  const CMat q = c.interference_weight();
  std::vector<EigenFactor> f;
  for (const auto& b : sdr.blocks) f.push_back(factor(b));

  std::vector<CVec> principal;
  principal.push_back(std::sqrt(f[0].lambda1) * f[0].principal);
  bool rank_one = f[0].ratio <= 1e-8;
  for (std::size_t k = 1; k < f.size(); ++k) {
    const CVec x = std::sqrt(f[k].lambda1) * f[k].principal;
    principal.push_back(dehomogenize(x, n));
    rank_one = rank_one && f[k].ratio <= 1e-8;
  }
  out.rank_one = rank_one;

  Scaled best = best_scale(c, q, principal, p_bs);
  if (!rank_one) {
    std::normal_distribution<double> nd(0.0, std::sqrt(0.5));
    for (int d = 0; d < n_draws; ++d) {
      std::vector<CVec> w;
      for (std::size_t k = 0; k < f.size(); ++k) {
        CVec g(f[k].root.cols());
        for (Eigen::Index i = 0; i < g.size(); ++i) g(i) = cd(nd(rng), nd(rng));
        const CVec xi = f[k].root * g;
        w.push_back(k == 0 ? xi : dehomogenize(xi, n));
      }
      Scaled cand = best_scale(c, q, std::move(w), p_bs);
      if (cand.feasible && (!best.feasible || cand.objective > best.objective)) best = std::move(cand);
    }
  }
  if (!best.feasible) {
    out.status = TxStatus::infeasible_sensing;
    return out;
  }
  out.w = std::move(best.w);
  out.objective = rank_one_objective(c, out.w);
  return out;
}

TxUpdate optimize_tx(const Scenario& sc, const Solution& sol, const AuxVars& aux, std::mt19937_64& rng,
                     const TxOptions& opts) {
  TxUpdate up;
  up.w = sol.w;
  const TxCoeffs c = assemble_tx_coeffs(sc, sol, aux);
  const double p_bs = sc.cfg.p_bs_watt;
  const TxSdrResult sdr = solve_tx_sdr(c, p_bs);
  up.status = sdr.status;
  up.bound = sdr.bound;
  if (sdr.status != TxStatus::ok) return up;
  const RandomizeResult rr = gaussian_randomize(sdr, c, p_bs, opts.n_draws, rng);
  up.status = rr.status;
  if (rr.status != TxStatus::ok) return up;
  const bool power_ok = total_power(rr.w) <= p_bs * (1.0 + 1e-12);
  const bool radar_ok = echo(c, rr.w) >= c.b0 * (1.0 - 1e-9);
  if (power_ok && radar_ok && rank_one_objective(c, rr.w) >= rank_one_objective(c, sol.w)) {
    up.w = rr.w;
    up.accepted = true;
  }
  return up;
}

RxCoeffs assemble_rx_coeffs(const Scenario& sc, const Solution& sol, const AuxVars& aux) {
  const ChannelSet& ch = sc.ch;
  const Composite comp = composite_channels(ch, sol.phi, sc.cci_factor());
  const int nr = ch.n_rx();
  RxCoeffs c;
  std::vector<CVec> si;
  for (const auto& w : sol.w) si.push_back(ch.h_si * w);
  for (int l = 0; l < sc.n_cp(); ++l) {
    const double alpha = aux.alpha2(l);
    const cd beta = aux.beta2[l];
    CMat cov = sc.cfg.noise_bs_watt * CMat::Identity(nr, nr);
    for (int j = 0; j < sc.n_cp(); ++j) cov += sol.p(j) * comp.g[j] * comp.g[j].adjoint();
    for (const auto& s : si) cov += sc.si_factor() * s * s.adjoint();
    c.t5_mat.push_back(conic::hermitian_part(std::norm(beta) * cov));
    c.t5.push_back(std::sqrt(1.0 + alpha) * std::sqrt(std::max(sol.p(l), 0.0)) * std::conj(beta) * comp.g[l]);
    c.b5.push_back(std::log1p(alpha) - alpha);
  }
  return c;
}

double rx_objective(const RxCoeffs& c, int l, const CVec& u) {
  return c.b5[l] + 2.0 * u.dot(c.t5[l]).real() - quad(c.t5_mat[l], u);
}

std::optional<CVec> solve_rx(const RxCoeffs& c, int l) {
  Eigen::LLT<CMat> llt(c.t5_mat[l]);
  if (llt.info() != Eigen::Success || c.t5_mat[l].norm() == 0.0) return std::nullopt;
  const CVec u = llt.solve(c.t5[l]);
  if (!u.allFinite()) return std::nullopt;
  return u;
}

std::vector<CVec> optimize_rx(const Scenario& sc, const Solution& sol, const AuxVars& aux) {
  const RxCoeffs c = assemble_rx_coeffs(sc, sol, aux);
  std::vector<CVec> u = sol.u;
  for (int l = 0; l < sc.n_cp(); ++l) {
    const auto cand = solve_rx(c, l);
    if (cand && cand->norm() > 0.0 && rx_objective(c, l, *cand) >= rx_objective(c, l, u[l])) u[l] = *cand;
  }
  return u;
}

}  // namespace fdiscc
