#include "fdiscc/powercomp.hpp"

#include <algorithm>
#include <cmath>

namespace fdiscc {

namespace {

struct UserSolution {
  double p = 0.0;
  double f = 0.0;
  double nu = 0.0;
};

double cpu_from_energy(double energy, double t_s, double zeta) {
  return energy > 0.0 ? std::cbrt(energy / (t_s * zeta)) : 0.0;
}

// maximize b6 sqrt(p) - price p + gain f  s.t.  T p + T zeta f^3 <= E.
UserSolution solve_user(double b6, double price, double gain, double e_max, double t_s, double zeta) {
  UserSolution s;
  const double p_cap = e_max / t_s;
  if (gain <= 0.0) {
    if (b6 > 0.0) s.p = price > 0.0 ? std::min(std::pow(b6 / (2.0 * price), 2), p_cap) : p_cap;
    if (s.p >= p_cap && b6 > 0.0) s.nu = std::max(0.0, (b6 / (2.0 * std::sqrt(s.p)) - price) / t_s);
    return s;
  }
  // The energy budget binds: f = ((E - T p) / (T zeta))^(1/3).
  if (b6 > 0.0) {
    auto slope = [&](double p) {
      const double rest = (e_max - t_s * p) / (t_s * zeta);
      return b6 / (2.0 * std::sqrt(p)) - price - gain / (3.0 * zeta) * std::pow(rest, -2.0 / 3.0);
    };
    double lo = 0.0;
    double hi = p_cap;
    for (int i = 0; i < 200 && hi - lo > 1e-16 * p_cap; ++i) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= 0.0 || mid >= p_cap) break;
      (slope(mid) > 0.0 ? lo : hi) = mid;
    }
    s.p = 0.5 * (lo + hi);
  }
  s.f = cpu_from_energy(e_max - t_s * s.p, t_s, zeta);
  s.nu = s.f > 0.0 ? gain / (3.0 * t_s * zeta * s.f * s.f) : 0.0;
  return s;
}

}  // namespace

double PowerCoeffs::linear_price(int l) const {
  double v = b7(l);
  for (Eigen::Index k = 0; k < b11.rows(); ++k) v += c1(k) * b11(k, l);
  return v;
}

double PowerCoeffs::objective(const RVec& p, const RVec& f) const {
  double v = 0.0;
  for (Eigen::Index l = 0; l < p.size(); ++l) {
    v += b6(l) * std::sqrt(std::max(p(l), 0.0)) - linear_price(static_cast<int>(l)) * p(l) + compute_gain(l) * f(l);
  }
  return v;
}

PowerCoeffs assemble_power_coeffs(const Scenario& sc, const Solution& sol, const AuxVars& aux, bool full_offloading) {
  const ChannelSet& ch = sc.ch;
  const Composite comp = composite_channels(ch, sol.phi, sc.cci_factor());
  const int n_cm = sc.n_cm();
  const int n_cp = sc.n_cp();
  const double wt = sc.throughput_weight();
  PowerCoeffs c;
  c.b2 = RVec::Zero(n_cp);
  c.b6 = RVec::Zero(n_cp);
  c.b7 = RVec::Zero(n_cp);
  c.b9 = RVec::Zero(n_cp);
  c.b10 = RVec::Zero(n_cm);
  c.c1 = RVec::Zero(n_cm);
  c.b11 = RMat::Zero(n_cm, n_cp);
  c.compute_gain = RVec::Zero(n_cp);
  c.e_max = RVec::Zero(n_cp);
  c.t_s = sc.cfg.coherence_time_s;
  c.zeta = sc.cfg.zeta;

  for (int k = 0; k < n_cm; ++k) {
    const double alpha = aux.alpha1(k);
    const cd beta = aux.beta1[k];
    double received = sc.cfg.noise_ue_watt;
    for (const auto& w : sol.w) received += std::norm((comp.h[k] * w)(0));
    const cd signal = (comp.h[k] * sol.w[k + 1])(0);
    c.b10(k) = wt * (std::log1p(alpha) - alpha + 2.0 * std::sqrt(1.0 + alpha) * (std::conj(beta) * signal).real() -
                     std::norm(beta) * received);
    c.c1(k) = wt * std::norm(beta);
    for (int l = 0; l < n_cp; ++l) c.b11(k, l) = std::norm(comp.ebar(l, k));
  }
  for (int l = 0; l < n_cp; ++l) {
    const double alpha = aux.alpha2(l);
    const cd beta = aux.beta2[l];
    const double si = sc.si_factor() * self_interference_power(ch, sol.u[l], sol.w);
    c.b2(l) = wt * (std::log1p(alpha) - alpha - std::norm(beta) * (si + sol.u[l].squaredNorm() * sc.cfg.noise_bs_watt));
    c.b6(l) = wt * 2.0 * std::sqrt(1.0 + alpha) * (std::conj(beta) * sol.u[l].dot(comp.g[l])).real();
    for (int j = 0; j < n_cp; ++j) c.b7(l) += wt * std::norm(aux.beta2[j]) * std::norm(sol.u[j].dot(comp.g[l]));
    c.b9(l) = sc.cfg.gamma_tar_linear * ch.g_au[l].squaredNorm();
    c.compute_gain(l) = full_offloading ? 0.0 : kLn2 / (sc.cfg.eps_cycles_per_bit[l] * sc.cfg.bandwidth_hz);
    c.e_max(l) = sc.cfg.e_max_joule[l];
  }
  c.c8 = radar_echo_power(ch, sol.phi, sol.w) - sc.cfg.noise_irs_watt * sc.cfg.gamma_tar_linear;
  return c;
}

PowerResult solve_power_compute(const PowerCoeffs& c) {
  const auto n = c.b6.size();
  PowerResult r;
  r.p = RVec::Zero(n);
  r.f = RVec::Zero(n);
  r.nu = RVec::Zero(n);
  if (c.c8 < 0.0) {
    r.status = PowerStatus::infeasible_sensing;
    return r;
  }

  std::vector<double> price(static_cast<std::size_t>(n));
  for (Eigen::Index l = 0; l < n; ++l) price[l] = c.linear_price(static_cast<int>(l));

  auto solve_at = [&](double mu, bool block_radar_users) {
    RVec p(n), f(n), nu(n);
    for (Eigen::Index l = 0; l < n; ++l) {
      UserSolution s;
      if (block_radar_users && c.b9(l) > 0.0) {
        s.f = c.compute_gain(l) > 0.0 ? cpu_from_energy(c.e_max(l), c.t_s, c.zeta) : 0.0;
        s.nu = s.f > 0.0 ? c.compute_gain(l) / (3.0 * c.t_s * c.zeta * s.f * s.f) : 0.0;
      } else {
        s = solve_user(c.b6(l), price[l] + mu * c.b9(l), c.compute_gain(l), c.e_max(l), c.t_s, c.zeta);
      }
      p(l) = s.p;
      f(l) = s.f;
      nu(l) = s.nu;
    }
    return std::make_tuple(p, f, nu);
  };
  auto load = [&](const RVec& p) { return c.b9.dot(p); };

  auto [p, f, nu] = solve_at(0.0, false);
  if (load(p) > c.c8) {
    if (c.c8 == 0.0) {
      std::tie(p, f, nu) = solve_at(0.0, true);
      r.mu = HUGE_VAL;
    } else {
      double lo = 0.0;
      double hi = 1.0;
      for (int i = 0; i < 400; ++i) {
        std::tie(p, f, nu) = solve_at(hi, false);
        if (load(p) <= c.c8) break;
        lo = hi;
        hi *= 2.0;
      }
      int it = 0;
      for (; it < 200 && hi - lo > 1e-14 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        auto [pm, fm, num] = solve_at(mid, false);
        (load(pm) > c.c8 ? lo : hi) = mid;
      }
      r.bisection_iterations = it;
      std::tie(p, f, nu) = solve_at(hi, false);
      r.mu = hi;
    }
  }
  r.p = p;
  r.f = f;
  r.nu = nu;
  r.objective = c.objective(p, f);
  return r;
}

}  // namespace fdiscc
