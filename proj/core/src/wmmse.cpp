#include "fdiscc/wmmse.hpp"

#include <cmath>

namespace fdiscc {

namespace {

double surrogate_form(double alpha, cd beta, cd signal, double total) {
  return std::log1p(alpha) - alpha + 2.0 * std::sqrt(1.0 + alpha) * (std::conj(beta) * signal).real() -
         std::norm(beta) * total;
}

cd downlink_signal(const Solution& sol, const Composite& comp, int k) { return (comp.h[k] * sol.w[k + 1])(0); }

cd uplink_signal(const Solution& sol, const Composite& comp, int l) {
  return std::sqrt(std::max(sol.p(l), 0.0)) * sol.u[l].dot(comp.g[l]);
}

}  // namespace

double downlink_total_power(const Scenario& sc, const Solution& sol, const Composite& comp, int k) {
  double total = sc.cfg.noise_ue_watt;
  for (const auto& w : sol.w) total += std::norm((comp.h[k] * w)(0));
  for (int l = 0; l < sc.n_cp(); ++l) total += sol.p(l) * std::norm(comp.ebar(l, k));
  return total;
}

double uplink_total_power(const Scenario& sc, const Solution& sol, const Composite& comp, int l) {
  const CVec& u = sol.u[l];
  double total = u.squaredNorm() * sc.cfg.noise_bs_watt;
  for (int j = 0; j < sc.n_cp(); ++j) total += sol.p(j) * std::norm(u.dot(comp.g[j]));
  total += sc.si_factor() * self_interference_power(sc.ch, u, sol.w);
  return total;
}

AuxVars update_aux(const Scenario& sc, const Solution& sol) {
  const Composite comp = composite_channels(sc.ch, sol.phi, sc.cci_factor());
  AuxVars aux;
  const int n_cm = sc.n_cm();
  const int n_cp = sc.n_cp();
  aux.alpha1 = RVec::Zero(n_cm);
  aux.beta1.assign(static_cast<std::size_t>(n_cm), cd{});
  aux.alpha2 = RVec::Zero(n_cp);
  aux.beta2.assign(static_cast<std::size_t>(n_cp), cd{});
  for (int k = 0; k < n_cm; ++k) {
    const cd s = downlink_signal(sol, comp, k);
    const double total = downlink_total_power(sc, sol, comp, k);
    const double interference = total - std::norm(s);
    const double alpha = interference > 0.0 ? std::norm(s) / interference : 0.0;
    aux.alpha1(k) = alpha;
    aux.beta1[k] = std::sqrt(1.0 + alpha) * s / total;
  }
  for (int l = 0; l < n_cp; ++l) {
    const cd s = uplink_signal(sol, comp, l);
    const double total = uplink_total_power(sc, sol, comp, l);
    const double interference = total - std::norm(s);
    const double alpha = (interference > 0.0 && std::norm(s) > 0.0) ? std::norm(s) / interference : 0.0;
    aux.alpha2(l) = alpha;
    aux.beta2[l] = total > 0.0 ? std::sqrt(1.0 + alpha) * s / total : cd{};
  }
  return aux;
}

double surrogate_com_nats(const Scenario& sc, const Solution& sol, const AuxVars& aux, int k) {
  const Composite comp = composite_channels(sc.ch, sol.phi, sc.cci_factor());
  return surrogate_form(aux.alpha1(k), aux.beta1[k], downlink_signal(sol, comp, k),
                        downlink_total_power(sc, sol, comp, k));
}

double surrogate_off_nats(const Scenario& sc, const Solution& sol, const AuxVars& aux, int l) {
  const Composite comp = composite_channels(sc.ch, sol.phi, sc.cci_factor());
  return surrogate_form(aux.alpha2(l), aux.beta2[l], uplink_signal(sol, comp, l),
                        uplink_total_power(sc, sol, comp, l));
}

double surrogate_com(const Scenario& sc, const Solution& sol, const AuxVars& aux, int k) {
  return surrogate_com_nats(sc, sol, aux, k) / kLn2;
}

double surrogate_off(const Scenario& sc, const Solution& sol, const AuxVars& aux, int l) {
  return surrogate_off_nats(sc, sol, aux, l) / kLn2;
}

double surrogate_throughput_nats(const Scenario& sc, const Solution& sol, const AuxVars& aux) {
  const Composite comp = composite_channels(sc.ch, sol.phi, sc.cci_factor());
  double total = 0.0;
  for (int k = 0; k < sc.n_cm(); ++k) {
    total += surrogate_form(aux.alpha1(k), aux.beta1[k], downlink_signal(sol, comp, k),
                            downlink_total_power(sc, sol, comp, k));
  }
  for (int l = 0; l < sc.n_cp(); ++l) {
    total += surrogate_form(aux.alpha2(l), aux.beta2[l], uplink_signal(sol, comp, l),
                            uplink_total_power(sc, sol, comp, l));
  }
  return total;
}

double surrogate_objective(const Scenario& sc, const Solution& sol, const AuxVars& aux) {
  double total = sc.throughput_weight() * surrogate_throughput_nats(sc, sol, aux) / kLn2;
  for (int l = 0; l < sc.n_cp(); ++l) {
    total += sol.f(l) / (sc.cfg.eps_cycles_per_bit[l] * sc.cfg.bandwidth_hz);
  }
  return total;
}

}  // namespace fdiscc
