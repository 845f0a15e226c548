#include "fdiscc/orchestrator.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "fdiscc/cacheopt.hpp"
#include "fdiscc/powercomp.hpp"
#include "fdiscc/wmmse.hpp"

namespace fdiscc {

namespace {

using Clock = std::chrono::steady_clock;

// Initial uplink interference: at most this fraction of the initial echo power
// and at most kSlackShare of the radar slack.
constexpr double kEchoShare = 0.02;
constexpr double kSlackShare = 0.5;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

CVec random_phase(int m, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 2.0 * std::numbers::pi);
  CVec phi(m);
  for (int i = 0; i < m; ++i) phi(i) = std::polar(1.0, u(rng));
  return phi;
}

CVec unit_or_first(const CVec& v) {
  const double n = v.norm();
  if (n > 0.0) return v / n;
  CVec e = CVec::Zero(v.size());
  e(0) = 1.0;
  return e;
}

// Phase aligning the cascade c^H diag(phi) G_t w_mrt, where w_mrt is the
// matched filter of c^H G_t (the cascade at phi = 1).
struct Alignment {
  CVec phi;
  double gain = 0.0;
};

Alignment align(const CMat& g_t, const CVec& c) {
  const CVec w = unit_or_first((c.adjoint() * g_t).adjoint());
  const CVec r = c.conjugate().cwiseProduct(g_t * w);
  Alignment a;
  a.phi.resize(r.size());
  for (Eigen::Index m = 0; m < r.size(); ++m) a.phi(m) = std::polar(1.0, -std::arg(r(m)));
  a.gain = r.cwiseAbs().sum();
  return a;
}

Solution empty_solution(const Scenario& sc) {
  Solution s;
  s.w.assign(static_cast<std::size_t>(sc.n_cm() + 1), CVec::Zero(sc.ch.n_tx()));
  s.u.assign(static_cast<std::size_t>(sc.n_cp()), CVec::Zero(sc.ch.n_rx()));
  s.phi = CVec::Ones(sc.ch.m_passive());
  s.f = RVec::Zero(sc.n_cp());
  s.p = RVec::Zero(sc.n_cp());
  s.e = RVec::Zero(sc.cfg.cache.n_files);
  return s;
}

}  // namespace

std::string to_string(Scheme s) {
  switch (s) {
    case Scheme::proposed: return "proposed";
    case Scheme::full_offloading: return "full_offloading";
    case Scheme::fixed_phase: return "fixed_phase";
    case Scheme::hd: return "hd";
    case Scheme::random_caching: return "random_caching";
    case Scheme::no_caching: return "no_caching";
  }
  return "unknown";
}

std::optional<Scheme> parse_scheme(std::string_view name) {
  std::string key(name);
  std::replace(key.begin(), key.end(), '-', '_');
  for (Scheme s : all_schemes()) {
    if (to_string(s) == key) return s;
  }
  return std::nullopt;
}

std::vector<Scheme> all_schemes() {
  return {Scheme::proposed, Scheme::full_offloading, Scheme::fixed_phase,
          Scheme::hd,       Scheme::random_caching,  Scheme::no_caching};
}

const char* to_string(RunStatus s) {
  switch (s) {
    case RunStatus::converged: return "converged";
    case RunStatus::max_iter: return "max_iter";
    case RunStatus::infeasible_sensing: return "infeasible_sensing";
  }
  return "unknown";
}

CVec fixed_phase(const ChannelSet& ch) {
  if (ch.n_cm() == 0) return align(ch.g_t, ch.a_passive).phi;
  Alignment best;
  for (const auto& h : ch.h_pu) {
    Alignment a = align(ch.g_t, h);
    if (best.phi.size() == 0 || a.gain > best.gain) best = std::move(a);
  }
  return best.phi;
}

InitResult initialize(const Scenario& sc, std::mt19937_64& rng, const std::optional<CVec>& phi,
                      bool full_offloading) {
  const auto& cfg = sc.cfg;
  const ChannelSet& ch = sc.ch;
  InitResult out;
  Solution& s = out.solution;
  s = empty_solution(sc);
  s.phi = phi ? *phi : random_phase(ch.m_passive(), rng);
  if (s.phi.size() != ch.m_passive()) throw InvalidArgument("initialize: phi size mismatch");

  const Composite comp = composite_channels(ch, s.phi, sc.cci_factor());
  const int n_cm = sc.n_cm();
  const int n_cp = sc.n_cp();
  const double p_bs = cfg.p_bs_watt;

  const CMat gsg = ch.g_s * s.phi.asDiagonal() * ch.g_t;
  const CMat omega0 = gsg.adjoint() * gsg;
  Eigen::SelfAdjointEigenSolver<CMat> es(conic::hermitian_part(omega0));
  const CVec v0 = es.eigenvectors().col(ch.n_tx() - 1);
  const double echo_sense = p_bs * std::max(es.eigenvalues().maxCoeff(), 0.0);

  std::vector<CVec> dirs;
  double echo_users = 0.0;
  for (int k = 0; k < n_cm; ++k) {
    dirs.push_back(unit_or_first(comp.h[k].adjoint()));
    echo_users += (dirs.back().adjoint() * omega0 * dirs.back())(0).real();
  }
  if (n_cm > 0) echo_users *= p_bs / n_cm;

  RVec p(n_cp);
  for (int l = 0; l < n_cp; ++l) {
    p(l) = cfg.e_max_joule[l] / (2.0 * cfg.coherence_time_s);
  }
  const double margin = 1.0 + 1e-9;
  auto need = [&](const RVec& pw) {
    double d = cfg.noise_irs_watt;
    for (int l = 0; l < n_cp; ++l) d += pw(l) * ch.g_au[l].squaredNorm();
    return cfg.gamma_tar_linear * d * margin;
  };

  // Equal power over the K + 1 beams with capped uplink interference. Only
  // when the threshold fails at zero uplink power is power shifted to the
  // sensing beam.
  const double t0 = n_cm > 0 ? 1.0 / (n_cm + 1) : 1.0;
  auto echo_at = [&](double t) { return t * echo_sense + (1.0 - t) * echo_users; };
  double t = t0;
  const double slack = echo_at(t0) / (cfg.gamma_tar_linear * margin) - cfg.noise_irs_watt;
  if (slack > 0.0) {
    double load = 0.0;
    for (int l = 0; l < n_cp; ++l) load += p(l) * ch.g_au[l].squaredNorm();
    const double cap = std::min(kEchoShare * echo_at(t0), kSlackShare * slack);
    if (load > cap) p *= cap / load;
  } else {
    p.setZero();
    if (echo_sense < need(p)) {
      t = 1.0;
      out.sensing_feasible = false;
    } else {
      const double denom = echo_sense - echo_users;
      t = denom > 0.0 ? std::clamp((need(p) - echo_users) / denom, t0, 1.0) : 1.0;
    }
  }
  s.w[0] = std::sqrt(t * p_bs) * v0;
  for (int k = 0; k < n_cm; ++k) s.w[k + 1] = std::sqrt((1.0 - t) * p_bs / n_cm) * dirs[k];
  s.p = p;
  for (int l = 0; l < n_cp; ++l) {
    const double rest = cfg.e_max_joule[l] - cfg.coherence_time_s * p(l);
    s.f(l) = full_offloading || rest <= 0.0 ? 0.0 : std::cbrt(rest / (cfg.coherence_time_s * cfg.zeta));
    s.u[l] = unit_or_first(comp.g[l]);
  }
  if (out.sensing_feasible && radar_sinr(sc, s) < cfg.gamma_tar_linear * (1.0 - 1e-9)) out.sensing_feasible = false;
  return out;
}

RunResult run(const Scenario& sc, const RunOptions& opts) {
  const auto t_start = Clock::now();
  const auto& cfg = sc.cfg;
  std::mt19937_64 rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
  RunResult res;

  RVec e;
  switch (opts.cache) {
    case CacheMode::optimal: e = solve_caching(cfg.cache).e; break;
    case CacheMode::random: {
      std::mt19937_64 cache_rng(cfg.seed ^ 0xc2b2ae3d27d4eb4fULL);
      e = random_caching(cfg.cache, cache_rng).e;
      break;
    }
    case CacheMode::none: e = RVec::Zero(cfg.cache.n_files); break;
  }

  std::optional<CVec> phi0 = opts.phi_init;
  if (!phi0 && opts.aligned_start) phi0 = fixed_phase(sc.ch);
  InitResult init = initialize(sc, rng, phi0, opts.full_offloading);
  Solution sol = std::move(init.solution);
  sol.e = e;

  auto record = [&](int iter, double wall, bool ph, bool tx, int admm) {
    IterationTrace row;
    row.iter = iter;
    row.surrogate = normalized_objective(sc, sol);
    row.utility = evaluate(sc, sol).utility;
    row.residuals = constraint_residuals(sc, sol);
    row.wall_ms = wall;
    row.phase_accepted = ph;
    row.tx_accepted = tx;
    row.admm_iterations = admm;
    res.trace.push_back(row);
  };
  record(0, ms_since(t_start), false, false, 0);

  if (!init.sensing_feasible) {
    res.status = RunStatus::infeasible_sensing;
  } else {
    int small_steps = 0;
    bool phase_active = opts.optimize_phase && !opts.staged_phase;
    res.status = RunStatus::max_iter;
    for (int iter = 1; iter <= opts.max_iter; ++iter) {
      const auto t_iter = Clock::now();
      const AuxVars aux = update_aux(sc, sol);

      bool phase_accepted = false;
      int admm = 0;
      if (phase_active) {
        for (int pass = 0; pass < opts.phase_passes; ++pass) {
          const AuxVars phase_aux = pass == 0 ? aux : update_aux(sc, sol);
          PhaseResult pr = optimize_phase(sc, sol, phase_aux, opts.phase);
          admm += pr.inner_iterations;
          for (auto& row : pr.trace) {
            row.outer = iter;
            res.admm_trace.push_back(row);
          }
          if (!pr.accepted) break;
          sol.phi = pr.phi;
          phase_accepted = true;
        }
      }

      const TxUpdate tu = optimize_tx(sc, sol, aux, rng, opts.tx);
      if (tu.accepted) sol.w = tu.w;

      sol.u = optimize_rx(sc, sol, aux);

      const PowerCoeffs pc = assemble_power_coeffs(sc, sol, aux, opts.full_offloading);
      const PowerResult pw = solve_power_compute(pc);
      if (pw.status == PowerStatus::optimal && pc.objective(pw.p, pw.f) >= pc.objective(sol.p, sol.f)) {
        sol.p = pw.p;
        sol.f = pw.f;
      }

      const double prev = res.trace.back().surrogate;
      record(iter, ms_since(t_iter), phase_accepted, tu.accepted, admm);
      res.iterations = iter;
      const double cur = res.trace.back().surrogate;
      const double rel = (cur - prev) / std::max(std::abs(prev), 1e-12);
      small_steps = rel < opts.rel_tol ? small_steps + 1 : 0;
      if (small_steps >= opts.patience) {
        if (!phase_active && opts.optimize_phase) {
          phase_active = true;
          small_steps = 0;
          continue;
        }
        res.status = RunStatus::converged;
        break;
      }
    }
  }

  res.solution = sol;
  res.metrics = evaluate(sc, sol);
  res.residuals = constraint_residuals(sc, sol);
  res.wall_ms = ms_since(t_start);
  return res;
}

RunResult evaluate_baseline(const SystemConfig& cfg, const ChannelSet& ch, Scheme scheme, RunOptions opts) {
  Scenario sc{cfg, ch, Duplex::full};
  switch (scheme) {
    case Scheme::proposed: break;
    case Scheme::full_offloading: opts.full_offloading = true; break;
    case Scheme::fixed_phase:
      opts.optimize_phase = false;
      opts.phi_init = fixed_phase(ch);
      break;
    case Scheme::hd: sc.duplex = Duplex::half; break;
    case Scheme::random_caching: opts.cache = CacheMode::random; break;
    case Scheme::no_caching: opts.cache = CacheMode::none; break;
  }
  RunResult r = run(sc, opts);
  r.scheme = scheme;
  return r;
}

}  // namespace fdiscc
