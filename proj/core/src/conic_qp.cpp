#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "fdiscc/conic.hpp"

namespace fdiscc::conic {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Real problem: min 1/2 x'Hx + g'x  s.t.  Gx <= h.
struct RealQp {
  RMat H;
  RVec g;
  RMat G;
  RVec h;
};

struct RealSolution {
  Status status = Status::max_iter;
  RVec x;
  RVec z;
  int iterations = 0;
};

RVec embed(const CVec& v) {
  RVec r(2 * v.size());
  r << v.real(), v.imag();
  return r;
}

CVec unembed(const RVec& r) {
  const Eigen::Index n = r.size() / 2;
  CVec v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = cd(r(i), r(n + i));
  return v;
}

RMat embed_hermitian(const CMat& a) {
  const Eigen::Index n = a.rows();
  RMat r(2 * n, 2 * n);
  r.topLeftCorner(n, n) = a.real();
  r.topRightCorner(n, n) = -a.imag();
  r.bottomLeftCorner(n, n) = a.imag();
  r.bottomRightCorner(n, n) = a.real();
  return 0.5 * (r + r.transpose());
}

double max_step(const RVec& v, const RVec& dv) {
  double a = kInf;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (dv(i) < 0.0) a = std::min(a, -v(i) / dv(i));
  }
  return a;
}

RVec solve_spd(const RMat& k, const RVec& rhs) {
  Eigen::LDLT<RMat> ldlt(k);
  return ldlt.solve(rhs);
}

// Mehrotra predictor-corrector on the reduced normal equations.
RealSolution interior_point(const RealQp& qp, double tol, int max_iter) {
  const Eigen::Index n = qp.g.size();
  const Eigen::Index m = qp.h.size();
  RealSolution out;
  const double reg = 1e-13 * (1.0 + qp.H.cwiseAbs().maxCoeff());

  if (m == 0) {
    out.x = solve_spd(qp.H + reg * RMat::Identity(n, n), -qp.g);
    out.z = RVec();
    const double res = (qp.H * out.x + qp.g).lpNorm<Eigen::Infinity>();
    out.status = res <= tol * (1.0 + qp.g.lpNorm<Eigen::Infinity>()) ? Status::optimal : Status::max_iter;
    return out;
  }

  RVec x = solve_spd(qp.H + RMat::Identity(n, n), -qp.g);
  RVec s = (qp.h - qp.G * x).cwiseMax(1.0);
  RVec z = RVec::Ones(m);
  const double g_scale = 1.0 + qp.g.lpNorm<Eigen::Infinity>();
  const double h_scale = 1.0 + qp.h.lpNorm<Eigen::Infinity>();

  for (int it = 1; it <= max_iter; ++it) {
    out.iterations = it;
    const RVec rd = qp.H * x + qp.g + qp.G.transpose() * z;
    const RVec rp = qp.G * x + s - qp.h;
    const double mu = s.dot(z) / static_cast<double>(m);
    const double obj = 0.5 * x.dot(qp.H * x) + qp.g.dot(x);
    if (rd.lpNorm<Eigen::Infinity>() <= tol * g_scale && rp.lpNorm<Eigen::Infinity>() <= tol * h_scale &&
        s.dot(z) <= tol * (1.0 + std::abs(obj))) {
      out.status = Status::optimal;
      break;
    }

    const RVec d = z.cwiseQuotient(s);
    RMat k = qp.H + qp.G.transpose() * d.asDiagonal() * qp.G;
    k.diagonal().array() += reg;
    Eigen::LDLT<RMat> ldlt(k);

    auto direction = [&](const RVec& rc, RVec& dx, RVec& ds, RVec& dz) {
      // rc is the target residual of s o z.
      const RVec rhs = -rd - qp.G.transpose() * (d.cwiseProduct(rp) - rc.cwiseQuotient(s));
      dx = ldlt.solve(rhs);
      dz = d.cwiseProduct(qp.G * dx + rp) - rc.cwiseQuotient(s);
      ds = -(rc + s.cwiseProduct(dz)).cwiseQuotient(z);
    };

    RVec dx, ds, dz;
    const RVec rc_aff = s.cwiseProduct(z);
    direction(rc_aff, dx, ds, dz);
    const double a_aff = std::min(1.0, std::min(max_step(s, ds), max_step(z, dz)));
    const double mu_aff = (s + a_aff * ds).dot(z + a_aff * dz) / static_cast<double>(m);
    const double sigma = mu > 0.0 ? std::pow(std::max(0.0, mu_aff / mu), 3) : 0.0;

    const RVec rc = s.cwiseProduct(z) + ds.cwiseProduct(dz) - RVec::Constant(m, sigma * mu);
    direction(rc, dx, ds, dz);
    const double a = std::min(1.0, 0.99 * std::min(max_step(s, ds), max_step(z, dz)));
    x += a * dx;
    s += a * ds;
    z += a * dz;
    s = s.cwiseMax(std::numeric_limits<double>::min());
    z = z.cwiseMax(std::numeric_limits<double>::min());
  }
  out.x = x;
  out.z = z;
  return out;
}

struct PhaseOne {
  bool infeasible = false;
  RVec certificate;
};

// min t + delta/2 (|x|^2 + t^2)  s.t.  Gx - t <= h.  t* > 0 certifies infeasibility.
PhaseOne phase_one(const RMat& g_mat, const RVec& h, double tol) {
  const Eigen::Index n = g_mat.cols();
  const Eigen::Index m = g_mat.rows();
  const double delta = 1e-9;
  RealQp p1;
  p1.H = delta * RMat::Identity(n + 1, n + 1);
  p1.g = RVec::Zero(n + 1);
  p1.g(n) = 1.0;
  p1.G.resize(m, n + 1);
  p1.G << g_mat, -RVec::Ones(m);
  p1.h = h;
  const RealSolution sol = interior_point(p1, 1e-12, 200);
  PhaseOne r;
  if (sol.x.size() == n + 1 && sol.x(n) > std::max(1e3 * tol, 1e-8)) {
    r.infeasible = true;
    r.certificate = sol.z;
  }
  return r;
}

}  // namespace

const char* to_string(Status s) {
  switch (s) {
    case Status::optimal: return "optimal";
    case Status::infeasible: return "infeasible";
    case Status::max_iter: return "max_iter";
  }
  return "unknown";
}

CMat hermitian_part(const CMat& a) { return 0.5 * (a + a.adjoint()); }

double QcqpProblem::objective(const CVec& x) const {
  double v = (x.adjoint() * a * x)(0).real() - 2.0 * b.dot(x).real() + c;
  if (prox_weight != 0.0) {
    v += prox_weight * (prox_center.size() ? (x - prox_center).squaredNorm() : x.squaredNorm());
  }
  return v;
}

double QcqpKkt::max() const { return std::max({stationarity, primal, dual, complementarity, std::abs(gap)}); }

QcqpKkt qcqp_kkt(const QcqpProblem& prob, const CVec& x, const std::vector<double>& z) {
  if (z.size() != prob.d.size()) throw InvalidArgument("qcqp_kkt: one multiplier per constraint required");
  CVec grad = 2.0 * (prob.a * x - prob.b);
  if (prob.prox_weight != 0.0) {
    grad += 2.0 * prob.prox_weight * (prob.prox_center.size() ? CVec(x - prob.prox_center) : x);
  }
  QcqpKkt k;
  double lagrangian_shift = 0.0;
  for (std::size_t i = 0; i < prob.d.size(); ++i) {
    grad += z[i] * prob.d[i];
    const double g = prob.d[i].dot(x).real() + prob.e[i];
    k.primal = std::max(k.primal, g);
    k.dual = std::max(k.dual, -z[i]);
    k.complementarity = std::max(k.complementarity, std::abs(z[i] * g));
    lagrangian_shift += z[i] * g;
  }
  k.stationarity = grad.lpNorm<Eigen::Infinity>();
  k.gap = -lagrangian_shift;
  return k;
}

QcqpResult solve_qcqp(const QcqpProblem& prob, const QcqpOptions& opts) {
  const int n = prob.dim();
  if (prob.a.rows() != n || prob.a.cols() != n) throw InvalidArgument("solve_qcqp: A must be n x n");
  if (prob.d.size() != prob.e.size()) throw InvalidArgument("solve_qcqp: d and e sizes differ");
  if (prob.prox_center.size() != 0 && prob.prox_center.size() != n) {
    throw InvalidArgument("solve_qcqp: prox_center size mismatch");
  }
  for (const auto& d : prob.d) {
    if (d.size() != n) throw InvalidArgument("solve_qcqp: constraint size mismatch");
  }

  const CVec center = prob.prox_center.size() ? prob.prox_center : CVec::Zero(n);
  RealQp qp;
  qp.H = 2.0 * embed_hermitian(prob.a);
  qp.H.diagonal().array() += 2.0 * prob.prox_weight;
  qp.g = -2.0 * embed(prob.b + prob.prox_weight * center);

  QcqpResult res;
  const std::size_t m_all = prob.d.size();
  res.duals.assign(m_all, 0.0);

  // Row normalization; zero rows are either redundant or infeasible.
  std::vector<std::size_t> kept;
  std::vector<double> row_norm;
  for (std::size_t i = 0; i < m_all; ++i) {
    const double nrm = prob.d[i].norm();
    if (nrm == 0.0) {
      if (prob.e[i] > 0.0) {
        res.status = Status::infeasible;
        res.certificate.assign(m_all, 0.0);
        res.certificate[i] = 1.0;
        res.x = center;
        res.objective = prob.objective(res.x);
        return res;
      }
      continue;
    }
    kept.push_back(i);
    row_norm.push_back(nrm);
  }
  const auto m = static_cast<Eigen::Index>(kept.size());
  qp.G.resize(m, 2 * n);
  qp.h.resize(m);
  for (Eigen::Index r = 0; r < m; ++r) {
    qp.G.row(r) = embed(prob.d[kept[r]]).transpose() / row_norm[r];
    qp.h(r) = -prob.e[kept[r]] / row_norm[r];
  }

  // Objective scaling keeps the tolerances meaningful.
  const double scale = std::max({qp.H.cwiseAbs().maxCoeff(), qp.g.lpNorm<Eigen::Infinity>(), 1e-300});
  qp.H /= scale;
  qp.g /= scale;

  RVec x;
  RVec z_scaled = RVec::Zero(m);
  bool done = false;
  if (opts.direct_single_constraint && m <= 1) {
    Eigen::LLT<RMat> llt(qp.H);
    if (llt.info() == Eigen::Success) {
      const double min_pivot = llt.matrixL().toDenseMatrix().diagonal().minCoeff();
      if (min_pivot > 1e-10) {
        x = -llt.solve(qp.g);
        if (m == 1) {
          const RVec gr = qp.G.row(0).transpose();
          const double viol = gr.dot(x) - qp.h(0);
          if (viol > 0.0) {
            const RVec hinv_g = llt.solve(gr);
            const double zeta = viol / gr.dot(hinv_g);
            x -= zeta * hinv_g;
            z_scaled(0) = zeta;
          }
        }
        res.iterations = 0;
        res.status = Status::optimal;
        done = true;
      }
    }
  }
  if (!done) {
    const RealSolution sol = interior_point(qp, opts.tolerance, opts.max_iter);
    x = sol.x;
    if (m > 0) z_scaled = sol.z;
    res.iterations = sol.iterations;
    res.status = sol.status;
    if (sol.status != Status::optimal && m > 0) {
      const PhaseOne p1 = phase_one(qp.G, qp.h, opts.tolerance);
      if (p1.infeasible) {
        res.status = Status::infeasible;
        res.certificate.assign(m_all, 0.0);
        for (Eigen::Index r = 0; r < m; ++r) res.certificate[kept[r]] = p1.certificate(r) / row_norm[r];
      }
    }
  }

  res.x = unembed(x);
  for (Eigen::Index r = 0; r < m; ++r) res.duals[kept[r]] = std::max(0.0, z_scaled(r)) * scale / row_norm[r];
  res.objective = prob.objective(res.x);
  double shift = 0.0;
  for (std::size_t i = 0; i < m_all; ++i) shift += res.duals[i] * (prob.d[i].dot(res.x).real() + prob.e[i]);
  res.dual_objective = res.objective + shift;
  return res;
}

void dump(const QcqpProblem& prob, std::ostream& out) {
  const auto old = out.precision(17);
  out << "qcqp n " << prob.dim() << " m " << prob.d.size() << "\n";
  out << "c " << prob.c << "\nprox_weight " << prob.prox_weight << "\n";
  auto vec = [&](const char* name, const CVec& v) {
    out << name;
    for (Eigen::Index i = 0; i < v.size(); ++i) out << ' ' << v(i).real() << ' ' << v(i).imag();
    out << "\n";
  };
  for (Eigen::Index i = 0; i < prob.a.rows(); ++i) vec("a_row", prob.a.row(i).transpose());
  vec("b", prob.b);
  if (prob.prox_center.size()) vec("prox_center", prob.prox_center);
  for (std::size_t i = 0; i < prob.d.size(); ++i) {
    vec("d", prob.d[i]);
    out << "e " << prob.e[i] << "\n";
  }
  out.precision(old);
}

}  // namespace fdiscc::conic
