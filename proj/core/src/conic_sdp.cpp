#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "fdiscc/conic.hpp"

namespace fdiscc::conic {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double inner(const CMat& a, const CMat& b) { return (a.conjugate().cwiseProduct(b)).sum().real(); }

// Standard form: min <C, X>  s.t.  <A_i, X> = b_i,  X = blkdiag(X_k) >= 0.
struct StdTerm {
  int block;
  CMat coeff;
};
struct StdForm {
  std::vector<int> dims;
  std::vector<CMat> c;
  std::vector<std::vector<StdTerm>> a;
  RVec b;
};

std::vector<CMat> apply_adjoint(const StdForm& sf, const RVec& y) {
  std::vector<CMat> out;
  for (int d : sf.dims) out.push_back(CMat::Zero(d, d));
  for (std::size_t i = 0; i < sf.a.size(); ++i) {
    for (const auto& t : sf.a[i]) out[t.block] += y(static_cast<Eigen::Index>(i)) * t.coeff;
  }
  return out;
}

RVec apply_op(const StdForm& sf, const std::vector<CMat>& x) {
  RVec r(static_cast<Eigen::Index>(sf.a.size()));
  for (std::size_t i = 0; i < sf.a.size(); ++i) {
    double v = 0.0;
    for (const auto& t : sf.a[i]) v += inner(t.coeff, x[t.block]);
    r(static_cast<Eigen::Index>(i)) = v;
  }
  return r;
}

double block_inner(const std::vector<CMat>& a, const std::vector<CMat>& b) {
  double v = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) v += inner(a[k], b[k]);
  return v;
}

double block_norm(const std::vector<CMat>& a) {
  double v = 0.0;
  for (const auto& m : a) v += m.squaredNorm();
  return std::sqrt(v);
}

// Largest alpha <= inf with X + alpha dX >= 0 (X > 0).
double psd_step(const std::vector<CMat>& x, const std::vector<CMat>& dx) {
  double alpha = kInf;
  for (std::size_t k = 0; k < x.size(); ++k) {
    Eigen::LLT<CMat> llt(x[k]);
    if (llt.info() != Eigen::Success) return 0.0;
    const CMat l_inv = llt.matrixL().solve(CMat::Identity(x[k].rows(), x[k].cols()));
    CMat m = l_inv * dx[k] * l_inv.adjoint();
    m = hermitian_part(m);
    const double lmin = Eigen::SelfAdjointEigenSolver<CMat>(m, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
    if (lmin < 0.0) alpha = std::min(alpha, -1.0 / lmin);
  }
  return alpha;
}

struct Iterate {
  std::vector<CMat> x, z;
  RVec y;
};

struct Outcome {
  Status status = Status::max_iter;
  Iterate it;
  int iterations = 0;
};

Outcome hkm(const StdForm& sf, double tol, int max_iter) {
  const auto m = static_cast<Eigen::Index>(sf.a.size());
  const std::size_t nb = sf.dims.size();
  double n_total = 0.0;
  for (int d : sf.dims) n_total += d;

  Iterate cur;
  cur.y = RVec::Zero(m);
  for (std::size_t k = 0; k < nb; ++k) {
    const int d = sf.dims[k];
    double xi = std::max(10.0, std::sqrt(static_cast<double>(d)));
    double eta = std::max({10.0, std::sqrt(static_cast<double>(d)), sf.c[k].norm()});
    for (std::size_t i = 0; i < sf.a.size(); ++i) {
      for (const auto& t : sf.a[i]) {
        if (t.block != static_cast<int>(k)) continue;
        xi = std::max(xi, d * (1.0 + std::abs(sf.b(static_cast<Eigen::Index>(i)))) / (1.0 + t.coeff.norm()));
        eta = std::max(eta, t.coeff.norm());
      }
    }
    cur.x.push_back(xi * CMat::Identity(d, d));
    cur.z.push_back(eta * CMat::Identity(d, d));
  }

  const double b_scale = 1.0 + sf.b.norm();
  double c_norm = 0.0;
  for (const auto& c : sf.c) c_norm += c.squaredNorm();
  const double c_scale = 1.0 + std::sqrt(c_norm);

  Outcome out;
  for (int iter = 1; iter <= max_iter; ++iter) {
    out.iterations = iter;
    const RVec rp = sf.b - apply_op(sf, cur.x);
    const std::vector<CMat> aty = apply_adjoint(sf, cur.y);
    std::vector<CMat> rd(nb);
    for (std::size_t k = 0; k < nb; ++k) rd[k] = sf.c[k] - cur.z[k] - aty[k];
    const double pobj = block_inner(sf.c, cur.x);
    const double dobj = sf.b.dot(cur.y);
    const double gap = block_inner(cur.x, cur.z);
    const double mu = gap / n_total;
    const double pinf = rp.norm() / b_scale;
    const double dinf = block_norm(rd) / c_scale;
    const double rel_gap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));
    if (pinf <= tol && dinf <= tol && rel_gap <= tol && gap / (1.0 + std::abs(pobj) + std::abs(dobj)) <= tol) {
      out.status = Status::optimal;
      break;
    }
    // Certificates: dual ray (primal infeasible) and primal ray (dual infeasible).
    std::vector<CMat> ray(nb);
    for (std::size_t k = 0; k < nb; ++k) ray[k] = aty[k] + cur.z[k];
    if (dobj > 0.0 && dobj / std::max(block_norm(ray), 1e-300) > 1e8 && pinf > tol) {
      out.status = Status::infeasible;
      break;
    }
    if (pobj < 0.0 && -pobj / std::max(apply_op(sf, cur.x).norm(), 1e-300) > 1e8 && dinf > tol) {
      out.status = Status::infeasible;
      break;
    }

    std::vector<CMat> z_inv(nb);
    for (std::size_t k = 0; k < nb; ++k) {
      z_inv[k] = cur.z[k].llt().solve(CMat::Identity(sf.dims[k], sf.dims[k]));
      z_inv[k] = hermitian_part(z_inv[k]);
    }

    // Schur complement M_ij = <A_i, X A_j Z^-1>.
    std::vector<std::vector<CMat>> q(static_cast<std::size_t>(m));
    for (Eigen::Index j = 0; j < m; ++j) {
      for (const auto& t : sf.a[j]) q[j].push_back(cur.x[t.block] * t.coeff * z_inv[t.block]);
    }
    RMat schur = RMat::Zero(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
      for (Eigen::Index j = 0; j < m; ++j) {
        double v = 0.0;
        for (const auto& ti : sf.a[i]) {
          for (std::size_t tj = 0; tj < sf.a[j].size(); ++tj) {
            if (sf.a[j][tj].block == ti.block) v += inner(ti.coeff, q[j][tj]);
          }
        }
        schur(i, j) = v;
      }
    }
    schur = 0.5 * (schur + schur.transpose());
    schur.diagonal().array() += 1e-14 * (1.0 + schur.diagonal().cwiseAbs().maxCoeff());
    Eigen::LDLT<RMat> ldlt(schur);

    std::vector<CMat> x_rd_zi(nb);
    for (std::size_t k = 0; k < nb; ++k) x_rd_zi[k] = cur.x[k] * rd[k] * z_inv[k];
    const RVec a_xrdzi = apply_op(sf, x_rd_zi);

    // target[k] = (sigma mu I - corr) Z^-1 for the given centering matrix.
    auto direction = [&](const std::vector<CMat>& centre, std::vector<CMat>& dx, RVec& dy,
                         std::vector<CMat>& dz) {
      std::vector<CMat> t(nb);
      for (std::size_t k = 0; k < nb; ++k) t[k] = centre[k] * z_inv[k];
      const RVec rhs = sf.b - apply_op(sf, t) + a_xrdzi;
      dy = ldlt.solve(rhs);
      const std::vector<CMat> atdy = apply_adjoint(sf, dy);
      dx.assign(nb, CMat());
      dz.assign(nb, CMat());
      for (std::size_t k = 0; k < nb; ++k) {
        dz[k] = rd[k] - atdy[k];
        dx[k] = t[k] - cur.x[k] - cur.x[k] * dz[k] * z_inv[k];
        dx[k] = hermitian_part(dx[k]);
        dz[k] = hermitian_part(dz[k]);
      }
    };

    std::vector<CMat> centre(nb);
    for (std::size_t k = 0; k < nb; ++k) centre[k] = CMat::Zero(sf.dims[k], sf.dims[k]);
    std::vector<CMat> dx, dz;
    RVec dy;
    direction(centre, dx, dy, dz);
    const double ap_aff = std::min(1.0, psd_step(cur.x, dx));
    const double ad_aff = std::min(1.0, psd_step(cur.z, dz));
    double gap_aff = 0.0;
    for (std::size_t k = 0; k < nb; ++k) gap_aff += inner(cur.x[k] + ap_aff * dx[k], cur.z[k] + ad_aff * dz[k]);
    const double sigma = mu > 0.0 ? std::clamp(std::pow(gap_aff / gap, 3), 0.0, 1.0) : 0.0;

    for (std::size_t k = 0; k < nb; ++k) {
      centre[k] = sigma * mu * CMat::Identity(sf.dims[k], sf.dims[k]) - dx[k] * dz[k];
    }
    direction(centre, dx, dy, dz);
    const double tau = 0.98;
    const double ap = std::min(1.0, tau * psd_step(cur.x, dx));
    const double ad = std::min(1.0, tau * psd_step(cur.z, dz));
    if (ap < 1e-12 && ad < 1e-12) break;
    for (std::size_t k = 0; k < nb; ++k) {
      cur.x[k] = hermitian_part(cur.x[k] + ap * dx[k]);
      cur.z[k] = hermitian_part(cur.z[k] + ad * dz[k]);
    }
    cur.y += ad * dy;
  }
  out.it = std::move(cur);
  return out;
}

}  // namespace

int SdpProblem::add_block(int dim) {
  if (dim < 1) throw InvalidArgument("SdpProblem::add_block: dimension must be >= 1");
  block_dims.push_back(dim);
  objective.emplace_back();
  return static_cast<int>(block_dims.size()) - 1;
}

void SdpProblem::fix_entry(int block, int i, int j, cd value) {
  if (block < 0 || block >= static_cast<int>(block_dims.size())) throw InvalidArgument("fix_entry: bad block");
  const int d = block_dims[block];
  if (i < 0 || j < 0 || i >= d || j >= d) throw InvalidArgument("fix_entry: index out of range");
  if (i == j) {
    CMat a = CMat::Zero(d, d);
    a(i, i) = 1.0;
    constraints.push_back({{{block, a}}, Sense::equal, value.real()});
    return;
  }
  CMat re = CMat::Zero(d, d);
  re(i, j) = 0.5;
  re(j, i) = 0.5;
  constraints.push_back({{{block, re}}, Sense::equal, value.real()});
  CMat im = CMat::Zero(d, d);
  im(j, i) = cd(0.0, -0.5);
  im(i, j) = cd(0.0, 0.5);
  constraints.push_back({{{block, im}}, Sense::equal, value.imag()});
}

double SdpProblem::objective_value(const std::vector<CMat>& x) const {
  double v = 0.0;
  for (std::size_t k = 0; k < objective.size() && k < x.size(); ++k) {
    if (objective[k].size()) v += inner(objective[k], x[k]);
  }
  return v;
}

SdpResult solve_sdp(const SdpProblem& prob, const SdpOptions& opts) {
  const std::size_t nb = prob.block_dims.size();
  if (prob.objective.size() != nb) throw InvalidArgument("solve_sdp: one objective matrix per block");
  for (std::size_t k = 0; k < nb; ++k) {
    const auto& c = prob.objective[k];
    if (c.size() && (c.rows() != prob.block_dims[k] || c.cols() != prob.block_dims[k])) {
      throw InvalidArgument("solve_sdp: objective block size mismatch");
    }
  }

  StdForm sf;
  sf.dims = prob.block_dims;
  for (std::size_t k = 0; k < nb; ++k) {
    sf.c.push_back(prob.objective[k].size() ? hermitian_part(prob.objective[k])
                                            : CMat::Zero(prob.block_dims[k], prob.block_dims[k]));
  }
  double c_norm = 0.0;
  for (const auto& c : sf.c) c_norm += c.squaredNorm();
  c_norm = std::sqrt(c_norm);
  const double c_scale = c_norm > 0.0 ? c_norm : 1.0;
  for (auto& c : sf.c) c /= c_scale;

  SdpResult res;
  const std::size_t mu = prob.constraints.size();
  res.y.assign(mu, 0.0);
  std::vector<double> row_scale(mu, 0.0);
  std::vector<int> row_index(mu, -1);
  std::vector<double> rhs;
  for (std::size_t i = 0; i < mu; ++i) {
    const auto& con = prob.constraints[i];
    double nrm2 = 0.0;
    for (const auto& t : con.terms) {
      if (t.block < 0 || t.block >= static_cast<int>(nb)) throw InvalidArgument("solve_sdp: bad block index");
      if (t.coeff.rows() != prob.block_dims[t.block] || t.coeff.cols() != prob.block_dims[t.block]) {
        throw InvalidArgument("solve_sdp: constraint block size mismatch");
      }
      nrm2 += t.coeff.squaredNorm();
    }
    if (con.sense != Sense::equal) nrm2 += 1.0;
    if (nrm2 == 0.0) {
      const bool ok = (con.sense == Sense::equal && con.rhs == 0.0) ||
                      (con.sense == Sense::less_equal && con.rhs >= 0.0) ||
                      (con.sense == Sense::greater_equal && con.rhs <= 0.0);
      if (!ok) {
        res.status = Status::infeasible;
        return res;
      }
      continue;
    }
    const double r = 1.0 / std::sqrt(nrm2);
    std::vector<StdTerm> terms;
    for (const auto& t : con.terms) terms.push_back({t.block, r * hermitian_part(t.coeff)});
    if (con.sense != Sense::equal) {
      const int slack = static_cast<int>(sf.dims.size());
      sf.dims.push_back(1);
      sf.c.push_back(CMat::Zero(1, 1));
      terms.push_back({slack, CMat::Constant(1, 1, con.sense == Sense::less_equal ? r : -r)});
    }
    row_scale[i] = r;
    row_index[i] = static_cast<int>(sf.a.size());
    sf.a.push_back(std::move(terms));
    rhs.push_back(r * con.rhs);
  }
  sf.b = Eigen::Map<RVec>(rhs.data(), static_cast<Eigen::Index>(rhs.size()));

  const Outcome o = hkm(sf, opts.tolerance, opts.max_iter);
  res.iterations = o.iterations;
  res.x.assign(o.it.x.begin(), o.it.x.begin() + static_cast<std::ptrdiff_t>(nb));
  for (std::size_t k = 0; k < nb; ++k) res.z.push_back(c_scale * o.it.z[k]);
  for (std::size_t i = 0; i < mu; ++i) {
    if (row_index[i] >= 0) res.y[i] = o.it.y(row_index[i]) * row_scale[i] * c_scale;
  }
  res.primal_objective = prob.objective_value(res.x);
  res.dual_objective = 0.0;
  for (std::size_t i = 0; i < mu; ++i) res.dual_objective += res.y[i] * prob.constraints[i].rhs;
  res.status = o.status;
  if (res.status == Status::max_iter) {
    // Accept a stalled but accurate iterate.
    const auto diag = sdp_diagnostics(prob, res);
    if (diag.max_constraint_violation <= 1e-7 && diag.relative_gap <= 1e-6 && diag.min_eigenvalue >= -1e-8) {
      res.status = Status::optimal;
    }
  }
  return res;
}

SdpDiagnostics sdp_diagnostics(const SdpProblem& prob, const SdpResult& res) {
  SdpDiagnostics d;
  d.min_eigenvalue = kInf;
  for (const auto& x : res.x) {
    const double l = Eigen::SelfAdjointEigenSolver<CMat>(hermitian_part(x), Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
    d.min_eigenvalue = std::min(d.min_eigenvalue, l);
  }
  if (res.x.empty()) d.min_eigenvalue = 0.0;
  for (const auto& con : prob.constraints) {
    double v = 0.0;
    for (const auto& t : con.terms) {
      if (t.block < static_cast<int>(res.x.size())) v += inner(t.coeff, res.x[t.block]);
    }
    double viol = 0.0;
    switch (con.sense) {
      case Sense::equal: viol = std::abs(v - con.rhs); break;
      case Sense::less_equal: viol = std::max(0.0, v - con.rhs); break;
      case Sense::greater_equal: viol = std::max(0.0, con.rhs - v); break;
    }
    d.max_constraint_violation = std::max(d.max_constraint_violation, viol / std::max(1.0, std::abs(con.rhs)));
  }
  d.relative_gap = std::abs(res.primal_objective - res.dual_objective) /
                   (1.0 + std::abs(res.primal_objective) + std::abs(res.dual_objective));
  return d;
}

void dump(const SdpProblem& prob, std::ostream& out) {
  const auto old = out.precision(17);
  out << "sdp blocks " << prob.block_dims.size() << " constraints " << prob.constraints.size() << "\n";
  auto mat = [&](const CMat& a) {
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      for (Eigen::Index j = 0; j < a.cols(); ++j) out << ' ' << a(i, j).real() << ' ' << a(i, j).imag();
      out << "\n";
    }
  };
  for (std::size_t k = 0; k < prob.block_dims.size(); ++k) {
    out << "block " << k << " dim " << prob.block_dims[k] << "\n";
    if (prob.objective[k].size()) {
      out << "objective\n";
      mat(prob.objective[k]);
    }
  }
  for (const auto& con : prob.constraints) {
    const char* s = con.sense == Sense::equal ? "==" : (con.sense == Sense::less_equal ? "<=" : ">=");
    out << "constraint " << s << ' ' << con.rhs << " terms " << con.terms.size() << "\n";
    for (const auto& t : con.terms) {
      out << "term block " << t.block << "\n";
      mat(t.coeff);
    }
  }
  out.precision(old);
}

}  // namespace fdiscc::conic
