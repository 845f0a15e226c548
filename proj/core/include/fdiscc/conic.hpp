#pragma once

#include <iosfwd>
#include <vector>

#include "fdiscc/types.hpp"

namespace fdiscc::conic {

enum class Status { optimal, infeasible, max_iter };
const char* to_string(Status s);

/// minimize  x^H A x - 2 Re{b^H x} + c + prox_weight * ||x - prox_center||^2
/// s.t.      Re{d_i^H x} + e_i <= 0,  i = 1..m
/// over complex x. A must be Hermitian PSD.
struct QcqpProblem {
  CMat a;
  CVec b;
  double c = 0.0;
  double prox_weight = 0.0;
  CVec prox_center;  // empty means zero
  std::vector<CVec> d;
  std::vector<double> e;

  int dim() const { return static_cast<int>(b.size()); }
  double objective(const CVec& x) const;
};

struct QcqpOptions {
  double tolerance = 1e-10;
  int max_iter = 100;
  /// Exact KKT solve when there is at most one constraint and the quadratic
  /// part is positive definite; the interior-point path is used otherwise.
  bool direct_single_constraint = true;
};

struct QcqpKkt {
  double stationarity = 0.0;
  double primal = 0.0;         // max_i (Re{d_i^H x} + e_i)_+
  double dual = 0.0;           // max_i (-z_i)_+
  double complementarity = 0.0;  // max_i |z_i * (Re{d_i^H x} + e_i)|
  double gap = 0.0;            // primal - dual objective
  double max() const;
};

struct QcqpResult {
  Status status = Status::max_iter;
  CVec x;
  std::vector<double> duals;  // z_i >= 0 for each inequality
  double objective = 0.0;
  double dual_objective = 0.0;
  int iterations = 0;
  // For status == infeasible: z >= 0 with sum_i z_i d_i = 0 and sum_i z_i e_i > 0.
  std::vector<double> certificate;
};

QcqpResult solve_qcqp(const QcqpProblem& prob, const QcqpOptions& opts = {});
/// KKT residuals of (x, z) for the problem, evaluated independently of the solver.
QcqpKkt qcqp_kkt(const QcqpProblem& prob, const CVec& x, const std::vector<double>& z);

enum class Sense { less_equal, equal, greater_equal };

/// One linear constraint sum_k Re Tr(A_k X_k) (sense) rhs. Terms reference blocks.
struct SdpConstraint {
  struct Term {
    int block = 0;
    CMat coeff;  // Hermitian, block_dims[block] square
  };
  std::vector<Term> terms;
  Sense sense = Sense::equal;
  double rhs = 0.0;
};

/// minimize sum_k Re Tr(C_k X_k) over Hermitian X_k >= 0 subject to linear constraints.
struct SdpProblem {
  std::vector<int> block_dims;
  std::vector<CMat> objective;  // C_k; empty matrix means zero
  std::vector<SdpConstraint> constraints;

  int add_block(int dim);
  /// [X_block]_{i,j} = value (two real constraints when i != j).
  void fix_entry(int block, int i, int j, cd value);
  double objective_value(const std::vector<CMat>& x) const;
};

struct SdpOptions {
  double tolerance = 1e-9;
  int max_iter = 100;
};

struct SdpResult {
  Status status = Status::max_iter;
  std::vector<CMat> x;
  std::vector<double> y;  // one multiplier per user constraint (sign per sense)
  std::vector<CMat> z;    // dual slack per block
  double primal_objective = 0.0;
  double dual_objective = 0.0;
  int iterations = 0;
};

struct SdpDiagnostics {
  double min_eigenvalue = 0.0;       // over all X blocks
  double max_constraint_violation = 0.0;
  double relative_gap = 0.0;
};

SdpResult solve_sdp(const SdpProblem& prob, const SdpOptions& opts = {});
SdpDiagnostics sdp_diagnostics(const SdpProblem& prob, const SdpResult& res);

/// Debug dumps of subproblems in a plain text format.
void dump(const QcqpProblem& prob, std::ostream& out);
void dump(const SdpProblem& prob, std::ostream& out);

/// Hermitian part (A + A^H) / 2.
CMat hermitian_part(const CMat& a);

}  // namespace fdiscc::conic
