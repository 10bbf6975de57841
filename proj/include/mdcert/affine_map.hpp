#pragma once

#include <vector>

#include "mdcert/sym_matrix.hpp"

namespace mdcert {

enum class VarSign { Free, NonNegative };

/// Block-affine matrix map y -> F0_b + sum_j y_j Fj_b, the solver-facing form
/// of every certification LMI. Each variable carries a sign constraint and a
/// box bound |y_j| <= box (nonnegative variables: y_j in [0, box]); the box
/// keeps the barrier subproblems bounded when a multiplier only relaxes the
/// constraint it multiplies.
struct AffineMatrixMap {
  struct Block {
    Eigen::MatrixXd F0;
    std::vector<Eigen::MatrixXd> F;  // one coefficient matrix per variable
  };

  std::vector<Block> blocks;
  std::vector<VarSign> signs;
  double box = 1e6;
  // Tiny objective regularization (linear on nonnegative variables, quadratic
  // on free ones). Pins down directions along which the LMI only slackens, at
  // an O(reg * |y|) bias in the reported optimum.
  double reg = 1e-12;

  int var_count() const { return static_cast<int>(signs.size()); }

  void validate() const;

  /// Evaluate block b at y.
  Eigen::MatrixXd eval(int b, const Eigen::VectorXd& y) const;

  /// max over blocks of lambda_max(A_b(y)).
  double worst_eigenvalue(const Eigen::VectorXd& y) const;
};

enum class FeasibilityStatus { Feasible, Infeasible, Indeterminate };

inline const char* to_string(FeasibilityStatus s) {
  switch (s) {
    case FeasibilityStatus::Feasible: return "feasible";
    case FeasibilityStatus::Infeasible: return "infeasible";
    default: return "indeterminate";
  }
}

struct FeasibilityVerdict {
  FeasibilityStatus status = FeasibilityStatus::Indeterminate;
  Eigen::VectorXd y;       // minimizing variable vector found
  double margin = 0.0;     // verified max-block eigenvalue at y
  double t_lower = 0.0;    // certified lower bound on min t
  int iterations = 0;      // Newton iterations spent
};

/// Deterministic interior-point (log-det barrier) minimization of t subject to
/// A_b(y) <= t*I for all blocks and the map's sign/box constraints. Reports
/// Feasible iff the verified margin at the returned y is <= -delta, Infeasible
/// iff the certified lower bound on min t exceeds -delta, and Indeterminate
/// when the iteration budget runs out first.
FeasibilityVerdict solve_feasibility(const AffineMatrixMap& map, double delta,
                                     int budget = 20000);

}  // namespace mdcert
