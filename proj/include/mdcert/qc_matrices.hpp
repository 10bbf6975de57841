#pragma once

#include "mdcert/sector.hpp"
#include "mdcert/sym_matrix.hpp"

namespace mdcert {

/// 2x2 sector quadratic-constraint kernel for a (mu, L) function class:
///   [[-mu*L/(mu+L), 1/2], [1/2, -1/(mu+L)]].
/// Applied to (x - y, grad(x) - grad(y)) the induced quadratic form is >= 0.
SymMatrix sector_qc_kernel(const SectorBounds& b);

/// The three 3x3 scalarized matrices of the centralized exponential-rate LMI.
/// Coordinate order (z, x, u); the Kronecker identity factor is dropped.
struct CentralizedMatrices {
  SymMatrix M_sc;   // Lyapunov-decrement matrix, depends on (rho, eta, mu_phi)
  SymMatrix M_f;    // objective QC, lower-right 2x2 block on (x, u)
  SymMatrix M_phi;  // DGF-conjugate QC, upper-left 2x2 block on (z, x)
};

CentralizedMatrices build_centralized_matrices(const ProblemClass& pc, double rho,
                                               double eta);

/// 3x3 matrix M_c of the centralized ergodic O(1/k) LMI.
SymMatrix build_convex_centralized_matrix(double mu_phi, double eta, double eps);

/// The three 5x5 scalarized matrices of the distributed LMI.
/// Coordinate order (z, y, x, u, v).
struct DistributedMatrices {
  SymMatrix M_f;
  SymMatrix M_lambda;  // lambda^2 at (0,0), -1 at (4,4)
  SymMatrix M_phi;
};

DistributedMatrices build_distributed_matrices(const ProblemClass& pc, double lambda);

/// Additional 5x5 matrices of the distributed ergodic LMI:
/// M_1 has L_f at (2,2); M_2 has 1/2 at (2,3) and (3,2).
struct ConvexDistributedMatrices {
  SymMatrix M_1;
  SymMatrix M_2;
};

ConvexDistributedMatrices build_convex_distributed_matrices(double L_f);

}  // namespace mdcert
