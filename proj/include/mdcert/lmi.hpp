#pragma once

#include <array>

#include "mdcert/qc_matrices.hpp"

namespace mdcert {

/// Pinned numerical tolerances used across certification.
struct Tolerances {
  double delta = 1e-9;        // LMI margin: certified means lambda_max <= -delta
  double delta_P = 1e-8;      // Lyapunov positivity margin: lambda_min(P) >= delta_P
  double rho_width = 1e-5;    // bisection width on the exponential rate
  double eps_width = 1e-6;    // bisection width on the ergodic constant
};

struct CentralizedCertificate {
  double rho = 1.0;
  double eta = 0.0;
  double sigma_f = 0.0;
  double sigma_phi = 0.0;
  double residual = 0.0;                 // lambda_max of the assembled LMI
  bool sigma_phi_limit_undefined = false;  // kappa_phi == 1 analytic case
};

struct ConvexCentralizedCertificate {
  double eta = 0.0;
  double eps = 0.0;
  double sigma_f = 0.0;
  double sigma_phi = 0.0;
  double residual = 0.0;
};

struct DistributedCertificate {
  double eta1 = 0.0;
  double rho = 1.0;
  Eigen::Matrix2d P = Eigen::Matrix2d::Identity();
  Eigen::Matrix2d Sigma_eq = Eigen::Matrix2d::Zero();
  double sigma_f = 0.0;
  double sigma_phi = 0.0;
  double sigma_lambda = 0.0;
  std::array<double, 2> residuals{0.0, 0.0};  // per LMI index i = 1, 2
  double lambda = 0.0;
};

struct ConvexDistributedCertificate {
  double eta1 = 0.0;
  double eps = 0.0;
  Eigen::Matrix2d P = Eigen::Matrix2d::Identity();
  Eigen::Matrix2d Sigma_eq = Eigen::Matrix2d::Zero();
  double sigma_f = 0.0;
  double sigma_phi = 0.0;
  double sigma_lambda = 0.0;
  std::array<double, 2> residuals{0.0, 0.0};
  double lambda = 0.0;
};

/// M_sc + sigma_f*M_f + sigma_phi*M_phi; a certificate needs lambda_max <= 0.
SymMatrix assemble_centralized_sc(const ProblemClass& pc, double rho, double eta,
                                  double sigma_f, double sigma_phi);

/// M_c + sigma_f*M_f + sigma_phi*M_phi (convex mode, mu_f = 0).
SymMatrix assemble_centralized_convex(const ProblemClass& pc, double eta, double eps,
                                      double sigma_f, double sigma_phi);

/// [[-N, S], [S^T, I_m]]; PSD iff N + S S^T is NSD.
SymMatrix schur_lift(const SymMatrix& N, const Eigen::MatrixXd& S);

/// The 4x4 Schur-lifted matrix that is affine in (rho, eta, sigma_f, sigma_phi);
/// a certificate needs lambda_min >= 0. Equivalent in feasibility to
/// assemble_centralized_sc.
SymMatrix assemble_prop2_matrix(const ProblemClass& pc, double rho, double eta,
                                double sigma_f, double sigma_phi);

/// Constant matrices of the reduced (network-size-free) distributed dynamics.
/// Index 1 carries the disagreement subspace, index 2 the consensus subspace.
struct ReducedStateBlocks {
  Eigen::Matrix2d A1, A2;
  Eigen::Matrix<double, 2, 3> B1, B2;
  Eigen::Matrix<double, 2, 5> H1, H2;
};

ReducedStateBlocks reduced_state_blocks(double eta1);

/// Distributed exponential-rate LMI for subspace index i in {1, 2}:
/// [[Ai'PAi - rho P, Ai'PBi], [Bi'PAi, Bi'PBi]]
///   + sigma_f M_f + sigma_lambda M_lambda + sigma_phi M_phi + Hi' Sigma_eq Hi.
SymMatrix assemble_distributed_sc(int i, const ProblemClass& pc, double lambda,
                                  const DistributedCertificate& cand);

/// Distributed ergodic LMI (rho fixed to 1, plus eps*M_i).
SymMatrix assemble_distributed_convex(int i, const ProblemClass& pc, double lambda,
                                      const ConvexDistributedCertificate& cand);

}  // namespace mdcert
