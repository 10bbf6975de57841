#include "mdcert/lmi.hpp"

#include <cmath>

namespace mdcert {

namespace {

void check_multipliers(double sigma_f, double sigma_phi) {
  if (!(sigma_f >= 0.0) || !(sigma_phi >= 0.0))
    throw std::invalid_argument("multipliers sigma_f, sigma_phi must be >= 0");
}

}  // namespace

SymMatrix assemble_centralized_sc(const ProblemClass& pc, double rho, double eta,
                                  double sigma_f, double sigma_phi) {
  check_multipliers(sigma_f, sigma_phi);
  const auto m = build_centralized_matrices(pc, rho, eta);
  return SymMatrix(m.M_sc.mat() + sigma_f * m.M_f.mat() + sigma_phi * m.M_phi.mat());
}

SymMatrix assemble_centralized_convex(const ProblemClass& pc, double eta, double eps,
                                      double sigma_f, double sigma_phi) {
  pc.validate();
  if (pc.mode != Mode::Convex)
    throw std::invalid_argument("convex-mode assembly requires mu_f = 0");
  check_multipliers(sigma_f, sigma_phi);
  const auto m = build_centralized_matrices(pc, 1.0, eta);
  const SymMatrix mc = build_convex_centralized_matrix(pc.phi.mu, eta, eps);
  return SymMatrix(mc.mat() + sigma_f * m.M_f.mat() + sigma_phi * m.M_phi.mat());
}

SymMatrix schur_lift(const SymMatrix& N, const Eigen::MatrixXd& S) {
  const int n = N.dim();
  const int m = static_cast<int>(S.cols());
  if (S.rows() != n) throw std::invalid_argument("schur_lift: S must have N.dim() rows");
  Eigen::MatrixXd lift(n + m, n + m);
  lift.topLeftCorner(n, n) = -N.mat();
  lift.topRightCorner(n, m) = S;
  lift.bottomLeftCorner(m, n) = S.transpose();
  lift.bottomRightCorner(m, m) = Eigen::MatrixXd::Identity(m, m);
  return SymMatrix(lift);
}

SymMatrix assemble_prop2_matrix(const ProblemClass& pc, double rho, double eta,
                                double sigma_f, double sigma_phi) {
  pc.validate();
  if (pc.mode != Mode::StronglyConvex)
    throw std::invalid_argument("Schur-lifted centralized LMI requires strongly convex mode");
  if (!(rho > 0.0 && rho <= 1.0))
    throw std::invalid_argument("rate rho must lie in (0, 1]");
  if (!(eta >= 0.0)) throw std::invalid_argument("eta must be >= 0");
  check_multipliers(sigma_f, sigma_phi);

  const double mp = pc.phi.mu, Lp = pc.phi.L;
  const double mf = pc.f.mu, Lf = pc.f.L;
  Eigen::Matrix4d a = Eigen::Matrix4d::Zero();
  a(0, 0) = sigma_phi / (mp + Lp) + (rho - 1.0) / (2.0 * mp);
  a(0, 1) = a(1, 0) = -sigma_phi / 2.0;
  a(1, 1) = mp * Lp * sigma_phi / (mp + Lp) + mp / 2.0 + mf * Lf * sigma_f / (mf + Lf);
  a(1, 2) = a(2, 1) = -sigma_f / 2.0;
  a(2, 2) = sigma_f / (mf + Lf);
  a(1, 3) = a(3, 1) = -std::sqrt(mp) / std::sqrt(2.0);
  a(2, 3) = a(3, 2) = eta / std::sqrt(2.0 * mp);
  a(3, 3) = 1.0;
  return SymMatrix(a);
}

ReducedStateBlocks reduced_state_blocks(double eta1) {
  if (!(eta1 >= 0.0)) throw std::invalid_argument("eta1 must be >= 0");
  ReducedStateBlocks b;
  b.A1 << 0.0, -eta1, 1.0, 1.0;
  b.A2 << 1.0, -eta1, 0.0, 1.0;
  b.B1 << 0.0, -eta1, 1.0, 0.0, 0.0, -1.0;
  b.B2 = b.B1;
  b.H1.setZero();
  b.H2.setZero();
  b.H2(0, 1) = 1.0;  // selects y
  b.H2(1, 4) = 1.0;  // selects v
  return b;
}

namespace {

Eigen::Matrix<double, 5, 5> distributed_lmi_core(int i, double eta1, double rho,
                                                 const Eigen::Matrix2d& P,
                                                 const Eigen::Matrix2d& Sigma_eq) {
  if (i != 1 && i != 2) throw std::invalid_argument("subspace index i must be 1 or 2");
  const auto blocks = reduced_state_blocks(eta1);
  const Eigen::Matrix2d& A = (i == 1) ? blocks.A1 : blocks.A2;
  const Eigen::Matrix<double, 2, 3>& B = (i == 1) ? blocks.B1 : blocks.B2;
  const Eigen::Matrix<double, 2, 5>& H = (i == 1) ? blocks.H1 : blocks.H2;

  Eigen::Matrix<double, 5, 5> m;
  m.topLeftCorner<2, 2>() = A.transpose() * P * A - rho * P;
  m.topRightCorner<2, 3>() = A.transpose() * P * B;
  m.bottomLeftCorner<3, 2>() = m.topRightCorner<2, 3>().transpose();
  m.bottomRightCorner<3, 3>() = B.transpose() * P * B;
  m += H.transpose() * Sigma_eq * H;
  return m;
}

void check_sym2(const Eigen::Matrix2d& m, const char* name) {
  if (std::abs(m(0, 1) - m(1, 0)) > SymMatrix::kSymTol)
    throw std::invalid_argument(std::string(name) + " must be symmetric");
}

}  // namespace

SymMatrix assemble_distributed_sc(int i, const ProblemClass& pc, double lambda,
                                  const DistributedCertificate& cand) {
  if (!(cand.rho > 0.0 && cand.rho <= 1.0))
    throw std::invalid_argument("rate rho must lie in (0, 1]");
  if (!(cand.sigma_f >= 0.0 && cand.sigma_phi >= 0.0 && cand.sigma_lambda >= 0.0))
    throw std::invalid_argument("multipliers must be >= 0");
  check_sym2(cand.P, "P");
  check_sym2(cand.Sigma_eq, "Sigma_eq");
  const auto qc = build_distributed_matrices(pc, lambda);
  Eigen::Matrix<double, 5, 5> m =
      distributed_lmi_core(i, cand.eta1, cand.rho, cand.P, cand.Sigma_eq);
  m += cand.sigma_f * qc.M_f.mat() + cand.sigma_lambda * qc.M_lambda.mat() +
       cand.sigma_phi * qc.M_phi.mat();
  return SymMatrix(m);
}

SymMatrix assemble_distributed_convex(int i, const ProblemClass& pc, double lambda,
                                      const ConvexDistributedCertificate& cand) {
  if (pc.mode != Mode::Convex)
    throw std::invalid_argument("convex-mode assembly requires mu_f = 0");
  if (!(cand.eps >= 0.0)) throw std::invalid_argument("eps must be >= 0");
  if (!(cand.sigma_f >= 0.0 && cand.sigma_phi >= 0.0 && cand.sigma_lambda >= 0.0))
    throw std::invalid_argument("multipliers must be >= 0");
  check_sym2(cand.P, "P");
  check_sym2(cand.Sigma_eq, "Sigma_eq");
  const auto qc = build_distributed_matrices(pc, lambda);
  const auto extra = build_convex_distributed_matrices(pc.f.L);
  Eigen::Matrix<double, 5, 5> m =
      distributed_lmi_core(i, cand.eta1, 1.0, cand.P, cand.Sigma_eq);
  m += cand.sigma_f * qc.M_f.mat() + cand.sigma_lambda * qc.M_lambda.mat() +
       cand.sigma_phi * qc.M_phi.mat();
  m += cand.eps * ((i == 1) ? extra.M_1.mat() : extra.M_2.mat());
  return SymMatrix(m);
}

}  // namespace mdcert
