#include "mdcert/qc_matrices.hpp"

namespace mdcert {

SymMatrix sector_qc_kernel(const SectorBounds& b) {
  b.validate();
  const double s = b.mu + b.L;
  if (s <= 0.0) throw std::invalid_argument("sector kernel requires mu + L > 0");
  Eigen::Matrix2d k;
  k << -b.mu * b.L / s, 0.5, 0.5, -1.0 / s;
  return SymMatrix(k);
}

CentralizedMatrices build_centralized_matrices(const ProblemClass& pc, double rho,
                                               double eta) {
  pc.validate();
  if (!(rho > 0.0 && rho <= 1.0))
    throw std::invalid_argument("rate rho must lie in (0, 1]");
  if (!(eta > 0.0)) throw std::invalid_argument("step-size eta must be > 0");

  Eigen::Matrix3d msc = Eigen::Matrix3d::Zero();
  msc(0, 0) = (1.0 - rho) / (2.0 * pc.phi.mu);
  msc(1, 2) = msc(2, 1) = -eta / 2.0;
  msc(2, 2) = eta * eta / (2.0 * pc.phi.mu);

  Eigen::Matrix3d mf = Eigen::Matrix3d::Zero();
  mf.bottomRightCorner<2, 2>() = sector_qc_kernel(pc.f).mat();

  // QC of the conjugate map grad(phi*): its class constants are
  // (1/L_phi, 1/mu_phi), which collapses to the entries below.
  const double sp = pc.phi.mu + pc.phi.L;
  Eigen::Matrix3d mphi = Eigen::Matrix3d::Zero();
  mphi(0, 0) = -1.0 / sp;
  mphi(0, 1) = mphi(1, 0) = 0.5;
  mphi(1, 1) = -pc.phi.mu * pc.phi.L / sp;

  return {SymMatrix(msc), SymMatrix(mf), SymMatrix(mphi)};
}

SymMatrix build_convex_centralized_matrix(double mu_phi, double eta, double eps) {
  if (!(mu_phi > 0.0)) throw std::invalid_argument("mu_phi must be > 0");
  if (!(eta >= 0.0)) throw std::invalid_argument("step-size eta must be >= 0");
  if (!(eps >= 0.0)) throw std::invalid_argument("eps must be >= 0");
  Eigen::Matrix3d mc = Eigen::Matrix3d::Zero();
  mc(1, 2) = mc(2, 1) = (eps - eta) / 2.0;
  mc(2, 2) = eta * eta / (2.0 * mu_phi);
  return SymMatrix(mc);
}

DistributedMatrices build_distributed_matrices(const ProblemClass& pc, double lambda) {
  pc.validate();
  if (!(lambda >= 0.0 && lambda <= 1.0))
    throw std::invalid_argument("spectral norm lambda must lie in [0, 1]");

  using M5 = Eigen::Matrix<double, 5, 5>;

  M5 mf = M5::Zero();
  mf.block<2, 2>(2, 2) = sector_qc_kernel(pc.f).mat();

  M5 mlam = M5::Zero();
  mlam(0, 0) = lambda * lambda;
  mlam(4, 4) = -1.0;

  const double sp = pc.phi.mu + pc.phi.L;
  M5 mphi = M5::Zero();
  mphi(0, 0) = -1.0 / sp;
  mphi(0, 2) = mphi(2, 0) = 0.5;
  mphi(2, 2) = -pc.phi.mu * pc.phi.L / sp;

  return {SymMatrix(mf), SymMatrix(mlam), SymMatrix(mphi)};
}

ConvexDistributedMatrices build_convex_distributed_matrices(double L_f) {
  if (!(L_f >= 0.0)) throw std::invalid_argument("L_f must be >= 0");
  using M5 = Eigen::Matrix<double, 5, 5>;
  M5 m1 = M5::Zero();
  m1(2, 2) = L_f;
  M5 m2 = M5::Zero();
  m2(2, 3) = m2(3, 2) = 0.5;
  return {SymMatrix(m1), SymMatrix(m2)};
}

}  // namespace mdcert
