#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace mdcert {

/// Dense real symmetric matrix. Construction enforces squareness and
/// |a_ij - a_ji| <= 1e-12; the stored matrix is exactly symmetrized.
class SymMatrix {
 public:
  static constexpr double kSymTol = 1e-12;

  SymMatrix() = default;

  explicit SymMatrix(Eigen::MatrixXd m) {
    if (m.rows() != m.cols())
      throw std::invalid_argument("SymMatrix requires a square matrix");
    const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
    if (!(asym <= kSymTol))
      throw std::invalid_argument("SymMatrix asymmetry " + std::to_string(asym) +
                                  " exceeds tolerance");
    m_ = 0.5 * (m + m.transpose());
  }

  static SymMatrix Zero(int dim) { return SymMatrix(Eigen::MatrixXd::Zero(dim, dim)); }
  static SymMatrix Identity(int dim) {
    return SymMatrix(Eigen::MatrixXd::Identity(dim, dim));
  }

  int dim() const { return static_cast<int>(m_.rows()); }
  const Eigen::MatrixXd& mat() const { return m_; }
  double operator()(int i, int j) const { return m_(i, j); }

  SymMatrix operator+(const SymMatrix& o) const { return SymMatrix(m_ + o.m_); }
  SymMatrix operator-(const SymMatrix& o) const { return SymMatrix(m_ - o.m_); }
  friend SymMatrix operator*(double s, const SymMatrix& a) { return SymMatrix(s * a.m_); }

 private:
  Eigen::MatrixXd m_;
};

inline Eigen::VectorXd eigenvalues_of(const SymMatrix& a) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a.mat(), Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

inline double max_eigenvalue(const SymMatrix& a) {
  return eigenvalues_of(a).maxCoeff();
}

inline double min_eigenvalue(const SymMatrix& a) {
  return eigenvalues_of(a).minCoeff();
}

/// e^T (M kron I_d) e for a stacked vector e of m blocks of length d each,
/// evaluated coordinate-slice-wise (no Kronecker expansion).
inline double quad_form_kron(const SymMatrix& M, const Eigen::VectorXd& e, int d) {
  const int m = M.dim();
  if (e.size() != static_cast<Eigen::Index>(m) * d)
    throw std::invalid_argument("quad_form_kron: vector length mismatch");
  double acc = 0.0;
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b)
      acc += M(a, b) * e.segment(a * d, d).dot(e.segment(b * d, d));
  return acc;
}

}  // namespace mdcert
