#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>

#include "mdcert/sector.hpp"
#include "mdcert/sym_matrix.hpp"

namespace mdcert {

/// Distance-generating function with its conjugate facets. Implementations
/// must keep grad and conj_grad mutually inverse to 1e-8.
class DGF {
 public:
  explicit DGF(SectorBounds bounds) : bounds_(bounds) {
    if (!(bounds_.mu > 0.0))
      throw std::invalid_argument("DGF requires mu_phi > 0");
  }
  virtual ~DGF() = default;

  const SectorBounds& bounds() const { return bounds_; }

  virtual double value(const Eigen::VectorXd& x) const = 0;            // phi
  virtual Eigen::VectorXd grad(const Eigen::VectorXd& x) const = 0;    // grad phi
  virtual Eigen::VectorXd conj_grad(const Eigen::VectorXd& z) const = 0;  // grad phi*

  /// phi*(z) = <z, x> - phi(x) at x = conj_grad(z).
  virtual double conj_value(const Eigen::VectorXd& z) const {
    const Eigen::VectorXd x = conj_grad(z);
    return z.dot(x) - value(x);
  }

  double bregman(const Eigen::VectorXd& x, const Eigen::VectorXd& xp) const {
    return value(x) - value(xp) - grad(xp).dot(x - xp);
  }

  double conj_bregman(const Eigen::VectorXd& z, const Eigen::VectorXd& zp) const {
    return conj_value(z) - conj_value(zp) - conj_grad(zp).dot(z - zp);
  }

 private:
  SectorBounds bounds_;
};

enum class DGFKind { Euclidean, DiagQuadratic, SeparableSmooth };

DGFKind dgf_kind_from_string(const std::string& s);
const char* to_string(DGFKind k);

/// euclidean: phi = (mu/2)||x||^2 (requires mu = L);
/// diag_quadratic: phi = x'Dx/2 with seeded diagonal spanning exactly [mu, L];
/// separable_smooth: phi = (mu/2)||x||^2 + (L-mu) sum_j (sqrt(1+x_j^2)-1),
///   conjugate gradient by safeguarded per-coordinate Newton to 1e-12.
std::unique_ptr<DGF> make_dgf(DGFKind kind, const SectorBounds& bounds, int d,
                              std::uint64_t seed);

/// Finite sum objective f = (1/n) sum f_i with per-agent sector bounds.
class Objective {
 public:
  Objective(SectorBounds bounds, int n, int d) : bounds_(bounds), n_(n), d_(d) {
    if (n < 1 || d < 1) throw std::invalid_argument("objective needs n >= 1, d >= 1");
  }
  virtual ~Objective() = default;

  const SectorBounds& bounds() const { return bounds_; }
  int n() const { return n_; }
  int dim() const { return d_; }

  virtual double f_i(int i, const Eigen::VectorXd& x) const = 0;
  virtual Eigen::VectorXd grad_i(int i, const Eigen::VectorXd& x) const = 0;

  double f(const Eigen::VectorXd& x) const {
    double acc = 0.0;
    for (int i = 0; i < n_; ++i) acc += f_i(i, x);
    return acc / n_;
  }

  Eigen::VectorXd grad(const Eigen::VectorXd& x) const {
    Eigen::VectorXd g = Eigen::VectorXd::Zero(d_);
    for (int i = 0; i < n_; ++i) g += grad_i(i, x);
    return g / n_;
  }

  /// Exact minimizer when the structure admits a direct solve.
  virtual std::optional<Eigen::VectorXd> analytic_minimizer() const { return std::nullopt; }

 private:
  SectorBounds bounds_;
  int n_;
  int d_;
};

enum class ObjectiveKind { Quadratic, LogisticL2 };

ObjectiveKind objective_kind_from_string(const std::string& s);
const char* to_string(ObjectiveKind k);

/// quadratic: f_i = (x-c_i)'Q_i(x-c_i)/2 with seeded mu I <= Q_i <= L I
/// (spectrum endpoints hit exactly when d >= 2, so mu = 0 gives rank-deficient
/// instances); logistic_l2: seeded features with an l2 term, feature scale
/// chosen so the curvature bound equals L exactly.
std::unique_ptr<Objective> make_objective(ObjectiveKind kind, const SectorBounds& bounds,
                                          int n, int d, std::uint64_t seed);

/// Minimum of the sector QC form over sampled pairs; >= -1e-9 when the bounds
/// are valid for the gradient map.
double sampled_sector_qc_min(const Objective& obj, int agent, int pairs,
                             std::uint64_t seed);

}  // namespace mdcert
