#include "mdcert/oracles.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "mdcert/qc_matrices.hpp"

namespace mdcert {

namespace {

Eigen::MatrixXd random_orthogonal(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXd g(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) g(i, j) = gauss(rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ();
  const Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < d; ++j)
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  return q;
}

// Spectrum hitting [mu, L] exactly at the ends (d >= 2), uniform in between.
Eigen::VectorXd spanning_spectrum(const SectorBounds& b, int d, std::mt19937_64& rng) {
  Eigen::VectorXd s(d);
  if (d == 1) {
    s[0] = b.L;
    return s;
  }
  std::uniform_real_distribution<double> unif(b.mu, b.L);
  s[0] = b.mu;
  s[d - 1] = b.L;
  for (int i = 1; i + 1 < d; ++i) s[i] = unif(rng);
  return s;
}

class EuclideanDGF final : public DGF {
 public:
  explicit EuclideanDGF(const SectorBounds& b) : DGF(b) {
    if (std::abs(b.mu - b.L) > 1e-15 * std::max(1.0, b.L))
      throw std::invalid_argument("euclidean DGF requires mu_phi = L_phi");
  }
  double value(const Eigen::VectorXd& x) const override {
    return 0.5 * bounds().mu * x.squaredNorm();
  }
  Eigen::VectorXd grad(const Eigen::VectorXd& x) const override {
    return bounds().mu * x;
  }
  Eigen::VectorXd conj_grad(const Eigen::VectorXd& z) const override {
    return z / bounds().mu;
  }
  double conj_value(const Eigen::VectorXd& z) const override {
    return 0.5 * z.squaredNorm() / bounds().mu;
  }
};

class DiagQuadraticDGF final : public DGF {
 public:
  DiagQuadraticDGF(const SectorBounds& b, int d, std::uint64_t seed) : DGF(b) {
    if (d < 1) throw std::invalid_argument("diag_quadratic DGF needs d >= 1");
    std::mt19937_64 rng(seed);
    diag_ = spanning_spectrum(b, d, rng);
    if (d == 1) diag_[0] = b.L;
  }
  double value(const Eigen::VectorXd& x) const override {
    return 0.5 * x.dot(diag_.asDiagonal() * x);
  }
  Eigen::VectorXd grad(const Eigen::VectorXd& x) const override {
    return diag_.asDiagonal() * x;
  }
  Eigen::VectorXd conj_grad(const Eigen::VectorXd& z) const override {
    return z.cwiseQuotient(diag_);
  }
  double conj_value(const Eigen::VectorXd& z) const override {
    return 0.5 * z.dot(z.cwiseQuotient(diag_));
  }

 private:
  Eigen::VectorXd diag_;
};

class SeparableSmoothDGF final : public DGF {
 public:
  explicit SeparableSmoothDGF(const SectorBounds& b) : DGF(b), alpha_(b.L - b.mu) {}

  double value(const Eigen::VectorXd& x) const override {
    double acc = 0.5 * bounds().mu * x.squaredNorm();
    for (Eigen::Index j = 0; j < x.size(); ++j)
      acc += alpha_ * (std::sqrt(1.0 + x[j] * x[j]) - 1.0);
    return acc;
  }

  Eigen::VectorXd grad(const Eigen::VectorXd& x) const override {
    Eigen::VectorXd g(x.size());
    for (Eigen::Index j = 0; j < x.size(); ++j) g[j] = scalar_grad(x[j]);
    return g;
  }

  Eigen::VectorXd conj_grad(const Eigen::VectorXd& z) const override {
    Eigen::VectorXd x(z.size());
    for (Eigen::Index j = 0; j < z.size(); ++j) x[j] = invert_scalar_grad(z[j]);
    return x;
  }

 private:
  double scalar_grad(double x) const {
    return bounds().mu * x + alpha_ * x / std::sqrt(1.0 + x * x);
  }

  // Monotone scalar solve of scalar_grad(x) = z: Newton with a bisection
  // safeguard on the bracket [z/(mu+alpha), z/mu] (swapped for z < 0).
  double invert_scalar_grad(double z) const {
    const double mu = bounds().mu;
    if (alpha_ == 0.0) return z / mu;
    double lo = z / (mu + alpha_), hi = z / mu;
    if (lo > hi) std::swap(lo, hi);
    double x = z / (mu + 0.5 * alpha_);
    const double tol = 1e-12 * (1.0 + std::abs(z));
    for (int it = 0; it < 100; ++it) {
      const double r = scalar_grad(x) - z;
      if (std::abs(r) <= tol) return x;
      if (r > 0.0) hi = x; else lo = x;
      const double dphi = mu + alpha_ / std::pow(1.0 + x * x, 1.5);
      double next = x - r / dphi;
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      x = next;
    }
    throw std::runtime_error("conjugate-gradient Newton failed to converge in 100 iterations");
  }

  double alpha_;
};

class QuadraticObjective final : public Objective {
 public:
  QuadraticObjective(const SectorBounds& b, int n, int d, std::uint64_t seed)
      : Objective(b, n, d) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Q_.reserve(n);
    c_.reserve(n);
    for (int i = 0; i < n; ++i) {
      const Eigen::MatrixXd u = random_orthogonal(d, rng);
      const Eigen::VectorXd s = spanning_spectrum(b, d, rng);
      Q_.push_back(u * s.asDiagonal() * u.transpose());
      Eigen::VectorXd c(d);
      for (int j = 0; j < d; ++j) c[j] = gauss(rng);
      c_.push_back(c);
    }
  }

  double f_i(int i, const Eigen::VectorXd& x) const override {
    const Eigen::VectorXd r = x - c_[i];
    return 0.5 * r.dot(Q_[i] * r);
  }

  Eigen::VectorXd grad_i(int i, const Eigen::VectorXd& x) const override {
    return Q_[i] * (x - c_[i]);
  }

  std::optional<Eigen::VectorXd> analytic_minimizer() const override {
    Eigen::MatrixXd qsum = Eigen::MatrixXd::Zero(dim(), dim());
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(dim());
    for (int i = 0; i < n(); ++i) {
      qsum += Q_[i];
      rhs += Q_[i] * c_[i];
    }
    // Rank-deficient sums stay consistent (the right side lies in the range),
    // so the least-squares solve returns a true minimizer.
    return Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd>(qsum).solve(rhs);
  }

  const Eigen::MatrixXd& Q(int i) const { return Q_[i]; }
  const Eigen::VectorXd& c(int i) const { return c_[i]; }

 private:
  std::vector<Eigen::MatrixXd> Q_;
  std::vector<Eigen::VectorXd> c_;
};

class LogisticL2Objective final : public Objective {
 public:
  LogisticL2Objective(const SectorBounds& b, int n, int d, std::uint64_t seed)
      : Objective(b, n, d), samples_(std::max(8, d + 2)) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::bernoulli_distribution coin(0.5);
    A_.reserve(n);
    labels_.reserve(n);
    for (int i = 0; i < n; ++i) {
      Eigen::MatrixXd a(samples_, d);
      Eigen::VectorXd lab(samples_);
      for (int s = 0; s < samples_; ++s) {
        for (int j = 0; j < d; ++j) a(s, j) = gauss(rng);
        lab[s] = coin(rng) ? 1.0 : -1.0;
      }
      // Scale features so the logistic curvature bound (1/4m) lmax(A'A)
      // equals L - mu exactly.
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a.transpose() * a,
                                                        Eigen::EigenvaluesOnly);
      const double lmax = es.eigenvalues().maxCoeff();
      if (lmax > 0.0 && b.L > b.mu)
        a *= std::sqrt(4.0 * samples_ * (b.L - b.mu) / lmax);
      else if (b.L == b.mu)
        a.setZero();
      A_.push_back(a);
      labels_.push_back(lab);
    }
  }

  double f_i(int i, const Eigen::VectorXd& x) const override {
    const Eigen::VectorXd margins = labels_[i].cwiseProduct(A_[i] * x);
    double acc = 0.0;
    for (int s = 0; s < samples_; ++s) {
      const double m = -margins[s];
      acc += (m > 30.0) ? m : std::log1p(std::exp(m));
    }
    return acc / samples_ + 0.5 * bounds().mu * x.squaredNorm();
  }

  Eigen::VectorXd grad_i(int i, const Eigen::VectorXd& x) const override {
    const Eigen::VectorXd margins = labels_[i].cwiseProduct(A_[i] * x);
    Eigen::VectorXd w(samples_);
    for (int s = 0; s < samples_; ++s) w[s] = -labels_[i][s] / (1.0 + std::exp(margins[s]));
    return A_[i].transpose() * w / samples_ + bounds().mu * x;
  }

 private:
  int samples_;
  std::vector<Eigen::MatrixXd> A_;
  std::vector<Eigen::VectorXd> labels_;
};

}  // namespace

DGFKind dgf_kind_from_string(const std::string& s) {
  if (s == "euclidean") return DGFKind::Euclidean;
  if (s == "diag_quadratic") return DGFKind::DiagQuadratic;
  if (s == "separable_smooth") return DGFKind::SeparableSmooth;
  throw std::invalid_argument("unknown DGF kind: " + s);
}

const char* to_string(DGFKind k) {
  switch (k) {
    case DGFKind::Euclidean: return "euclidean";
    case DGFKind::DiagQuadratic: return "diag_quadratic";
    default: return "separable_smooth";
  }
}

std::unique_ptr<DGF> make_dgf(DGFKind kind, const SectorBounds& bounds, int d,
                              std::uint64_t seed) {
  switch (kind) {
    case DGFKind::Euclidean: return std::make_unique<EuclideanDGF>(bounds);
    case DGFKind::DiagQuadratic:
      return std::make_unique<DiagQuadraticDGF>(bounds, d, seed);
    default: return std::make_unique<SeparableSmoothDGF>(bounds);
  }
}

ObjectiveKind objective_kind_from_string(const std::string& s) {
  if (s == "quadratic") return ObjectiveKind::Quadratic;
  if (s == "logistic_l2") return ObjectiveKind::LogisticL2;
  throw std::invalid_argument("unknown objective kind: " + s);
}

const char* to_string(ObjectiveKind k) {
  return k == ObjectiveKind::Quadratic ? "quadratic" : "logistic_l2";
}

std::unique_ptr<Objective> make_objective(ObjectiveKind kind, const SectorBounds& bounds,
                                          int n, int d, std::uint64_t seed) {
  switch (kind) {
    case ObjectiveKind::Quadratic:
      return std::make_unique<QuadraticObjective>(bounds, n, d, seed);
    default: return std::make_unique<LogisticL2Objective>(bounds, n, d, seed);
  }
}

double sampled_sector_qc_min(const Objective& obj, int agent, int pairs,
                             std::uint64_t seed) {
  const SymMatrix kernel = sector_qc_kernel(obj.bounds());
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const int d = obj.dim();
  double worst = std::numeric_limits<double>::infinity();
  Eigen::VectorXd e(2 * d);
  for (int p = 0; p < pairs; ++p) {
    Eigen::VectorXd x(d), y(d);
    for (int j = 0; j < d; ++j) {
      x[j] = 3.0 * gauss(rng);
      y[j] = 3.0 * gauss(rng);
    }
    e.head(d) = x - y;
    e.tail(d) = obj.grad_i(agent, x) - obj.grad_i(agent, y);
    worst = std::min(worst, quad_form_kron(kernel, e, d));
  }
  return worst;
}

}  // namespace mdcert
