#include "mdcert/affine_map.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <limits>

namespace mdcert {

void AffineMatrixMap::validate() const {
  if (blocks.empty()) throw std::invalid_argument("affine map needs at least one block");
  if (!(box > 0.0)) throw std::invalid_argument("box bound must be > 0");
  if (!(reg >= 0.0)) throw std::invalid_argument("regularization must be >= 0");
  const int m = var_count();
  for (const auto& b : blocks) {
    const auto n = b.F0.rows();
    if (b.F0.cols() != n) throw std::invalid_argument("block F0 must be square");
    if ((b.F0 - b.F0.transpose()).cwiseAbs().maxCoeff() > SymMatrix::kSymTol)
      throw std::invalid_argument("block F0 must be symmetric");
    if (static_cast<int>(b.F.size()) != m)
      throw std::invalid_argument("block must carry one coefficient matrix per variable");
    for (const auto& f : b.F) {
      if (f.rows() != n || f.cols() != n)
        throw std::invalid_argument("coefficient matrix dimension mismatch");
      if ((f - f.transpose()).cwiseAbs().maxCoeff() > SymMatrix::kSymTol)
        throw std::invalid_argument("coefficient matrices must be symmetric");
    }
  }
}

Eigen::MatrixXd AffineMatrixMap::eval(int b, const Eigen::VectorXd& y) const {
  const auto& blk = blocks.at(b);
  Eigen::MatrixXd a = blk.F0;
  for (int j = 0; j < var_count(); ++j) a += y[j] * blk.F[j];
  return 0.5 * (a + a.transpose());
}

double AffineMatrixMap::worst_eigenvalue(const Eigen::VectorXd& y) const {
  double worst = -std::numeric_limits<double>::infinity();
  for (int b = 0; b < static_cast<int>(blocks.size()); ++b) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(eval(b, y), Eigen::EigenvaluesOnly);
    worst = std::max(worst, es.eigenvalues().maxCoeff());
  }
  return worst;
}

namespace {

// Slack matrices of the barrier subproblem: one per LMI block
// (S = t*I - A_b(y)) plus scalar cuts s = offset + coef * x_var for the
// sign and box constraints.
struct ScalarCut {
  int var;
  double coef;
  double offset;
};

struct BarrierProblem {
  const AffineMatrixMap* map;
  int m;        // variable count excluding t
  int n;        // total unknowns (m + 1); t is index m
  std::vector<ScalarCut> cuts;
  std::vector<std::vector<int>> active;  // per block: vars with nonzero coefficient
  double nu;    // total barrier parameter

  explicit BarrierProblem(const AffineMatrixMap& mp) : map(&mp) {
    m = mp.var_count();
    n = m + 1;
    for (int j = 0; j < m; ++j) {
      if (mp.signs[j] == VarSign::NonNegative) {
        cuts.push_back({j, 1.0, 0.0});              // y_j >= 0
        cuts.push_back({j, -1.0, mp.box});          // y_j <= box
      } else {
        cuts.push_back({j, -1.0, mp.box});          // y_j <= box
        cuts.push_back({j, 1.0, mp.box});           // y_j >= -box
      }
    }
    nu = static_cast<double>(cuts.size());
    for (const auto& b : mp.blocks) nu += static_cast<double>(b.F0.rows());
    active.resize(mp.blocks.size());
    for (size_t b = 0; b < mp.blocks.size(); ++b)
      for (int j = 0; j < m; ++j)
        if (mp.blocks[b].F[j].cwiseAbs().maxCoeff() > 0.0) active[b].push_back(j);
  }

  Eigen::MatrixXd slack(int b, const Eigen::VectorXd& x) const {
    const auto& blk = map->blocks[b];
    Eigen::MatrixXd s = x[m] * Eigen::MatrixXd::Identity(blk.F0.rows(), blk.F0.rows());
    s -= blk.F0;
    for (int j : active[b]) s -= x[j] * blk.F[j];
    return 0.5 * (s + s.transpose());
  }

  // Returns false when x is not strictly feasible; otherwise fills the
  // barrier value sum(-log det S) - sum(log s).
  bool barrier_value(const Eigen::VectorXd& x, double& value) const {
    value = 0.0;
    for (size_t b = 0; b < map->blocks.size(); ++b) {
      Eigen::LLT<Eigen::MatrixXd> llt(slack(static_cast<int>(b), x));
      if (llt.info() != Eigen::Success) return false;
      const auto& L = llt.matrixLLT();
      double logdet = 0.0;
      for (Eigen::Index i = 0; i < L.rows(); ++i) {
        if (!(L(i, i) > 0.0)) return false;
        logdet += std::log(L(i, i));
      }
      value -= 2.0 * logdet;
    }
    for (const auto& c : cuts) {
      const double s = c.offset + c.coef * x[c.var];
      if (!(s > 0.0)) return false;
      value -= std::log(s);
    }
    return true;
  }

  void gradient_hessian(const Eigen::VectorXd& x, Eigen::VectorXd& g,
                        Eigen::MatrixXd& h) const {
    g.setZero(n);
    h.setZero(n, n);
    for (size_t b = 0; b < map->blocks.size(); ++b) {
      const auto& blk = map->blocks[b];
      const Eigen::MatrixXd s = slack(static_cast<int>(b), x);
      const Eigen::Index nb = s.rows();
      Eigen::LLT<Eigen::MatrixXd> llt(s);
      const Eigen::MatrixXd sinv = llt.solve(Eigen::MatrixXd::Identity(nb, nb));
      // dS/dy_j = -F_j, dS/dt = I; -log det contributes tr(Sinv F_j) to
      // grad_j and -tr(Sinv) to grad_t.
      std::vector<Eigen::MatrixXd> T;
      T.reserve(active[b].size());
      for (int j : active[b]) {
        T.push_back(sinv * blk.F[j]);
        g[j] += T.back().trace();
      }
      g[m] -= sinv.trace();
      for (size_t p = 0; p < active[b].size(); ++p) {
        for (size_t q = p; q < active[b].size(); ++q) {
          const double v = (T[p].array() * T[q].transpose().array()).sum();
          h(active[b][p], active[b][q]) += v;
          if (p != q) h(active[b][q], active[b][p]) += v;
        }
        const double vt = -(T[p] * sinv).trace();
        h(active[b][p], m) += vt;
        h(m, active[b][p]) += vt;
      }
      h(m, m) += (sinv.array() * sinv.array()).sum();
    }
    for (const auto& c : cuts) {
      const double s = c.offset + c.coef * x[c.var];
      g[c.var] -= c.coef / s;
      h(c.var, c.var) += 1.0 / (s * s);
    }
  }
};

}  // namespace

FeasibilityVerdict solve_feasibility(const AffineMatrixMap& map, double delta,
                                     int budget) {
  map.validate();
  if (!(delta > 0.0)) throw std::invalid_argument("margin delta must be > 0");

  const BarrierProblem prob(map);
  const int m = prob.m;

  Eigen::VectorXd x(prob.n);
  for (int j = 0; j < m; ++j)
    x[j] = (map.signs[j] == VarSign::NonNegative) ? std::min(1.0, 0.5 * map.box) : 0.0;
  {
    Eigen::VectorXd y0 = x.head(m);
    const double worst = map.worst_eigenvalue(y0);
    x[m] = worst + std::max(1.0, 0.1 * std::abs(worst));
  }

  const auto objective = [&](const Eigen::VectorXd& v) {
    double obj = v[m];
    for (int j = 0; j < m; ++j)
      obj += (map.signs[j] == VarSign::NonNegative) ? map.reg * v[j]
                                                    : 0.5 * map.reg * v[j] * v[j];
    return obj;
  };

  FeasibilityVerdict out;
  out.t_lower = -std::numeric_limits<double>::infinity();
  int used = 0;
  double tau = 1.0;
  bool stalled = false;

  while (true) {
    // Center at the current tau by damped Newton.
    bool centered = false;
    for (int it = 0; it < 120 && used < budget; ++it, ++used) {
      Eigen::VectorXd g;
      Eigen::MatrixXd h;
      prob.gradient_hessian(x, g, h);
      g[m] += tau;
      for (int j = 0; j < m; ++j) {
        if (map.signs[j] == VarSign::NonNegative) {
          g[j] += tau * map.reg;
        } else {
          g[j] += tau * map.reg * x[j];
          h(j, j) += tau * map.reg;
        }
      }

      Eigen::VectorXd step;
      Eigen::LLT<Eigen::MatrixXd> llt(h);
      if (llt.info() == Eigen::Success) {
        step = llt.solve(-g);
      } else {
        Eigen::MatrixXd hr = h;
        hr.diagonal().array() += 1e-12 * (1.0 + h.diagonal().maxCoeff());
        step = Eigen::LDLT<Eigen::MatrixXd>(hr).solve(-g);
      }

      const double decrement_sq = -g.dot(step);
      if (!(decrement_sq > 2e-11)) {
        centered = true;
        break;
      }

      double phi0;
      if (!prob.barrier_value(x, phi0)) {
        out.iterations = used;
        out.y = x.head(m);
        out.margin = map.worst_eigenvalue(out.y);
        return out;  // Indeterminate: lost strict feasibility (numerical)
      }
      phi0 += tau * objective(x);

      double alpha = 1.0;
      bool accepted = false;
      while (alpha > 1e-18) {
        const Eigen::VectorXd trial = x + alpha * step;
        double phi1;
        if (prob.barrier_value(trial, phi1)) {
          phi1 += tau * objective(trial);
          if (phi1 <= phi0 + 0.01 * alpha * g.dot(step)) {
            x = trial;
            accepted = true;
            break;
          }
        }
        alpha *= 0.5;
      }
      if (!accepted) {
        stalled = true;
        centered = true;  // treat the current point as the best center
        break;
      }
    }

    if (centered && !stalled)
      out.t_lower = std::max(out.t_lower, x[m] - (prob.nu + std::sqrt(prob.nu)) / tau);

    const double gap = prob.nu / tau;
    if (gap <= 1e-13 * (1.0 + std::abs(x[m])) || stalled || used >= budget) {
      out.y = x.head(m);
      out.margin = map.worst_eigenvalue(out.y);
      out.iterations = used;
      if (out.margin <= -delta)
        out.status = FeasibilityStatus::Feasible;
      else if (out.t_lower > -delta)
        out.status = FeasibilityStatus::Infeasible;
      else
        out.status = FeasibilityStatus::Indeterminate;
      return out;
    }
    tau *= 8.0;
  }
}

}  // namespace mdcert
