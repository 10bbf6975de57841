#pragma once

#include <string>
#include <vector>

#include "mdcert/network.hpp"
#include "mdcert/oracles.hpp"

namespace mdcert {

/// Stationary tuple of the algorithm map. Stacked fields have length n*d
/// (n = 1 for centralized problems).
struct FixedPoint {
  Eigen::VectorXd x_star;        // R^d minimizer of the global objective
  Eigen::VectorXd x_star_stack;  // 1_n kron x_star
  Eigen::VectorXd z_star;
  Eigen::VectorXd y_star;
  Eigen::VectorXd u_star;
  Eigen::VectorXd v_star;
  double f_star = 0.0;
};

/// Computes the fixed point: direct solve for quadratic objectives, otherwise
/// a high-accuracy gradient descent polish (gradient norm <= 1e-12).
FixedPoint fixed_point(const DGF& dgf, const Objective& obj,
                       const NetworkSpec* net = nullptr);

struct TrajectoryRecord {
  bool distributed = false;
  bool convex_mode = false;
  int n = 1;
  int d = 0;
  int iters = 0;  // K; per-iteration vectors have length K + 1 (k = 0..K)

  std::vector<double> bregman;    // D_{phi*}(z_k, z*), summed over agents
  std::vector<double> dist_sq;    // ||x_k - x*||^2 (stacked)
  std::vector<double> pnorm_sq;   // ||xi_k - xi*||^2_{P kron I} (0 centralized)
  std::vector<double> fgap_inst;  // sc: f(x_k)-f*; distributed: sum_i f(x_i)-f*
  std::vector<double> fgap_erg;   // ergodic gap at K = k (k >= 1); [0] = inst

  Eigen::Matrix2d P_used = Eigen::Matrix2d::Identity();
  bool P_is_identity_fallback = true;

  bool has_states = false;  // full history kept while K <= 1e4 and n*d <= 1e3
  std::vector<Eigen::VectorXd> z, y, x, u, v;

  FixedPoint star;

  /// Stacked error vector at step k: centralized (z, x, u) deviations in
  /// R^{3d}; distributed (z, y, x, u, v) deviations in R^{5nd}.
  Eigen::VectorXd error_vector(int k) const;
};

/// Dual-space mirror descent z+ = z - eta * grad f(x), x+ = conj_grad(z+),
/// started from z0 = grad phi(x0).
TrajectoryRecord run_centralized(const DGF& dgf, const Objective& obj, double eta,
                                 const Eigen::VectorXd& x0, int iters);

/// One application of the stacked distributed update to (z, y).
std::pair<Eigen::VectorXd, Eigen::VectorXd> distributed_step(
    const DGF& dgf, const Objective& obj, const NetworkSpec& net, double eta1,
    const Eigen::VectorXd& z, const Eigen::VectorXd& y);

/// Distributed mirror descent with gradient tracking; y0 = 0. Runs the
/// per-agent recursion and the stacked one and requires them to agree to
/// 1e-10 per iterate. P weights the recorded Lyapunov norm; omit it to record
/// with the identity (flagged).
TrajectoryRecord run_distributed(const DGF& dgf, const Objective& obj,
                                 const NetworkSpec& net, double eta1,
                                 const Eigen::VectorXd& x0_stack, int iters,
                                 const Eigen::Matrix2d* P = nullptr);

/// Ergodic average: centralized means iterates 1..K, distributed means
/// per-agent iterates 0..K-1 (returned stacked).
Eigen::VectorXd ergodic_average(const TrajectoryRecord& traj, int K);

/// CSV export: optional comment lines, then "k,bregman,dist_sq,pnorm_sq,fgap"
/// and one row per iteration at 17 significant digits. The fgap column holds
/// the ergodic gap for convex-mode runs and the instantaneous gap otherwise.
/// iters = 0 exports the header only.
void write_trajectory_csv(const TrajectoryRecord& traj, const std::string& path,
                          const std::vector<std::string>& comment_lines = {});

struct TrajectoryColumns {
  std::vector<double> k, bregman, dist_sq, pnorm_sq, fgap;
};

TrajectoryColumns read_trajectory_csv(const std::string& path);

}  // namespace mdcert
