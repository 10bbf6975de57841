#include "mdcert/verify.hpp"

#include <cmath>
#include <limits>
#include <random>

namespace mdcert {

namespace {

void apply_check(BoundReport& rep, int k, double recorded, double bound) {
  const double v = recorded - bound;
  if (k == 0 && rep.max_violation == 0.0)
    rep.max_violation = v;
  else
    rep.max_violation = std::max(rep.max_violation, v);
  if (rep.first_violation_k < 0 && v > bound_slack(bound)) rep.first_violation_k = k;
}

}  // namespace

BoundReport check_thm1_bound(const TrajectoryRecord& traj,
                             const CentralizedCertificate& cert, const DGF& dgf) {
  if (traj.distributed || traj.convex_mode)
    throw std::invalid_argument("thm1 check expects a strongly convex centralized trajectory");
  BoundReport rep;
  rep.kind = "thm1";
  rep.certified_value = cert.rho;
  const double d0 = traj.bregman.at(0);
  const double mu_phi = dgf.bounds().mu;
  double rho_k = 1.0;
  for (int k = 0; k <= traj.iters; ++k) {
    apply_check(rep, k, traj.bregman[k], rho_k * d0);
    apply_check(rep, k, traj.dist_sq[k], 2.0 * d0 / mu_phi * rho_k);
    rho_k *= cert.rho;
  }
  if (traj.iters >= 40) rep.empirical_rate = empirical_rate(traj.bregman);
  return rep;
}

BoundReport check_thm2_bound(const TrajectoryRecord& traj,
                             const ConvexCentralizedCertificate& cert, const DGF&) {
  if (traj.distributed || !traj.convex_mode)
    throw std::invalid_argument("thm2 check expects a convex centralized trajectory");
  if (!(cert.eps > 0.0)) throw std::invalid_argument("certificate carries no eps > 0");
  BoundReport rep;
  rep.kind = "thm2";
  rep.certified_value = cert.eps;
  const double d0 = traj.bregman.at(0);
  for (int k = 1; k <= traj.iters; ++k)
    apply_check(rep, k, traj.fgap_erg[k], d0 / (cert.eps * k));
  if (traj.iters >= 40) rep.empirical_rate = empirical_power_exponent(traj.fgap_erg);
  return rep;
}

BoundReport check_thm3_bound(const TrajectoryRecord& traj,
                             const DistributedCertificate& cert) {
  if (!traj.distributed || traj.convex_mode)
    throw std::invalid_argument("thm3 check expects a strongly convex distributed trajectory");
  if (traj.P_is_identity_fallback ||
      (traj.P_used - cert.P).cwiseAbs().maxCoeff() > 1e-12)
    throw std::invalid_argument("trajectory was not recorded with the certificate's P");
  BoundReport rep;
  rep.kind = "thm3";
  rep.certified_value = cert.rho;
  const double v0 = traj.pnorm_sq.at(0);
  double rho_k = 1.0;
  for (int k = 0; k <= traj.iters; ++k) {
    apply_check(rep, k, traj.pnorm_sq[k], rho_k * v0);
    rho_k *= cert.rho;
  }
  if (traj.iters >= 40) rep.empirical_rate = empirical_rate(traj.pnorm_sq);
  return rep;
}

BoundReport check_thm4_bound(const TrajectoryRecord& traj,
                             const ConvexDistributedCertificate& cert, const Objective&) {
  if (!traj.distributed || !traj.convex_mode)
    throw std::invalid_argument("thm4 check expects a convex distributed trajectory");
  if (traj.P_is_identity_fallback ||
      (traj.P_used - cert.P).cwiseAbs().maxCoeff() > 1e-12)
    throw std::invalid_argument("trajectory was not recorded with the certificate's P");
  if (!(cert.eps > 0.0)) throw std::invalid_argument("certificate carries no eps > 0");
  BoundReport rep;
  rep.kind = "thm4";
  rep.certified_value = cert.eps;
  const double v0 = traj.pnorm_sq.at(0);
  for (int k = 1; k <= traj.iters; ++k)
    apply_check(rep, k, traj.fgap_erg[k], v0 / (cert.eps * k));
  if (traj.iters >= 40) rep.empirical_rate = empirical_power_exponent(traj.fgap_erg);
  return rep;
}

namespace {

// Least-squares slope of samples (k, f(k)) over the trailing window of the
// positive prefix.
double trailing_log_slope(const std::vector<double>& values, double window_frac,
                          bool log_abscissa) {
  size_t len = 0;
  while (len < values.size() && values[len] > 0.0) ++len;
  if (len < 20)
    throw std::invalid_argument("rate estimate needs at least 20 positive values");
  const size_t start = std::max<size_t>(log_abscissa ? 1 : 0,
                                        len - static_cast<size_t>(window_frac * len));
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  double count = 0;
  for (size_t k = start; k < len; ++k) {
    const double xk = log_abscissa ? std::log(static_cast<double>(k))
                                   : static_cast<double>(k);
    const double yk = std::log(values[k]);
    sx += xk;
    sy += yk;
    sxx += xk * xk;
    sxy += xk * yk;
    count += 1.0;
  }
  const double denom = count * sxx - sx * sx;
  if (denom <= 0.0) throw std::invalid_argument("degenerate rate-fit window");
  return (count * sxy - sx * sy) / denom;
}

}  // namespace

double empirical_rate(const std::vector<double>& values, double window_frac) {
  // Constant sequences fit slope 0 and return rate 1.
  return std::exp(trailing_log_slope(values, window_frac, false));
}

double empirical_power_exponent(const std::vector<double>& values, double window_frac) {
  return trailing_log_slope(values, window_frac, true);
}

double lemma2_max_violation(const TrajectoryRecord& traj, const DGF& dgf, double rho,
                            double eta) {
  if (traj.distributed) throw std::invalid_argument("lemma 2 is a centralized check");
  if (!traj.has_states) throw std::logic_error("state history required");
  // M_sc depends only on (rho, eta, mu_phi); the objective slot is inert.
  const auto m = build_centralized_matrices(
      ProblemClass(SectorBounds(1.0, 1.0), dgf.bounds(), Mode::StronglyConvex), rho, eta);
  double worst = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < traj.iters; ++k) {
    const Eigen::VectorXd e = traj.error_vector(k);
    const double rhs = quad_form_kron(m.M_sc, e, traj.d);
    const double lhs = traj.bregman[k + 1] - rho * traj.bregman[k];
    worst = std::max(worst, lhs - rhs);
  }
  return worst;
}

double lemma3_max_violation(const TrajectoryRecord& traj, const DGF& dgf, double eps,
                            double eta) {
  if (traj.distributed) throw std::invalid_argument("lemma 3 is a centralized check");
  if (!traj.has_states) throw std::logic_error("state history required");
  const SymMatrix mc = build_convex_centralized_matrix(dgf.bounds().mu, eta, eps);
  double worst = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < traj.iters; ++k) {
    const Eigen::VectorXd e = traj.error_vector(k);
    const double rhs = quad_form_kron(mc, e, traj.d);
    const double lhs =
        eps * traj.fgap_inst[k] + traj.bregman[k + 1] - traj.bregman[k];
    worst = std::max(worst, lhs - rhs);
  }
  return worst;
}

double lemma4_max_violation(const TrajectoryRecord& traj, const Objective& obj) {
  if (!traj.distributed) throw std::invalid_argument("lemma 4 is a distributed check");
  if (!traj.has_states) throw std::logic_error("state history required");
  const double Lf = obj.bounds().L;
  const int n = traj.n, d = traj.d;
  double worst = -std::numeric_limits<double>::infinity();
  for (int k = 0; k <= traj.iters; ++k) {
    const Eigen::VectorXd ex = traj.x[k] - traj.star.x_star_stack;
    const Eigen::VectorXd eu = traj.u[k] - traj.star.u_star;
    Eigen::VectorXd sx = Eigen::VectorXd::Zero(d), su = Eigen::VectorXd::Zero(d);
    for (int i = 0; i < n; ++i) {
      sx += ex.segment(i * d, d);
      su += eu.segment(i * d, d);
    }
    // e' M e with M = [[Lf (I - 11'/n) x I, (1/2n) 11' x I], ...] on (x, u).
    const double rhs =
        Lf * (ex.squaredNorm() - sx.squaredNorm() / n) + sx.dot(su) / n;
    worst = std::max(worst, traj.fgap_inst[k] - rhs);
  }
  return worst;
}

LemmaSuiteReport lemma_suites(std::uint64_t seed, int trials) {
  if (trials < 1) throw std::invalid_argument("lemma suites need trials >= 1");
  LemmaSuiteReport rep;
  rep.trajectories = trials;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  rep.lemma2_max_violation = rep.lemma3_max_violation = rep.lemma4_max_violation =
      -std::numeric_limits<double>::infinity();

  for (int t = 0; t < trials; ++t) {
    const double kf = 1.5 + 3.5 * unif(rng);
    const double kp = 1.0 + 2.0 * unif(rng);
    const int d = 2 + static_cast<int>(unif(rng) * 4.0);
    const std::uint64_t sub = rng();

    // Lemma 2: strongly convex centralized trajectory.
    {
      const SectorBounds fb(1.0, kf), pb(1.0, kp);
      const auto dgf = make_dgf(DGFKind::DiagQuadratic, pb, d, sub);
      const auto obj = make_objective(ObjectiveKind::Quadratic, fb, 1, d, sub + 1);
      Eigen::VectorXd x0 = Eigen::VectorXd::Constant(d, 1.0 + unif(rng));
      const double eta = 2.0 * pb.mu / (fb.mu + fb.L);
      const auto traj = run_centralized(*dgf, *obj, eta, x0, 30);
      for (double rho : {1.0 - 0.5 * unif(rng), 1.0})
        rep.lemma2_max_violation = std::max(
            rep.lemma2_max_violation, lemma2_max_violation(traj, *dgf, rho, eta));
    }

    // Lemma 3: convex centralized trajectory.
    {
      const SectorBounds fb(0.0, kf), pb(1.0, kp);
      const auto dgf = make_dgf(DGFKind::DiagQuadratic, pb, d, sub + 2);
      const auto obj = make_objective(ObjectiveKind::Quadratic, fb, 1, d, sub + 3);
      Eigen::VectorXd x0 = Eigen::VectorXd::Constant(d, 1.0 + unif(rng));
      const double eta = pb.mu / fb.L;
      const auto traj = run_centralized(*dgf, *obj, eta, x0, 30);
      for (double eps : {0.25 * eta, eta})
        rep.lemma3_max_violation = std::max(
            rep.lemma3_max_violation, lemma3_max_violation(traj, *dgf, eps, eta));
    }

    // Lemma 4: convex distributed trajectory on a small ring.
    {
      const int n = 4;
      const SectorBounds fb(0.0, kf), pb(1.0, kp);
      const auto dgf = make_dgf(DGFKind::DiagQuadratic, pb, d, sub + 4);
      const auto obj = make_objective(ObjectiveKind::Quadratic, fb, n, d, sub + 5);
      const auto net = build_network(ring_graph(n));
      Eigen::VectorXd x0 = Eigen::VectorXd::Zero(n * d);
      for (int i = 0; i < n * d; ++i) x0[i] = 2.0 * unif(rng) - 1.0;
      const auto traj = run_distributed(*dgf, *obj, net, 0.2 / fb.L, x0, 30);
      rep.lemma4_max_violation =
          std::max(rep.lemma4_max_violation, lemma4_max_violation(traj, *obj));
    }

    // Lemma 1: block-reduction verdict agreement.
    {
      const int m = 5;
      std::normal_distribution<double> gauss(0.0, 1.0);
      auto random_sym = [&](double shift) {
        Eigen::MatrixXd a(m, m);
        for (int i = 0; i < m; ++i)
          for (int j = 0; j < m; ++j) a(i, j) = gauss(rng);
        Eigen::MatrixXd s = 0.5 * (a + a.transpose());
        s.diagonal().array() += shift;
        return SymMatrix(s);
      };
      // Mix clearly PSD, clearly indefinite, and near-boundary inputs.
      const double shift1 = (t % 3 == 0) ? 3.0 : 0.5 * unif(rng);
      const double shift2 = (t % 2 == 0) ? 3.0 : -0.5 * unif(rng);
      const auto repdct = block_reduction_check(random_sym(shift1), random_sym(shift2),
                                                4, 2);
      ++rep.lemma1_trials;
      if (repdct.agree()) ++rep.lemma1_agreements;
    }
  }
  return rep;
}

}  // namespace mdcert
