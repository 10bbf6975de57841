#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "mdcert/engine.hpp"
#include "mdcert/verify.hpp"

using namespace mdcert;

namespace {

Eigen::VectorXd seeded_vector(int d, std::uint64_t seed, double scale = 1.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::VectorXd v(d);
  for (int i = 0; i < d; ++i) v[i] = scale * gauss(rng);
  return v;
}

// Worst-case aligned quadratic: Q = diag(mu, L), c = 0.
class DiagQuadratic final : public Objective {
 public:
  DiagQuadratic(double mu, double L) : Objective(SectorBounds(mu, L), 1, 2) {
    q_ << mu, L;
  }
  double f_i(int, const Eigen::VectorXd& x) const override {
    return 0.5 * x.dot(q_.asDiagonal() * x);
  }
  Eigen::VectorXd grad_i(int, const Eigen::VectorXd& x) const override {
    return q_.asDiagonal() * x;
  }
  std::optional<Eigen::VectorXd> analytic_minimizer() const override {
    return Eigen::VectorXd::Zero(2);
  }

 private:
  Eigen::Vector2d q_;
};

}  // namespace

TEST_CASE("empirical rate estimation") {
  SUBCASE("exact geometric sequence") {
    std::vector<double> vals;
    double v = 3.0;
    for (int k = 0; k < 200; ++k) {
      vals.push_back(v);
      v *= 0.91;
    }
    CHECK(empirical_rate(vals) == doctest::Approx(0.91).epsilon(1e-10));
  }
  SUBCASE("constant sequence") {
    std::vector<double> vals(100, 2.5);
    CHECK(empirical_rate(vals) == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("underflowed tail is trimmed") {
    std::vector<double> vals;
    double v = 1.0;
    for (int k = 0; k < 60; ++k) {
      vals.push_back(v);
      v *= 0.5;
    }
    vals.push_back(0.0);
    vals.push_back(0.0);
    CHECK(empirical_rate(vals) == doctest::Approx(0.5).epsilon(1e-10));
  }
  SUBCASE("too few positive values") {
    std::vector<double> vals(10, 1.0);
    CHECK_THROWS_AS(empirical_rate(vals), std::invalid_argument);
  }
  SUBCASE("worst-case gradient descent at kappa = 3") {
    const auto dgf = make_dgf(DGFKind::Euclidean, SectorBounds(1.0, 1.0), 2, 0);
    DiagQuadratic obj(1.0, 3.0);
    const auto traj =
        run_centralized(*dgf, obj, 2.0 / 4.0, Eigen::Vector2d(1.0, 1.0), 120);
    CHECK(empirical_rate(traj.bregman) == doctest::Approx(0.25).epsilon(5e-3));
  }
}

TEST_CASE("exponential bound checks") {
  const ProblemClass pc(SectorBounds(1.0, 3.0), SectorBounds(1.0, 2.0),
                        Mode::StronglyConvex);
  const auto cert = analytic_certificate(pc);
  const auto dgf = make_dgf(DGFKind::DiagQuadratic, pc.phi, 6, 2);
  const auto obj = make_objective(ObjectiveKind::Quadratic, pc.f, 1, 6, 3);
  const auto traj = run_centralized(*dgf, *obj, cert.eta, seeded_vector(6, 4), 150);

  SUBCASE("certified rate passes") {
    const auto rep = check_thm1_bound(traj, cert, *dgf);
    CHECK(rep.ok());
    CHECK(rep.kind == "thm1");
    CHECK(rep.certified_value == cert.rho);
    CHECK(rep.empirical_rate <= cert.rho + 0.02);
  }
  SUBCASE("halving the rate is flagged") {
    CentralizedCertificate bad = cert;
    bad.rho = cert.rho / 2.0;
    const auto rep = check_thm1_bound(traj, bad, *dgf);
    CHECK_FALSE(rep.ok());
    CHECK(rep.first_violation_k >= 1);
    CHECK(rep.max_violation > 0.0);
  }
  SUBCASE("fixed-point start is an equality chain") {
    const auto star = fixed_point(*dgf, *obj);
    const auto idle = run_centralized(*dgf, *obj, cert.eta, star.x_star, 60);
    const auto rep = check_thm1_bound(idle, cert, *dgf);
    CHECK(rep.ok());
    CHECK(rep.max_violation <= 0.0);
  }
  SUBCASE("Bregman primal identity holds along the trajectory") {
    for (int k = 0; k <= traj.iters; ++k) {
      const double via_conj = traj.bregman[k];
      const double via_primal = dgf->bregman(traj.star.x_star, traj.x[k]);
      CHECK(std::abs(via_conj - via_primal) <= 1e-8 * (1.0 + via_conj));
    }
  }
}

TEST_CASE("ergodic bound checks") {
  const ProblemClass pc(SectorBounds(0.0, 1.0), SectorBounds(1.0, 2.0), Mode::Convex);
  const auto cert = max_eps_centralized(pc, {});
  const auto dgf = make_dgf(DGFKind::DiagQuadratic, pc.phi, 5, 6);
  const auto obj = make_objective(ObjectiveKind::Quadratic, pc.f, 1, 5, 7);
  const auto traj = run_centralized(*dgf, *obj, cert.eta, seeded_vector(5, 8), 120);

  SUBCASE("certified eps passes at every horizon") {
    const auto rep = check_thm2_bound(traj, cert, *dgf);
    CHECK(rep.ok());
    CHECK(rep.kind == "thm2");
  }
  SUBCASE("inflating eps tenfold is flagged") {
    ConvexCentralizedCertificate bad = cert;
    bad.eps = cert.eps * 10.0;
    const auto rep = check_thm2_bound(traj, bad, *dgf);
    CHECK_FALSE(rep.ok());
  }
  SUBCASE("the bound curve itself decays like 1/K") {
    std::vector<double> bound(traj.iters + 1, 0.0);
    for (int k = 1; k <= traj.iters; ++k)
      bound[k] = traj.bregman[0] / (cert.eps * k);
    bound[0] = bound[1];
    CHECK(empirical_power_exponent(bound) == doctest::Approx(-1.0).epsilon(1e-10));
  }
}

TEST_CASE("distributed bound checks") {
  const ProblemClass pc(SectorBounds(1.0, 2.0), SectorBounds(1.0, 2.0),
                        Mode::StronglyConvex);
  EngineOptions opts;
  opts.jobs = 2;
  const auto cert = min_rho_distributed(pc, 0.4472136, default_eta1_grid(pc, 12), opts);
  const int n = 5, d = 3;
  const auto net = build_network(ring_graph(n));
  const auto dgf = make_dgf(DGFKind::DiagQuadratic, pc.phi, d, 9);
  const auto obj = make_objective(ObjectiveKind::Quadratic, pc.f, n, d, 10);
  const auto traj = run_distributed(*dgf, *obj, net, cert.eta1,
                                    seeded_vector(n * d, 11), 150, &cert.P);

  SUBCASE("certified rate passes") {
    const auto rep = check_thm3_bound(traj, cert);
    CHECK(rep.ok());
    CHECK(rep.kind == "thm3");
  }
  SUBCASE("squaring the rate is flagged when it undercuts the decay") {
    DistributedCertificate bad = cert;
    bad.rho = cert.rho * cert.rho;
    if (bad.rho < empirical_rate(traj.pnorm_sq)) {
      const auto rep = check_thm3_bound(traj, bad);
      CHECK_FALSE(rep.ok());
    }
  }
  SUBCASE("P mismatch is rejected") {
    DistributedCertificate other = cert;
    other.P(0, 0) += 0.1;
    other.P(1, 1) += 0.1;
    CHECK_THROWS_AS(check_thm3_bound(traj, other), std::invalid_argument);
  }
}

TEST_CASE("distributed ergodic bound checks") {
  const ProblemClass pc(SectorBounds(0.0, 1.0), SectorBounds(1.0, 2.0), Mode::Convex);
  EngineOptions opts;
  opts.jobs = 2;
  const auto cert = max_eps_distributed(pc, 0.2, default_eta1_grid(pc, 10), opts);
  const int n = 5, d = 3;
  const auto net = build_network(complete_graph(n), 0.8 / n);  // lambda = 0.2
  const auto dgf = make_dgf(DGFKind::DiagQuadratic, pc.phi, d, 12);
  const auto obj = make_objective(ObjectiveKind::Quadratic, pc.f, n, d, 13);
  const auto traj = run_distributed(*dgf, *obj, net, cert.eta1,
                                    seeded_vector(n * d, 14), 200, &cert.P);

  SUBCASE("certified eps passes") {
    const auto rep = check_thm4_bound(traj, cert, *obj);
    CHECK(rep.ok());
    CHECK(rep.kind == "thm4");
  }
  SUBCASE("inflated eps is flagged") {
    ConvexDistributedCertificate bad = cert;
    bad.eps = cert.eps * 10.0;
    const auto rep = check_thm4_bound(traj, bad, *obj);
    CHECK_FALSE(rep.ok());
  }
}

TEST_CASE("lemma suites") {
  const auto rep = lemma_suites(2026, 10);
  CHECK(rep.trajectories == 10);
  CHECK(rep.lemma2_max_violation <= 1e-8);
  CHECK(rep.lemma3_max_violation <= 1e-8);
  CHECK(rep.lemma4_max_violation <= 1e-8);
  CHECK(rep.lemma1_trials == 10);
  CHECK(rep.lemma1_agreements == rep.lemma1_trials);
}
