// Acceptance suite: runs every acceptance criterion end to end and prints one
// pass/fail line each. Exits nonzero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "mdcert/engine.hpp"
#include "mdcert/verify.hpp"

using namespace mdcert;

namespace {

int g_failures = 0;

void report(int idx, const std::string& name, bool pass, double seconds,
            const std::string& detail) {
  std::printf("%s  criterion %2d  %-34s (%.2fs)%s%s\n", pass ? "PASS" : "FAIL", idx,
              name.c_str(), seconds, detail.empty() ? "" : "  ", detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

void run(int idx, const std::string& name,
         const std::function<std::pair<bool, std::string>()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  bool pass = false;
  std::string detail;
  try {
    std::tie(pass, detail) = body();
  } catch (const std::exception& e) {
    pass = false;
    detail = std::string("exception: ") + e.what();
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  report(idx, name, pass, secs, detail);
}

ProblemClass sc_class(double kf, double kp) {
  return ProblemClass(SectorBounds(1.0, kf), SectorBounds(1.0, kp),
                      Mode::StronglyConvex);
}

Eigen::VectorXd seeded_vector(int d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::VectorXd v(d);
  for (int i = 0; i < d; ++i) v[i] = gauss(rng);
  return v;
}

const std::vector<double> kKappaF = {1.5, 2.0, 3.0, 5.0, 10.0};
const std::vector<double> kKappaPhi = {1.25, 2.0, 5.0};

int hw_jobs() {
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 2 : static_cast<int>(std::min(hc, 8u));
}

// 1. Closed-form certificate residuals across the acceptance grid.
std::pair<bool, std::string> criterion1() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst = -1.0;
  for (double kf : kKappaF)
    for (double kp : kKappaPhi) {
      const auto c = analytic_certificate(sc_class(kf, kp));
      worst = std::max(worst, c.residual);
      if (!(c.residual <= 1e-8))
        return {false, "residual " + std::to_string(c.residual) + " at kf=" +
                           std::to_string(kf) + " kp=" + std::to_string(kp)};
    }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (secs >= 1.0) return {false, "runtime " + std::to_string(secs) + "s >= 1s"};
  return {true, "worst residual " + std::to_string(worst)};
}

// 2. Engine domination of the closed-form rate with the step-size free.
std::pair<bool, std::string> criterion2() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst_gap = -1.0;
  for (double kf : kKappaF)
    for (double kp : kKappaPhi) {
      const ProblemClass pc = sc_class(kf, kp);
      const auto engine = min_rho_centralized(pc);
      const auto closed = analytic_certificate(pc);
      worst_gap = std::max(worst_gap, engine.rho - closed.rho);
      if (!(engine.rho <= closed.rho + 1e-4))
        return {false, "rho gap " + std::to_string(engine.rho - closed.rho) + " at kf=" +
                           std::to_string(kf) + " kp=" + std::to_string(kp)};
    }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (secs >= 30.0) return {false, "runtime " + std::to_string(secs) + "s >= 30s"};
  return {true, "worst rho gap " + std::to_string(worst_gap)};
}

// 3. Gradient descent recovery at kappa_phi = 1.
std::pair<bool, std::string> criterion3() {
  for (double kf : {2.0, 3.0, 10.0}) {
    const double target = std::pow((kf - 1.0) / (kf + 1.0), 2.0);
    const auto limit = analytic_certificate(sc_class(kf, 1.0));
    if (std::abs(limit.rho - target) > 2e-4)
      return {false, "limit certificate off at kf=" + std::to_string(kf)};
    const auto engine = min_rho_centralized(sc_class(kf, 1.0 + 1e-6));
    if (std::abs(engine.rho - target) > 2e-4)
      return {false, "engine rho " + std::to_string(engine.rho) + " vs GD " +
                         std::to_string(target) + " at kf=" + std::to_string(kf)};
  }
  return {true, ""};
}

// 4. Exponential bound holds on simulated centralized trajectories.
std::pair<bool, std::string> criterion4() {
  const auto t0 = std::chrono::steady_clock::now();
  const ProblemClass pc = sc_class(3.0, 2.0);
  const auto cert = analytic_certificate(pc);
  const int d = 10;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto dgf = make_dgf(DGFKind::DiagQuadratic, pc.phi, d, seed);
    const auto obj = make_objective(ObjectiveKind::Quadratic, pc.f, 1, d, 1000 + seed);
    const auto traj =
        run_centralized(*dgf, *obj, cert.eta, seeded_vector(d, 2000 + seed), 200);
    const auto rep = check_thm1_bound(traj, cert, *dgf);
    if (!rep.ok())
      return {false, "violation at k=" + std::to_string(rep.first_violation_k) +
                         " seed=" + std::to_string(seed)};
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (secs >= 10.0) return {false, "runtime " + std::to_string(secs) + "s >= 10s"};
  return {true, "20 seeds x 200 iterations clean"};
}

// 5. Distributed end-to-end on the five-ring.
std::pair<bool, std::string> criterion5(DistributedCertificate& cert_out) {
  const auto t0 = std::chrono::steady_clock::now();
  const ProblemClass pc = sc_class(2.0, 2.0);
  const auto net = build_network(ring_graph(5));
  if (std::abs(net.lambda - 0.4472136) > 1e-6)
    return {false, "ring lambda " + std::to_string(net.lambda)};
  EngineOptions opts;
  opts.jobs = hw_jobs();
  const auto cert = min_rho_distributed(pc, net.lambda, default_eta1_grid(pc), opts);
  cert_out = cert;
  if (!(cert.rho < 1.0)) return {false, "no rho < 1 certified"};
  const int d = 4;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto dgf = make_dgf(DGFKind::DiagQuadratic, pc.phi, d, 3000 + seed);
    const auto obj = make_objective(ObjectiveKind::Quadratic, pc.f, 5, d, 4000 + seed);
    const auto traj = run_distributed(*dgf, *obj, net, cert.eta1,
                                      seeded_vector(5 * d, 5000 + seed), 300, &cert.P);
    const auto rep = check_thm3_bound(traj, cert);
    if (!rep.ok())
      return {false, "violation at k=" + std::to_string(rep.first_violation_k) +
                         " seed=" + std::to_string(seed)};
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (secs >= 120.0) return {false, "runtime " + std::to_string(secs) + "s >= 120s"};
  return {true, "rho = " + std::to_string(cert.rho) + " at eta1 = " +
                    std::to_string(cert.eta1)};
}

// 6. Rate-vs-step curves: interior minima, ordered across mixing norms.
std::pair<bool, std::string> criterion6() {
  const ProblemClass pc = sc_class(2.0, 2.0);
  EngineOptions opts;
  opts.jobs = hw_jobs();
  const auto grid = default_eta1_grid(pc);
  double prev_min = 0.0;
  for (double lambda : {0.1, 0.3, 0.5, 0.7}) {
    const auto curve = distributed_rate_curve(pc, lambda, grid, opts);
    int best_idx = -1;
    double best = 2.0;
    for (size_t i = 0; i < curve.cells.size(); ++i)
      if (curve.cells[i].status == "certified" && curve.cells[i].rate < best) {
        best = curve.cells[i].rate;
        best_idx = static_cast<int>(i);
      }
    if (best_idx < 0) return {false, "no certified cell at lambda=" + std::to_string(lambda)};
    if (best_idx == 0 || best_idx + 1 == static_cast<int>(curve.cells.size()))
      return {false, "minimum on the grid edge at lambda=" + std::to_string(lambda)};
    if (best < prev_min - 1e-9)
      return {false, "minima not ordered at lambda=" + std::to_string(lambda)};
    prev_min = best;
  }
  return {true, ""};
}

// 7. Monotonicity of the best rate in both condition number and mixing norm.
std::pair<bool, std::string> criterion7() {
  EngineOptions opts;
  opts.jobs = hw_jobs();
  const std::vector<double> kfs = {1.5, 2.0, 5.0};
  const std::vector<double> lambdas = {0.1, 0.5, 0.9};
  double best[3][3];
  for (size_t a = 0; a < kfs.size(); ++a)
    for (size_t b = 0; b < lambdas.size(); ++b) {
      const ProblemClass pc = sc_class(kfs[a], 5.0);
      const auto cert =
          min_rho_distributed(pc, lambdas[b], default_eta1_grid(pc), opts);
      best[a][b] = cert.rho;
    }
  for (size_t b = 0; b < 3; ++b)
    for (size_t a = 1; a < 3; ++a)
      if (best[a][b] < best[a - 1][b] - 1e-9)
        return {false, "rate not monotone in kappa_f at lambda=" +
                           std::to_string(lambdas[b])};
  for (size_t a = 0; a < 3; ++a)
    for (size_t b = 1; b < 3; ++b)
      if (best[a][b] < best[a][b - 1] - 1e-9)
        return {false, "rate not monotone in lambda at kappa_f=" +
                           std::to_string(kfs[a])};
  return {true, ""};
}

// 8. Ergodic certificates and their bounds, centralized and distributed.
std::pair<bool, std::string> criterion8() {
  EngineOptions opts;
  opts.jobs = hw_jobs();
  const int d = 6;

  for (double kp : {1.0 + 1e-6, 2.0}) {
    const ProblemClass pc(SectorBounds(0.0, 1.0), SectorBounds(1.0, kp), Mode::Convex);
    const auto cert = max_eps_centralized(pc, {});
    if (!(cert.eps > 0.0))
      return {false, "no centralized eps at kappa_phi=" + std::to_string(kp)};
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const auto dgf = make_dgf(DGFKind::DiagQuadratic, pc.phi, d, 6000 + seed);
      const auto obj = make_objective(ObjectiveKind::Quadratic, pc.f, 1, d, 7000 + seed);
      const auto traj =
          run_centralized(*dgf, *obj, cert.eta, seeded_vector(d, 8000 + seed), 500);
      const auto rep = check_thm2_bound(traj, cert, *dgf);
      if (!rep.ok())
        return {false, "thm2 violation at k=" + std::to_string(rep.first_violation_k)};
    }
  }

  const ProblemClass pc(SectorBounds(0.0, 1.0), SectorBounds(1.0, 2.0), Mode::Convex);
  const auto cert = max_eps_distributed(pc, 0.2, default_eta1_grid(pc, 32), opts);
  if (!(cert.eps > 0.0)) return {false, "no distributed eps at lambda=0.2"};
  const int n = 5;
  const auto net = build_network(complete_graph(n), 0.8 / n);  // lambda = 0.2
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto dgf = make_dgf(DGFKind::DiagQuadratic, pc.phi, 3, 9000 + seed);
    const auto obj = make_objective(ObjectiveKind::Quadratic, pc.f, n, 3, 10000 + seed);
    const auto traj = run_distributed(*dgf, *obj, net, cert.eta1,
                                      seeded_vector(n * 3, 11000 + seed), 500, &cert.P);
    const auto rep = check_thm4_bound(traj, cert, *obj);
    if (!rep.ok())
      return {false, "thm4 violation at k=" + std::to_string(rep.first_violation_k)};
  }
  return {true, ""};
}

// 9. Appendix lemma suites.
std::pair<bool, std::string> criterion9() {
  const auto block = lemma_suites(42, 200);
  if (block.lemma1_agreements != block.lemma1_trials)
    return {false, std::to_string(block.lemma1_trials - block.lemma1_agreements) +
                       " block-reduction disagreements"};
  const auto traj = lemma_suites(7, 50);
  if (!(traj.lemma2_max_violation <= 1e-8))
    return {false, "lemma 2 violation " + std::to_string(traj.lemma2_max_violation)};
  if (!(traj.lemma3_max_violation <= 1e-8))
    return {false, "lemma 3 violation " + std::to_string(traj.lemma3_max_violation)};
  if (!(traj.lemma4_max_violation <= 1e-8))
    return {false, "lemma 4 violation " + std::to_string(traj.lemma4_max_violation)};
  return {true, ""};
}

// 10. Negative control: a tightened certificate must be caught.
std::pair<bool, std::string> criterion10(const DistributedCertificate& cert) {
  const ProblemClass pc = sc_class(2.0, 2.0);
  const auto net = build_network(ring_graph(5));
  const int d = 4;
  DistributedCertificate tight = cert;
  tight.rho = 0.5 * cert.rho;
  bool flagged = false;
  for (std::uint64_t seed = 0; seed < 10 && !flagged; ++seed) {
    const auto dgf = make_dgf(DGFKind::DiagQuadratic, pc.phi, d, 3000 + seed);
    const auto obj = make_objective(ObjectiveKind::Quadratic, pc.f, 5, d, 4000 + seed);
    const auto traj = run_distributed(*dgf, *obj, net, cert.eta1,
                                      seeded_vector(5 * d, 5000 + seed), 300, &cert.P);
    if (tight.rho < empirical_rate(traj.pnorm_sq)) {
      const auto rep = check_thm3_bound(traj, tight);
      if (!rep.ok()) flagged = true;
    }
  }
  if (!flagged) return {false, "halved rate was never flagged"};

  // Centralized control as well.
  const ProblemClass cpc = sc_class(3.0, 2.0);
  const auto ccert = analytic_certificate(cpc);
  CentralizedCertificate bad = ccert;
  bad.rho = 0.5 * ccert.rho;
  const auto dgf = make_dgf(DGFKind::DiagQuadratic, cpc.phi, 10, 1);
  const auto obj = make_objective(ObjectiveKind::Quadratic, cpc.f, 1, 10, 2);
  const auto traj = run_centralized(*dgf, *obj, ccert.eta, seeded_vector(10, 3), 200);
  if (bad.rho < empirical_rate(traj.bregman)) {
    const auto rep = check_thm1_bound(traj, bad, *dgf);
    if (rep.ok()) return {false, "halved centralized rate was never flagged"};
  }
  return {true, ""};
}

}  // namespace

int main() {
  std::printf("acceptance suite (tool version %s)\n", "0.1.0");
  DistributedCertificate ring_cert;

  run(1, "closed-form certificate validity", criterion1);
  run(2, "engine dominates the closed form", criterion2);
  run(3, "gradient descent recovery", criterion3);
  run(4, "centralized exponential bound", criterion4);
  run(5, "distributed end-to-end (ring 5)",
      [&]() { return criterion5(ring_cert); });
  run(6, "rate curves vs step-size", criterion6);
  run(7, "rate monotonicity grid", criterion7);
  run(8, "ergodic certificates and bounds", criterion8);
  run(9, "lemma suites", criterion9);
  run(10, "negative controls",
      [&]() { return criterion10(ring_cert); });

  if (g_failures > 0) {
    std::printf("%d criterion(s) failed\n", g_failures);
    return 1;
  }
  std::printf("all criteria passed\n");
  return 0;
}
