#include "mdcert/engine.hpp"

#include <atomic>
#include <cmath>
#include <functional>
#include <mutex>
#include <thread>

namespace mdcert {

namespace {

// Convex-mode LMIs are feasible only on the boundary (the Lyapunov row of the
// assembled matrix vanishes at the optimum), so they are certified to
// lambda_max <= kBoundarySlack instead of the strict -delta margin.
constexpr double kBoundarySlack = 1e-10;

// Builds an affine map by probing an assembly routine with unit vectors.
// `assemble` must be affine in y and return one matrix per block.
AffineMatrixMap probe_map(int nvars, std::vector<VarSign> signs,
                          const std::function<std::vector<Eigen::MatrixXd>(
                              const Eigen::VectorXd&)>& assemble) {
  AffineMatrixMap map;
  map.signs = std::move(signs);
  const auto base = assemble(Eigen::VectorXd::Zero(nvars));
  map.blocks.resize(base.size());
  for (size_t b = 0; b < base.size(); ++b) {
    map.blocks[b].F0 = base[b];
    map.blocks[b].F.resize(nvars);
  }
  for (int j = 0; j < nvars; ++j) {
    const auto probe = assemble(Eigen::VectorXd::Unit(nvars, j));
    for (size_t b = 0; b < base.size(); ++b)
      map.blocks[b].F[j] = probe[b] - base[b];
  }
  return map;
}

AffineMatrixMap centralized_fixed_eta_map(const ProblemClass& pc, double rho,
                                          double eta) {
  const auto m = build_centralized_matrices(pc, rho, eta);
  AffineMatrixMap map;
  map.signs = {VarSign::NonNegative, VarSign::NonNegative};
  map.blocks.push_back({m.M_sc.mat(), {m.M_f.mat(), m.M_phi.mat()}});
  return map;
}

AffineMatrixMap centralized_free_eta_map(const ProblemClass& pc, double rho) {
  return probe_map(3, {VarSign::NonNegative, VarSign::NonNegative, VarSign::NonNegative},
                   [&](const Eigen::VectorXd& y) {
                     return std::vector<Eigen::MatrixXd>{
                         -assemble_prop2_matrix(pc, rho, y[0], y[1], y[2]).mat()};
                   });
}

AffineMatrixMap centralized_convex_map(const ProblemClass& pc, double eta, double eps,
                                       double shift) {
  const auto m = build_centralized_matrices(pc, 1.0, eta);
  const SymMatrix mc = build_convex_centralized_matrix(pc.phi.mu, eta, eps);
  AffineMatrixMap map;
  map.signs = {VarSign::NonNegative, VarSign::NonNegative};
  Eigen::MatrixXd f0 = mc.mat();
  f0.diagonal().array() -= shift;
  map.blocks.push_back({f0, {m.M_f.mat(), m.M_phi.mat()}});
  return map;
}

// Distributed decision variables, trace(P) = 2 normalization (the LMI is
// homogeneous in (P, Sigma_eq, sigma), so the normalization is lossless):
//   y = (p11, p12, s11, s12, s22, sigma_f, sigma_phi, sigma_lambda).
constexpr int kDistVars = 8;

DistributedCertificate unpack_distributed(const Eigen::VectorXd& y, double eta1,
                                          double rho, double lambda) {
  DistributedCertificate c;
  c.eta1 = eta1;
  c.rho = rho;
  c.lambda = lambda;
  c.P << y[0], y[1], y[1], 2.0 - y[0];
  c.Sigma_eq << y[2], y[3], y[3], y[4];
  c.sigma_f = y[5];
  c.sigma_phi = y[6];
  c.sigma_lambda = y[7];
  return c;
}

ConvexDistributedCertificate unpack_distributed_convex(const Eigen::VectorXd& y,
                                                       double eta1, double eps,
                                                       double lambda) {
  ConvexDistributedCertificate c;
  c.eta1 = eta1;
  c.eps = eps;
  c.lambda = lambda;
  c.P << y[0], y[1], y[1], 2.0 - y[0];
  c.Sigma_eq << y[2], y[3], y[3], y[4];
  c.sigma_f = y[5];
  c.sigma_phi = y[6];
  c.sigma_lambda = y[7];
  return c;
}

std::vector<VarSign> distributed_signs() {
  return {VarSign::Free,        VarSign::Free,        VarSign::Free,
          VarSign::Free,        VarSign::Free,        VarSign::NonNegative,
          VarSign::NonNegative, VarSign::NonNegative};
}

// The positivity block -P + (delta_P - delta) I: a solver margin of -delta on
// it enforces lambda_min(P) >= delta_P.
Eigen::Matrix2d p_block_base(const Eigen::Matrix2d& P, const Tolerances& tol) {
  return (tol.delta_P - tol.delta) * Eigen::Matrix2d::Identity() - P;
}

AffineMatrixMap distributed_sc_map(const ProblemClass& pc, double lambda, double eta1,
                                   double rho, const Tolerances& tol) {
  return probe_map(kDistVars, distributed_signs(), [&](const Eigen::VectorXd& y) {
    const auto cand = unpack_distributed(y, eta1, rho, lambda);
    return std::vector<Eigen::MatrixXd>{
        assemble_distributed_sc(1, pc, lambda, cand).mat(),
        assemble_distributed_sc(2, pc, lambda, cand).mat(), p_block_base(cand.P, tol)};
  });
}

AffineMatrixMap distributed_convex_map(const ProblemClass& pc, double lambda,
                                       double eta1, double eps, double shift,
                                       const Tolerances& tol) {
  AffineMatrixMap map =
      probe_map(kDistVars, distributed_signs(), [&](const Eigen::VectorXd& y) {
        const auto cand = unpack_distributed_convex(y, eta1, eps, lambda);
        return std::vector<Eigen::MatrixXd>{
            assemble_distributed_convex(1, pc, lambda, cand).mat(),
            assemble_distributed_convex(2, pc, lambda, cand).mat(),
            p_block_base(cand.P, tol)};
      });
  map.blocks[0].F0.diagonal().array() -= shift;
  map.blocks[1].F0.diagonal().array() -= shift;
  return map;
}

using FeasibleFn = std::function<std::optional<Eigen::VectorXd>(double)>;

struct BisectOutcome {
  double value;
  Eigen::VectorXd y;
};

// Smallest certified rho on (0, 1): requires feasibility at 1 - 1e-6.
std::optional<BisectOutcome> bisect_min_rho(const FeasibleFn& feasible_at,
                                            double width) {
  double hi = 1.0 - 1e-6;
  auto yh = feasible_at(hi);
  if (!yh) return std::nullopt;
  double lo = 1e-6;
  while (hi - lo > width) {
    const double mid = 0.5 * (hi + lo);
    if (auto ym = feasible_at(mid)) {
      hi = mid;
      yh = std::move(ym);
    } else {
      lo = mid;
    }
  }
  return BisectOutcome{hi, *yh};
}

// Largest certified eps >= 0. The feasible eps set is an interval but need
// not contain 0, so a short anchor probe precedes the expansion.
std::optional<BisectOutcome> bisect_max_eps(const FeasibleFn& feasible_at,
                                            double eta_scale, double width) {
  const double probes[] = {0.0, 0.5 * eta_scale, eta_scale, 0.1, 1.0};
  double lo = -1.0;
  Eigen::VectorXd ylo;
  for (double p : probes) {
    if (auto y = feasible_at(p)) {
      lo = p;
      ylo = *y;
      break;
    }
  }
  if (lo < 0.0) return std::nullopt;

  double hi = std::max({2.0 * lo, eta_scale, 1.0});
  for (int guard = 0; guard < 40; ++guard) {
    auto yh = feasible_at(hi);
    if (!yh) break;
    lo = hi;
    ylo = *yh;
    hi *= 2.0;
  }
  while (hi - lo > width) {
    const double mid = 0.5 * (hi + lo);
    if (auto ym = feasible_at(mid)) {
      lo = mid;
      ylo = *ym;
    } else {
      hi = mid;
    }
  }
  return BisectOutcome{lo, ylo};
}

void parallel_cells(int count, int jobs, const std::function<void(int)>& work) {
  if (jobs <= 1 || count <= 1) {
    for (int i = 0; i < count; ++i) work(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr err;
  std::mutex err_mx;
  const int nthreads = std::min(jobs, count);
  std::vector<std::thread> pool;
  pool.reserve(nthreads);
  for (int t = 0; t < nthreads; ++t)
    pool.emplace_back([&]() {
      for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
        try {
          work(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(err_mx);
          if (!err) err = std::current_exception();
        }
      }
    });
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
}

std::vector<double> logspace(double lo, double hi, int points) {
  if (points < 1 || !(lo > 0.0) || !(hi > lo))
    throw std::invalid_argument("logarithmic grid requires 0 < lo < hi, points >= 1");
  std::vector<double> g(points);
  if (points == 1) {
    g[0] = lo;
    return g;
  }
  const double llo = std::log10(lo), lhi = std::log10(hi);
  for (int i = 0; i < points; ++i)
    g[i] = std::pow(10.0, llo + (lhi - llo) * i / double(points - 1));
  return g;
}

}  // namespace

CentralizedCertificate analytic_certificate(const ProblemClass& pc) {
  pc.validate();
  if (pc.mode != Mode::StronglyConvex)
    throw std::invalid_argument("analytic certificate requires strongly convex mode");
  const double mf = pc.f.mu, Lf = pc.f.L, mp = pc.phi.mu;
  const double kphi = pc.phi.kappa();
  const double q = 4.0 * mf * Lf / ((mf + Lf) * (mf + Lf));

  CentralizedCertificate cert;
  cert.eta = cert.sigma_f = 2.0 * mp / (mf + Lf);
  if (kphi > 1.0) {
    cert.sigma_phi = q * (1.0 + kphi) / (kphi * (kphi - 1.0));
    cert.rho = std::max(1.0 - q / (kphi * kphi), 1e-12);
    cert.residual = max_eigenvalue(
        assemble_centralized_sc(pc, cert.rho, cert.eta, cert.sigma_f, cert.sigma_phi));
  } else {
    // kappa_phi = 1: the sigma_phi denominator vanishes; return the limit
    // rate and verify the residual at kappa_phi = 1 + 1e-6.
    cert.sigma_phi_limit_undefined = true;
    cert.rho = std::max(1.0 - q, 1e-12);
    const double k2 = 1.0 + 1e-6;
    const ProblemClass nearby(pc.f, SectorBounds(mp, mp * k2), Mode::StronglyConvex);
    cert.sigma_phi = q * (1.0 + k2) / (k2 * (k2 - 1.0));
    const double rho2 = std::max(1.0 - q / (k2 * k2), 1e-12);
    cert.residual = max_eigenvalue(
        assemble_centralized_sc(nearby, rho2, cert.eta, cert.sigma_f, cert.sigma_phi));
  }
  return cert;
}

CentralizedCertificate min_rho_centralized(const ProblemClass& pc,
                                           std::optional<double> eta,
                                           const EngineOptions& opts) {
  pc.validate();
  if (pc.mode != Mode::StronglyConvex)
    throw std::invalid_argument("exponential-rate certification requires strongly convex mode");
  if (eta && !(*eta > 0.0)) throw std::invalid_argument("eta must be > 0");

  const FeasibleFn feasible_at = [&](double rho) -> std::optional<Eigen::VectorXd> {
    const AffineMatrixMap map =
        eta ? centralized_fixed_eta_map(pc, rho, *eta) : centralized_free_eta_map(pc, rho);
    const auto v = solve_feasibility(map, opts.tol.delta, opts.budget);
    if (v.status == FeasibilityStatus::Feasible) return v.y;
    return std::nullopt;
  };

  const auto res = bisect_min_rho(feasible_at, opts.tol.rho_width);
  if (!res) throw NoCertificateError("no exponential certificate found");

  CentralizedCertificate cert;
  cert.rho = res->value;
  if (eta) {
    cert.eta = *eta;
    cert.sigma_f = res->y[0];
    cert.sigma_phi = res->y[1];
  } else {
    cert.eta = res->y[0];
    cert.sigma_f = res->y[1];
    cert.sigma_phi = res->y[2];
  }
  cert.residual = max_eigenvalue(
      assemble_centralized_sc(pc, cert.rho, cert.eta, cert.sigma_f, cert.sigma_phi));
  if (!(cert.residual <= -0.5 * opts.tol.delta))
    throw std::logic_error("centralized certificate failed the recomputed margin check");
  return cert;
}

ConvexCentralizedCertificate max_eps_centralized(const ProblemClass& pc,
                                                 const std::vector<double>& eta_grid,
                                                 const EngineOptions& opts) {
  pc.validate();
  if (pc.mode != Mode::Convex)
    throw std::invalid_argument("ergodic certification requires convex mode");
  const std::vector<double> grid =
      eta_grid.empty() ? default_eta_grid_convex(pc) : eta_grid;

  const double shift = opts.tol.delta + kBoundarySlack;
  std::optional<ConvexCentralizedCertificate> best;
  for (double eta : grid) {
    if (!(eta > 0.0)) throw std::invalid_argument("eta grid values must be > 0");
    const FeasibleFn feasible_at = [&](double eps) -> std::optional<Eigen::VectorXd> {
      const auto v = solve_feasibility(centralized_convex_map(pc, eta, eps, shift),
                                       opts.tol.delta, opts.budget);
      if (v.status == FeasibilityStatus::Feasible) return v.y;
      return std::nullopt;
    };
    const auto res = bisect_max_eps(feasible_at, eta, opts.tol.eps_width);
    if (!res || !(res->value > 0.0)) continue;
    if (!best || res->value > best->eps) {
      ConvexCentralizedCertificate c;
      c.eta = eta;
      c.eps = res->value;
      c.sigma_f = res->y[0];
      c.sigma_phi = res->y[1];
      c.residual = max_eigenvalue(
          assemble_centralized_convex(pc, c.eta, c.eps, c.sigma_f, c.sigma_phi));
      best = c;
    }
  }
  if (!best) throw NoCertificateError("no ergodic certificate with eps > 0 found");
  return *best;
}

DistributedCurve distributed_rate_curve(const ProblemClass& pc, double lambda,
                                        const std::vector<double>& eta1_grid,
                                        const EngineOptions& opts) {
  pc.validate();
  if (pc.mode != Mode::StronglyConvex)
    throw std::invalid_argument("exponential-rate certification requires strongly convex mode");
  if (!(lambda >= 0.0 && lambda < 1.0))
    throw std::invalid_argument("lambda must lie in [0, 1)");
  if (eta1_grid.empty()) throw std::invalid_argument("eta1 grid must be nonempty");

  DistributedCurve curve;
  curve.cells.resize(eta1_grid.size());
  std::vector<std::optional<DistributedCertificate>> certs(eta1_grid.size());

  parallel_cells(static_cast<int>(eta1_grid.size()), opts.jobs, [&](int idx) {
    const double eta1 = eta1_grid[idx];
    RateCell& cell = curve.cells[idx];
    cell.eta1 = eta1;
    try {
      if (!(eta1 >= 0.0)) throw std::invalid_argument("eta1 must be >= 0");
      const FeasibleFn feasible_at = [&](double rho) -> std::optional<Eigen::VectorXd> {
        const auto v = solve_feasibility(distributed_sc_map(pc, lambda, eta1, rho, opts.tol),
                                         opts.tol.delta, opts.budget);
        if (v.status == FeasibilityStatus::Feasible) return v.y;
        return std::nullopt;
      };
      const auto res = bisect_min_rho(feasible_at, opts.tol.rho_width);
      if (!res) {
        cell.status = "infeasible";
        cell.rate = 1.0;
        return;
      }
      auto cert = unpack_distributed(res->y, eta1, res->value, lambda);
      for (int i = 1; i <= 2; ++i)
        cert.residuals[i - 1] =
            max_eigenvalue(assemble_distributed_sc(i, pc, lambda, cert));
      const double pmin = min_eigenvalue(SymMatrix(cert.P));
      if (!(cert.residuals[0] <= -0.5 * opts.tol.delta &&
            cert.residuals[1] <= -0.5 * opts.tol.delta && pmin >= 0.5 * opts.tol.delta_P))
        throw std::logic_error("distributed certificate failed the recomputed margin check");
      // rho-monotonicity runtime check: a larger rho never hurts.
      auto relaxed = cert;
      relaxed.rho = std::min(1.0, cert.rho + 10.0 * opts.tol.rho_width);
      for (int i = 1; i <= 2; ++i) {
        const double r =
            max_eigenvalue(assemble_distributed_sc(i, pc, lambda, relaxed));
        if (r > cert.residuals[i - 1] + 1e-10)
          throw std::logic_error("rho-monotonicity check failed");
      }
      cell.status = "certified";
      cell.rate = cert.rho;
      certs[idx] = cert;
    } catch (const std::logic_error&) {
      throw;
    } catch (const std::exception&) {
      cell.status = "error";
      cell.rate = 1.0;
    }
  });

  for (size_t i = 0; i < certs.size(); ++i)
    if (certs[i] && (!curve.best || certs[i]->rho < curve.best->rho))
      curve.best = certs[i];
  return curve;
}

ConvexDistributedCurve convex_distributed_rate_curve(const ProblemClass& pc,
                                                     double lambda,
                                                     const std::vector<double>& eta1_grid,
                                                     const EngineOptions& opts) {
  pc.validate();
  if (pc.mode != Mode::Convex)
    throw std::invalid_argument("ergodic certification requires convex mode");
  if (!(lambda >= 0.0 && lambda < 1.0))
    throw std::invalid_argument("lambda must lie in [0, 1)");
  if (eta1_grid.empty()) throw std::invalid_argument("eta1 grid must be nonempty");

  const double shift = opts.tol.delta + kBoundarySlack;
  ConvexDistributedCurve curve;
  curve.cells.resize(eta1_grid.size());
  std::vector<std::optional<ConvexDistributedCertificate>> certs(eta1_grid.size());

  parallel_cells(static_cast<int>(eta1_grid.size()), opts.jobs, [&](int idx) {
    const double eta1 = eta1_grid[idx];
    RateCell& cell = curve.cells[idx];
    cell.eta1 = eta1;
    try {
      if (!(eta1 >= 0.0)) throw std::invalid_argument("eta1 must be >= 0");
      const FeasibleFn feasible_at = [&](double eps) -> std::optional<Eigen::VectorXd> {
        const auto v = solve_feasibility(
            distributed_convex_map(pc, lambda, eta1, eps, shift, opts.tol),
            opts.tol.delta, opts.budget);
        if (v.status == FeasibilityStatus::Feasible) return v.y;
        return std::nullopt;
      };
      const auto res = bisect_max_eps(feasible_at, std::max(eta1, 1e-3),
                                      opts.tol.eps_width);
      if (!res || !(res->value > 0.0)) {
        cell.status = "infeasible";
        cell.rate = 0.0;
        return;
      }
      auto cert = unpack_distributed_convex(res->y, eta1, res->value, lambda);
      for (int i = 1; i <= 2; ++i)
        cert.residuals[i - 1] =
            max_eigenvalue(assemble_distributed_convex(i, pc, lambda, cert));
      const double pmin = min_eigenvalue(SymMatrix(cert.P));
      if (!(cert.residuals[0] <= 2.0 * kBoundarySlack &&
            cert.residuals[1] <= 2.0 * kBoundarySlack && pmin >= 0.5 * opts.tol.delta_P))
        throw std::logic_error("distributed convex certificate failed the margin check");
      cell.status = "certified";
      cell.rate = cert.eps;
      certs[idx] = cert;
    } catch (const std::logic_error&) {
      throw;
    } catch (const std::exception&) {
      cell.status = "error";
      cell.rate = 0.0;
    }
  });

  for (size_t i = 0; i < certs.size(); ++i)
    if (certs[i] && (!curve.best || certs[i]->eps > curve.best->eps))
      curve.best = certs[i];
  return curve;
}

DistributedCertificate min_rho_distributed(const ProblemClass& pc, double lambda,
                                           const std::vector<double>& eta1_grid,
                                           const EngineOptions& opts) {
  const auto curve = distributed_rate_curve(pc, lambda, eta1_grid, opts);
  if (!curve.best)
    throw NoCertificateError("no exponential certificate found for lambda=" +
                             std::to_string(lambda));
  return *curve.best;
}

ConvexDistributedCertificate max_eps_distributed(const ProblemClass& pc, double lambda,
                                                 const std::vector<double>& eta1_grid,
                                                 const EngineOptions& opts) {
  const auto curve = convex_distributed_rate_curve(pc, lambda, eta1_grid, opts);
  if (!curve.best)
    throw NoCertificateError("no ergodic certificate found for lambda=" +
                             std::to_string(lambda));
  return *curve.best;
}

std::vector<double> default_eta1_grid(const ProblemClass& pc, int points) {
  const double hi = std::max(40.0 * pc.phi.mu / (pc.f.mu + pc.f.L), 2e-3);
  return logspace(1e-3, hi, points);
}

std::vector<double> default_eta_grid_convex(const ProblemClass& pc, int points) {
  const double scale = pc.phi.mu / pc.f.L;
  return logspace(0.01 * scale, 4.0 * scale, points);
}

RateTable sweep(const SweepConfig& cfg, const EngineOptions& opts) {
  if (cfg.kappa_f.empty() || cfg.kappa_phi.empty() || cfg.lambda.empty() ||
      cfg.eta1.empty())
    throw std::invalid_argument("sweep grids must be nonempty");

  struct Cell {
    double kf, kp, lam, eta1;
  };
  std::vector<Cell> cells;
  for (double kf : cfg.kappa_f)
    for (double kp : cfg.kappa_phi)
      for (double lam : cfg.lambda)
        for (double e1 : cfg.eta1) cells.push_back({kf, kp, lam, e1});

  RateTable table;
  table.rows.resize(cells.size());
  parallel_cells(static_cast<int>(cells.size()), opts.jobs, [&](int i) {
    const Cell& c = cells[i];
    SweepRow& row = table.rows[i];
    row = {c.kf, c.kp, c.lam, c.eta1, cfg.mode == Mode::Convex ? 0.0 : 1.0, "error"};
    try {
      const SectorBounds fb = cfg.mode == Mode::Convex
                                  ? SectorBounds(0.0, c.kf)
                                  : SectorBounds(cfg.mu_f, cfg.mu_f * c.kf);
      const ProblemClass pc(fb, SectorBounds(cfg.mu_phi, cfg.mu_phi * c.kp), cfg.mode);
      EngineOptions cell_opts = opts;
      cell_opts.jobs = 1;
      if (cfg.mode == Mode::Convex) {
        const auto curve = convex_distributed_rate_curve(pc, c.lam, {c.eta1}, cell_opts);
        row.status = curve.cells[0].status;
        row.rate = curve.cells[0].rate;
      } else {
        const auto curve = distributed_rate_curve(pc, c.lam, {c.eta1}, cell_opts);
        row.status = curve.cells[0].status;
        row.rate = curve.cells[0].rate;
      }
    } catch (const std::exception&) {
      row.status = "error";
    }
  });
  return table;
}

}  // namespace mdcert
