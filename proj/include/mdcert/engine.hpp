#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mdcert/affine_map.hpp"
#include "mdcert/lmi.hpp"

namespace mdcert {

/// Raised when no certificate exists on the searched region (CLI exit 2).
class NoCertificateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct EngineOptions {
  Tolerances tol{};
  int budget = 40000;  // Newton budget per feasibility solve
  int jobs = 1;        // parallelism across independent grid cells
};

/// Closed-form feasible point of the centralized rate SDP. At kappa_phi = 1
/// the multiplier formula degenerates; the limit rate is returned with
/// sigma_phi_limit_undefined set and the residual is verified at
/// kappa_phi = 1 + 1e-6 instead.
CentralizedCertificate analytic_certificate(const ProblemClass& pc);

/// Smallest certified exponential rate, by bisection over rho. With a fixed
/// eta the feasibility search runs over (sigma_f, sigma_phi); with eta free it
/// runs over (eta, sigma_f, sigma_phi) through the Schur-lifted affine form.
CentralizedCertificate min_rho_centralized(const ProblemClass& pc,
                                           std::optional<double> eta = std::nullopt,
                                           const EngineOptions& opts = {});

/// Largest certified ergodic constant eps over a step-size grid (convex mode).
ConvexCentralizedCertificate max_eps_centralized(const ProblemClass& pc,
                                                 const std::vector<double>& eta_grid,
                                                 const EngineOptions& opts = {});

/// Per-eta1 certification results; `rate` is the certified rho (or eps).
struct RateCell {
  double eta1 = 0.0;
  std::string status;  // "certified" | "infeasible" | "error"
  double rate = 1.0;
};

struct DistributedCurve {
  std::vector<RateCell> cells;
  std::optional<DistributedCertificate> best;
};

struct ConvexDistributedCurve {
  std::vector<RateCell> cells;
  std::optional<ConvexDistributedCertificate> best;
};

DistributedCurve distributed_rate_curve(const ProblemClass& pc, double lambda,
                                        const std::vector<double>& eta1_grid,
                                        const EngineOptions& opts = {});

ConvexDistributedCurve convex_distributed_rate_curve(const ProblemClass& pc,
                                                     double lambda,
                                                     const std::vector<double>& eta1_grid,
                                                     const EngineOptions& opts = {});

/// Grid-best certificates; throw NoCertificateError when every cell fails.
DistributedCertificate min_rho_distributed(const ProblemClass& pc, double lambda,
                                           const std::vector<double>& eta1_grid,
                                           const EngineOptions& opts = {});

ConvexDistributedCertificate max_eps_distributed(const ProblemClass& pc, double lambda,
                                                 const std::vector<double>& eta1_grid,
                                                 const EngineOptions& opts = {});

/// Default logarithmic step-size grids.
std::vector<double> default_eta1_grid(const ProblemClass& pc, int points = 64);
std::vector<double> default_eta_grid_convex(const ProblemClass& pc, int points = 32);

struct SweepConfig {
  Mode mode = Mode::StronglyConvex;
  double mu_f = 1.0;    // ignored in convex mode (mu_f = 0 there)
  double mu_phi = 1.0;
  std::vector<double> kappa_f;    // convex mode: interpreted as L_f values
  std::vector<double> kappa_phi;
  std::vector<double> lambda;
  std::vector<double> eta1;
};

struct SweepRow {
  double kappa_f, kappa_phi, lambda, eta1, rate;
  std::string status;
};

struct RateTable {
  std::vector<SweepRow> rows;
};

/// Certify every grid point; failures are recorded per-row and never abort.
/// Rows come out sorted by grid index (kappa_f, kappa_phi, lambda, eta1).
RateTable sweep(const SweepConfig& cfg, const EngineOptions& opts = {});

}  // namespace mdcert
