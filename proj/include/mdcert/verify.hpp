#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mdcert/lmi.hpp"
#include "mdcert/simulate.hpp"

namespace mdcert {

/// Outcome of checking a theorem bound along a recorded trajectory.
/// Violations are measured as (recorded - bound) and flagged past the slack
/// 1e-9 * (1 + |bound|).
struct BoundReport {
  std::string kind;                 // thm1 | thm2 | thm3 | thm4
  double max_violation = 0.0;       // signed; <= 0 means satisfied outright
  int first_violation_k = -1;       // first iteration past slack, -1 when none
  double empirical_rate = 0.0;      // geometric rate (thm1/thm3) or power-law
                                    // exponent of the recorded gap (thm2/thm4)
  double certified_value = 0.0;     // rho or eps
  std::vector<std::uint64_t> seeds;

  bool ok() const { return first_violation_k < 0; }
};

inline double bound_slack(double bound) { return 1e-9 * (1.0 + std::abs(bound)); }

/// Exponential decay of the conjugate Bregman divergence and of the squared
/// distance, both against rho^k.
BoundReport check_thm1_bound(const TrajectoryRecord& traj,
                             const CentralizedCertificate& cert, const DGF& dgf);

/// Ergodic gap f(xbar_K) - f* against D0/(eps K) at every K up to the horizon.
BoundReport check_thm2_bound(const TrajectoryRecord& traj,
                             const ConvexCentralizedCertificate& cert, const DGF& dgf);

/// P-weighted state decay against rho^k; requires the trajectory to have been
/// recorded with the certificate's P.
BoundReport check_thm3_bound(const TrajectoryRecord& traj,
                             const DistributedCertificate& cert);

/// Summed per-agent ergodic gap against V0/(eps K).
BoundReport check_thm4_bound(const TrajectoryRecord& traj,
                             const ConvexDistributedCertificate& cert,
                             const Objective& obj);

/// Geometric rate estimate: exp of the least-squares slope of log(values)
/// over the trailing window (default the last half). Non-positive tail values
/// are trimmed first; at least 20 positive entries are required.
double empirical_rate(const std::vector<double>& values, double window_frac = 0.5);

/// Log-log power-law exponent of values[k] vs k over the trailing window.
double empirical_power_exponent(const std::vector<double>& values,
                                double window_frac = 0.5);

/// Aggregated inequality checks backing the appendix lemmas.
struct LemmaSuiteReport {
  int trajectories = 0;
  double lemma2_max_violation = 0.0;  // exponential Lyapunov decrement
  double lemma3_max_violation = 0.0;  // ergodic Lyapunov decrement
  double lemma4_max_violation = 0.0;  // distributed function-gap bound
  int lemma1_trials = 0;
  int lemma1_agreements = 0;          // block-reduction verdict agreement
};

LemmaSuiteReport lemma_suites(std::uint64_t seed, int trials);

/// Per-step Lyapunov decrement checks (exposed for the campaign tests).
double lemma2_max_violation(const TrajectoryRecord& traj, const DGF& dgf, double rho,
                            double eta);
double lemma3_max_violation(const TrajectoryRecord& traj, const DGF& dgf, double eps,
                            double eta);
double lemma4_max_violation(const TrajectoryRecord& traj, const Objective& obj);

}  // namespace mdcert
