#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace mdcert {

/// Curvature bounds (mu, L) of a function class: mu-strong convexity and
/// L-smoothness. mu = 0 means merely convex. Validated on construction.
struct SectorBounds {
  double mu = 0.0;
  double L = 1.0;

  SectorBounds() = default;
  SectorBounds(double mu_, double L_) : mu(mu_), L(L_) { validate(); }

  void validate() const {
    if (!std::isfinite(mu) || !std::isfinite(L))
      throw std::invalid_argument("sector bounds must be finite");
    if (mu < 0.0) throw std::invalid_argument("sector bound mu must be >= 0");
    if (L <= 0.0) throw std::invalid_argument("sector bound L must be > 0");
    if (mu > L)
      throw std::invalid_argument("sector bounds require mu <= L, got mu=" +
                                  std::to_string(mu) + " L=" + std::to_string(L));
  }

  /// Condition number L/mu; only defined for mu > 0.
  double kappa() const {
    if (mu <= 0.0) throw std::domain_error("condition number undefined for mu = 0");
    return L / mu;
  }
};

enum class Mode { StronglyConvex, Convex };

inline const char* to_string(Mode m) {
  return m == Mode::StronglyConvex ? "sc" : "convex";
}

/// Objective class (f) paired with the distance-generating-function class (phi).
/// The DGF must be strongly convex; the mode flag must agree with f.mu.
struct ProblemClass {
  SectorBounds f;
  SectorBounds phi;
  Mode mode = Mode::StronglyConvex;

  ProblemClass() = default;
  ProblemClass(SectorBounds f_, SectorBounds phi_, Mode mode_)
      : f(f_), phi(phi_), mode(mode_) {
    validate();
  }

  void validate() const {
    f.validate();
    phi.validate();
    if (phi.mu <= 0.0)
      throw std::invalid_argument("DGF class requires mu_phi > 0");
    if (mode == Mode::StronglyConvex && f.mu <= 0.0)
      throw std::invalid_argument("strongly convex mode requires mu_f > 0");
    if (mode == Mode::Convex && f.mu != 0.0)
      throw std::invalid_argument("convex mode requires mu_f = 0");
  }
};

}  // namespace mdcert
