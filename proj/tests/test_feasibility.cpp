#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mdcert/affine_map.hpp"
#include "mdcert/lmi.hpp"

using namespace mdcert;

namespace {

AffineMatrixMap diagonal_example() {
  // A(y) = [[y - 1, 0], [0, -y]], y >= 0.
  AffineMatrixMap map;
  map.signs = {VarSign::NonNegative};
  Eigen::Matrix2d f0 = Eigen::Matrix2d::Zero();
  f0(0, 0) = -1.0;
  Eigen::Matrix2d f1 = Eigen::Matrix2d::Zero();
  f1(0, 0) = 1.0;
  f1(1, 1) = -1.0;
  map.blocks.push_back({f0, {f1}});
  return map;
}

AffineMatrixMap centralized_map(const ProblemClass& pc, double rho, double eta) {
  const auto m = build_centralized_matrices(pc, rho, eta);
  AffineMatrixMap map;
  map.signs = {VarSign::NonNegative, VarSign::NonNegative};
  map.blocks.push_back({m.M_sc.mat(), {m.M_f.mat(), m.M_phi.mat()}});
  return map;
}

}  // namespace

TEST_CASE("diagonal toy problem") {
  const auto v = solve_feasibility(diagonal_example(), 1e-9);
  REQUIRE(v.status == FeasibilityStatus::Feasible);
  CHECK(v.y[0] == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(v.margin == doctest::Approx(-0.5).epsilon(1e-6));
  CHECK(v.t_lower <= v.margin + 1e-9);
}

TEST_CASE("constant infeasible block") {
  AffineMatrixMap map;
  Eigen::MatrixXd f0(1, 1);
  f0 << 1.0;
  map.blocks.push_back({f0, {}});
  const auto v = solve_feasibility(map, 1e-9);
  CHECK(v.status == FeasibilityStatus::Infeasible);
  CHECK(v.margin == doctest::Approx(1.0));
}

TEST_CASE("boundary-feasible scalar problem reports infeasible under margin") {
  // min t s.t. y <= t, y >= 0 has optimum 0, which misses the -delta margin.
  AffineMatrixMap map;
  map.signs = {VarSign::NonNegative};
  Eigen::MatrixXd f0 = Eigen::MatrixXd::Zero(1, 1);
  Eigen::MatrixXd f1(1, 1);
  f1 << 1.0;
  map.blocks.push_back({f0, {f1}});
  const auto v = solve_feasibility(map, 1e-9);
  CHECK(v.status == FeasibilityStatus::Infeasible);
  CHECK(std::abs(v.margin) <= 1e-9);
}

TEST_CASE("centralized LMI map above the closed-form rate is feasible") {
  const ProblemClass pc(SectorBounds(1.0, 3.0), SectorBounds(1.0, 2.0),
                        Mode::StronglyConvex);
  const auto v = solve_feasibility(centralized_map(pc, 0.9, 0.5), 1e-9);
  REQUIRE(v.status == FeasibilityStatus::Feasible);
  CHECK(v.margin <= -1e-9);
  // The verified margin must match a recomputed assembly.
  const double recomputed =
      max_eigenvalue(assemble_centralized_sc(pc, 0.9, 0.5, v.y[0], v.y[1]));
  CHECK(recomputed == doctest::Approx(v.margin).epsilon(1e-10));
}

TEST_CASE("centralized LMI map below the closed-form rate is infeasible") {
  const ProblemClass pc(SectorBounds(1.0, 3.0), SectorBounds(1.0, 2.0),
                        Mode::StronglyConvex);
  const auto v = solve_feasibility(centralized_map(pc, 0.70, 0.5), 1e-9);
  CHECK(v.status == FeasibilityStatus::Infeasible);
  CHECK(v.t_lower > -1e-9);
}

TEST_CASE("determinism") {
  const ProblemClass pc(SectorBounds(1.0, 3.0), SectorBounds(1.0, 2.0),
                        Mode::StronglyConvex);
  const auto a = solve_feasibility(centralized_map(pc, 0.85, 0.4), 1e-9);
  const auto b = solve_feasibility(centralized_map(pc, 0.85, 0.4), 1e-9);
  REQUIRE(a.status == b.status);
  CHECK(a.margin == b.margin);
  CHECK(a.iterations == b.iterations);
  REQUIRE(a.y.size() == b.y.size());
  for (Eigen::Index i = 0; i < a.y.size(); ++i) CHECK(a.y[i] == b.y[i]);
}

TEST_CASE("budget exhaustion is reported as indeterminate") {
  const ProblemClass pc(SectorBounds(1.0, 3.0), SectorBounds(1.0, 2.0),
                        Mode::StronglyConvex);
  const auto v = solve_feasibility(centralized_map(pc, 0.9, 0.5), 1e-9, 2);
  CHECK(v.status == FeasibilityStatus::Indeterminate);
}

TEST_CASE("map validation") {
  AffineMatrixMap empty;
  CHECK_THROWS_AS(solve_feasibility(empty, 1e-9), std::invalid_argument);

  AffineMatrixMap bad = diagonal_example();
  bad.blocks[0].F.push_back(Eigen::Matrix2d::Zero());
  CHECK_THROWS_AS(solve_feasibility(bad, 1e-9), std::invalid_argument);

  CHECK_THROWS_AS(solve_feasibility(diagonal_example(), 0.0), std::invalid_argument);
}
