#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "mdcert/network.hpp"

using namespace mdcert;

TEST_CASE("laplacians of small graphs") {
  SUBCASE("complete K3") {
    const SymMatrix lap = laplacian_of(complete_graph(3));
    Eigen::Matrix3d expect;
    expect << 2, -1, -1, -1, 2, -1, -1, -1, 2;
    CHECK((lap.mat() - expect).cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("path 0-1-2") {
    const SymMatrix lap = laplacian_of(path_graph(3));
    Eigen::Matrix3d expect;
    expect << 1, -1, 0, -1, 2, -1, 0, -1, 1;
    CHECK((lap.mat() - expect).cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("ring 5 spectrum") {
    const SymMatrix lap = laplacian_of(ring_graph(5));
    CHECK(lap.mat().diagonal().minCoeff() == 2.0);
    const Eigen::VectorXd ev = eigenvalues_of(lap);
    for (int k = 0; k < 5; ++k) {
      const double expect = 2.0 - 2.0 * std::cos(2.0 * M_PI * k / 5.0);
      bool found = false;
      for (int i = 0; i < 5; ++i)
        if (std::abs(ev[i] - expect) <= 1e-12) found = true;
      CHECK(found);
    }
  }
  SUBCASE("row sums vanish") {
    const SymMatrix lap = laplacian_of(erdos_renyi_graph(8, 0.5, 3));
    CHECK((lap.mat() * Eigen::VectorXd::Ones(8)).cwiseAbs().maxCoeff() <= 1e-14);
    CHECK(eigenvalues_of(lap).minCoeff() >= -1e-12);
  }
}

TEST_CASE("graph validation") {
  CHECK_THROWS_WITH_AS(Graph(4, {{0, 1}, {2, 3}}), "graph is not connected",
                       std::invalid_argument);
  CHECK_THROWS_AS(Graph(1, {}), std::invalid_argument);
  CHECK_THROWS_AS(Graph(3, {{0, 0}, {0, 1}, {1, 2}}), std::invalid_argument);
  CHECK_THROWS_AS(Graph(3, {{0, 5}}), std::invalid_argument);
}

TEST_CASE("network construction") {
  SUBCASE("complete graph with auto eta2 mixes in one step") {
    for (int n : {3, 4, 6}) {
      const NetworkSpec net = build_network(complete_graph(n));
      CHECK(net.eta2 == doctest::Approx(1.0 / n).epsilon(1e-14));
      CHECK(net.lambda <= 1e-12);
    }
  }
  SUBCASE("ring 5 with auto eta2") {
    const NetworkSpec net = build_network(ring_graph(5));
    CHECK(net.eta2 == doctest::Approx(0.4).epsilon(1e-12));
    CHECK(net.lambda == doctest::Approx(0.4472136).epsilon(1e-6));
  }
  SUBCASE("star 4 with eta2 = 2/5") {
    const NetworkSpec net = build_network(star_graph(4));
    CHECK(net.eta2 == doctest::Approx(0.4).epsilon(1e-12));
    CHECK(net.lambda == doctest::Approx(0.6).epsilon(1e-12));
  }
  SUBCASE("explicit eta2 and invariants") {
    const NetworkSpec net = build_network(ring_graph(6), 0.25);
    const int n = 6;
    CHECK((net.W.mat() * Eigen::VectorXd::Ones(n) - Eigen::VectorXd::Ones(n))
              .cwiseAbs()
              .maxCoeff() <= 1e-14);
    CHECK((Eigen::RowVectorXd::Ones(n) * net.deltaW.mat()).cwiseAbs().maxCoeff() <=
          1e-14);
    // Spectral-norm identity: eigenvalues of DeltaW are {0} + {1 - eta2*mu}.
    const Eigen::VectorXd lev = eigenvalues_of(net.laplacian);
    const Eigen::VectorXd dev = eigenvalues_of(net.deltaW);
    double lam = 0.0;
    for (int i = 1; i < n; ++i) lam = std::max(lam, std::abs(1.0 - 0.25 * lev[i]));
    CHECK(net.lambda == doctest::Approx(lam).epsilon(1e-10));
    for (int i = 1; i < n; ++i) {
      bool found = false;
      for (int j = 0; j < n; ++j)
        if (std::abs(dev[j] - (1.0 - 0.25 * lev[i])) <= 1e-10) found = true;
      CHECK(found);
    }
  }
  SUBCASE("lambda stays below one inside the stable step range") {
    const Graph g = path_graph(5);
    const SymMatrix lap = laplacian_of(g);
    const double lmax = eigenvalues_of(lap).maxCoeff();
    for (double f : {0.2, 0.6, 0.95}) {
      const NetworkSpec net = build_network(g, f * 2.0 / lmax);
      CHECK(net.lambda < 1.0);
      CHECK_FALSE(net.lambda_warn);
    }
    const NetworkSpec hot = build_network(g, 2.5 * 2.0 / lmax);
    CHECK(hot.lambda_warn);
  }
}

TEST_CASE("edge list parsing") {
  SUBCASE("round trip") {
    const Graph g = ring_graph(5);
    std::istringstream in(to_edge_list(g));
    const Graph back = parse_edge_list(in);
    CHECK(back.n == 5);
    CHECK(back.edges == g.edges);
  }
  SUBCASE("malformed header") {
    std::istringstream in("banana\n");
    CHECK_THROWS_WITH_AS(parse_edge_list(in), "edge-list line 1: expected header \"n m\"",
                         std::invalid_argument);
  }
  SUBCASE("bad edge line is reported with its number") {
    std::istringstream in("3 2\n0 1\n1 9\n");
    CHECK_THROWS_WITH_AS(parse_edge_list(in),
                         "edge-list line 3: edge endpoint out of range [0, n)",
                         std::invalid_argument);
  }
  SUBCASE("truncated file") {
    std::istringstream in("3 2\n0 1\n");
    CHECK_THROWS_AS(parse_edge_list(in), std::invalid_argument);
  }
}

TEST_CASE("block reduction check") {
  SUBCASE("identity") {
    const auto rep = block_reduction_check(SymMatrix::Identity(2), SymMatrix::Identity(2),
                                           3, 2);
    CHECK(rep.full_psd);
    CHECK(rep.reduced_psd);
    CHECK(rep.agree());
  }
  SUBCASE("indefinite Q1 is caught on both sides") {
    Eigen::Matrix2d q1;
    q1 << 1, 0, 0, -1;
    const auto rep =
        block_reduction_check(SymMatrix(q1), SymMatrix::Identity(2), 3, 1);
    CHECK_FALSE(rep.full_psd);
    CHECK_FALSE(rep.reduced_psd);
    CHECK(rep.agree());
  }
  SUBCASE("200 seeded trials agree") {
    std::mt19937_64 rng(17);
    std::normal_distribution<double> gauss(0.0, 1.0);
    int agree = 0;
    for (int t = 0; t < 200; ++t) {
      Eigen::MatrixXd a(5, 5), b(5, 5);
      for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) {
          a(i, j) = gauss(rng);
          b(i, j) = gauss(rng);
        }
      Eigen::MatrixXd sa = 0.5 * (a + a.transpose());
      Eigen::MatrixXd sb = 0.5 * (b + b.transpose());
      if (t % 3 == 0) sa.diagonal().array() += 4.0;  // include PSD inputs
      if (t % 4 == 0) sb.diagonal().array() += 4.0;
      const auto rep = block_reduction_check(SymMatrix(sa), SymMatrix(sb), 4, 2);
      if (rep.agree()) ++agree;
    }
    CHECK(agree == 200);
  }
  SUBCASE("projector identities behind the reduction") {
    const int n = 4, d = 2;
    const Eigen::MatrixXd ones = Eigen::MatrixXd::Ones(n, n) / double(n);
    const Eigen::MatrixXd j1n = Eigen::MatrixXd::Identity(n, n) - ones;
    auto kron = [](const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
      Eigen::MatrixXd out(a.rows() * b.rows(), a.cols() * b.cols());
      for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
          out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
      return out;
    };
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(d, d);
    const Eigen::MatrixXd J1 = kron(j1n, id), J2 = kron(ones, id);
    CHECK((J1 * J1 - J1).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((J2 * J2 - J2).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((J1 * J2).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((J2 * J1).cwiseAbs().maxCoeff() <= 1e-12);
  }
}
