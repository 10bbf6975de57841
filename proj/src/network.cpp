#include "mdcert/network.hpp"

#include <fstream>
#include <random>
#include <sstream>
#include <string>

namespace mdcert {

Graph::Graph(int n_, std::vector<std::pair<int, int>> edge_list) : n(n_) {
  for (auto [i, j] : edge_list) {
    if (i == j) throw std::invalid_argument("self-loops are not allowed");
    if (i < 0 || j < 0 || i >= n || j >= n)
      throw std::invalid_argument("edge endpoint out of range");
    edges.emplace(std::min(i, j), std::max(i, j));
  }
  validate();
}

bool Graph::connected() const {
  if (n <= 0) return false;
  std::vector<std::vector<int>> adj(n);
  for (auto [i, j] : edges) {
    adj[i].push_back(j);
    adj[j].push_back(i);
  }
  std::vector<char> seen(n, 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  int count = 1;
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    for (int w : adj[v])
      if (!seen[w]) {
        seen[w] = 1;
        ++count;
        stack.push_back(w);
      }
  }
  return count == n;
}

void Graph::validate() const {
  if (n < 2) throw std::invalid_argument("graph needs at least 2 agents");
  if (!connected()) throw std::invalid_argument("graph is not connected");
}

Graph ring_graph(int n) {
  std::vector<std::pair<int, int>> e;
  for (int i = 0; i < n; ++i) e.emplace_back(i, (i + 1) % n);
  if (n == 2) e = {{0, 1}};
  return Graph(n, e);
}

Graph path_graph(int n) {
  std::vector<std::pair<int, int>> e;
  for (int i = 0; i + 1 < n; ++i) e.emplace_back(i, i + 1);
  return Graph(n, e);
}

Graph star_graph(int n) {
  std::vector<std::pair<int, int>> e;
  for (int i = 1; i < n; ++i) e.emplace_back(0, i);
  return Graph(n, e);
}

Graph complete_graph(int n) {
  std::vector<std::pair<int, int>> e;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) e.emplace_back(i, j);
  return Graph(n, e);
}

Graph erdos_renyi_graph(int n, double p, std::uint64_t seed) {
  if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("edge probability must be in (0, 1]");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int attempt = 0; attempt < 1000; ++attempt) {
    std::vector<std::pair<int, int>> e;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (unif(rng) < p) e.emplace_back(i, j);
    Graph g;
    g.n = n;
    for (auto [i, j] : e) g.edges.emplace(i, j);
    if (n >= 2 && g.connected()) return g;
  }
  throw std::runtime_error("failed to sample a connected graph after 1000 attempts");
}

Graph parse_edge_list(std::istream& in) {
  std::string line;
  int lineno = 0;
  auto next_line = [&]() -> bool {
    while (std::getline(in, line)) {
      ++lineno;
      if (!line.empty() && line.find_first_not_of(" \t\r") != std::string::npos) return true;
    }
    return false;
  };
  auto fail = [&](const std::string& what) {
    throw std::invalid_argument("edge-list line " + std::to_string(lineno) + ": " + what);
  };

  if (!next_line()) throw std::invalid_argument("edge-list line 1: missing header \"n m\"");
  std::istringstream hs(line);
  int n = 0;
  long m = -1;
  std::string extra;
  if (!(hs >> n >> m) || (hs >> extra)) fail("expected header \"n m\"");
  if (n < 2) fail("agent count must be >= 2");
  if (m < 0) fail("edge count must be >= 0");

  std::vector<std::pair<int, int>> edges;
  for (long k = 0; k < m; ++k) {
    if (!next_line()) {
      ++lineno;
      fail("expected " + std::to_string(m) + " edges, got " + std::to_string(k));
    }
    std::istringstream es(line);
    int i = 0, j = 0;
    if (!(es >> i >> j) || (es >> extra)) fail("expected edge \"i j\"");
    if (i < 0 || j < 0 || i >= n || j >= n) fail("edge endpoint out of range [0, n)");
    if (i == j) fail("self-loops are not allowed");
    edges.emplace_back(i, j);
  }
  return Graph(n, edges);
}

Graph load_edge_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open graph file: " + path);
  return parse_edge_list(in);
}

std::string to_edge_list(const Graph& g) {
  std::ostringstream os;
  os << g.n << ' ' << g.edges.size() << '\n';
  for (auto [i, j] : g.edges) os << i << ' ' << j << '\n';
  return os.str();
}

SymMatrix laplacian_of(const Graph& g) {
  g.validate();
  Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(g.n, g.n);
  for (auto [i, j] : g.edges) {
    lap(i, i) += 1.0;
    lap(j, j) += 1.0;
    lap(i, j) -= 1.0;
    lap(j, i) -= 1.0;
  }
  return SymMatrix(lap);
}

NetworkSpec build_network(const Graph& g, std::optional<double> eta2) {
  NetworkSpec spec;
  spec.graph = g;
  spec.laplacian = laplacian_of(g);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(spec.laplacian.mat(),
                                                    Eigen::EigenvaluesOnly);
  const Eigen::VectorXd evals = es.eigenvalues();  // ascending
  const double lam2 = evals[1];
  const double lamn = evals[g.n - 1];

  if (eta2) {
    if (!(*eta2 > 0.0)) throw std::invalid_argument("eta2 must be > 0");
    spec.eta2 = *eta2;
  } else {
    spec.eta2 = 2.0 / (lam2 + lamn);
  }

  const Eigen::MatrixXd identity = Eigen::MatrixXd::Identity(g.n, g.n);
  const Eigen::MatrixXd w = identity - spec.eta2 * spec.laplacian.mat();
  spec.W = SymMatrix(w);
  const Eigen::MatrixXd ones = Eigen::MatrixXd::Ones(g.n, g.n) / double(g.n);
  spec.deltaW = SymMatrix(w - ones);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> esd(spec.deltaW.mat(),
                                                     Eigen::EigenvaluesOnly);
  spec.lambda = esd.eigenvalues().cwiseAbs().maxCoeff();
  spec.lambda_warn = spec.lambda >= 1.0;
  return spec;
}

BlockReductionReport block_reduction_check(const SymMatrix& Q1, const SymMatrix& Q2,
                                           int n, int d, double tol) {
  const int m = Q1.dim();
  if (Q2.dim() != m) throw std::invalid_argument("Q1 and Q2 must share dimensions");
  if (n < 1 || d < 1 || m * n * d > 4096)
    throw std::invalid_argument("block reduction check size out of range");

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
  const Eigen::MatrixXd J1 = kron(j1n, id);
  const Eigen::MatrixXd J2 = kron(ones, id);
  const Eigen::MatrixXd Q = kron(Q1.mat(), J1) + kron(Q2.mat(), J2);

  BlockReductionReport rep;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> esq(Q, Eigen::EigenvaluesOnly);
  rep.full_min_eig = esq.eigenvalues().minCoeff();
  rep.q1_min_eig = min_eigenvalue(Q1);
  rep.q2_min_eig = min_eigenvalue(Q2);
  rep.full_psd = rep.full_min_eig >= -tol;
  rep.reduced_psd = rep.q1_min_eig >= -tol && rep.q2_min_eig >= -tol;
  return rep;
}

}  // namespace mdcert
