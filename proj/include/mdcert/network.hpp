#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "mdcert/sym_matrix.hpp"

namespace mdcert {

/// Undirected connected graph on n >= 2 agents, no self-loops.
struct Graph {
  int n = 0;
  std::set<std::pair<int, int>> edges;  // pairs stored with first < second

  Graph() = default;
  Graph(int n_, std::vector<std::pair<int, int>> edge_list);

  bool connected() const;
  void validate() const;  // throws when disconnected or malformed
};

Graph ring_graph(int n);
Graph path_graph(int n);
Graph star_graph(int n);
Graph complete_graph(int n);
/// Seeded Erdos-Renyi; resamples (bounded retries) until connected.
Graph erdos_renyi_graph(int n, double p, std::uint64_t seed);

/// Parse the edge-list format: first line "n m", then m lines "i j" (0-based).
/// Malformed input raises std::invalid_argument carrying the line number.
Graph parse_edge_list(std::istream& in);
Graph load_edge_list(const std::string& path);
std::string to_edge_list(const Graph& g);

/// Consensus data derived from a graph: W = I - eta2 * L, DeltaW = W - 11^T/n,
/// lambda = ||DeltaW||.
struct NetworkSpec {
  Graph graph;
  SymMatrix laplacian;
  double eta2 = 0.0;
  SymMatrix W;
  SymMatrix deltaW;
  double lambda = 0.0;
  bool lambda_warn = false;  // set when ||DeltaW|| >= 1
};

SymMatrix laplacian_of(const Graph& g);

/// When eta2 is omitted it is chosen as 2/(lambda_2 + lambda_n) of the
/// Laplacian, which minimizes ||DeltaW|| over eta2.
NetworkSpec build_network(const Graph& g, std::optional<double> eta2 = std::nullopt);

/// Numerical check of the Kronecker block reduction: with J1 = (I - 11^T/n) x I_d
/// and J2 = (11^T/n) x I_d, Q = Q1 x J1 + Q2 x J2 is PSD iff Q1 and Q2 are.
struct BlockReductionReport {
  bool full_psd = false;
  bool reduced_psd = false;
  double full_min_eig = 0.0;
  double q1_min_eig = 0.0;
  double q2_min_eig = 0.0;
  bool agree() const { return full_psd == reduced_psd; }
};

BlockReductionReport block_reduction_check(const SymMatrix& Q1, const SymMatrix& Q2,
                                           int n, int d, double tol = 1e-9);

}  // namespace mdcert
