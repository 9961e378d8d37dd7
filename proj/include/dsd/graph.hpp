#pragma once

#include <iosfwd>
#include <span>
#include <stdexcept>
#include <vector>

#include "dsd/rng.hpp"
#include "dsd/types.hpp"

namespace dsd {

/// Unordered edge, stored with u < v.
struct Edge {
  int u = 0;
  int v = 0;
  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Connected undirected communication graph.
class Graph {
 public:
  /// Validates ranges, rejects self-loops and duplicates, requires
  /// connectivity. Positions are optional (empty or one per node).
  Graph(int n_nodes, std::vector<Edge> edges, std::vector<Point2> positions = {});

  int n_nodes() const { return n_nodes_; }
  std::size_t n_edges() const { return edges_.size(); }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<int>& degrees() const { return degrees_; }
  int degree(int k) const { return degrees_[static_cast<std::size_t>(k)]; }
  const std::vector<int>& neighbors(int k) const { return adjacency_[static_cast<std::size_t>(k)]; }
  bool has_positions() const { return !positions_.empty(); }
  const std::vector<Point2>& positions() const { return positions_; }

  /// True if the graph admits a proper two-coloring (no odd cycle).
  bool is_bipartite() const;

 private:
  int n_nodes_;
  std::vector<Edge> edges_;
  std::vector<int> degrees_;
  std::vector<std::vector<int>> adjacency_;
  std::vector<Point2> positions_;
};

bool is_connected(int n_nodes, std::span<const Edge> edges);

class GenerationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Nodes uniform on [-side/2, side/2]^2, joined in increasing distance order
/// (ties by lexicographic pair) until exactly `n_edges` edges exist. Draws
/// that are disconnected or bipartite are redrawn; 1000 consecutive
/// rejections raise GenerationError.
Graph generate_network(int n_nodes, int n_edges, double side, Rng& rng);

/// N x P node-edge incidence matrix with +1 at the start and -1 at the end of
/// each edge.
class IncidenceMatrix {
 public:
  IncidenceMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0) {}
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  int operator()(std::size_t k, std::size_t j) const { return data_[k * cols_ + j]; }
  int& operator()(std::size_t k, std::size_t j) { return data_[k * cols_ + j]; }

 private:
  std::size_t rows_, cols_;
  std::vector<int> data_;
};

/// Lower index as start; `flip[j]` (if given) reverses edge j.
IncidenceMatrix incidence_matrix(const Graph& graph, const std::vector<bool>& flip = {});

/// Symmetric consensus weights with the graph's sparsity. Each node holds its
/// self weight and one weight per neighbor; nothing else is reachable.
class WeightMatrix {
 public:
  struct Link {
    int node;
    double weight;
  };

  WeightMatrix(std::vector<double> self_weights, std::vector<std::vector<Link>> links);

  int size() const { return static_cast<int>(self_.size()); }
  double self_weight(int k) const { return self_[static_cast<std::size_t>(k)]; }
  const std::vector<Link>& links(int k) const { return links_[static_cast<std::size_t>(k)]; }

  /// W_kj; zero off the sparsity pattern.
  double operator()(int k, int j) const;
  DenseMatrix dense() const;

 private:
  std::vector<double> self_;
  std::vector<std::vector<Link>> links_;
};

/// W = I - A diag(w) A^T with w_l = 1 / max(d_k, d_j), evaluated edge by edge
/// from the incidence columns.
WeightMatrix local_degree_weights(const Graph& graph, const std::vector<bool>& flip = {});

/// Second-largest eigenvalue modulus of W: spectral radius of W - 11^T/N,
/// by power iteration to 1e-10.
double convergence_factor(const WeightMatrix& weights);

/// One synchronous round a(t) = W a(t-1); node k reads only itself and its
/// neighbors.
void averaging_round(const WeightMatrix& weights, std::span<const double> in,
                     std::span<double> out);

/// Runs `n_iterations` rounds and returns N a_k(t), each node's view of the
/// network-wide sum.
std::vector<double> spatial_sum(const WeightMatrix& weights, std::span<const double> initial,
                                int n_iterations);

/// Graph file: "N P", P lines "u v", then optionally N lines "k x y".
void write_graph(std::ostream& out, const Graph& graph);
Graph read_graph(std::istream& in);

}  // namespace dsd
