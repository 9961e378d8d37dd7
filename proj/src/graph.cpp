#include "dsd/graph.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <queue>
#include <string>
#include <tuple>

#include "dsd/format.hpp"

namespace dsd {

bool is_connected(int n_nodes, std::span<const Edge> edges) {
  if (n_nodes <= 1) return n_nodes == 1;
  std::vector<int> parent(static_cast<std::size_t>(n_nodes));
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  int components = n_nodes;
  for (const auto& e : edges) {
    const int a = find(e.u), b = find(e.v);
    if (a != b) {
      parent[a] = b;
      --components;
    }
  }
  return components == 1;
}

Graph::Graph(int n_nodes, std::vector<Edge> edges, std::vector<Point2> positions)
    : n_nodes_(n_nodes), positions_(std::move(positions)) {
  if (n_nodes < 1) throw DomainError("graph: n_nodes must be >= 1");
  if (!positions_.empty() && static_cast<int>(positions_.size()) != n_nodes) {
    throw DomainError("graph: position count != n_nodes");
  }
  for (auto& e : edges) {
    if (e.u < 0 || e.v < 0 || e.u >= n_nodes || e.v >= n_nodes) {
      throw DomainError("graph: edge endpoint out of range");
    }
    if (e.u == e.v) throw DomainError("graph: self-loop");
    if (e.u > e.v) std::swap(e.u, e.v);
  }
  auto sorted = edges;
  std::sort(sorted.begin(), sorted.end(),
            [](const Edge& a, const Edge& b) { return std::tie(a.u, a.v) < std::tie(b.u, b.v); });
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw DomainError("graph: duplicate edge");
  }
  if (!is_connected(n_nodes, edges)) throw DomainError("graph: not connected");

  edges_ = std::move(edges);
  degrees_.assign(static_cast<std::size_t>(n_nodes), 0);
  adjacency_.assign(static_cast<std::size_t>(n_nodes), {});
  for (const auto& e : edges_) {
    ++degrees_[e.u];
    ++degrees_[e.v];
    adjacency_[e.u].push_back(e.v);
    adjacency_[e.v].push_back(e.u);
  }
  for (auto& nbrs : adjacency_) std::sort(nbrs.begin(), nbrs.end());
}

bool Graph::is_bipartite() const {
  std::vector<int> color(static_cast<std::size_t>(n_nodes_), -1);
  for (int s = 0; s < n_nodes_; ++s) {
    if (color[s] >= 0) continue;
    color[s] = 0;
    std::queue<int> q;
    q.push(s);
    while (!q.empty()) {
      const int k = q.front();
      q.pop();
      for (int j : adjacency_[k]) {
        if (color[j] < 0) {
          color[j] = 1 - color[k];
          q.push(j);
        } else if (color[j] == color[k]) {
          return false;
        }
      }
    }
  }
  return true;
}

Graph generate_network(int n_nodes, int n_edges, double side, Rng& rng) {
  const long long max_edges = static_cast<long long>(n_nodes) * (n_nodes - 1) / 2;
  if (n_nodes < 1 || n_edges < n_nodes - 1 || n_edges > max_edges) {
    throw DomainError("generate_network: infeasible edge count");
  }
  if (!(side > 0.0)) throw DomainError("generate_network: side must be > 0");

  std::uniform_real_distribution<double> coord(-side / 2.0, side / 2.0);
  struct Pair {
    double dist;
    int u, v;
  };
  std::vector<Pair> pairs;
  pairs.reserve(static_cast<std::size_t>(max_edges));

  for (int attempt = 0; attempt < 1000; ++attempt) {
    std::vector<Point2> pos(static_cast<std::size_t>(n_nodes));
    for (auto& p : pos) {
      p.x = coord(rng);
      p.y = coord(rng);
    }
    pairs.clear();
    for (int u = 0; u < n_nodes; ++u)
      for (int v = u + 1; v < n_nodes; ++v) pairs.push_back({distance(pos[u], pos[v]), u, v});
    std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
      return std::tie(a.dist, a.u, a.v) < std::tie(b.dist, b.u, b.v);
    });
    std::vector<Edge> edges;
    edges.reserve(static_cast<std::size_t>(n_edges));
    for (int i = 0; i < n_edges; ++i) edges.push_back({pairs[i].u, pairs[i].v});
    if (!is_connected(n_nodes, edges)) continue;
    Graph g(n_nodes, std::move(edges), std::move(pos));
    if (n_nodes >= 2 && g.is_bipartite()) continue;
    return g;
  }
  throw GenerationError("generate_network: 1000 consecutive rejected draws");
}

IncidenceMatrix incidence_matrix(const Graph& graph, const std::vector<bool>& flip) {
  const auto& edges = graph.edges();
  if (!flip.empty() && flip.size() != edges.size()) {
    throw DomainError("incidence_matrix: flip size != edge count");
  }
  IncidenceMatrix a(static_cast<std::size_t>(graph.n_nodes()), edges.size());
  for (std::size_t j = 0; j < edges.size(); ++j) {
    const bool reversed = !flip.empty() && flip[j];
    a(static_cast<std::size_t>(edges[j].u), j) = reversed ? -1 : 1;
    a(static_cast<std::size_t>(edges[j].v), j) = reversed ? 1 : -1;
  }
  return a;
}

WeightMatrix::WeightMatrix(std::vector<double> self_weights, std::vector<std::vector<Link>> links)
    : self_(std::move(self_weights)), links_(std::move(links)) {
  if (self_.size() != links_.size()) throw DomainError("weight matrix: size mismatch");
}

double WeightMatrix::operator()(int k, int j) const {
  if (k == j) return self_weight(k);
  for (const auto& l : links(k)) {
    if (l.node == j) return l.weight;
  }
  return 0.0;
}

DenseMatrix WeightMatrix::dense() const {
  const auto n = static_cast<std::size_t>(size());
  DenseMatrix w(n);
  for (std::size_t k = 0; k < n; ++k) {
    w(k, k) = self_[k];
    for (const auto& l : links_[k]) w(k, static_cast<std::size_t>(l.node)) = l.weight;
  }
  return w;
}

WeightMatrix local_degree_weights(const Graph& graph, const std::vector<bool>& flip) {
  const auto n = static_cast<std::size_t>(graph.n_nodes());
  const IncidenceMatrix a = incidence_matrix(graph, flip);
  const auto& edges = graph.edges();

  // W = I - sum_l w_l a_l a_l^T, one rank-one update per edge column.
  std::vector<double> self(n, 1.0);
  std::vector<std::vector<WeightMatrix::Link>> links(n);
  for (std::size_t j = 0; j < edges.size(); ++j) {
    const int u = edges[j].u, v = edges[j].v;
    const double w = 1.0 / std::max(graph.degree(u), graph.degree(v));
    const double au = a(static_cast<std::size_t>(u), j);
    const double av = a(static_cast<std::size_t>(v), j);
    self[u] -= w * au * au;
    self[v] -= w * av * av;
    links[u].push_back({v, -w * au * av});
    links[v].push_back({u, -w * av * au});
  }
  for (auto& l : links) {
    std::sort(l.begin(), l.end(), [](const auto& x, const auto& y) { return x.node < y.node; });
  }
  return WeightMatrix(std::move(self), std::move(links));
}

void averaging_round(const WeightMatrix& weights, std::span<const double> in,
                     std::span<double> out) {
  const int n = weights.size();
  if (static_cast<int>(in.size()) != n || static_cast<int>(out.size()) != n) {
    throw DomainError("averaging_round: dimension mismatch");
  }
  for (int k = 0; k < n; ++k) {
    double acc = weights.self_weight(k) * in[k];
    for (const auto& l : weights.links(k)) acc += l.weight * in[l.node];
    out[k] = acc;
  }
}

std::vector<double> spatial_sum(const WeightMatrix& weights, std::span<const double> initial,
                                int n_iterations) {
  if (n_iterations < 0) throw DomainError("spatial_sum: negative iteration count");
  if (static_cast<int>(initial.size()) != weights.size()) {
    throw DomainError("spatial_sum: dimension mismatch");
  }
  std::vector<double> a(initial.begin(), initial.end()), next(a.size());
  for (int t = 0; t < n_iterations; ++t) {
    averaging_round(weights, a, next);
    a.swap(next);
  }
  const double n = static_cast<double>(a.size());
  for (double& v : a) v *= n;
  return a;
}

double convergence_factor(const WeightMatrix& weights) {
  const int n = weights.size();
  if (n <= 1) return 0.0;
  auto deflate = [n](std::vector<double>& v) {
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
    for (double& x : v) x -= mean;
  };
  auto norm = [](const std::vector<double>& v) {
    return std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
  };

  // Fixed, irregular start so the result is deterministic.
  std::vector<double> x(static_cast<std::size_t>(n)), y(x.size());
  for (int k = 0; k < n; ++k) x[k] = std::fmod(0.6180339887498949 * (k + 1) * (k + 3), 1.0) - 0.5;
  deflate(x);
  double nx = norm(x);
  if (nx == 0.0) return 0.0;
  for (double& v : x) v /= nx;

  double rho = 0.0;
  for (int it = 0; it < 200000; ++it) {
    averaging_round(weights, x, y);
    deflate(y);
    const double next = norm(y);
    if (next == 0.0) return 0.0;
    for (std::size_t k = 0; k < y.size(); ++k) x[k] = y[k] / next;
    if (it > 10 && std::abs(next - rho) < 1e-10 * std::max(1.0, next)) return next;
    rho = next;
  }
  return rho;
}

void write_graph(std::ostream& out, const Graph& graph) {
  out << graph.n_nodes() << ' ' << graph.n_edges() << '\n';
  for (const auto& e : graph.edges()) out << e.u << ' ' << e.v << '\n';
  if (graph.has_positions()) {
    for (int k = 0; k < graph.n_nodes(); ++k) {
      out << k << ' ' << format_exact(graph.positions()[k].x) << ' '
          << format_exact(graph.positions()[k].y) << '\n';
    }
  }
}

Graph read_graph(std::istream& in) {
  long long n = 0, p = 0;
  if (!(in >> n >> p) || n < 1 || p < 0) throw DomainError("graph file: bad header");
  std::vector<Edge> edges(static_cast<std::size_t>(p));
  for (auto& e : edges) {
    if (!(in >> e.u >> e.v)) throw DomainError("graph file: truncated edge list");
  }
  std::vector<Point2> positions;
  long long idx = 0;
  if (in >> idx) {
    positions.resize(static_cast<std::size_t>(n));
    std::vector<bool> seen(static_cast<std::size_t>(n), false);
    for (long long i = 0; i < n; ++i) {
      if (i > 0 && !(in >> idx)) throw DomainError("graph file: truncated position list");
      double x = 0.0, y = 0.0;
      if (!(in >> x >> y)) throw DomainError("graph file: truncated position line");
      if (idx < 0 || idx >= n || seen[static_cast<std::size_t>(idx)]) {
        throw DomainError("graph file: bad or repeated position index");
      }
      seen[static_cast<std::size_t>(idx)] = true;
      positions[static_cast<std::size_t>(idx)] = {x, y};
    }
  }
  return Graph(static_cast<int>(n), std::move(edges), std::move(positions));
}

}  // namespace dsd
