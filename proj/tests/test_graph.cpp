#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <tuple>
#include <vector>

#include "dsd/graph.hpp"

using namespace dsd;

namespace {

Graph triangle() { return Graph(3, {{0, 1}, {1, 2}, {0, 2}}); }

Eigen::MatrixXd to_eigen(const DenseMatrix& m) {
  const auto n = static_cast<Eigen::Index>(m.size());
  Eigen::MatrixXd out(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) out(i, j) = m(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
  return out;
}

// Second-largest eigenvalue modulus from a full symmetric eigendecomposition.
double slem(const WeightMatrix& w) {
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(to_eigen(w.dense()));
  std::vector<double> mod;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) mod.push_back(std::abs(es.eigenvalues()(i)));
  std::sort(mod.begin(), mod.end());
  return mod[mod.size() - 2];
}

Graph generated(std::uint64_t seed) {
  Rng rng = make_rng(seed, Stream::kGraph, 0);
  return generate_network(10, 20, 200.0, rng);
}

}  // namespace

TEST_CASE("graph construction validates edges") {
  CHECK_NOTHROW(triangle());
  CHECK_THROWS_AS(Graph(3, {{0, 0}, {0, 1}, {1, 2}}), DomainError);
  CHECK_THROWS_AS(Graph(3, {{0, 1}, {1, 0}, {1, 2}}), DomainError);
  CHECK_THROWS_AS(Graph(3, {{0, 1}, {0, 5}}), DomainError);
  CHECK_THROWS_AS(Graph(4, {{0, 1}, {2, 3}}), DomainError);
  CHECK_THROWS_AS(Graph(2, {{0, 1}}, {{0, 0}}), DomainError);
  const Graph g(3, {{2, 0}, {1, 2}});
  CHECK(g.edges()[0] == Edge{0, 2});
  CHECK(g.degree(2) == 2);
  CHECK(g.neighbors(2) == std::vector<int>{0, 1});
  CHECK(g.is_bipartite());
  CHECK_FALSE(triangle().is_bipartite());
  const std::vector<Edge> split{{0, 1}, {2, 3}};
  CHECK_FALSE(is_connected(4, split));
}

TEST_CASE("incidence product is the graph laplacian") {
  const Graph g = generated(5);
  for (const std::vector<bool>& flip : {std::vector<bool>{}, std::vector<bool>(20, true)}) {
    const auto a = incidence_matrix(g, flip);
    REQUIRE(a.rows() == 10);
    REQUIRE(a.cols() == 20);
    for (std::size_t i = 0; i < 10; ++i) {
      for (std::size_t j = 0; j < 10; ++j) {
        int s = 0;
        for (std::size_t e = 0; e < 20; ++e) s += a(i, e) * a(j, e);
        const auto& nb = g.neighbors(static_cast<int>(i));
        const int lap = i == j ? g.degree(static_cast<int>(i))
                               : -static_cast<int>(std::count(nb.begin(), nb.end(), static_cast<int>(j)));
        CHECK(s == lap);
      }
    }
  }
}

TEST_CASE("local degree weights") {
  const Graph g = generated(2);
  const auto w = local_degree_weights(g);
  std::vector<bool> flip(20);
  for (std::size_t e = 0; e < 20; e += 3) flip[e] = true;
  const auto wf = local_degree_weights(g, flip);
  for (int i = 0; i < 10; ++i) {
    double row = 0.0;
    for (int j = 0; j < 10; ++j) {
      row += w(i, j);
      CHECK(w(i, j) == w(j, i));
      CHECK(w(i, j) == wf(i, j));
      const auto& nb = g.neighbors(i);
      const bool adjacent = std::find(nb.begin(), nb.end(), j) != nb.end();
      if (adjacent) CHECK(w(i, j) == doctest::Approx(1.0 / std::max(g.degree(i), g.degree(j))));
      else if (i != j) CHECK(w(i, j) == 0.0);
    }
    CHECK(row == doctest::Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("convergence factor on small graphs") {
  CHECK(convergence_factor(local_degree_weights(triangle())) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(convergence_factor(local_degree_weights(Graph(2, {{0, 1}}))) ==
        doctest::Approx(1.0).epsilon(1e-9));
  CHECK(convergence_factor(local_degree_weights(Graph(1, {}))) == 0.0);
  for (std::uint64_t seed : {1u, 7u, 13u}) {
    const auto w = local_degree_weights(generated(seed));
    const double rho = convergence_factor(w);
    CHECK(rho < 1.0);
    CHECK(rho == doctest::Approx(slem(w)).epsilon(1e-6));
  }
}

TEST_CASE("spatial sum contracts and converges") {
  const auto w = local_degree_weights(generated(3));
  const double rho = convergence_factor(w);
  std::vector<double> x(10);
  for (std::size_t k = 0; k < 10; ++k) x[k] = std::sin(1.0 + 3.0 * k) * 5.0;
  const double total = std::accumulate(x.begin(), x.end(), 0.0);
  auto err = [&](const std::vector<double>& s) {
    double e = 0.0;
    for (double v : s) e += (v - total) * (v - total);
    return std::sqrt(e);
  };
  const double e0 = err(spatial_sum(w, x, 0));
  for (int t = 1; t <= 50; ++t) {
    CHECK(err(spatial_sum(w, x, t)) <= std::pow(rho, t) * e0 * (1.0 + 1e-9) + 1e-12);
  }
  for (double v : spatial_sum(w, x, 2000)) CHECK(v == doctest::Approx(total).epsilon(1e-10));
}

TEST_CASE("averaging round reads neighbors only") {
  const Graph g(4, {{0, 1}, {1, 2}, {2, 3}, {1, 3}});
  const auto w = local_degree_weights(g);
  std::vector<double> in{1.0, 2.0, 3.0, 4.0}, out(4);
  averaging_round(w, in, out);
  std::vector<double> probe = in;
  probe[3] = 1000.0;  // node 0 is not adjacent to node 3
  std::vector<double> out2(4);
  averaging_round(w, probe, out2);
  CHECK(out2[0] == out[0]);
}

TEST_CASE("generator keeps the shortest pairs and rejects bad draws") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Graph g = generated(seed);
    CHECK(g.n_edges() == 20);
    CHECK_FALSE(g.is_bipartite());
    REQUIRE(g.has_positions());
    const auto& p = g.positions();
    for (const auto& q : p) {
      CHECK(std::abs(q.x) <= 100.0);
      CHECK(std::abs(q.y) <= 100.0);
    }
    std::vector<std::tuple<double, int, int>> pairs;
    for (int u = 0; u < 10; ++u)
      for (int v = u + 1; v < 10; ++v) pairs.emplace_back(distance(p[u], p[v]), u, v);
    REQUIRE(pairs.size() == 45);
    std::sort(pairs.begin(), pairs.end());
    for (std::size_t i = 0; i < 20; ++i) {
      const Edge e{std::get<1>(pairs[i]), std::get<2>(pairs[i])};
      CHECK(std::find(g.edges().begin(), g.edges().end(), e) != g.edges().end());
    }
  }
  const Graph a = generated(42), b = generated(42);
  CHECK(a.edges() == b.edges());
  Rng rng(1);
  CHECK_THROWS(generate_network(10, 3, 200.0, rng));
}

TEST_CASE("graph file round trip") {
  const Graph g = generated(8);
  std::stringstream ss;
  write_graph(ss, g);
  const Graph back = read_graph(ss);
  CHECK(back.edges() == g.edges());
  REQUIRE(back.has_positions());
  CHECK(back.positions()[4].x == g.positions()[4].x);

  std::stringstream bare("3 3\n0 1\n1 2\n0 2\n");
  CHECK_FALSE(read_graph(bare).has_positions());
  std::stringstream truncated("3 3\n0 1\n");
  CHECK_THROWS(read_graph(truncated));
}
