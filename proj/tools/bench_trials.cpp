// Times the serial and OpenMP trial loops on the same H0 workload and checks
// that both produce identical statistics.
#include <CLI11.hpp>

#include <chrono>
#include <cstdio>

#include "dsd/graph.hpp"
#include "dsd/model.hpp"
#include "dsd/parallel.hpp"
#include "dsd/statistics.hpp"
#include "dsd/detector.hpp"

int main(int argc, char** argv) {
  CLI::App app{"serial vs parallel Monte Carlo trial loop"};
  int trials = 20000;
  int repeats = 3;
  app.add_option("--trials", trials)->check(CLI::PositiveNumber);
  app.add_option("--repeats", repeats)->check(CLI::PositiveNumber);
  CLI11_PARSE(app, argc, argv);

  dsd::ModelParams params;
  dsd::Rng graph_rng = dsd::make_rng(0, dsd::Stream::kGraph, 0);
  const dsd::Graph graph = dsd::generate_network(params.n_nodes, 20, 200.0, graph_rng);
  const dsd::WeightMatrix weights = dsd::local_degree_weights(graph);
  const std::vector<double> c(static_cast<std::size_t>(params.n_nodes), 0.0);

  auto trial = [&](std::size_t i) {
    dsd::Rng rng = dsd::make_rng(1, dsd::Stream::kH0, i);
    const auto block = dsd::sample_gaussian_block(params, c, dsd::Hypothesis::kH0, rng);
    const auto outcome = dsd::run_distributed_detection(weights, block, params.time_bandwidth,
                                                        20, 0.0);
    return outcome.node_states.front().statistic;
  };

  auto time_it = [&](dsd::Execution exec, std::vector<double>& result) {
    double best = 1e300;
    for (int r = 0; r < repeats; ++r) {
      const auto t0 = std::chrono::steady_clock::now();
      result = dsd::map_trials(static_cast<std::size_t>(trials), trial, exec);
      const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
      best = std::min(best, dt.count());
    }
    return best;
  };

  std::vector<double> serial, parallel;
  const double ts = time_it(dsd::Execution::kSerial, serial);
  const double tp = time_it(dsd::Execution::kParallel, parallel);
  std::printf("threads   %d\n", dsd::hardware_threads());
  std::printf("trials    %d\n", trials);
  std::printf("serial    %.4f s\n", ts);
  std::printf("parallel  %.4f s\n", tp);
  std::printf("speedup   %.2fx\n", ts / tp);
  const bool same = serial == parallel;
  std::printf("identical %s\n", same ? "yes" : "no");
  return same ? 0 : 1;
}
