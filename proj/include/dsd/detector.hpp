#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "dsd/estimation.hpp"
#include "dsd/graph.hpp"
#include "dsd/statistics.hpp"
#include "dsd/types.hpp"

namespace dsd {

struct NodeState {
  int node_id = 0;
  double local_estimate = 0.0;
  GlrAggregates summands;    // this node's own c1, c2, u, w terms
  GlrAggregates aggregates;  // its consensus view of the four sums
  double statistic = 0.0;    // T_{L-FD,k}
  Hypothesis decision = Hypothesis::kH0;
};

struct DetectionOutcome {
  std::vector<NodeState> node_states;
  bool consensus = true;
  double centralized_statistic = 0.0;  // T_{L-FD} from the exact sums
  int rounds = 0;                      // averaging rounds actually run
};

struct DetectorOptions {
  EstimateDomain domain = EstimateDomain::kUnconstrained;
  /// Stop early once no node's value in any of the four sums moves by more
  /// than this in one round. Off by default: exactly n_iterations rounds run.
  std::optional<double> stop_tolerance;
};

/// Statistic at or above `threshold` decides H1.
Hypothesis decide(double statistic, double threshold);

/// Fully distributed detection: local estimate per node, four lockstep
/// spatial sums of n_iterations rounds, per-node statistic and decision.
DetectionOutcome run_distributed_detection(const WeightMatrix& weights,
                                           const MeasurementBlock& block, int time_bandwidth,
                                           int n_iterations, double threshold,
                                           const DetectorOptions& options = {});

DetectionOutcome run_distributed_detection(const Graph& graph, const MeasurementBlock& block,
                                           int time_bandwidth, int n_iterations,
                                           double threshold, const DetectorOptions& options = {});

/// Single pass reporting the outcome after each round count in `checkpoints`
/// (ascending, nonnegative). Same arithmetic as run_distributed_detection.
std::vector<DetectionOutcome> run_distributed_detection_trace(
    const WeightMatrix& weights, const MeasurementBlock& block, int time_bandwidth,
    const std::vector<int>& checkpoints, double threshold,
    EstimateDomain domain = EstimateDomain::kUnconstrained);

/// gamma in the statistic's own scale: P(chi2_N > 2 gamma) = pfa.
double threshold_for_pfa(double pfa, int n_nodes);

/// Broadcasts for the fully distributed statistic: 4 N N_it.
std::int64_t message_count(std::int64_t n_nodes, std::int64_t n_iterations);

/// Broadcasts the exact T_L would need: (3 + L) N N_it.
std::int64_t exact_glr_message_count(std::int64_t n_nodes, std::int64_t n_iterations,
                                     std::int64_t n_slots);

}  // namespace dsd
