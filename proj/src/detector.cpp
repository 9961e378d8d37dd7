#include "dsd/detector.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace dsd {

Hypothesis decide(double statistic, double threshold) {
  return statistic < threshold ? Hypothesis::kH0 : Hypothesis::kH1;
}

namespace {

// Four averaging instances advanced in lockstep, one round each per step.
class LockstepSums {
 public:
  LockstepSums(const WeightMatrix& weights, const GlrSummands& s)
      : weights_(weights), value_{s.c1_terms, s.c2_terms, s.u_terms, s.w_terms} {
    for (auto& v : next_) v.resize(value_[0].size());
  }

  /// Runs one round of all four sums; returns the largest per-node change.
  double round() {
    double moved = 0.0;
    for (std::size_t q = 0; q < 4; ++q) {
      averaging_round(weights_, value_[q], next_[q]);
      for (std::size_t k = 0; k < value_[q].size(); ++k) {
        moved = std::max(moved, std::abs(next_[q][k] - value_[q][k]));
      }
      value_[q].swap(next_[q]);
    }
    return moved;
  }

  GlrAggregates node_view(std::size_t k) const {
    const double n = static_cast<double>(value_[0].size());
    return {n * value_[0][k], n * value_[1][k], n * value_[2][k], n * value_[3][k]};
  }

 private:
  const WeightMatrix& weights_;
  std::array<std::vector<double>, 4> value_;
  std::array<std::vector<double>, 4> next_;
};

DetectionOutcome assemble(const LockstepSums& sums, const std::vector<double>& estimates,
                          const GlrSummands& s, int n_slots, double threshold,
                          double centralized, int rounds) {
  DetectionOutcome out;
  out.rounds = rounds;
  out.centralized_statistic = centralized;
  out.node_states.resize(estimates.size());
  for (std::size_t k = 0; k < estimates.size(); ++k) {
    NodeState& st = out.node_states[k];
    st.node_id = static_cast<int>(k);
    st.local_estimate = estimates[k];
    st.summands = {s.c1_terms[k], s.c2_terms[k], s.u_terms[k], s.w_terms[k]};
    st.aggregates = sums.node_view(k);
    st.statistic = fd_statistic(st.aggregates, n_slots);
    st.decision = decide(st.statistic, threshold);
  }
  out.consensus = std::all_of(out.node_states.begin(), out.node_states.end(),
                              [&](const NodeState& st) {
                                return st.decision == out.node_states.front().decision;
                              });
  return out;
}

void check_inputs(const WeightMatrix& weights, const MeasurementBlock& block) {
  if (static_cast<int>(block.n_nodes()) != weights.size()) {
    throw DomainError("run_distributed_detection: graph and block sizes differ");
  }
}

}  // namespace

DetectionOutcome run_distributed_detection(const WeightMatrix& weights,
                                           const MeasurementBlock& block, int time_bandwidth,
                                           int n_iterations, double threshold,
                                           const DetectorOptions& options) {
  check_inputs(weights, block);
  if (n_iterations < 0) throw DomainError("run_distributed_detection: negative iterations");
  const int n_slots = static_cast<int>(block.n_slots());

  const auto estimates = local_mle_vector(block, time_bandwidth, options.domain);
  const GlrSummands s = glr_summands(block, estimates, time_bandwidth);
  LockstepSums sums(weights, s);

  int rounds = 0;
  while (rounds < n_iterations) {
    const double moved = sums.round();
    ++rounds;
    if (options.stop_tolerance && moved <= *options.stop_tolerance) break;
  }
  return assemble(sums, estimates, s, n_slots, threshold, fd_statistic(aggregate(s), n_slots),
                  rounds);
}

DetectionOutcome run_distributed_detection(const Graph& graph, const MeasurementBlock& block,
                                           int time_bandwidth, int n_iterations,
                                           double threshold, const DetectorOptions& options) {
  return run_distributed_detection(local_degree_weights(graph), block, time_bandwidth,
                                   n_iterations, threshold, options);
}

std::vector<DetectionOutcome> run_distributed_detection_trace(
    const WeightMatrix& weights, const MeasurementBlock& block, int time_bandwidth,
    const std::vector<int>& checkpoints, double threshold, EstimateDomain domain) {
  check_inputs(weights, block);
  if (!std::is_sorted(checkpoints.begin(), checkpoints.end()) ||
      (!checkpoints.empty() && checkpoints.front() < 0)) {
    throw DomainError("run_distributed_detection_trace: checkpoints must be ascending and >= 0");
  }
  const int n_slots = static_cast<int>(block.n_slots());
  const auto estimates = local_mle_vector(block, time_bandwidth, domain);
  const GlrSummands s = glr_summands(block, estimates, time_bandwidth);
  const double centralized = fd_statistic(aggregate(s), n_slots);
  LockstepSums sums(weights, s);

  std::vector<DetectionOutcome> trace;
  trace.reserve(checkpoints.size());
  int rounds = 0;
  for (int target : checkpoints) {
    for (; rounds < target; ++rounds) sums.round();
    trace.push_back(assemble(sums, estimates, s, n_slots, threshold, centralized, rounds));
  }
  return trace;
}

double threshold_for_pfa(double pfa, int n_nodes) {
  if (!(pfa > 0.0 && pfa < 1.0)) throw DomainError("threshold_for_pfa: pfa must be in (0, 1)");
  return 0.5 * chi2_quantile(1.0 - pfa, n_nodes);
}

std::int64_t message_count(std::int64_t n_nodes, std::int64_t n_iterations) {
  if (n_nodes < 0 || n_iterations < 0) throw DomainError("message_count: negative input");
  return 4 * n_nodes * n_iterations;
}

std::int64_t exact_glr_message_count(std::int64_t n_nodes, std::int64_t n_iterations,
                                     std::int64_t n_slots) {
  if (n_nodes < 0 || n_iterations < 0 || n_slots < 0) {
    throw DomainError("exact_glr_message_count: negative input");
  }
  return (3 + n_slots) * n_nodes * n_iterations;
}

}  // namespace dsd
