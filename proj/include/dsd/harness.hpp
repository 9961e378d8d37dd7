#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "dsd/estimation.hpp"
#include "dsd/graph.hpp"
#include "dsd/model.hpp"
#include "dsd/parallel.hpp"

namespace dsd {

enum class ExperimentKind { kCroc, kPdSweep, kConsensus, kValidateModel };
enum class StatisticKind { kLocalGlr, kFd, kGlobalGlrNumeric, kLrOracle };

const char* to_string(ExperimentKind kind);
const char* to_string(StatisticKind kind);

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Experiment settings. The config file is flat `key = value` text with `#`
/// comments; keys are the field names below, lists are comma-separated and
/// integer lists also accept `a:b` ranges.
struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::kCroc;
  int trials = 10000;
  std::uint64_t seed = 0;
  std::vector<double> lambda_db = {12.0};
  std::vector<double> pfa_targets = {0.01};
  std::vector<int> n_iterations = {20};
  std::vector<StatisticKind> statistic_set = {StatisticKind::kLocalGlr, StatisticKind::kFd,
                                              StatisticKind::kLrOracle};
  /// n_nodes, n_slots, time_bandwidth, noise_power, path_loss_exp, epsilon.
  ModelParams model;
  /// When set, c comes from this source power instead of lambda calibration.
  std::optional<double> source_power;

  std::string graph_file;    // empty: generate
  std::string network_file;  // layout file, used when the graph has no positions
  int n_edges = 20;
  double side = 200.0;
  std::optional<std::uint64_t> graph_seed;  // defaults to `seed`
  Point2 source{0.0, 0.0};

  double h1_fraction = 0.5;  // consensus experiment only
  int sweep_points = 200;    // CROC gamma sweep size
  EstimateDomain estimate_domain = EstimateDomain::kUnconstrained;
  Execution execution = Execution::kParallel;

  void validate() const;
};

ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::string& path);

/// Graph, weights and gains shared by every trial of an experiment.
struct Scenario {
  ModelParams model;
  Graph graph;
  WeightMatrix weights;
  std::vector<double> gains;
  Point2 source;
};

Scenario make_scenario(const ExperimentConfig& config);

/// SNR vector at `lambda_db` (or from config.source_power when set).
std::vector<double> scenario_snr(const Scenario& scenario, const ExperimentConfig& config,
                                 double lambda_db);

double db_to_linear(double db);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void write(std::ostream& out) const;
};

struct RocRow {
  std::string statistic_name;
  double gamma = 0.0;
  double pfa_empirical = 0.0;
  double pmd_empirical = 0.0;
  double pfa_theory = 0.0;
  double pmd_theory = 0.0;
  double pfa_stderr = 0.0;
  double pmd_stderr = 0.0;
};

struct RocTable {
  double lambda = 0.0;  // linear noncentrality used for the theory columns
  std::vector<RocRow> rows;

  std::vector<RocRow> rows_for(const std::string& statistic_name) const;
  CsvTable to_csv() const;
};

/// Empirical CROC per enabled statistic over `sweep_points` thresholds at H0
/// quantiles, plus asymptotic chi-square theory at each threshold.
RocTable run_croc(const ExperimentConfig& config);

struct PdRow {
  double lambda_db = 0.0;
  std::string statistic_name;
  double pd_empirical = 0.0;
  double pd_theory = 0.0;
  double pd_stderr = 0.0;
};

struct PdTable {
  std::vector<PdRow> rows;
  CsvTable to_csv() const;
};

RocTable run_croc(const ExperimentConfig& config, const Scenario& scenario);
PdTable run_pd_sweep(const ExperimentConfig& config);
PdTable run_pd_sweep(const ExperimentConfig& config, const Scenario& scenario);

struct ConsensusRow {
  int n_iterations = 0;
  double consensus_probability = 0.0;
  double stderr_ = 0.0;
  double pfa_empirical = 0.0;  // per-node, pooled over H0 trials
  double pmd_empirical = 0.0;  // per-node, pooled over H1 trials
};

struct ConsensusTable {
  double gamma = 0.0;
  double convergence_factor = 0.0;
  std::vector<ConsensusRow> rows;
  CsvTable to_csv() const;
};

ConsensusTable run_consensus(const ExperimentConfig& config);
ConsensusTable run_consensus(const ExperimentConfig& config, const Scenario& scenario);

struct ValidationRow {
  std::string check;
  double measured = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct ValidationReport {
  std::vector<ValidationRow> rows;
  bool all_pass() const;
  CsvTable to_csv() const;
};

/// Model, estimator and statistic self-checks; failures are rows, not throws.
ValidationReport run_validate_model(const ExperimentConfig& config);

}  // namespace dsd
