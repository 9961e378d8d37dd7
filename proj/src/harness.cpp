#include "dsd/harness.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <functional>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>

#include "dsd/detector.hpp"
#include "dsd/format.hpp"
#include "dsd/numeric.hpp"
#include "dsd/reference.hpp"
#include "dsd/statistics.hpp"

namespace dsd {

const char* to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::kCroc: return "croc";
    case ExperimentKind::kPdSweep: return "pd_sweep";
    case ExperimentKind::kConsensus: return "consensus";
    case ExperimentKind::kValidateModel: return "validate_model";
  }
  return "?";
}

const char* to_string(StatisticKind kind) {
  switch (kind) {
    case StatisticKind::kLocalGlr: return "local_glr";
    case StatisticKind::kFd: return "fd";
    case StatisticKind::kGlobalGlrNumeric: return "global_glr_numeric";
    case StatisticKind::kLrOracle: return "lr_oracle";
  }
  return "?";
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

// ---------------------------------------------------------------- config

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double parse_double(const std::string& key, const std::string& text) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config: '" + key + "' expects a number, got '" + text + "'");
  }
}

long long parse_int(const std::string& key, const std::string& text) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config: '" + key + "' expects an integer, got '" + text + "'");
  }
}

std::uint64_t parse_seed(const std::string& key, const std::string& text) {
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(text, &used, 0);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config: '" + key + "' expects an unsigned integer, got '" + text + "'");
  }
}

std::vector<double> parse_doubles(const std::string& key, const std::string& value) {
  std::vector<double> out;
  for (const auto& item : split_list(value)) out.push_back(parse_double(key, item));
  return out;
}

std::vector<int> parse_int_list(const std::string& key, const std::string& value) {
  std::vector<int> out;
  for (const auto& item : split_list(value)) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) {
      out.push_back(static_cast<int>(parse_int(key, item)));
      continue;
    }
    const auto lo = parse_int(key, trim(item.substr(0, colon)));
    const auto hi = parse_int(key, trim(item.substr(colon + 1)));
    if (hi < lo) throw ConfigError("config: empty range in '" + key + "'");
    for (auto v = lo; v <= hi; ++v) out.push_back(static_cast<int>(v));
  }
  return out;
}

StatisticKind parse_statistic(const std::string& name) {
  if (name == "local_glr") return StatisticKind::kLocalGlr;
  if (name == "fd") return StatisticKind::kFd;
  if (name == "global_glr_numeric") return StatisticKind::kGlobalGlrNumeric;
  if (name == "lr_oracle") return StatisticKind::kLrOracle;
  throw ConfigError("config: unknown statistic '" + name + "'");
}

ExperimentKind parse_experiment(const std::string& name) {
  if (name == "croc") return ExperimentKind::kCroc;
  if (name == "pd_sweep") return ExperimentKind::kPdSweep;
  if (name == "consensus") return ExperimentKind::kConsensus;
  if (name == "validate_model") return ExperimentKind::kValidateModel;
  throw ConfigError("config: unknown experiment '" + name + "'");
}

}  // namespace

void ExperimentConfig::validate() const {
  if (trials < 1) throw ConfigError("config: trials must be >= 1");
  for (double p : pfa_targets) {
    if (!(p > 0.0 && p < 1.0)) throw ConfigError("config: pfa_targets must lie in (0, 1)");
  }
  for (int it : n_iterations) {
    if (it < 0) throw ConfigError("config: n_iterations must be >= 0");
  }
  if (!(h1_fraction >= 0.0 && h1_fraction <= 1.0)) {
    throw ConfigError("config: h1_fraction must lie in [0, 1]");
  }
  if (sweep_points < 1) throw ConfigError("config: sweep_points must be >= 1");
  if (source_power && !(*source_power >= 0.0)) {
    throw ConfigError("config: source_power must be >= 0");
  }
  if (!source_power && lambda_db.empty()) {
    throw ConfigError("config: lambda_db is required unless source_power is set");
  }
  if (n_iterations.empty()) throw ConfigError("config: n_iterations is empty");
  if (statistic_set.empty()) throw ConfigError("config: statistic_set is empty");
  try {
    model.validate();
  } catch (const DomainError& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig cfg;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));

    if (key == "experiment") cfg.experiment = parse_experiment(value);
    else if (key == "trials") cfg.trials = static_cast<int>(parse_int(key, value));
    else if (key == "seed") cfg.seed = parse_seed(key, value);
    else if (key == "lambda_db") cfg.lambda_db = parse_doubles(key, value);
    else if (key == "pfa_targets") cfg.pfa_targets = parse_doubles(key, value);
    else if (key == "n_iterations") cfg.n_iterations = parse_int_list(key, value);
    else if (key == "statistic_set") {
      cfg.statistic_set.clear();
      for (const auto& name : split_list(value)) cfg.statistic_set.push_back(parse_statistic(name));
    }
    else if (key == "n_nodes") cfg.model.n_nodes = static_cast<int>(parse_int(key, value));
    else if (key == "n_slots") cfg.model.n_slots = static_cast<int>(parse_int(key, value));
    else if (key == "time_bandwidth") cfg.model.time_bandwidth = static_cast<int>(parse_int(key, value));
    else if (key == "noise_power") cfg.model.noise_power = parse_double(key, value);
    else if (key == "path_loss_exp") cfg.model.path_loss_exp = parse_double(key, value);
    else if (key == "epsilon") cfg.model.epsilon = parse_double(key, value);
    else if (key == "source_power") cfg.source_power = parse_double(key, value);
    else if (key == "graph_file") cfg.graph_file = value;
    else if (key == "network_file") cfg.network_file = value;
    else if (key == "n_edges") cfg.n_edges = static_cast<int>(parse_int(key, value));
    else if (key == "side") cfg.side = parse_double(key, value);
    else if (key == "graph_seed") cfg.graph_seed = parse_seed(key, value);
    else if (key == "source_x") cfg.source.x = parse_double(key, value);
    else if (key == "source_y") cfg.source.y = parse_double(key, value);
    else if (key == "h1_fraction") cfg.h1_fraction = parse_double(key, value);
    else if (key == "sweep_points") cfg.sweep_points = static_cast<int>(parse_int(key, value));
    else if (key == "estimate_domain") {
      if (value == "unconstrained") cfg.estimate_domain = EstimateDomain::kUnconstrained;
      else if (value == "nonnegative") cfg.estimate_domain = EstimateDomain::kNonNegative;
      else throw ConfigError("config: estimate_domain must be unconstrained or nonnegative");
    }
    else if (key == "execution") {
      if (value == "parallel") cfg.execution = Execution::kParallel;
      else if (value == "serial") cfg.execution = Execution::kSerial;
      else throw ConfigError("config: execution must be parallel or serial");
    }
    else throw ConfigError("config: unknown key '" + key + "'");
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  ExperimentConfig cfg = parse_config(in);
  // Relative data paths are resolved against the config file's directory.
  const auto base = std::filesystem::path(path).parent_path();
  for (std::string* file : {&cfg.graph_file, &cfg.network_file}) {
    if (!file->empty() && std::filesystem::path(*file).is_relative()) {
      *file = (base / *file).string();
    }
  }
  return cfg;
}

// -------------------------------------------------------------- scenario

Scenario make_scenario(const ExperimentConfig& config) {
  ModelParams model = config.model;
  std::optional<Graph> graph;
  if (!config.graph_file.empty()) {
    std::ifstream in(config.graph_file);
    if (!in) throw ConfigError("cannot open graph file '" + config.graph_file + "'");
    graph = read_graph(in);
    model.n_nodes = graph->n_nodes();
  } else {
    Rng rng = make_rng(config.graph_seed.value_or(config.seed), Stream::kGraph, 0);
    graph = generate_network(model.n_nodes, config.n_edges, config.side, rng);
  }

  std::vector<Point2> positions = graph->positions();
  Point2 source = config.source;
  if (!config.network_file.empty()) {
    std::ifstream in(config.network_file);
    if (!in) throw ConfigError("cannot open network file '" + config.network_file + "'");
    NetworkLayout layout = read_layout(in);
    positions = std::move(layout.positions);
    source = layout.source;
  }
  if (static_cast<int>(positions.size()) != model.n_nodes) {
    throw ConfigError("node positions missing: supply a graph file with positions or a network_file");
  }

  std::vector<double> gains;
  gains.reserve(positions.size());
  for (const auto& p : positions) {
    gains.push_back(channel_gain(p, source, model.path_loss_exp, model.epsilon));
  }
  WeightMatrix weights = local_degree_weights(*graph);
  return Scenario{model, std::move(*graph), std::move(weights), std::move(gains), source};
}

std::vector<double> scenario_snr(const Scenario& scenario, const ExperimentConfig& config,
                                 double lambda_db) {
  ModelParams params = scenario.model;
  if (config.source_power) {
    params.source_power = *config.source_power;
    return snr_vector(params, scenario.gains);
  }
  const double ratio = calibrate_snr(db_to_linear(lambda_db), scenario.gains,
                                     params.n_slots, params.time_bandwidth);
  params.source_power = ratio * params.noise_power;
  return snr_vector(params, scenario.gains);
}

// ------------------------------------------------------------------ csv

void CsvTable::write(std::ostream& out) const {
  auto emit = [&out](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out << ',';
      out << cells[i];
    }
    out << '\n';
  };
  emit(header);
  for (const auto& r : rows) emit(r);
}

// ---------------------------------------------------- statistic evaluation

namespace {

// Values of each enabled statistic for one block. The fd entry holds one
// value per node; the others hold a single value.
using StatValues = std::vector<std::vector<double>>;

StatValues evaluate(const ExperimentConfig& config, const Scenario& sc,
                    const MeasurementBlock& block, std::span<const double> true_c,
                    int n_iterations) {
  const int m = sc.model.time_bandwidth;
  StatValues out;
  out.reserve(config.statistic_set.size());
  std::optional<std::vector<double>> local;
  auto local_estimates = [&]() -> const std::vector<double>& {
    if (!local) local = local_mle_vector(block, m, config.estimate_domain);
    return *local;
  };
  for (StatisticKind kind : config.statistic_set) {
    switch (kind) {
      case StatisticKind::kLocalGlr:
        out.push_back({log_glr_local(block, local_estimates(), m)});
        break;
      case StatisticKind::kFd: {
        const auto outcome = run_distributed_detection(sc.weights, block, m, n_iterations, 0.0,
                                                       {config.estimate_domain, std::nullopt});
        std::vector<double> per_node;
        per_node.reserve(outcome.node_states.size());
        for (const auto& st : outcome.node_states) per_node.push_back(st.statistic);
        out.push_back(std::move(per_node));
        break;
      }
      case StatisticKind::kGlobalGlrNumeric: {
        GlobalMleOptions opts;
        opts.domain = config.estimate_domain;
        out.push_back({global_mle_numeric(block, m, opts).objective});
        break;
      }
      case StatisticKind::kLrOracle:
        out.push_back({lr_oracle(block, true_c, m)});
        break;
    }
  }
  return out;
}

// Pools per-trial values of statistic `s` (all nodes for fd) and sorts them.
std::vector<double> pooled_sorted(const std::vector<StatValues>& trials, std::size_t s) {
  std::vector<double> pool;
  for (const auto& t : trials) pool.insert(pool.end(), t[s].begin(), t[s].end());
  std::sort(pool.begin(), pool.end());
  return pool;
}

double fraction_at_or_above(const std::vector<double>& sorted, double gamma) {
  const auto it = std::lower_bound(sorted.begin(), sorted.end(), gamma);
  return static_cast<double>(sorted.end() - it) / static_cast<double>(sorted.size());
}

std::vector<double> pfa_levels(int points, int trials) {
  const double hi = 0.99;
  const double lo = std::min(10.0 / trials, 0.5 * hi);
  std::vector<double> levels(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) {
    const double f = points == 1 ? 0.0 : static_cast<double>(i) / (points - 1);
    levels[i] = lo * std::pow(hi / lo, f);
  }
  return levels;
}

}  // namespace

// ---------------------------------------------------------------- croc

std::vector<RocRow> RocTable::rows_for(const std::string& statistic_name) const {
  std::vector<RocRow> out;
  for (const auto& r : rows) {
    if (r.statistic_name == statistic_name) out.push_back(r);
  }
  return out;
}

CsvTable RocTable::to_csv() const {
  CsvTable t;
  t.header = {"statistic_name", "gamma", "pfa_empirical", "pmd_empirical",
              "pfa_theory", "pmd_theory", "pfa_stderr", "pmd_stderr"};
  for (const auto& r : rows) {
    t.rows.push_back({r.statistic_name, format_csv(r.gamma), format_csv(r.pfa_empirical),
                      format_csv(r.pmd_empirical), format_csv(r.pfa_theory),
                      format_csv(r.pmd_theory), format_csv(r.pfa_stderr),
                      format_csv(r.pmd_stderr)});
  }
  return t;
}

RocTable run_croc(const ExperimentConfig& config) {
  config.validate();
  return run_croc(config, make_scenario(config));
}

RocTable run_croc(const ExperimentConfig& config, const Scenario& sc) {
  config.validate();
  if (config.lambda_db.size() > 1 && !config.source_power) {
    throw ConfigError("croc: lambda_db must be a single value");
  }
  const double lambda_db = config.lambda_db.empty() ? 0.0 : config.lambda_db.front();
  const auto c = scenario_snr(sc, config, lambda_db);
  const int n_it = config.n_iterations.front();
  const auto trials = static_cast<std::size_t>(config.trials);

  auto run = [&](Hypothesis h, Stream stream) {
    return map_trials(
        trials,
        [&](std::size_t i) {
          Rng rng = make_rng(config.seed, stream, i);
          const auto block = sample_gaussian_block(sc.model, c, h, rng);
          return evaluate(config, sc, block, c, n_it);
        },
        config.execution);
  };
  const auto h0 = run(Hypothesis::kH0, Stream::kH0);
  const auto h1 = run(Hypothesis::kH1, Stream::kH1);

  RocTable table;
  table.lambda = noncentrality(c, sc.model.n_slots, sc.model.time_bandwidth);
  const int dof = sc.model.n_nodes;
  const auto levels = pfa_levels(config.sweep_points, config.trials);
  for (std::size_t s = 0; s < config.statistic_set.size(); ++s) {
    const auto null_sorted = pooled_sorted(h0, s);
    const auto alt_sorted = pooled_sorted(h1, s);
    std::vector<RocRow> rows;
    for (double level : levels) {
      RocRow r;
      r.statistic_name = to_string(config.statistic_set[s]);
      r.gamma = empirical_quantile(null_sorted, 1.0 - level);
      r.pfa_empirical = fraction_at_or_above(null_sorted, r.gamma);
      r.pmd_empirical = 1.0 - fraction_at_or_above(alt_sorted, r.gamma);
      r.pfa_theory = 1.0 - chi2_cdf(2.0 * r.gamma, dof);
      r.pmd_theory = noncentral_chi2_cdf(2.0 * r.gamma, dof, table.lambda);
      r.pfa_stderr = binomial_stderr(r.pfa_empirical, null_sorted.size());
      r.pmd_stderr = binomial_stderr(r.pmd_empirical, alt_sorted.size());
      rows.push_back(r);
    }
    table.rows.insert(table.rows.end(), rows.begin(), rows.end());
  }
  std::stable_sort(table.rows.begin(), table.rows.end(),
                   [](const RocRow& a, const RocRow& b) { return a.gamma < b.gamma; });
  return table;
}

// ------------------------------------------------------------- pd sweep

CsvTable PdTable::to_csv() const {
  CsvTable t;
  t.header = {"lambda_db", "statistic_name", "pd_empirical", "pd_theory", "pd_stderr"};
  for (const auto& r : rows) {
    t.rows.push_back({format_csv(r.lambda_db), r.statistic_name, format_csv(r.pd_empirical),
                      format_csv(r.pd_theory), format_csv(r.pd_stderr)});
  }
  return t;
}

PdTable run_pd_sweep(const ExperimentConfig& config) {
  config.validate();
  return run_pd_sweep(config, make_scenario(config));
}

PdTable run_pd_sweep(const ExperimentConfig& config, const Scenario& sc) {
  config.validate();
  if (config.pfa_targets.size() != 1) throw ConfigError("pd_sweep: pfa_targets needs one entry");
  const double pfa = config.pfa_targets.front();
  const int dof = sc.model.n_nodes;
  const double gamma = threshold_for_pfa(pfa, dof);
  const int n_it = config.n_iterations.front();
  const auto trials = static_cast<std::size_t>(config.trials);
  const bool need_null =
      std::find(config.statistic_set.begin(), config.statistic_set.end(),
                StatisticKind::kLrOracle) != config.statistic_set.end();

  PdTable table;
  for (std::size_t j = 0; j < config.lambda_db.size(); ++j) {
    const double lambda_db = config.lambda_db[j];
    const auto c = scenario_snr(sc, config, lambda_db);
    const double lambda = noncentrality(c, sc.model.n_slots, sc.model.time_bandwidth);
    const std::uint64_t sub_seed = stream_seed(config.seed, Stream::kCalibration, j);

    auto run = [&](Hypothesis h, Stream stream) {
      return map_trials(
          trials,
          [&](std::size_t i) {
            Rng rng = make_rng(sub_seed, stream, i);
            const auto block = sample_gaussian_block(sc.model, c, h, rng);
            return evaluate(config, sc, block, c, n_it);
          },
          config.execution);
    };
    const auto h1 = run(Hypothesis::kH1, Stream::kH1);
    std::vector<StatValues> h0;
    if (need_null) h0 = run(Hypothesis::kH0, Stream::kH0);

    const double pd_theory = 1.0 - noncentral_chi2_cdf(2.0 * gamma, dof, lambda);
    for (std::size_t s = 0; s < config.statistic_set.size(); ++s) {
      double threshold = gamma;
      if (config.statistic_set[s] == StatisticKind::kLrOracle) {
        threshold = empirical_quantile(pooled_sorted(h0, s), 1.0 - pfa);
      }
      const auto alt_sorted = pooled_sorted(h1, s);
      PdRow r;
      r.lambda_db = lambda_db;
      r.statistic_name = to_string(config.statistic_set[s]);
      r.pd_empirical = fraction_at_or_above(alt_sorted, threshold);
      r.pd_theory = pd_theory;
      r.pd_stderr = binomial_stderr(r.pd_empirical, alt_sorted.size());
      table.rows.push_back(r);
    }
  }
  return table;
}

// ------------------------------------------------------------ consensus

CsvTable ConsensusTable::to_csv() const {
  CsvTable t;
  t.header = {"n_iterations", "consensus_probability", "stderr", "pfa_empirical",
              "pmd_empirical"};
  for (const auto& r : rows) {
    t.rows.push_back({std::to_string(r.n_iterations), format_csv(r.consensus_probability),
                      format_csv(r.stderr_), format_csv(r.pfa_empirical),
                      format_csv(r.pmd_empirical)});
  }
  return t;
}

ConsensusTable run_consensus(const ExperimentConfig& config) {
  config.validate();
  return run_consensus(config, make_scenario(config));
}

ConsensusTable run_consensus(const ExperimentConfig& config, const Scenario& sc) {
  config.validate();
  if (config.lambda_db.size() > 1 && !config.source_power) {
    throw ConfigError("consensus: lambda_db must be a single value");
  }
  const double lambda_db = config.lambda_db.empty() ? 0.0 : config.lambda_db.front();
  const auto c = scenario_snr(sc, config, lambda_db);
  const int dof = sc.model.n_nodes;
  const double gamma = threshold_for_pfa(config.pfa_targets.front(), dof);

  std::vector<int> checkpoints = config.n_iterations;
  std::sort(checkpoints.begin(), checkpoints.end());
  checkpoints.erase(std::unique(checkpoints.begin(), checkpoints.end()), checkpoints.end());

  struct TrialOutcome {
    bool h1 = false;
    std::vector<char> consensus;  // per checkpoint
    std::vector<int> h1_votes;    // per checkpoint
  };
  const auto outcomes = map_trials(
      static_cast<std::size_t>(config.trials),
      [&](std::size_t i) {
        Rng rng = make_rng(config.seed, Stream::kMixed, i);
        std::bernoulli_distribution coin(config.h1_fraction);
        TrialOutcome t;
        t.h1 = coin(rng);
        const auto block =
            sample_gaussian_block(sc.model, c, t.h1 ? Hypothesis::kH1 : Hypothesis::kH0, rng);
        const auto trace = run_distributed_detection_trace(sc.weights, block,
                                                           sc.model.time_bandwidth, checkpoints,
                                                           gamma, config.estimate_domain);
        for (const auto& o : trace) {
          t.consensus.push_back(o.consensus ? 1 : 0);
          int votes = 0;
          for (const auto& st : o.node_states) votes += st.decision == Hypothesis::kH1;
          t.h1_votes.push_back(votes);
        }
        return t;
      },
      config.execution);

  ConsensusTable table;
  table.gamma = gamma;
  table.convergence_factor = convergence_factor(sc.weights);
  for (std::size_t q = 0; q < checkpoints.size(); ++q) {
    std::size_t agree = 0, n0 = 0, n1 = 0, fa = 0, md = 0;
    for (const auto& t : outcomes) {
      agree += static_cast<std::size_t>(t.consensus[q]);
      if (t.h1) {
        ++n1;
        md += static_cast<std::size_t>(dof - t.h1_votes[q]);
      } else {
        ++n0;
        fa += static_cast<std::size_t>(t.h1_votes[q]);
      }
    }
    ConsensusRow r;
    r.n_iterations = checkpoints[q];
    r.consensus_probability = static_cast<double>(agree) / static_cast<double>(outcomes.size());
    r.stderr_ = binomial_stderr(r.consensus_probability, outcomes.size());
    r.pfa_empirical = n0 ? static_cast<double>(fa) / static_cast<double>(n0 * dof) : 0.0;
    r.pmd_empirical = n1 ? static_cast<double>(md) / static_cast<double>(n1 * dof) : 0.0;
    table.rows.push_back(r);
  }
  return table;
}

// ------------------------------------------------------------ validation

bool ValidationReport::all_pass() const {
  return std::all_of(rows.begin(), rows.end(), [](const ValidationRow& r) { return r.pass; });
}

CsvTable ValidationReport::to_csv() const {
  CsvTable t;
  t.header = {"check", "measured", "tolerance", "pass"};
  for (const auto& r : rows) {
    t.rows.push_back({r.check, format_csv(r.measured), format_csv(r.tolerance),
                      r.pass ? "1" : "0"});
  }
  return t;
}

namespace {

constexpr double kZTolerance = 5.0;

struct MomentZ {
  double mean_z = 0.0;  // largest |mean error| / standard error
  double cov_z = 0.0;   // largest |covariance error| / standard error
};

// Compares per-node means and pairwise covariances with their targets in
// units of the Monte Carlo standard error.
MomentZ moment_z_scores(const MeasurementBlock& block, std::span<const double> mean,
                        const std::function<double(std::size_t, std::size_t)>& cov) {
  const std::size_t n = block.n_nodes();
  const double count = static_cast<double>(block.n_slots());
  std::vector<double> mu(n);
  MomentZ out;
  for (std::size_t k = 0; k < n; ++k) {
    KahanSum s, s2;
    for (double v : block.column(k)) s.add(v);
    mu[k] = s.value() / count;
    for (double v : block.column(k)) s2.add((v - mu[k]) * (v - mu[k]));
    const double se = std::sqrt(s2.value() / (count - 1.0) / count);
    out.mean_z = std::max(out.mean_z, std::abs(mu[k] - mean[k]) / se);
  }
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a; b < n; ++b) {
      const auto x = block.column(a);
      const auto y = block.column(b);
      KahanSum s;
      for (std::size_t l = 0; l < x.size(); ++l) s.add((x[l] - mu[a]) * (y[l] - mu[b]));
      const double c = s.value() / (count - 1.0);
      KahanSum d;
      for (std::size_t l = 0; l < x.size(); ++l) {
        const double e = (x[l] - mu[a]) * (y[l] - mu[b]) - c;
        d.add(e * e);
      }
      const double se = std::sqrt(d.value() / (count - 1.0) / count);
      out.cov_z = std::max(out.cov_z, std::abs(c - cov(a, b)) / se);
    }
  }
  return out;
}

double normal_cdf(double x, double mean, double sd) {
  return 0.5 * std::erfc(-(x - mean) / (sd * std::sqrt(2.0)));
}

// Largest entry error relative to the largest entry of `exact`.
double matrix_relative_error(const DenseMatrix& estimate, const DenseMatrix& exact) {
  double err = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < exact.size(); ++i) {
    for (std::size_t j = 0; j < exact.size(); ++j) {
      err = std::max(err, std::abs(estimate(i, j) - exact(i, j)));
      scale = std::max(scale, std::abs(exact(i, j)));
    }
  }
  return err / scale;
}

// Monte Carlo E[psi psi^T] from `draws` score vectors.
template <class ScoreFn>
DenseMatrix score_outer_mean(std::size_t n, std::size_t draws, ScoreFn&& score) {
  std::vector<KahanSum> acc(n * n);
  for (std::size_t d = 0; d < draws; ++d) {
    const std::vector<double> psi = score(d);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) acc[i * n + j].add(psi[i] * psi[j]);
  }
  DenseMatrix out(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) out(i, j) = acc[i * n + j].value() / draws;
  return out;
}

}  // namespace

ValidationReport run_validate_model(const ExperimentConfig& config) {
  ValidationReport report;
  auto add = [&report](std::string check, double measured, double tolerance) {
    const bool pass = std::isfinite(measured) && measured <= tolerance;
    report.rows.push_back({std::move(check), measured, tolerance, pass});
  };
  auto add_failure = [&report](std::string check, double tolerance) {
    report.rows.push_back({std::move(check), std::nan(""), tolerance, false});
  };

  std::vector<double> c;
  ModelParams params = config.model;
  try {
    config.validate();
    const Scenario sc = make_scenario(config);
    c = scenario_snr(sc, config, config.lambda_db.empty() ? 0.0 : config.lambda_db.front());
    params = sc.model;
  } catch (const std::exception&) {
    add_failure("scenario_setup", 0.0);
    return report;
  }

  const int m = params.time_bandwidth;
  const double sqrt_m = std::sqrt(static_cast<double>(m));
  const double sv2 = params.noise_power;
  ModelParams big = params;
  big.n_slots = config.trials;
  std::uint64_t stream_index = 0;
  auto next_rng = [&] { return make_rng(config.seed, Stream::kValidation, stream_index++); };

  // Raw energy moments against sigma_v^2 (1 + c) and (sigma_v^4 / M)(c c^T + diag(2c + 1)).
  {
    Rng rng = next_rng();
    const auto raw = simulate_raw_energy_block(big, c, Hypothesis::kH1, rng);
    std::vector<double> mean(c.size());
    for (std::size_t k = 0; k < c.size(); ++k) mean[k] = sv2 * (1.0 + c[k]);
    const auto z = moment_z_scores(raw, mean, [&](std::size_t a, std::size_t b) {
      return sv2 * sv2 / m * (c[a] * c[b] + (a == b ? 2.0 * c[a] + 1.0 : 0.0));
    });
    add("energy_mean_z", z.mean_z, kZTolerance);
    add("energy_cov_z", z.cov_z, kZTolerance);
  }

  // Gaussian sampler moments against sqrt(M) c and c c^T + diag(2c + 1).
  {
    Rng rng = next_rng();
    const auto block = sample_gaussian_block(big, c, Hypothesis::kH1, rng);
    std::vector<double> mean(c.size());
    for (std::size_t k = 0; k < c.size(); ++k) mean[k] = sqrt_m * c[k];
    const auto z = moment_z_scores(block, mean, [&](std::size_t a, std::size_t b) {
      return c[a] * c[b] + (a == b ? 2.0 * c[a] + 1.0 : 0.0);
    });
    add("gaussian_mean_z", z.mean_z, kZTolerance);
    add("gaussian_cov_z", z.cov_z, kZTolerance);
  }

  // Both generators are standardized under H0.
  {
    const std::vector<double> zero(c.size(), 0.0);
    auto identity = [](std::size_t a, std::size_t b) { return a == b ? 1.0 : 0.0; };
    Rng rng_e = next_rng();
    const auto ze = moment_z_scores(simulate_energy_block(big, c, Hypothesis::kH0, rng_e),
                                    zero, identity);
    add("energy_h0_mean_z", ze.mean_z, kZTolerance);
    add("energy_h0_cov_z", ze.cov_z, kZTolerance);
    Rng rng_g = next_rng();
    const auto zg = moment_z_scores(sample_gaussian_block(big, c, Hypothesis::kH0, rng_g),
                                    zero, identity);
    add("gaussian_h0_mean_z", zg.mean_z, kZTolerance);
    add("gaussian_h0_cov_z", zg.cov_z, kZTolerance);
  }

  // Normalized energy marginals against their Gaussian approximation.
  {
    Rng rng = next_rng();
    const auto block = simulate_energy_block(big, c, Hypothesis::kH1, rng);
    double worst = 0.0;
    for (std::size_t k = 0; k < c.size(); ++k) {
      const auto col = block.column(k);
      const double mean = sqrt_m * c[k], sd = 1.0 + c[k];
      worst = std::max(worst, ks_distance({col.begin(), col.end()},
                                          [&](double x) { return normal_cdf(x, mean, sd); }));
    }
    add("clt_ks", worst, 0.05);
  }

  // Factored GLR against dense Cholesky evaluation on random small instances.
  {
    Rng rng = next_rng();
    std::uniform_int_distribution<int> n_dist(1, 8), l_dist(1, 20);
    std::uniform_real_distribution<double> c_dist(0.0, 3.0);
    double worst = 0.0;
    for (int inst = 0; inst < 100; ++inst) {
      ModelParams p = params;
      p.n_nodes = n_dist(rng);
      p.n_slots = l_dist(rng);
      std::vector<double> ci(static_cast<std::size_t>(p.n_nodes));
      for (double& v : ci) v = c_dist(rng);
      const auto block = sample_gaussian_block(p, ci, Hypothesis::kH1, rng);
      const double fast = log_likelihood_ratio(block, ci, m);
      const double dense = reference::dense_log_likelihood_ratio(block, ci, m);
      worst = std::max(worst, std::abs(fast - dense) / std::max(1.0, std::abs(dense)));
    }
    add("factored_glr_rel_error", worst, 1e-10);
  }

  // With one slot the fully distributed statistic equals log T_L.
  {
    Rng rng = next_rng();
    ModelParams p = params;
    p.n_slots = 1;
    double worst = 0.0;
    for (int inst = 0; inst < 100; ++inst) {
      const auto block = sample_gaussian_block(p, c, Hypothesis::kH1, rng);
      const auto est = local_mle_vector(block, m, config.estimate_domain);
      const double exact = log_glr_local(block, est, m);
      const GlrAggregates agg = aggregate(glr_summands(block, est, m));
      const double fd = fd_statistic(agg, 1);
      // Estimates on the floor make the three additive terms huge and nearly
      // cancelling, so the error is measured against the largest of them.
      const double scale = std::max({1.0, std::abs(exact),
                                     0.5 * std::abs(std::log1p(agg.c1) + agg.c2),
                                     0.5 * std::abs(agg.u),
                                     agg.w * agg.w / (2.0 * (1.0 + agg.c1))});
      worst = std::max(worst, std::abs(fd - exact) / scale);
    }
    add("single_slot_identity", worst, 1e-12);
  }

  // Fisher matrices against Monte Carlo score products.
  {
    constexpr std::size_t kDraws = 400000;
    constexpr double kTol = 0.02;
    {
      const std::size_t n = 3;
      Rng rng = next_rng();
      std::normal_distribution<double> normal;
      const std::vector<double> theta(n, 0.0);
      const auto mc = score_outer_mean(n, kDraws, [&](std::size_t) {
        std::vector<double> z(n);
        for (double& v : z) v = normal(rng);
        return joint_score(z, theta, m);
      });
      add("fisher_zero_mc_rel_error",
          matrix_relative_error(mc, fisher_at_zero(static_cast<int>(n), m)), kTol);
    }
    for (const std::vector<double>& cf :
         {std::vector<double>{0.5, 1.0}, std::vector<double>{1.0, 2.0, 3.0}}) {
      Rng rng = next_rng();
      ModelParams p = params;
      p.n_nodes = static_cast<int>(cf.size());
      p.n_slots = static_cast<int>(kDraws);
      const auto block = sample_gaussian_block(p, cf, Hypothesis::kH1, rng);
      const auto mc = score_outer_mean(cf.size(), kDraws, [&](std::size_t l) {
        std::vector<double> psi(cf.size());
        for (std::size_t k = 0; k < cf.size(); ++k) psi[k] = local_score(block(l, k), cf[k], m);
        return psi;
      });
      std::string name = "local_fisher_mc_rel_error_c";
      for (double v : cf) name += "_" + format_csv(v);
      add(name, matrix_relative_error(mc, local_fisher(cf, m)), kTol);
    }
    const std::vector<double> zero(3, 0.0);
    add("local_fisher_zero_exact", matrix_relative_error(local_fisher(zero, m), fisher_at_zero(3, m)),
        0.0);
  }
  return report;
}

}  // namespace dsd
