#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "dsd/graph.hpp"
#include "dsd/harness.hpp"
#include "dsd/rng.hpp"

namespace {

struct RunArgs {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> trials;
  std::string out;
};

void add_run_options(CLI::App* cmd, RunArgs& args) {
  cmd->add_option("--config", args.config, "experiment config file")->required();
  cmd->add_option("--seed", args.seed, "override the config seed");
  cmd->add_option("--trials", args.trials, "override the config trial count");
  cmd->add_option("--out", args.out, "CSV output path (default: stdout)");
}

dsd::ExperimentConfig load(const RunArgs& args) {
  dsd::ExperimentConfig cfg = dsd::load_config(args.config);
  if (args.seed) cfg.seed = *args.seed;
  if (args.trials) cfg.trials = *args.trials;
  cfg.validate();
  return cfg;
}

void emit(const dsd::CsvTable& table, const std::string& path) {
  if (path.empty()) {
    table.write(std::cout);
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  table.write(out);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fully distributed detection of a stochastic source"};
  app.require_subcommand(1);

  int nodes = 10, edges = 20;
  double side = 200.0;
  std::uint64_t net_seed = 0;
  std::string net_out;
  auto* gen = app.add_subcommand("gen-network", "generate a connected non-bipartite graph");
  gen->add_option("--nodes", nodes, "number of nodes")->check(CLI::PositiveNumber);
  gen->add_option("--edges", edges, "number of edges")->check(CLI::PositiveNumber);
  gen->add_option("--side", side, "square side length in meters")->check(CLI::PositiveNumber);
  gen->add_option("--seed", net_seed, "generator seed");
  gen->add_option("--out", net_out, "graph file path (default: stdout)");

  RunArgs croc, sweep, consensus, validate;
  auto* croc_cmd = app.add_subcommand("run-croc", "CROC curves at one lambda");
  auto* sweep_cmd = app.add_subcommand("run-pd-sweep", "detection probability vs lambda");
  auto* cons_cmd = app.add_subcommand("run-consensus", "consensus probability vs iterations");
  auto* val_cmd = app.add_subcommand("validate-model", "model and estimator self-checks");
  add_run_options(croc_cmd, croc);
  add_run_options(sweep_cmd, sweep);
  add_run_options(cons_cmd, consensus);
  add_run_options(val_cmd, validate);

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      dsd::Rng rng = dsd::make_rng(net_seed, dsd::Stream::kGraph, 0);
      const dsd::Graph graph = dsd::generate_network(nodes, edges, side, rng);
      if (net_out.empty()) {
        dsd::write_graph(std::cout, graph);
      } else {
        std::ofstream out(net_out);
        if (!out) throw std::runtime_error("cannot write '" + net_out + "'");
        dsd::write_graph(out, graph);
      }
    } else if (croc_cmd->parsed()) {
      emit(dsd::run_croc(load(croc)).to_csv(), croc.out);
    } else if (sweep_cmd->parsed()) {
      emit(dsd::run_pd_sweep(load(sweep)).to_csv(), sweep.out);
    } else if (cons_cmd->parsed()) {
      const auto table = dsd::run_consensus(load(consensus));
      std::fprintf(stderr, "gamma %.9g  convergence factor %.9g\n", table.gamma,
                   table.convergence_factor);
      emit(table.to_csv(), consensus.out);
    } else if (val_cmd->parsed()) {
      const auto report = dsd::run_validate_model(load(validate));
      emit(report.to_csv(), validate.out);
      if (!report.all_pass()) {
        std::fprintf(stderr, "validate-model: one or more checks failed\n");
        return 3;
      }
    }
  } catch (const dsd::ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
