// Copyright 2026 The dpp2 Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cli.h"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "dpp2/config.h"
#include "dpp2/experiment.h"
#include "dpp2/plot.h"
#include "dpp2/privacy.h"
#include "dpp2/validator.h"

namespace dpp2 {
namespace {

struct RunArgs {
  std::string config;
  std::string output;
  std::optional<int> iterations;
  std::optional<int> repeats;
};

struct SweepArgs {
  std::string preset;
  bool full_scale = false;
  std::string output;
  std::optional<int> iterations;
  std::optional<int> repeats;
  std::vector<double> values;
  bool no_plot = false;
};

struct BudgetArgs {
  BudgetInputs in;
  std::optional<double> target;
};

struct SelectArgs {
  SelectionInputs in;
  std::optional<double> u_e;
};

struct ValidateArgs {
  double alpha = 0.1;
  double beta = 0.05;
  double rho = 10.0;
  std::optional<double> smoothness;
  std::string config;
  std::string graph = "geometric";
  int nodes = 10;
  double radius = 0.5;
  std::uint64_t graph_seed = 1;
  std::string edges;
  std::string scaling = "max_degree";
  FreeConstants free;
  std::optional<double> pl;
  double r_bar = 0.0;
  bool design = false;
};

struct PlotArgs {
  std::vector<std::string> inputs;
  std::vector<std::string> labels;
  std::string output;
  std::string title;
};

int do_run(const RunArgs& a, std::ostream& out) {
  ExperimentConfig c = load_config(a.config);
  if (!a.output.empty()) c.output = a.output;
  if (a.iterations) c.iterations = *a.iterations;
  if (a.repeats) {
    if (!c.seeds.empty() && static_cast<int>(c.seeds.size()) != *a.repeats)
      throw std::invalid_argument("--repeats conflicts with the explicit seed list");
    c.repeats = *a.repeats;
  }
  ExperimentResult r = run_experiment(c, &out);
  const SummaryRow& last = r.summary.rows.back();
  out << fmt::format("wrote {} trace(s) and {}\n", r.trace_files.size(), r.summary_file);
  out << fmt::format("final k = {}  mean W_hat = {:.6e}  [min {:.6e}, max {:.6e}]\n", last.k,
                     last.mean, last.min, last.max);
  return 0;
}

int do_sweep(const SweepArgs& a, std::ostream& out) {
  SweepSpec spec = preset(a.preset, a.full_scale);
  if (!a.output.empty()) spec.base.output = a.output;
  if (a.iterations) spec.base.iterations = *a.iterations;
  if (a.repeats) spec.base.repeats = *a.repeats;
  if (!a.values.empty()) spec.values = a.values;
  if (a.no_plot) spec.base.plot = false;
  SweepResult r = run_sweep(spec, &out);
  out << fmt::format("{:>10}  {}\n", spec.parameter, "final mean W_hat");
  for (std::size_t i = 0; i < r.values.size(); ++i)
    out << fmt::format("{:>10}  {:.6e}\n", r.values[i], r.final_mean[i]);
  out << "table: " << r.table_file << '\n';
  if (!r.plot_file.empty()) out << "plot: " << r.plot_file << '\n';
  return 0;
}

int do_budget(const BudgetArgs& a, std::ostream& out) {
  PrivacyReport report = dp_budget(a.in, a.target);
  write_report(out, report);
  if (!report.epsilon) return 1;
  return a.target && !report.feasible ? 1 : 0;
}

int do_select(SelectArgs a, std::ostream& out) {
  a.in.u_e = a.u_e;
  DpSelection sel = select_dp_parameters(a.in);
  write_selection(out, sel);
  return sel.feasible ? 0 : 1;
}

int do_validate(const ValidateArgs& a, std::ostream& out) {
  std::optional<Network> network;
  double smoothness = 0.0;
  std::optional<double> pl = a.pl;
  if (!a.config.empty()) {
    const ExperimentConfig c = load_config(a.config);
    const Problem problem = build_problem(c.problem);
    network.emplace(build_network(c.network, problem.nodes()));
    smoothness = problem.max_smoothness();
    if (!pl) pl = problem.pl_constant();
  } else {
    if (!a.smoothness) throw std::invalid_argument("--smoothness is required without --config");
    smoothness = *a.smoothness;
    NetworkSpec spec;
    spec.kind = a.edges.empty() ? a.graph : "file";
    spec.radius = a.radius;
    spec.seed = a.graph_seed;
    spec.file = a.edges;
    spec.scaling = a.scaling == "unit" ? LaplacianScaling::kUnit : LaplacianScaling::kMaxDegree;
    int nodes = a.nodes;
    if (!a.edges.empty()) nodes = read_edge_list_file(a.edges).node_count;
    network.emplace(build_network(spec, nodes));
  }
  if (a.design) {
    auto cert = design_certified_parameters(*network, smoothness);
    if (!cert) {
      out << "no certified parameters found\n";
      return 1;
    }
    out << fmt::format("certified: alpha = {:.17g}\nbeta = {:.17g}\nrho = {:.17g}\n", cert->alpha,
                       cert->beta, cert->rho);
    out << fmt::format("c_theta = {:.17g}\ngamma = {:.17g}\n", cert->free.c_theta,
                       cert->free.gamma);
    write_constants(out, validate_parameters(cert->alpha, cert->beta, cert->rho, *network,
                                             smoothness, cert->free, pl, a.r_bar));
    return 0;
  }
  const DerivedConstants c =
      validate_parameters(a.alpha, a.beta, a.rho, *network, smoothness, a.free, pl, a.r_bar);
  write_constants(out, c);
  return 0;
}

int do_plot(const PlotArgs& a, std::ostream& out) {
  if (!a.labels.empty() && a.labels.size() != a.inputs.size())
    throw std::invalid_argument("--label must be given once per --input");
  std::vector<PlotSeries> series;
  for (std::size_t i = 0; i < a.inputs.size(); ++i) {
    std::ifstream in(a.inputs[i]);
    if (!in) throw std::runtime_error(fmt::format("cannot open {}", a.inputs[i]));
    const Summary s = read_summary_csv(in);
    PlotSeries line;
    if (!a.labels.empty()) {
      line.label = a.labels[i];
    } else {
      for (const auto& [key, value] : s.metadata)
        if (key == "label" && !value.empty()) line.label = value;
      if (line.label.empty()) line.label = std::filesystem::path(a.inputs[i]).parent_path().filename().string();
      if (line.label.empty()) line.label = a.inputs[i];
    }
    for (const auto& r : s.rows) {
      line.x.push_back(r.k);
      line.y.push_back(r.mean);
    }
    series.push_back(std::move(line));
  }
  const std::string svg = render_svg(series, PlotSpec{a.title, "iteration k", "mean optimality gap"});
  std::ofstream file(a.output, std::ios::binary);
  if (!file) throw std::runtime_error(fmt::format("cannot write {}", a.output));
  file << svg;
  out << "wrote " << a.output << '\n';
  return 0;
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Differentially private primal-dual decentralized optimization toolkit", "dpp2"};
  app.require_subcommand(1);

  RunArgs run_args;
  auto* run_cmd = app.add_subcommand("run", "Run a configured experiment (repeats, traces, summary)");
  run_cmd->add_option("-c,--config", run_args.config, "Experiment config file")
      ->required()->check(CLI::ExistingFile);
  run_cmd->add_option("-o,--output", run_args.output, "Override the output directory");
  run_cmd->add_option("--iterations", run_args.iterations, "Override the horizon K");
  run_cmd->add_option("--repeats", run_args.repeats, "Override the repeat count");

  SweepArgs sweep_args;
  auto* sweep_cmd = app.add_subcommand("sweep", "Run a preset sweep over the noise decay rate or scale");
  sweep_cmd->add_option("-p,--preset", sweep_args.preset, "figure1 (rate sweep) or figure2 (scale sweep)")
      ->required()->check(CLI::IsMember({"figure1", "figure2"}));
  sweep_cmd->add_flag("--paper-scale", sweep_args.full_scale, "Use N=50, d=10, m=200 instead of N=10, d=5, m=50");
  sweep_cmd->add_option("-o,--output", sweep_args.output, "Output directory");
  sweep_cmd->add_option("--iterations", sweep_args.iterations, "Horizon K (default 2000)");
  sweep_cmd->add_option("--repeats", sweep_args.repeats, "Seeds per sweep point (default 10)");
  sweep_cmd->add_option("--values", sweep_args.values, "Replace the preset sweep values")->delimiter(',');
  sweep_cmd->add_flag("--no-plot", sweep_args.no_plot, "Skip the SVG plot");

  BudgetArgs budget;
  auto* budget_cmd = app.add_subcommand("dp-budget", "Accumulated differential privacy level over K iterations");
  budget_cmd->add_option("-K,--horizon", budget.in.horizon, "Number of iterations K")->required()->check(CLI::PositiveNumber);
  budget_cmd->add_option("-d,--dim", budget.in.dim, "Decision dimension d")->required()->check(CLI::PositiveNumber);
  budget_cmd->add_option("--alpha", budget.in.alpha, "Stepsize alpha")->required();
  budget_cmd->add_option("--delta", budget.in.delta, "Adjacency distance delta")->required();
  budget_cmd->add_option("-M,--smoothness", budget.in.max_smoothness, "Largest smoothness constant M")->required();
  budget_cmd->add_option("--u-e", budget.in.u_e, "Gradient-message noise scale u_e")->required();
  budget_cmd->add_option("--u-w", budget.in.u_w, "Primal-message noise scale u_w")->required();
  budget_cmd->add_option("-r,--rate", budget.in.rate, "Noise decay rate r")->required();
  budget_cmd->add_option("--target", budget.target, "Budget epsilon to check against");

  SelectArgs select;
  auto* select_cmd = app.add_subcommand("dp-select", "Choose u_e, alpha and a decay-rate interval for a target epsilon");
  select_cmd->add_option("-e,--epsilon", select.in.epsilon, "Target epsilon")->required();
  select_cmd->add_option("--delta", select.in.delta, "Adjacency distance delta (no default)")->required();
  select_cmd->add_option("-d,--dim", select.in.dim, "Decision dimension d")->required();
  select_cmd->add_option("-M,--smoothness", select.in.max_smoothness, "Largest smoothness constant M")->required();
  select_cmd->add_option("-K,--horizon", select.in.horizon, "Number of iterations K")->required();
  select_cmd->add_option("--u-w", select.in.u_w, "Primal-message noise scale u_w")->required();
  select_cmd->add_option("--u-e", select.u_e, "Fix u_e instead of 1.1 sqrt(d) M / epsilon");

  ValidateArgs val;
  auto* val_cmd = app.add_subcommand("validate-params", "Print derived constants and feasibility flags for (alpha, beta, rho)");
  val_cmd->add_option("--alpha", val.alpha, "Stepsize alpha")->capture_default_str();
  val_cmd->add_option("--beta", val.beta, "Consensus weight beta")->capture_default_str();
  val_cmd->add_option("--rho", val.rho, "Dual gain rho")->capture_default_str();
  val_cmd->add_option("-M,--smoothness", val.smoothness, "Largest smoothness constant M");
  val_cmd->add_option("-c,--config", val.config, "Take the problem and network from a config")->check(CLI::ExistingFile);
  val_cmd->add_option("--graph", val.graph, "geometric, path, ring or complete")
      ->check(CLI::IsMember({"geometric", "path", "ring", "complete"}))->capture_default_str();
  val_cmd->add_option("-N,--nodes", val.nodes, "Node count")->capture_default_str();
  val_cmd->add_option("--radius", val.radius, "Geometric graph radius")->capture_default_str();
  val_cmd->add_option("--graph-seed", val.graph_seed, "Geometric graph seed")->capture_default_str();
  val_cmd->add_option("--edges", val.edges, "Edge-list file (overrides --graph)")->check(CLI::ExistingFile);
  val_cmd->add_option("--scaling", val.scaling, "Laplacian scaling: unit or max_degree")
      ->check(CLI::IsMember({"unit", "max_degree"}))->capture_default_str();
  val_cmd->add_option("--c-theta", val.free.c_theta, "Free constant c_theta")->capture_default_str();
  val_cmd->add_option("--gamma", val.free.gamma, "Free constant gamma")->capture_default_str();
  val_cmd->add_option("--pl", val.pl, "PL constant nu (enables the linear-rate constants)");
  val_cmd->add_option("--r-bar", val.r_bar, "Largest noise decay rate")->capture_default_str();
  val_cmd->add_flag("--design", val.design, "Search for certified parameters instead");

  PlotArgs plot;
  auto* plot_cmd = app.add_subcommand("plot", "Render summary CSVs as an SVG chart with a log y axis");
  plot_cmd->add_option("-i,--input", plot.inputs, "Summary CSV (repeatable)")->required()->check(CLI::ExistingFile);
  plot_cmd->add_option("-l,--label", plot.labels, "Legend label per input");
  plot_cmd->add_option("-o,--output", plot.output, "SVG file to write")->required();
  plot_cmd->add_option("-t,--title", plot.title, "Chart title");

  if (argc <= 1) {
    err << app.help();
    return 2;
  }
  const std::string first = argv[1];
  if (!first.empty() && first.front() != '-' && app.get_subcommand_no_throw(first) == nullptr) {
    err << fmt::format("unknown subcommand '{}'\n", first) << app.help();
    return 2;
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    err << app.help();
    return e.get_exit_code() == 0 ? 2 : e.get_exit_code();
  }

  try {
    if (*run_cmd) return do_run(run_args, out);
    if (*sweep_cmd) return do_sweep(sweep_args, out);
    if (*budget_cmd) return do_budget(budget, out);
    if (*select_cmd) return do_select(select, out);
    if (*val_cmd) return do_validate(val, out);
    if (*plot_cmd) return do_plot(plot, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace dpp2
