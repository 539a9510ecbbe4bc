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

#include "dpp2/experiment.h"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>

#include "dpp2/plot.h"
#include "dpp2/random.h"
#include "dpp2/runner.h"

namespace dpp2 {

namespace fs = std::filesystem;

Problem build_problem(const ProblemSpec& spec) {
  if (spec.kind == "logistic") {
    const Dataset data = generate_dataset(spec.nodes, spec.dim, spec.samples, spec.seed);
    return logistic_nonconvex(data, spec.lambda, spec.omega);
  }
  if (spec.kind == "quadratic") {
    return quadratic_pl(spec.nodes, spec.dim, spec.rank_deficit, spec.seed);
  }
  throw std::invalid_argument(fmt::format("unknown problem kind '{}'", spec.kind));
}

Network build_network(const NetworkSpec& spec, int nodes, std::uint64_t* seed_used) {
  std::vector<Edge> edges;
  if (seed_used) *seed_used = spec.seed;
  if (spec.kind == "geometric") {
    GeometricGraph g = random_geometric_graph(nodes, spec.radius, spec.seed);
    if (seed_used) *seed_used = g.seed_used;
    edges = std::move(g.edges);
  } else if (spec.kind == "path") {
    edges = path_graph(nodes);
  } else if (spec.kind == "ring") {
    edges = ring_graph(nodes);
  } else if (spec.kind == "complete") {
    edges = complete_graph(nodes);
  } else if (spec.kind == "file") {
    EdgeList list = read_edge_list_file(spec.file);
    if (list.node_count != nodes)
      throw std::invalid_argument(fmt::format("edge list {} has {} nodes, problem has {}",
                                              spec.file, list.node_count, nodes));
    edges = std::move(list.edges);
  } else {
    throw std::invalid_argument(fmt::format("unknown network kind '{}'", spec.kind));
  }
  return Network(nodes, std::move(edges), spec.scaling);
}

AlgoParams build_params(const ParamSpec& spec, std::uint64_t run_seed) {
  AlgoParams p;
  p.alpha = spec.alpha;
  p.beta = spec.beta;
  p.rho = spec.rho;
  p.eta = spec.eta ? EtaSchedule::constant(*spec.eta)
                   : EtaSchedule::random(derive_seed(run_seed, 2));
  return p;
}

NoiseSchedule build_noise(const NoiseSpec& spec, int nodes) {
  return NoiseSchedule::uniform(nodes, spec.u_e, spec.u_w, spec.rate);
}

void write_summary_csv(std::ostream& out, const Summary& summary) {
  for (const auto& [key, value] : summary.metadata) out << "# " << key << ": " << value << '\n';
  out << "k,mean_W_hat,min_W_hat,max_W_hat,mean_consensus,mean_stationarity\n";
  for (const auto& r : summary.rows) {
    out << fmt::format("{},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", r.k, r.mean, r.min,
                       r.max, r.mean_consensus, r.mean_stationarity);
  }
}

Summary read_summary_csv(std::istream& in) {
  Summary s;
  std::string line;
  int number = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.rfind("# ", 0) == 0) {
      const auto colon = line.find(": ");
      if (colon == std::string::npos)
        throw std::runtime_error(fmt::format("summary line {}: malformed metadata", number));
      s.metadata.emplace_back(line.substr(2, colon - 2), line.substr(colon + 2));
      continue;
    }
    if (!header) {
      if (line.rfind("k,mean_W_hat", 0) != 0)
        throw std::runtime_error(fmt::format("summary line {}: unexpected header", number));
      header = true;
      continue;
    }
    std::stringstream ss(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (fields.size() != 6)
      throw std::runtime_error(fmt::format("summary line {}: expected 6 fields", number));
    SummaryRow r;
    try {
      r.k = std::stoi(fields[0]);
      r.mean = std::stod(fields[1]);
      r.min = std::stod(fields[2]);
      r.max = std::stod(fields[3]);
      r.mean_consensus = std::stod(fields[4]);
      r.mean_stationarity = std::stod(fields[5]);
    } catch (const std::exception&) {
      throw std::runtime_error(fmt::format("summary line {}: bad number", number));
    }
    s.rows.push_back(r);
  }
  if (!header) throw std::runtime_error("summary: missing header");
  return s;
}

namespace {

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(fmt::format("cannot write {}", path.string()));
  return out;
}

void ensure_directory(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir))
    throw std::runtime_error(
        fmt::format("cannot create output directory {}: {}", dir.string(), ec.message()));
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config, std::ostream* log) {
  const fs::path dir(config.output);
  ensure_directory(dir);

  const Problem problem = build_problem(config.problem);
  std::uint64_t network_seed = 0;
  const Network network = build_network(config.network, problem.nodes(), &network_seed);
  const NoiseSchedule noise = build_noise(config.noise, problem.nodes());
  const std::string hash = config_hash(config);
  FreeConstants free;
  free.c_theta = config.c_theta;
  free.gamma = config.gamma;

  ExperimentResult result;
  result.constants = validate_parameters(build_params(config.params, config.run_seed(0)),
                                         network, problem, free, noise.r_bar());
  {
    std::ofstream out = open_output(dir / "validator.txt");
    write_constants(out, result.constants);
    if (log) write_constants(*log, result.constants);
  }
  {
    std::ofstream out = open_output(dir / "config.ini");
    write_config(out, config);
  }

  std::vector<Trace> traces;
  for (int rep = 0; rep < config.repeats; ++rep) {
    const std::uint64_t seed = config.run_seed(rep);
    RunOptions options;
    options.iterations = config.iterations;
    options.stride = config.stride;
    options.lyapunov = config.lyapunov;
    options.free = free;
    RunResult run_result =
        run(problem, network, build_params(config.params, seed), noise, seed, options);
    Trace& trace = run_result.trace;
    trace.set_meta("config_hash", hash);
    trace.set_meta("network_seed", fmt::format("{}", network_seed));
    trace.set_meta("repeat", fmt::format("{}", rep));
    if (!config.label.empty()) trace.set_meta("label", config.label);
    const fs::path file = dir / fmt::format("run_{:03d}.csv", rep);
    std::ofstream out = open_output(file);
    write_trace_csv(out, trace);
    if (!out) throw std::runtime_error(fmt::format("failed writing {}", file.string()));
    result.trace_files.push_back(file.string());
    traces.push_back(std::move(trace));
  }

  Summary& summary = result.summary;
  summary.metadata = {{"config_hash", hash},
                      {"label", config.label},
                      {"problem", problem.name()},
                      {"repeats", fmt::format("{}", config.repeats)},
                      {"iterations", fmt::format("{}", config.iterations)},
                      {"u_e", fmt::format("{}", config.noise.u_e)},
                      {"u_w", fmt::format("{}", config.noise.u_w)},
                      {"rate", fmt::format("{}", config.noise.rate)}};
  const std::size_t rows = traces.front().rows.size();
  const double n = static_cast<double>(traces.size());
  for (std::size_t i = 0; i < rows; ++i) {
    SummaryRow r;
    r.k = traces.front().rows[i].k;
    r.min = traces.front().rows[i].w_hat;
    r.max = r.min;
    for (const Trace& t : traces) {
      const TraceRow& row = t.rows[i];
      r.mean += row.w_hat / n;
      r.mean_consensus += row.consensus / n;
      r.mean_stationarity += row.stationarity / n;
      r.min = std::min(r.min, row.w_hat);
      r.max = std::max(r.max, row.w_hat);
    }
    summary.rows.push_back(r);
  }
  const fs::path summary_file = dir / "summary.csv";
  std::ofstream out = open_output(summary_file);
  write_summary_csv(out, summary);
  result.summary_file = summary_file.string();

  if (config.plot) {
    PlotSeries s{config.label.empty() ? "mean" : config.label, {}, {}};
    for (const auto& r : summary.rows) {
      s.x.push_back(r.k);
      s.y.push_back(r.mean);
    }
    std::ofstream svg = open_output(dir / "summary.svg");
    svg << render_svg({s}, PlotSpec{problem.name(), "iteration k", "mean optimality gap"});
  }
  return result;
}

SweepSpec preset(const std::string& name, bool full_scale) {
  SweepSpec spec;
  spec.name = name;
  ExperimentConfig& c = spec.base;
  c.seed = 2026;
  c.repeats = 10;
  c.iterations = 2000;
  c.output = "out/" + name;
  c.plot = true;
  c.problem.kind = "logistic";
  c.problem.nodes = full_scale ? 50 : 10;
  c.problem.dim = full_scale ? 10 : 5;
  c.problem.samples = full_scale ? 200 : 50;
  c.problem.lambda = 0.001;
  c.problem.omega = 1.0;
  c.problem.seed = 1;
  c.network.kind = "geometric";
  c.network.radius = full_scale ? 0.3 : 0.5;
  c.network.seed = 1;
  c.network.scaling = LaplacianScaling::kMaxDegree;
  c.params.alpha = 0.1;
  c.params.beta = 0.05;
  c.params.rho = 10.0;
  c.params.eta = 0.5;
  if (name == "figure1") {
    spec.parameter = "rate";
    spec.values = {0.0, 0.5, 0.9, 0.95, 0.97, 0.98, 0.99};
    c.noise.u_e = c.noise.u_w = 1.0;
  } else if (name == "figure2") {
    spec.parameter = "u";
    spec.values = {0.0, 0.1, 0.3, 0.6, 1.0, 3.0, 5.0};
    c.noise.rate = 0.95;
  } else {
    throw std::invalid_argument(
        fmt::format("unknown preset '{}' (expected figure1 or figure2)", name));
  }
  return spec;
}

std::string sweep_point_label(const std::string& parameter, double value) {
  return fmt::format("{}={}", parameter == "rate" ? "r" : parameter, value);
}

SweepResult run_sweep(const SweepSpec& spec, std::ostream* log) {
  if (spec.parameter != "rate" && spec.parameter != "u")
    throw std::invalid_argument(
        fmt::format("sweep parameter must be rate or u, got '{}'", spec.parameter));
  if (spec.values.empty()) throw std::invalid_argument("sweep has no values");
  const fs::path root(spec.base.output);
  ensure_directory(root);

  SweepResult result;
  std::vector<PlotSeries> series;
  for (double value : spec.values) {
    ExperimentConfig c = spec.base;
    c.plot = false;
    c.output = (root / fmt::format("{}_{}", spec.parameter, value)).string();
    c.label = sweep_point_label(spec.parameter, value);
    if (spec.parameter == "rate") {
      c.noise.rate = value;
    } else {
      c.noise.u_e = c.noise.u_w = value;
    }
    if (log) *log << fmt::format("[{}] {}\n", spec.name, c.label);
    ExperimentResult point = run_experiment(c, nullptr);
    result.values.push_back(value);
    result.final_mean.push_back(point.summary.rows.back().mean);
    PlotSeries s{c.label, {}, {}};
    for (const auto& r : point.summary.rows) {
      s.x.push_back(r.k);
      s.y.push_back(r.mean);
    }
    series.push_back(std::move(s));
    result.points.push_back(std::move(point));
  }

  const fs::path table = root / "sweep.csv";
  {
    std::ofstream out = open_output(table);
    out << "# sweep: " << spec.name << '\n';
    out << "# parameter: " << spec.parameter << '\n';
    out << "value,final_mean_W_hat,final_min_W_hat,final_max_W_hat\n";
    for (std::size_t i = 0; i < result.values.size(); ++i) {
      const SummaryRow& last = result.points[i].summary.rows.back();
      out << fmt::format("{},{:.17g},{:.17g},{:.17g}\n", result.values[i], last.mean,
                         last.min, last.max);
    }
  }
  result.table_file = table.string();
  if (spec.base.plot) {
    const fs::path svg_path = root / "sweep.svg";
    std::ofstream svg = open_output(svg_path);
    svg << render_svg(series, PlotSpec{spec.name, "iteration k", "mean optimality gap"});
    result.plot_file = svg_path.string();
  }
  return result;
}

}  // namespace dpp2
