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

#ifndef DPP2_EXPERIMENT_H_
#define DPP2_EXPERIMENT_H_

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "dpp2/algorithm.h"
#include "dpp2/config.h"
#include "dpp2/diagnostics.h"
#include "dpp2/privacy.h"
#include "dpp2/problems.h"
#include "dpp2/validator.h"

namespace dpp2 {

Problem build_problem(const ProblemSpec& spec);
// seed_used receives the geometric seed that produced a connected graph.
Network build_network(const NetworkSpec& spec, int nodes,
                      std::uint64_t* seed_used = nullptr);
// A random eta schedule is seeded from derive_seed(run_seed, 2).
AlgoParams build_params(const ParamSpec& spec, std::uint64_t run_seed);
NoiseSchedule build_noise(const NoiseSpec& spec, int nodes);

struct SummaryRow {
  int k = 0;
  double mean = 0.0;  // of W_hat across repeats
  double min = 0.0;
  double max = 0.0;
  double mean_consensus = 0.0;
  double mean_stationarity = 0.0;
};

struct Summary {
  std::vector<std::pair<std::string, std::string>> metadata;
  std::vector<SummaryRow> rows;
};

void write_summary_csv(std::ostream& out, const Summary& summary);
Summary read_summary_csv(std::istream& in);

struct ExperimentResult {
  std::vector<std::string> trace_files;
  std::string summary_file;
  Summary summary;
  DerivedConstants constants;
};

// Runs config.repeats seeded runs and writes run_NNN.csv, summary.csv,
// validator.txt and config.ini under config.output. The validator report is
// also echoed to log when given.
ExperimentResult run_experiment(const ExperimentConfig& config,
                                std::ostream* log = nullptr);

struct SweepSpec {
  std::string name;
  std::string parameter;  // "rate" or "u"
  std::vector<double> values;
  ExperimentConfig base;
};

// figure1: rate in {0, .5, .9, .95, .97, .98, .99} with u = 1.
// figure2: u in {0, .1, .3, .6, 1, 3, 5} with rate = .95.
// Desk scale is N=10, d=5, m=50; full scale is N=50, d=10, m=200.
SweepSpec preset(const std::string& name, bool full_scale = false);

struct SweepResult {
  std::vector<double> values;
  std::vector<ExperimentResult> points;
  std::vector<double> final_mean;  // mean W_hat at the last recorded k
  std::string table_file;
  std::string plot_file;
};

// Each sweep point writes into <output>/<parameter>_<value>/. A table of final
// gaps goes to sweep.csv and, when base.plot is set, curves to sweep.svg.
SweepResult run_sweep(const SweepSpec& spec, std::ostream* log = nullptr);

std::string sweep_point_label(const std::string& parameter, double value);

}  // namespace dpp2

#endif  // DPP2_EXPERIMENT_H_
