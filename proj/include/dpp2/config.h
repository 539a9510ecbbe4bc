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

#ifndef DPP2_CONFIG_H_
#define DPP2_CONFIG_H_

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dpp2/graph.h"

namespace dpp2 {

// Parse or validation failure tied to a source line (0 when not applicable).
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& source, int line, const std::string& message);
  int line() const { return line_; }

 private:
  int line_;
};

struct ProblemSpec {
  std::string kind = "logistic";  // logistic | quadratic
  int nodes = 10;
  int dim = 5;
  int samples = 50;  // logistic only
  double lambda = 0.001;
  double omega = 1.0;
  int rank_deficit = 0;  // quadratic only
  std::uint64_t seed = 1;
};

struct NetworkSpec {
  std::string kind = "geometric";  // geometric | path | ring | complete | file
  double radius = 0.5;
  std::uint64_t seed = 1;
  std::string file;
  LaplacianScaling scaling = LaplacianScaling::kMaxDegree;
};

struct ParamSpec {
  double alpha = 0.1;
  double beta = 0.05;
  double rho = 10.0;
  std::optional<double> eta = 0.5;  // empty means a seeded random schedule
};

struct NoiseSpec {
  double u_e = 0.0;
  double u_w = 0.0;
  double rate = 0.0;
};

struct ExperimentConfig {
  std::uint64_t seed = 0;
  int repeats = 1;
  std::vector<std::uint64_t> seeds;  // explicit per-repeat seeds, optional
  std::string output = "out";
  std::string label;
  int iterations = 1000;
  int stride = 1;
  bool lyapunov = false;
  double c_theta = 0.1;
  double gamma = 0.01;
  bool plot = false;
  ProblemSpec problem;
  NetworkSpec network;
  ParamSpec params;
  NoiseSpec noise;

  // Seed of repeat index rep: the explicit list if given, else derived.
  std::uint64_t run_seed(int rep) const;
};

// Reads the INI-style format documented in README.md. Unknown sections or
// keys, malformed values and a missing [run] seed are errors.
ExperimentConfig parse_config(std::istream& in,
                              const std::string& source = "<config>");
ExperimentConfig load_config(const std::string& path);

// Canonical text form; parse_config(write_config(c)) reproduces c.
void write_config(std::ostream& out, const ExperimentConfig& config);

// 64-bit FNV-1a over the canonical text with the output directory blanked,
// as 16 hex digits.
std::string config_hash(const ExperimentConfig& config);

}  // namespace dpp2

#endif  // DPP2_CONFIG_H_
