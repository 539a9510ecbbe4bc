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

#ifndef DPP2_VALIDATOR_H_
#define DPP2_VALIDATOR_H_

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "dpp2/algorithm.h"
#include "dpp2/graph.h"

namespace dpp2 {

// Theory parameters that do not appear in the iteration itself.
struct FreeConstants {
  double c_theta = 0.1;
  double gamma = 0.01;
};

struct Condition {
  std::string name;
  bool passed = false;
  std::string detail;
};

// Everything the convergence certificate is built from. Spectral inputs of G
// exclude the consensus eigenvalue alpha: lambda_bar_g = alpha - beta *
// lambda_min_positive(P) and lambda_g = alpha - beta * lambda_max(P).
struct DerivedConstants {
  // inputs
  double alpha = 0.0;
  double beta = 0.0;
  double rho = 0.0;
  double max_smoothness = 0.0;
  int nodes = 0;
  FreeConstants free;
  std::optional<double> pl_constant;
  double r_bar = 0.0;

  double lambda_bar_l = 0.0;
  double lambda_l = 0.0;
  double kappa_l = 0.0;
  double lambda_bar_g = 0.0;
  double lambda_g = 0.0;
  double kappa_g = 0.0;
  double c_alpha = 0.0;  // alpha / lambda_bar_g
  double theta = 0.0;    // c_theta * lambda_bar_g

  double xi[10] = {};  // xi[1] .. xi[9]; xi[0] unused
  double zeta1 = 0.0;
  double zeta2 = 0.0;
  double zeta3 = 0.0;
  double zeta4 = 0.0;
  double zeta5 = 0.0;
  std::optional<double> zeta6;
  std::optional<double> zeta;  // zeta6 / zeta4
  double d1 = 0.0;
  double d2 = 0.0;

  // Positivity margins that the descent certificate relies on.
  double primal_margin = 0.0;     // xi1 - xi2 * lambda_bar_g
  double dual_margin = 0.0;       // xi3 - xi4 * lambda_bar_g - xi5 * lambda_bar_g^2
  double gradient_margin = 0.0;   // xi6 - xi7 * alpha

  bool kappa_l_is_one = false;
  bool g_positive_definite = false;
  std::vector<Condition> conditions;

  bool all_feasible() const;
};

// Evaluates the certificate for (alpha, beta, rho) on this network. Advisory:
// every constant is computed even when conditions fail.
DerivedConstants validate_parameters(double alpha, double beta, double rho,
                                     const Network& network,
                                     double max_smoothness,
                                     const FreeConstants& free,
                                     std::optional<double> pl_constant = std::nullopt,
                                     double r_bar = 0.0);

DerivedConstants validate_parameters(const AlgoParams& params,
                                     const Network& network,
                                     const Problem& problem,
                                     const FreeConstants& free,
                                     double r_bar = 0.0);

struct CertifiedParameters {
  double alpha = 0.0;
  double beta = 0.0;
  double rho = 0.0;
  double c_alpha = 0.0;
  FreeConstants free;
};

// Grid search over (c_alpha, c_theta, gamma); rho and lambda_bar_g are then
// placed inside their admissible ranges and alpha, beta follow. Returns the
// candidate with the largest lambda_bar_g, or nothing when the network is
// disconnected.
std::optional<CertifiedParameters> design_certified_parameters(
    const Network& network, double max_smoothness, int grid = 9);

void write_constants(std::ostream& out, const DerivedConstants& c);

}  // namespace dpp2

#endif  // DPP2_VALIDATOR_H_
