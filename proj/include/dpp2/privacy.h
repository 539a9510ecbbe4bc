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

#ifndef DPP2_PRIVACY_H_
#define DPP2_PRIVACY_H_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "dpp2/graph.h"
#include "dpp2/random.h"

namespace dpp2 {

// dim i.i.d. Laplace(scale) coordinates via the inverse CDF.
Eigen::VectorXd laplace_sample(double scale, int dim, RandomStream& stream);

// Per-node decaying Laplace scales: theta^k = r_i^k * u_i for each channel.
class NoiseSchedule {
 public:
  // No perturbation at all.
  static NoiseSchedule none(int nodes);
  // Every node uses u_e = u_w = u and rate r. u == 0 yields a zero schedule.
  static NoiseSchedule uniform(int nodes, double u, double r);
  static NoiseSchedule uniform(int nodes, double u_e, double u_w, double r);
  NoiseSchedule(std::vector<double> u_e, std::vector<double> u_w,
                std::vector<double> r);

  int nodes() const { return static_cast<int>(rates_.size()); }
  bool zero_noise() const { return zero_noise_; }

  double u_e(int i) const { return u_e_[i]; }
  double u_w(int i) const { return u_w_[i]; }
  double rate(int i) const { return rates_[i]; }
  // r_i^k * u_{e,i}; note 0^0 = 1, so r = 0 perturbs iteration 0 only.
  double scale_e(int i, int k) const;
  double scale_w(int i, int k) const;

  double u_bar() const;  // max_i max(u_e_i, u_w_i)
  double r_bar() const;  // max_i r_i

 private:
  NoiseSchedule() = default;
  std::vector<double> u_e_;
  std::vector<double> u_w_;
  std::vector<double> rates_;
  bool zero_noise_ = true;
};

// Perturbations for one iteration, one column per node.
struct NoiseDraw {
  NodeMatrix w;  // on the transmitted y
  NodeMatrix e;  // on the transmitted z
};

// Independent per-node streams split from one master seed.
class NoiseGenerator {
 public:
  NoiseGenerator(NoiseSchedule schedule, int dim, std::uint64_t master_seed);

  const NoiseSchedule& schedule() const { return schedule_; }
  NoiseDraw draw(int k);

 private:
  NoiseSchedule schedule_;
  int dim_;
  std::vector<RandomStream> streams_;
};

struct BudgetInputs {
  int horizon = 1;  // K
  int dim = 1;      // d
  double alpha = 0.0;
  double delta = 0.0;
  double max_smoothness = 0.0;  // M-bar
  double u_e = 0.0;
  double u_w = 0.0;
  double rate = 0.0;  // r
};

struct PrivacyReport {
  BudgetInputs inputs;
  // Accumulated epsilon; absent when alpha * M-bar >= 1 (bound is vacuous).
  std::optional<double> epsilon;
  std::optional<double> requested;
  bool feasible = false;
  std::string reason;
};

// sum_{k=1}^K sqrt(d) (1/(alpha u_e) + 1/u_w) alpha delta / (r^k (1 - alpha M)),
// evaluated as a geometric series. feasible means the bound exists and, when
// a budget is given, does not exceed it.
PrivacyReport dp_budget(const BudgetInputs& in,
                        std::optional<double> budget = std::nullopt);
// The same sum accumulated term by term. Used as a cross-check.
std::optional<double> dp_budget_termwise(const BudgetInputs& in);

void write_report(std::ostream& out, const PrivacyReport& report);

struct SelectionInputs {
  double epsilon = 0.0;
  double delta = 0.0;
  int dim = 1;
  double max_smoothness = 0.0;
  int horizon = 2;
  double u_w = 0.0;
  // Overrides the default u_e = 1.1 * sqrt(d) * M / epsilon. Must exceed
  // sqrt(d) * M / epsilon.
  std::optional<double> u_e;
};

struct DpSelection {
  SelectionInputs inputs;
  double u_e = 0.0;
  double alpha_max = 0.0;  // min{1/M, (eps - sqrt(d) M/u_e) / [delta (sqrt(d)/u_w + eps)]}
  double alpha = 0.0;      // 0.99 * alpha_max, the stepsize r is sized for
  double c_tilde = 0.0;
  // Lower end of the closed-form decay-rate interval ((c/eps)^{1/(K-1)}, 1).
  double formula_r_low = 1.0;
  // Smallest r with budget(r) <= eps, by bisection on the exact sum; empty
  // when even r -> 1 (budget = c K) exceeds eps.
  std::optional<double> certified_r_low;
  // Returned interval (r_low, 1) with r_low the larger of the two bounds.
  double r_low = 1.0;
  double r_high = 1.0;
  bool feasible = false;
  std::string reason;
};

DpSelection select_dp_parameters(const SelectionInputs& in);

void write_selection(std::ostream& out, const DpSelection& selection);

}  // namespace dpp2

#endif  // DPP2_PRIVACY_H_
