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

#include "dpp2/privacy.h"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <utility>

#include <fmt/format.h>

namespace dpp2 {

Eigen::VectorXd laplace_sample(double scale, int dim, RandomStream& stream) {
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw std::invalid_argument(
        fmt::format("Laplace scale must be positive, got {}", scale));
  }
  Eigen::VectorXd out(dim);
  for (int t = 0; t < dim; ++t) {
    const double u = stream.uniform() - 0.5;
    const double magnitude = -scale * std::log1p(-2.0 * std::abs(u));
    out(t) = u < 0.0 ? -magnitude : magnitude;
  }
  return out;
}

NoiseSchedule NoiseSchedule::none(int nodes) {
  NoiseSchedule s;
  s.u_e_.assign(nodes, 0.0);
  s.u_w_.assign(nodes, 0.0);
  s.rates_.assign(nodes, 0.0);
  s.zero_noise_ = true;
  return s;
}

NoiseSchedule NoiseSchedule::uniform(int nodes, double u, double r) {
  return uniform(nodes, u, u, r);
}

NoiseSchedule NoiseSchedule::uniform(int nodes, double u_e, double u_w,
                                     double r) {
  if (u_e == 0.0 && u_w == 0.0) return none(nodes);
  return NoiseSchedule(std::vector<double>(nodes, u_e),
                       std::vector<double>(nodes, u_w),
                       std::vector<double>(nodes, r));
}

NoiseSchedule::NoiseSchedule(std::vector<double> u_e, std::vector<double> u_w,
                             std::vector<double> r)
    : u_e_(std::move(u_e)), u_w_(std::move(u_w)), rates_(std::move(r)) {
  if (u_e_.size() != rates_.size() || u_w_.size() != rates_.size()) {
    throw std::invalid_argument("noise schedule: per-node sizes differ");
  }
  zero_noise_ = true;
  for (size_t i = 0; i < rates_.size(); ++i) {
    if (u_e_[i] < 0.0 || u_w_[i] < 0.0) {
      throw std::invalid_argument("noise schedule: scales must be >= 0");
    }
    // r = 0 is admitted as the degenerate "perturb only at k = 0" schedule.
    if (rates_[i] < 0.0 || rates_[i] >= 1.0) {
      throw std::invalid_argument(
          fmt::format("noise schedule: decay rate {} outside [0, 1)", rates_[i]));
    }
    if (u_e_[i] > 0.0 || u_w_[i] > 0.0) zero_noise_ = false;
  }
}

double NoiseSchedule::scale_e(int i, int k) const {
  return std::pow(rates_[i], k) * u_e_[i];
}

double NoiseSchedule::scale_w(int i, int k) const {
  return std::pow(rates_[i], k) * u_w_[i];
}

double NoiseSchedule::u_bar() const {
  double best = 0.0;
  for (size_t i = 0; i < rates_.size(); ++i) {
    best = std::max({best, u_e_[i], u_w_[i]});
  }
  return best;
}

double NoiseSchedule::r_bar() const {
  return rates_.empty() ? 0.0 : *std::max_element(rates_.begin(), rates_.end());
}

NoiseGenerator::NoiseGenerator(NoiseSchedule schedule, int dim,
                               std::uint64_t master_seed)
    : schedule_(std::move(schedule)), dim_(dim) {
  streams_.reserve(schedule_.nodes());
  for (int i = 0; i < schedule_.nodes(); ++i) {
    streams_.emplace_back(derive_seed(master_seed, static_cast<std::uint64_t>(i)));
  }
}

NoiseDraw NoiseGenerator::draw(int k) {
  const int n = schedule_.nodes();
  NoiseDraw out{NodeMatrix::Zero(dim_, n), NodeMatrix::Zero(dim_, n)};
  if (schedule_.zero_noise()) return out;
  for (int i = 0; i < n; ++i) {
    const double sw = schedule_.scale_w(i, k);
    const double se = schedule_.scale_e(i, k);
    if (sw > 0.0) out.w.col(i) = laplace_sample(sw, dim_, streams_[i]);
    if (se > 0.0) out.e.col(i) = laplace_sample(se, dim_, streams_[i]);
  }
  return out;
}

namespace {

void check_budget_inputs(const BudgetInputs& in) {
  if (in.horizon < 1) throw std::invalid_argument("dp_budget: K must be >= 1");
  if (in.dim < 1) throw std::invalid_argument("dp_budget: d must be >= 1");
  if (!(in.alpha > 0.0)) throw std::invalid_argument("dp_budget: alpha must be > 0");
  if (!(in.delta > 0.0)) throw std::invalid_argument("dp_budget: delta must be > 0");
  if (in.max_smoothness < 0.0) {
    throw std::invalid_argument("dp_budget: M must be >= 0");
  }
  if (!(in.u_e > 0.0) || !(in.u_w > 0.0)) {
    throw std::invalid_argument("dp_budget: u_e and u_w must be > 0");
  }
  if (!(in.rate > 0.0 && in.rate < 1.0)) {
    throw std::invalid_argument("dp_budget: r must lie in (0, 1)");
  }
}

// sqrt(d) (1/(alpha u_e) + 1/u_w) alpha delta / (1 - alpha M).
double per_round_coefficient(const BudgetInputs& in) {
  return std::sqrt(static_cast<double>(in.dim)) *
         (1.0 / (in.alpha * in.u_e) + 1.0 / in.u_w) * in.alpha * in.delta /
         (1.0 - in.alpha * in.max_smoothness);
}

// sum_{k=1}^K r^{-k} = (r^{-K} - 1) / (1 - r).
double inverse_power_sum(double r, int horizon) {
  return std::expm1(-static_cast<double>(horizon) * std::log(r)) / (1.0 - r);
}

}  // namespace

PrivacyReport dp_budget(const BudgetInputs& in, std::optional<double> budget) {
  check_budget_inputs(in);
  PrivacyReport report;
  report.inputs = in;
  report.requested = budget;
  if (in.alpha * in.max_smoothness >= 1.0) {
    report.feasible = false;
    report.reason = "alpha * M >= 1: the privacy bound is vacuous";
    return report;
  }
  report.epsilon = per_round_coefficient(in) * inverse_power_sum(in.rate, in.horizon);
  if (!std::isfinite(*report.epsilon)) {
    report.feasible = false;
    report.reason = "budget overflows";
  } else if (budget && *report.epsilon > *budget) {
    report.feasible = false;
    report.reason = "accumulated epsilon exceeds the requested budget";
  } else {
    report.feasible = true;
  }
  return report;
}

std::optional<double> dp_budget_termwise(const BudgetInputs& in) {
  check_budget_inputs(in);
  if (in.alpha * in.max_smoothness >= 1.0) return std::nullopt;
  const double root_d = std::sqrt(static_cast<double>(in.dim));
  double total = 0.0;
  for (int k = 1; k <= in.horizon; ++k) {
    total += root_d * (1.0 / (in.alpha * in.u_e) + 1.0 / in.u_w) * in.alpha *
             in.delta / (std::pow(in.rate, k) * (1.0 - in.alpha * in.max_smoothness));
  }
  return total;
}

void write_report(std::ostream& out, const PrivacyReport& report) {
  const BudgetInputs& in = report.inputs;
  out << "[privacy_report]\n";
  out << fmt::format("K = {}\nd = {}\nalpha = {:.17g}\ndelta = {:.17g}\n",
                     in.horizon, in.dim, in.alpha, in.delta);
  out << fmt::format("M_bar = {:.17g}\nu_e = {:.17g}\nu_w = {:.17g}\nr = {:.17g}\n",
                     in.max_smoothness, in.u_e, in.u_w, in.rate);
  if (report.requested) {
    out << fmt::format("requested_epsilon = {:.17g}\n", *report.requested);
  }
  if (report.epsilon) {
    out << fmt::format("epsilon = {:.15g}\n", *report.epsilon);
  } else {
    out << "epsilon = none\n";
  }
  out << "feasible = " << (report.feasible ? "true" : "false") << '\n';
  if (!report.reason.empty()) out << "reason = " << report.reason << '\n';
}

DpSelection select_dp_parameters(const SelectionInputs& in) {
  if (!(in.epsilon > 0.0) || !(in.delta > 0.0) || !(in.u_w > 0.0) ||
      !(in.max_smoothness > 0.0) || in.dim < 1) {
    throw std::invalid_argument(
        "dp_select: epsilon, delta, u_w, M must be > 0 and d >= 1");
  }
  if (in.horizon < 2) throw std::invalid_argument("dp_select: K must be >= 2");

  DpSelection sel;
  sel.inputs = in;
  sel.r_high = 1.0;
  const double root_d = std::sqrt(static_cast<double>(in.dim));
  const double u_e_floor = root_d * in.max_smoothness / in.epsilon;
  if (in.u_e && !(*in.u_e > u_e_floor)) {
    sel.reason = fmt::format("u_e must exceed sqrt(d) M / epsilon = {:.6g}", u_e_floor);
    return sel;
  }
  sel.u_e = in.u_e.value_or(1.1 * u_e_floor);

  const double alpha_cap = (in.epsilon - root_d * in.max_smoothness / sel.u_e) /
                           (in.delta * (root_d / in.u_w + in.epsilon));
  sel.alpha_max = std::min(1.0 / in.max_smoothness, alpha_cap);
  if (!(sel.alpha_max > 0.0)) {
    sel.reason = "epsilon too small: no positive stepsize satisfies the bound";
    return sel;
  }
  sel.alpha = 0.99 * sel.alpha_max;

  BudgetInputs probe{in.horizon, in.dim,  sel.alpha, in.delta,
                     in.max_smoothness, sel.u_e, in.u_w, 0.5};
  sel.c_tilde = per_round_coefficient(probe);
  sel.formula_r_low =
      std::pow(sel.c_tilde / in.epsilon, 1.0 / static_cast<double>(in.horizon - 1));

  // budget(r) = c * sum_k r^{-k} decreases to c * K as r -> 1.
  if (sel.c_tilde * static_cast<double>(in.horizon) < in.epsilon) {
    double lo = 0.0;
    double hi = 1.0;
    for (int iter = 0; iter < 200; ++iter) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      if (sel.c_tilde * inverse_power_sum(mid, in.horizon) <= in.epsilon) {
        hi = mid;
      } else {
        lo = mid;
      }
    }
    sel.certified_r_low = hi;
  }

  sel.r_low = std::max(sel.formula_r_low, sel.certified_r_low.value_or(1.0));
  sel.feasible = sel.certified_r_low.has_value() && sel.r_low < 1.0;
  if (!sel.feasible) {
    sel.reason = fmt::format(
        "no decay rate in (0, 1) meets epsilon: even r -> 1 costs c*K = {:.6g}",
        sel.c_tilde * in.horizon);
  }
  return sel;
}

void write_selection(std::ostream& out, const DpSelection& sel) {
  const SelectionInputs& in = sel.inputs;
  out << "[dp_selection]\n";
  out << fmt::format("epsilon = {:.17g}\ndelta = {:.17g}\nd = {}\nM_bar = {:.17g}\n",
                     in.epsilon, in.delta, in.dim, in.max_smoothness);
  out << fmt::format("K = {}\nu_w = {:.17g}\n", in.horizon, in.u_w);
  out << fmt::format("u_e = {:.17g}\nalpha_max = {:.17g}\nalpha = {:.17g}\n",
                     sel.u_e, sel.alpha_max, sel.alpha);
  out << fmt::format("c_tilde = {:.17g}\nformula_r_low = {:.17g}\n", sel.c_tilde,
                     sel.formula_r_low);
  if (sel.certified_r_low) {
    out << fmt::format("certified_r_low = {:.17g}\n", *sel.certified_r_low);
  } else {
    out << "certified_r_low = none\n";
  }
  out << fmt::format("r_interval = ({:.17g}, {:.17g})\n", sel.r_low, sel.r_high);
  out << "feasible = " << (sel.feasible ? "true" : "false") << '\n';
  if (!sel.reason.empty()) out << "reason = " << sel.reason << '\n';
}

}  // namespace dpp2
