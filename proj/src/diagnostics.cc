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

#include "dpp2/diagnostics.h"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <fmt/format.h>

namespace dpp2 {
namespace {

// <X, Y> for the d x N layout under the weight A kron I_d: trace(X A Y^T).
double weighted_inner(const NodeMatrix& x, const Eigen::MatrixXd& a,
                      const NodeMatrix& y) {
  return (x.cwiseProduct(y * a)).sum();
}

std::string format_optional(const std::optional<double>& v) {
  return v ? fmt::format("{:.17g}", *v) : std::string();
}

std::optional<double> parse_optional(const std::string& field, int line) {
  if (field.empty()) return std::nullopt;
  try {
    size_t used = 0;
    const double v = std::stod(field, &used);
    if (used != field.size()) throw std::invalid_argument(field);
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument(
        fmt::format("trace line {}: '{}' is not a number", line, field));
  }
}

}  // namespace

Eigen::VectorXd node_average(const NodeMatrix& x) { return x.rowwise().mean(); }

OptimalityGap optimality_gap(const NodeMatrix& x, const NodeMatrix& gradients) {
  if (x.rows() != gradients.rows() || x.cols() != gradients.cols()) {
    throw std::invalid_argument("optimality_gap: shape mismatch");
  }
  OptimalityGap gap;
  const Eigen::VectorXd mean = node_average(x);
  gap.consensus = (x.colwise() - mean).squaredNorm();
  gap.stationarity =
      gradients.rowwise().sum().squaredNorm() / static_cast<double>(x.cols());
  gap.total = gap.consensus + gap.stationarity;
  return gap;
}

Eigen::MatrixXd symmetric_pseudo_inverse(const Eigen::MatrixXd& a, double cutoff) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a);
  Eigen::VectorXd inv = solver.eigenvalues();
  for (Eigen::Index i = 0; i < inv.size(); ++i) {
    inv(i) = std::abs(inv(i)) < cutoff ? 0.0 : 1.0 / inv(i);
  }
  return solver.eigenvectors() * inv.asDiagonal() * solver.eigenvectors().transpose();
}

LyapunovEvaluator::LyapunovEvaluator(const Network& network,
                                     const Problem& problem,
                                     const DerivedConstants& constants)
    : problem_(&problem), theta_(constants.theta) {
  const int n = network.size();
  if (static_cast<long long>(n) * problem.dim() > kMaxDenseSize) {
    throw std::invalid_argument(fmt::format(
        "dense Lyapunov analysis is limited to N*d <= {} (got {}*{})",
        kMaxDenseSize, n, problem.dim()));
  }
  if (n != problem.nodes()) {
    throw std::invalid_argument("network and problem disagree on N");
  }
  j_ = Eigen::MatrixXd::Constant(n, n, 1.0 / n);
  k_ = Eigen::MatrixXd::Identity(n, n) - j_;
  const Eigen::MatrixXd& p = network.weights();
  g_ = constants.alpha * Eigen::MatrixXd::Identity(n, n) - constants.beta * p;
  q_ = symmetric_pseudo_inverse(p);
  dual_weight_ = (theta_ * g_ + g_ * q_ / constants.rho) * k_;
  // G, Q and K commute; symmetrize away round-off.
  dual_weight_ = 0.5 * (dual_weight_ + dual_weight_.transpose()).eval();
}

LyapunovEvaluator::Terms LyapunovEvaluator::evaluate_quadratic(
    const NodeMatrix& x, const NodeMatrix& q) const {
  const Eigen::VectorXd mean = node_average(x);
  NodeMatrix s = q;
  for (Eigen::Index i = 0; i < s.cols(); ++i) {
    s.col(i) += problem_->local(static_cast<int>(i)).gradient(mean);
  }
  Terms t;
  t.x_k_sq = weighted_inner(x, k_, x);
  t.s_k_sq = weighted_inner(s, k_, s);
  t.primal = 0.5 * t.x_k_sq;
  t.dual = 0.5 * weighted_inner(s, dual_weight_, s);
  t.cross = 0.5 * theta_ * weighted_inner(x, k_, s);
  return t;
}

LyapunovEvaluator::Terms LyapunovEvaluator::evaluate(const NodeMatrix& x,
                                                     const NodeMatrix& q,
                                                     double f_star) const {
  Terms t = evaluate_quadratic(x, q);
  t.objective = problem_->value(node_average(x)) - f_star;
  t.total = t.primal + t.dual + t.cross + t.objective;
  return t;
}

LyapunovEvaluator::Terms LyapunovEvaluator::evaluate_exact(
    const NodeMatrix& x, const NodeMatrix& q) const {
  Terms t = evaluate_quadratic(x, q);
  t.objective = problem_->excess(node_average(x));
  t.total = t.primal + t.dual + t.cross + t.objective;
  return t;
}

void Trace::set_meta(const std::string& key, const std::string& value) {
  for (auto& [k, v] : metadata) {
    if (k == key) {
      v = value;
      return;
    }
  }
  metadata.emplace_back(key, value);
}

std::optional<std::string> Trace::meta(const std::string& key) const {
  for (const auto& [k, v] : metadata) {
    if (k == key) return v;
  }
  return std::nullopt;
}

void write_trace_csv(std::ostream& out, const Trace& trace) {
  for (const auto& [key, value] : trace.metadata) {
    out << "# " << key << ": " << value << '\n';
  }
  out << "k,W_hat,consensus,stationarity,objective,excess,"
      << (trace.lyapunov_surrogate ? "V_surrogate" : "V")
      << ",descent_residual,w_sq,e_sq\n";
  for (const TraceRow& r : trace.rows) {
    out << fmt::format("{},{:.17g},{:.17g},{:.17g},{:.17g},{},{},{},{},{}\n", r.k,
                       r.w_hat, r.consensus, r.stationarity, r.objective,
                       format_optional(r.excess), format_optional(r.lyapunov),
                       format_optional(r.descent_residual),
                       format_optional(r.w_sq), format_optional(r.e_sq));
  }
}

Trace read_trace_csv(std::istream& in) {
  Trace trace;
  std::string line;
  int line_number = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto colon = line.find(':');
      if (colon != std::string::npos) {
        const std::string key = line.substr(2, colon - 2);
        std::string value = line.substr(colon + 1);
        if (!value.empty() && value[0] == ' ') value.erase(0, 1);
        trace.metadata.emplace_back(key, value);
      }
      continue;
    }
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    if (!have_header) {
      if (fields.size() != 10 || fields[0] != "k") {
        throw std::invalid_argument(
            fmt::format("trace line {}: unexpected header", line_number));
      }
      trace.lyapunov_surrogate = fields[6] == "V_surrogate";
      have_header = true;
      continue;
    }
    if (fields.size() != 10) {
      throw std::invalid_argument(
          fmt::format("trace line {}: expected 10 fields, got {}", line_number,
                      fields.size()));
    }
    TraceRow r;
    r.k = static_cast<int>(*parse_optional(fields[0], line_number));
    r.w_hat = parse_optional(fields[1], line_number).value_or(0.0);
    r.consensus = parse_optional(fields[2], line_number).value_or(0.0);
    r.stationarity = parse_optional(fields[3], line_number).value_or(0.0);
    r.objective = parse_optional(fields[4], line_number).value_or(0.0);
    r.excess = parse_optional(fields[5], line_number);
    r.lyapunov = parse_optional(fields[6], line_number);
    r.descent_residual = parse_optional(fields[7], line_number);
    r.w_sq = parse_optional(fields[8], line_number);
    r.e_sq = parse_optional(fields[9], line_number);
    trace.rows.push_back(r);
  }
  if (!have_header) throw std::invalid_argument("trace has no header row");
  return trace;
}

LineFit least_squares_line(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size() || xs.size() < 2) {
    throw std::invalid_argument("line fit needs at least two paired points");
  }
  const double n = static_cast<double>(xs.size());
  double mx = 0.0;
  double my = 0.0;
  for (size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  LineFit fit;
  fit.points = static_cast<int>(xs.size());
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r_squared = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return fit;
}

LineFit rate_fit(std::span<const int> ks, std::span<const double> metric,
                 RateMode mode, const RateFitOptions& options) {
  if (ks.size() != metric.size()) {
    throw std::invalid_argument("rate_fit: series lengths differ");
  }
  std::vector<double> xs;
  std::vector<double> ys;
  std::vector<int> used;
  int eligible = 0;
  bool floored = false;
  for (size_t i = 0; i < ks.size(); ++i) {
    const int k = ks[i];
    if (k < options.burn_in || (options.last && k > *options.last)) continue;
    if (mode == RateMode::kSublinear && k < 1) continue;
    ++eligible;
    if (floored) continue;
    if (!(metric[i] > options.floor)) {
      floored = true;
      continue;
    }
    xs.push_back(mode == RateMode::kSublinear ? std::log(static_cast<double>(k))
                                              : static_cast<double>(k));
    ys.push_back(std::log(metric[i]));
    used.push_back(k);
  }
  if (eligible < options.min_points) {
    throw std::invalid_argument(fmt::format(
        "rate_fit: {} points past burn-in, need at least {}", eligible,
        options.min_points));
  }
  if (xs.size() < 3) {
    throw std::invalid_argument("rate_fit: fewer than 3 points above the floor");
  }
  LineFit fit = least_squares_line(xs, ys);
  fit.first_k = used.front();
  fit.last_k = used.back();
  return fit;
}

LineFit rate_fit(const Trace& trace, RateMode mode, const RateFitOptions& options) {
  std::vector<int> ks;
  std::vector<double> metric;
  ks.reserve(trace.rows.size());
  metric.reserve(trace.rows.size());
  if (mode == RateMode::kSublinear) {
    double running = 0.0;
    for (size_t i = 0; i < trace.rows.size(); ++i) {
      const TraceRow& r = trace.rows[i];
      if (r.k != static_cast<int>(i)) {
        throw std::invalid_argument(
            "sublinear rate_fit needs a trace recorded at every iteration");
      }
      running += r.w_hat;
      ks.push_back(r.k);
      metric.push_back(running / static_cast<double>(r.k + 1));
    }
  } else {
    for (const TraceRow& r : trace.rows) {
      if (!r.excess) {
        throw std::invalid_argument("linear rate_fit needs f(x_bar) - f* in the trace");
      }
      ks.push_back(r.k);
      metric.push_back(r.consensus + *r.excess);
    }
  }
  return rate_fit(ks, metric, mode, options);
}

void write_fit(std::ostream& out, const LineFit& fit, RateMode mode) {
  out << "[rate_fit]\n";
  out << "mode = " << (mode == RateMode::kSublinear ? "sublinear" : "linear") << '\n';
  out << fmt::format("slope = {:.10g}\nintercept = {:.10g}\nr_squared = {:.10g}\n",
                     fit.slope, fit.intercept, fit.r_squared);
  out << fmt::format("points = {}\nfirst_k = {}\nlast_k = {}\n", fit.points,
                     fit.first_k, fit.last_k);
}

}  // namespace dpp2
