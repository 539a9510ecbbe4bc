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

#ifndef DPP2_DIAGNOSTICS_H_
#define DPP2_DIAGNOSTICS_H_

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "dpp2/graph.h"
#include "dpp2/problems.h"
#include "dpp2/validator.h"

namespace dpp2 {

struct OptimalityGap {
  double total = 0.0;         // consensus + stationarity
  double consensus = 0.0;     // ||x - x_bar||^2
  double stationarity = 0.0;  // (1/N) ||sum_i grad_i||^2
};

// x and gradients are d x N (column per node).
OptimalityGap optimality_gap(const NodeMatrix& x, const NodeMatrix& gradients);

// Node average x_bar (length d).
Eigen::VectorXd node_average(const NodeMatrix& x);

// Dense evaluation of the Lyapunov function
//   V = 1/2 |x|_K^2 + 1/2 |s|^2_{(theta G + G Q / rho) K} + <x, theta/2 K s>
//       + f(x_bar) - f*,   s = q + grad f~(x_bar).
// Every weight matrix has the form A kron I_d, so only the N x N factors are
// stored and applied to the d x N state. Refuses N*d above kMaxDenseSize.
class LyapunovEvaluator {
 public:
  static constexpr int kMaxDenseSize = 4096;

  LyapunovEvaluator(const Network& network, const Problem& problem,
                    const DerivedConstants& constants);

  struct Terms {
    double primal = 0.0;     // 1/2 |x|_K^2
    double dual = 0.0;       // 1/2 |s|^2_{(theta G + G Q / rho) K}
    double cross = 0.0;      // <x, theta/2 K s>
    double objective = 0.0;  // f(x_bar) - f_star
    double total = 0.0;
    double x_k_sq = 0.0;     // |x|_K^2
    double s_k_sq = 0.0;     // |s|_K^2
    // |x|_K^2 + |s|_K^2 + f(x_bar) - f*, the quantity V is sandwiched by.
    double v_hat() const { return x_k_sq + s_k_sq + objective; }
  };

  // f_star is the optimum or a surrogate lower estimate.
  Terms evaluate(const NodeMatrix& x, const NodeMatrix& q, double f_star) const;
  // Uses Problem::excess for the objective term (requires a known f*).
  Terms evaluate_exact(const NodeMatrix& x, const NodeMatrix& q) const;

  const Eigen::MatrixXd& projector() const { return k_; }       // I - 11^T/N
  const Eigen::MatrixXd& averager() const { return j_; }        // 11^T/N
  const Eigen::MatrixXd& mixing() const { return g_; }          // alpha I - beta P
  const Eigen::MatrixXd& pseudo_inverse() const { return q_; }  // P^+
  const Eigen::MatrixXd& dual_weight() const { return dual_weight_; }

 private:
  Terms evaluate_quadratic(const NodeMatrix& x, const NodeMatrix& q) const;

  const Problem* problem_;
  double theta_;
  Eigen::MatrixXd k_;
  Eigen::MatrixXd j_;
  Eigen::MatrixXd g_;
  Eigen::MatrixXd q_;
  Eigen::MatrixXd dual_weight_;
};

// Moore-Penrose pseudo-inverse of a symmetric PSD matrix; eigenvalues below
// cutoff are treated as zero.
Eigen::MatrixXd symmetric_pseudo_inverse(const Eigen::MatrixXd& a,
                                         double cutoff = 1e-10);

struct TraceRow {
  int k = 0;
  double w_hat = 0.0;
  double consensus = 0.0;
  double stationarity = 0.0;
  double objective = 0.0;              // f(x_bar)
  std::optional<double> excess;        // f(x_bar) - f*, when f* is known
  std::optional<double> lyapunov;      // V (or surrogate V)
  std::optional<double> descent_residual;  // V^{k+1} - V^k - (D1|w^k|^2 + D2|e^k|^2)
  std::optional<double> w_sq;          // |w^k|^2 used in the step k -> k+1
  std::optional<double> e_sq;
};

struct Trace {
  std::vector<std::pair<std::string, std::string>> metadata;
  bool lyapunov_surrogate = false;
  std::vector<TraceRow> rows;

  void set_meta(const std::string& key, const std::string& value);
  std::optional<std::string> meta(const std::string& key) const;
};

// Fixed column order:
//   k,W_hat,consensus,stationarity,objective,excess,V|V_surrogate,
//   descent_residual,w_sq,e_sq
// preceded by "# key: value" metadata lines. Missing values are empty fields.
void write_trace_csv(std::ostream& out, const Trace& trace);
Trace read_trace_csv(std::istream& in);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  int points = 0;
  int first_k = 0;
  int last_k = 0;
};

// Ordinary least squares of ys on xs.
LineFit least_squares_line(std::span<const double> xs, std::span<const double> ys);

enum class RateMode { kSublinear, kLinear };

struct RateFitOptions {
  int burn_in = 0;                 // first k included
  std::optional<int> last;         // last k included
  double floor = 1e-300;           // fit stops before the metric reaches this
  int min_points = 50;
};

// Sublinear: slope of log(cumulative mean of W_hat) against log k; the trace
// must be recorded at every iteration. Linear: slope of
// log(consensus + excess) against k over the pre-floor prefix.
LineFit rate_fit(const Trace& trace, RateMode mode,
                 const RateFitOptions& options = {});

// Fits log(metric) directly on a raw series (k ascending): against log k in
// sublinear mode, against k in linear mode. The caller supplies the already
// averaged or combined metric.
LineFit rate_fit(std::span<const int> ks, std::span<const double> metric,
                 RateMode mode, const RateFitOptions& options = {});

void write_fit(std::ostream& out, const LineFit& fit, RateMode mode);

}  // namespace dpp2

#endif  // DPP2_DIAGNOSTICS_H_
