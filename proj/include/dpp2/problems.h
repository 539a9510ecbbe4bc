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

#ifndef DPP2_PROBLEMS_H_
#define DPP2_PROBLEMS_H_

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "dpp2/graph.h"

namespace dpp2 {

// Smooth local objective f_i held privately by one node.
class LocalObjective {
 public:
  virtual ~LocalObjective() = default;
  virtual int dim() const = 0;
  virtual double value(const Eigen::VectorXd& x) const = 0;
  virtual Eigen::VectorXd gradient(const Eigen::VectorXd& x) const = 0;
  // Lipschitz constant of the gradient.
  virtual double smoothness() const = 0;
};

// Sum-utility problem f(x) = sum_i f_i(x) over N nodes.
class Problem {
 public:
  Problem(std::vector<std::shared_ptr<const LocalObjective>> locals,
          std::string name);

  const std::string& name() const { return name_; }
  int nodes() const { return static_cast<int>(locals_.size()); }
  int dim() const { return dim_; }
  const LocalObjective& local(int i) const { return *locals_[i]; }

  double smoothness(int i) const { return locals_[i]->smoothness(); }
  double max_smoothness() const { return max_smoothness_; }

  std::optional<double> pl_constant() const { return pl_constant_; }
  std::optional<double> f_star() const { return f_star_; }
  void set_pl_constant(double nu) { pl_constant_ = nu; }
  void set_f_star(double f_star) { f_star_ = f_star; }

  // Exact f(x) - f*, free of the cancellation in value(x) - f_star. Only set
  // for instances where the suboptimality has a closed form.
  void set_excess(std::function<double(const Eigen::VectorXd&)> excess) {
    excess_ = std::move(excess);
  }
  // f(x) - f_star using the closed form when present. Requires f_star.
  double excess(const Eigen::VectorXd& x) const;

  // Global objective and gradient at a single point.
  double value(const Eigen::VectorXd& x) const;
  Eigen::VectorXd gradient(const Eigen::VectorXd& x) const;

  // Per-node gradients at per-node points: column i is grad f_i(x.col(i)).
  NodeMatrix local_gradients(const NodeMatrix& x) const;

 private:
  std::vector<std::shared_ptr<const LocalObjective>> locals_;
  std::string name_;
  int dim_ = 0;
  double max_smoothness_ = 0.0;
  std::optional<double> pl_constant_;
  std::optional<double> f_star_;
  std::function<double(const Eigen::VectorXd&)> excess_;
};

// Binary classification samples split across nodes.
struct Dataset {
  int nodes = 0;
  int dim = 0;
  int samples = 0;  // per node
  // features[i] is d x m (column s is z_is); labels[i] has m entries in {-1,+1}.
  std::vector<Eigen::MatrixXd> features;
  std::vector<Eigen::VectorXd> labels;
};

// Gaussian features and labels from a planted linear model with Gaussian
// label noise: y = sign(z^T w* + noise_std * n).
Dataset generate_dataset(int nodes, int dim, int samples, std::uint64_t seed,
                         double noise_std = 1.0);

// Columnar text: header "N d m", then one "node label z_1 ... z_d" row per
// sample with 1-based node index.
void write_dataset(std::ostream& out, const Dataset& data);
Dataset read_dataset(std::istream& in);

// f_i(x) = (1/m) sum_s log(1 + exp(-y_is x^T z_is))
//          + sum_t lambda*omega*x_t^2 / (1 + omega*x_t^2).
Problem logistic_nonconvex(const Dataset& data, double lambda, double omega);

// f_i(x) = 0.5 ||A_i x - b_i||^2 for explicit data.
Problem quadratic_problem(std::vector<Eigen::MatrixXd> a,
                          std::vector<Eigen::VectorXd> b);

// Random least-squares instance satisfying the P-L condition. A_i is d x d
// Gaussian scaled by 1/sqrt(d); b_i = A_i x_i* for per-node x_i*. With
// rank_deficit > 0 a shared subspace of that dimension is projected out of
// every A_i, so the global Hessian is singular.
Problem quadratic_pl(int nodes, int dim, int rank_deficit, std::uint64_t seed);

}  // namespace dpp2

#endif  // DPP2_PROBLEMS_H_
