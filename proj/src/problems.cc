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

#include "dpp2/problems.h"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <utility>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <fmt/format.h>

#include "dpp2/random.h"

namespace dpp2 {
namespace {

// log(1 + exp(t)) without overflow.
double softplus(double t) {
  return t > 0.0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t));
}

// 1 / (1 + exp(-t)) without overflow.
double sigmoid(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

class LogisticObjective final : public LocalObjective {
 public:
  LogisticObjective(Eigen::MatrixXd features, Eigen::VectorXd labels,
                    double lambda, double omega)
      : features_(std::move(features)),
        labels_(std::move(labels)),
        lambda_(lambda),
        omega_(omega) {
    const double m = static_cast<double>(features_.cols());
    smoothness_ =
        features_.colwise().squaredNorm().sum() / (4.0 * m) + 2.0 * lambda_ * omega_;
  }

  int dim() const override { return static_cast<int>(features_.rows()); }

  double value(const Eigen::VectorXd& x) const override {
    const Eigen::VectorXd margins =
        labels_.cwiseProduct(features_.transpose() * x);
    double loss = 0.0;
    for (Eigen::Index s = 0; s < margins.size(); ++s) loss += softplus(-margins(s));
    loss /= static_cast<double>(margins.size());
    double reg = 0.0;
    for (Eigen::Index t = 0; t < x.size(); ++t) {
      const double sq = omega_ * x(t) * x(t);
      reg += lambda_ * sq / (1.0 + sq);
    }
    return loss + reg;
  }

  Eigen::VectorXd gradient(const Eigen::VectorXd& x) const override {
    const Eigen::VectorXd margins =
        labels_.cwiseProduct(features_.transpose() * x);
    Eigen::VectorXd weights(margins.size());
    for (Eigen::Index s = 0; s < margins.size(); ++s) {
      weights(s) = -labels_(s) * sigmoid(-margins(s));
    }
    Eigen::VectorXd grad =
        features_ * weights / static_cast<double>(margins.size());
    for (Eigen::Index t = 0; t < x.size(); ++t) {
      const double denom = 1.0 + omega_ * x(t) * x(t);
      grad(t) += 2.0 * lambda_ * omega_ * x(t) / (denom * denom);
    }
    return grad;
  }

  double smoothness() const override { return smoothness_; }

 private:
  Eigen::MatrixXd features_;
  Eigen::VectorXd labels_;
  double lambda_;
  double omega_;
  double smoothness_ = 0.0;
};

class QuadraticObjective final : public LocalObjective {
 public:
  QuadraticObjective(Eigen::MatrixXd a, Eigen::VectorXd b)
      : a_(std::move(a)), b_(std::move(b)) {
    if (a_.rows() != b_.size()) {
      throw std::invalid_argument("quadratic: A and b row counts differ");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(
        a_.transpose() * a_, Eigen::EigenvaluesOnly);
    smoothness_ = std::max(0.0, solver.eigenvalues().maxCoeff());
  }

  int dim() const override { return static_cast<int>(a_.cols()); }
  double value(const Eigen::VectorXd& x) const override {
    return 0.5 * (a_ * x - b_).squaredNorm();
  }
  Eigen::VectorXd gradient(const Eigen::VectorXd& x) const override {
    return a_.transpose() * (a_ * x - b_);
  }
  double smoothness() const override { return smoothness_; }

 private:
  Eigen::MatrixXd a_;
  Eigen::VectorXd b_;
  double smoothness_ = 0.0;
};

}  // namespace

Problem::Problem(std::vector<std::shared_ptr<const LocalObjective>> locals,
                 std::string name)
    : locals_(std::move(locals)), name_(std::move(name)) {
  if (locals_.empty()) throw std::invalid_argument("problem has no nodes");
  dim_ = locals_.front()->dim();
  for (const auto& local : locals_) {
    if (local->dim() != dim_) {
      throw std::invalid_argument("local objectives disagree on dimension");
    }
    max_smoothness_ = std::max(max_smoothness_, local->smoothness());
  }
}

double Problem::excess(const Eigen::VectorXd& x) const {
  if (excess_) return excess_(x);
  if (!f_star_) throw std::logic_error("excess requires a known f*");
  return value(x) - *f_star_;
}

double Problem::value(const Eigen::VectorXd& x) const {
  double total = 0.0;
  for (const auto& local : locals_) total += local->value(x);
  return total;
}

Eigen::VectorXd Problem::gradient(const Eigen::VectorXd& x) const {
  Eigen::VectorXd total = Eigen::VectorXd::Zero(dim_);
  for (const auto& local : locals_) total += local->gradient(x);
  return total;
}

NodeMatrix Problem::local_gradients(const NodeMatrix& x) const {
  if (x.rows() != dim_ || x.cols() != nodes()) {
    throw std::invalid_argument("local_gradients: shape mismatch");
  }
  NodeMatrix out(dim_, nodes());
  for (int i = 0; i < nodes(); ++i) out.col(i) = locals_[i]->gradient(x.col(i));
  return out;
}

Dataset generate_dataset(int nodes, int dim, int samples, std::uint64_t seed,
                         double noise_std) {
  if (nodes <= 0 || dim <= 0 || samples <= 0) {
    throw std::invalid_argument("dataset sizes must be positive");
  }
  RandomStream planted(derive_seed(seed, 0));
  Eigen::VectorXd truth(dim);
  for (int t = 0; t < dim; ++t) truth(t) = planted.normal();

  Dataset data{nodes, dim, samples, {}, {}};
  for (int i = 0; i < nodes; ++i) {
    RandomStream stream(derive_seed(seed, static_cast<std::uint64_t>(i) + 1));
    Eigen::MatrixXd z(dim, samples);
    Eigen::VectorXd y(samples);
    for (int s = 0; s < samples; ++s) {
      for (int t = 0; t < dim; ++t) z(t, s) = stream.normal();
      const double score = z.col(s).dot(truth) + noise_std * stream.normal();
      y(s) = score >= 0.0 ? 1.0 : -1.0;
    }
    data.features.push_back(std::move(z));
    data.labels.push_back(std::move(y));
  }
  return data;
}

void write_dataset(std::ostream& out, const Dataset& data) {
  out << data.nodes << ' ' << data.dim << ' ' << data.samples << '\n';
  for (int i = 0; i < data.nodes; ++i) {
    for (int s = 0; s < data.samples; ++s) {
      out << i + 1 << ' ' << static_cast<int>(data.labels[i](s));
      for (int t = 0; t < data.dim; ++t) {
        out << ' ' << fmt::format("{:.17g}", data.features[i](t, s));
      }
      out << '\n';
    }
  }
}

Dataset read_dataset(std::istream& in) {
  Dataset data;
  if (!(in >> data.nodes >> data.dim >> data.samples) || data.nodes <= 0 ||
      data.dim <= 0 || data.samples <= 0) {
    throw std::invalid_argument("dataset header must be 'N d m' (positive)");
  }
  data.features.assign(data.nodes, Eigen::MatrixXd(data.dim, data.samples));
  data.labels.assign(data.nodes, Eigen::VectorXd(data.samples));
  std::vector<int> filled(data.nodes, 0);
  const long long rows = static_cast<long long>(data.nodes) * data.samples;
  for (long long r = 0; r < rows; ++r) {
    int node = 0;
    double label = 0.0;
    if (!(in >> node >> label)) {
      throw std::invalid_argument(fmt::format("dataset row {} truncated", r + 2));
    }
    if (node < 1 || node > data.nodes || filled[node - 1] >= data.samples) {
      throw std::invalid_argument(fmt::format("dataset row {}: bad node", r + 2));
    }
    if (label != 1.0 && label != -1.0) {
      throw std::invalid_argument(
          fmt::format("dataset row {}: label must be -1 or +1", r + 2));
    }
    const int i = node - 1;
    const int s = filled[i]++;
    data.labels[i](s) = label;
    for (int t = 0; t < data.dim; ++t) {
      if (!(in >> data.features[i](t, s))) {
        throw std::invalid_argument(
            fmt::format("dataset row {} truncated", r + 2));
      }
    }
  }
  return data;
}

Problem logistic_nonconvex(const Dataset& data, double lambda, double omega) {
  if (lambda < 0.0 || !(omega > 0.0)) {
    throw std::invalid_argument("logistic: need lambda >= 0 and omega > 0");
  }
  if (data.nodes <= 0 || data.features.size() != static_cast<size_t>(data.nodes)) {
    throw std::invalid_argument("logistic: dataset is empty");
  }
  std::vector<std::shared_ptr<const LocalObjective>> locals;
  for (int i = 0; i < data.nodes; ++i) {
    if (data.features[i].cols() == 0) {
      throw std::invalid_argument(
          fmt::format("logistic: node {} holds no samples", i + 1));
    }
    locals.push_back(std::make_shared<LogisticObjective>(
        data.features[i], data.labels[i], lambda, omega));
  }
  return Problem(std::move(locals), "logistic_nonconvex");
}

Problem quadratic_problem(std::vector<Eigen::MatrixXd> a,
                          std::vector<Eigen::VectorXd> b) {
  if (a.empty() || a.size() != b.size()) {
    throw std::invalid_argument("quadratic: need one (A_i, b_i) per node");
  }
  const Eigen::Index dim = a.front().cols();
  Eigen::MatrixXd hessian = Eigen::MatrixXd::Zero(dim, dim);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(dim);
  std::vector<std::shared_ptr<const LocalObjective>> locals;
  for (size_t i = 0; i < a.size(); ++i) {
    hessian += a[i].transpose() * a[i];
    rhs += a[i].transpose() * b[i];
    locals.push_back(std::make_shared<QuadraticObjective>(a[i], b[i]));
  }
  Problem problem(std::move(locals), "quadratic");

  // Minimum-norm minimizer through the eigendecomposition of the Hessian.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(hessian);
  const Eigen::VectorXd& eig = solver.eigenvalues();
  const double cutoff = 1e-10 * std::max(1.0, eig.cwiseAbs().maxCoeff());
  Eigen::VectorXd coeffs = solver.eigenvectors().transpose() * rhs;
  std::optional<double> nu;
  for (Eigen::Index k = 0; k < eig.size(); ++k) {
    if (eig(k) > cutoff) {
      coeffs(k) /= eig(k);
      if (!nu) nu = eig(k);
    } else {
      coeffs(k) = 0.0;
    }
  }
  const Eigen::VectorXd minimizer = solver.eigenvectors() * coeffs;
  problem.set_f_star(problem.value(minimizer));
  if (nu) problem.set_pl_constant(*nu);
  problem.set_excess([hessian, minimizer](const Eigen::VectorXd& x) {
    const Eigen::VectorXd delta = x - minimizer;
    return 0.5 * delta.dot(hessian * delta);
  });
  return problem;
}

Problem quadratic_pl(int nodes, int dim, int rank_deficit, std::uint64_t seed) {
  if (nodes <= 0 || dim <= 0) {
    throw std::invalid_argument("quadratic_pl: sizes must be positive");
  }
  if (rank_deficit < 0 || rank_deficit >= dim) {
    throw std::invalid_argument("quadratic_pl: need 0 <= rank_deficit < d");
  }
  RandomStream shared(derive_seed(seed, 0));
  Eigen::MatrixXd projector = Eigen::MatrixXd::Identity(dim, dim);
  if (rank_deficit > 0) {
    Eigen::MatrixXd basis(dim, rank_deficit);
    for (int c = 0; c < rank_deficit; ++c) {
      for (int r = 0; r < dim; ++r) basis(r, c) = shared.normal();
    }
    const Eigen::MatrixXd q =
        Eigen::HouseholderQR<Eigen::MatrixXd>(basis).householderQ() *
        Eigen::MatrixXd::Identity(dim, rank_deficit);
    projector -= q * q.transpose();
  }
  const double scale = 1.0 / std::sqrt(static_cast<double>(dim));
  std::vector<Eigen::MatrixXd> a;
  std::vector<Eigen::VectorXd> b;
  for (int i = 0; i < nodes; ++i) {
    RandomStream stream(derive_seed(seed, static_cast<std::uint64_t>(i) + 1));
    Eigen::MatrixXd ai(dim, dim);
    for (int c = 0; c < dim; ++c) {
      for (int r = 0; r < dim; ++r) ai(r, c) = scale * stream.normal();
    }
    ai = ai * projector;
    Eigen::VectorXd target(dim);
    for (int t = 0; t < dim; ++t) target(t) = stream.normal();
    b.push_back(ai * target);
    a.push_back(std::move(ai));
  }
  Problem problem = quadratic_problem(std::move(a), std::move(b));
  return problem;
}

}  // namespace dpp2
