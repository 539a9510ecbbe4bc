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

#include "dpp2/algorithm.h"

#include <fmt/format.h>

#include "dpp2/random.h"

namespace dpp2 {
namespace {

void check_gradients(const NodeMatrix& grads, int iteration) {
  for (Eigen::Index i = 0; i < grads.cols(); ++i) {
    if (!grads.col(i).allFinite()) {
      throw NumericalError(
          static_cast<int>(i), iteration,
          fmt::format("non-finite gradient at node {} in iteration {}", i + 1,
                      iteration));
    }
  }
}

void check_shapes(const NodeMatrix& x, const Network& network,
                  const Problem& problem) {
  if (network.size() != problem.nodes() || x.cols() != problem.nodes() ||
      x.rows() != problem.dim()) {
    throw std::invalid_argument(fmt::format(
        "state is {}x{}, network has {} nodes, problem is {} nodes x dim {}",
        x.rows(), x.cols(), network.size(), problem.nodes(), problem.dim()));
  }
}

}  // namespace

EtaSchedule EtaSchedule::constant(double eta) {
  if (!(eta > 0.0 && eta < 1.0)) {
    throw std::invalid_argument(fmt::format("eta {} must lie in (0, 1)", eta));
  }
  return EtaSchedule(false, eta, 0);
}

EtaSchedule EtaSchedule::random(std::uint64_t seed) {
  return EtaSchedule(true, 0.5, seed);
}

double EtaSchedule::at(int k) const {
  if (!random_) return value_;
  RandomStream stream(derive_seed(seed_, static_cast<std::uint64_t>(k)));
  return stream.uniform();
}

AlgState initial_state(const Problem& problem, const NodeMatrix& x0) {
  const int d = problem.dim();
  const int n = problem.nodes();
  AlgState s;
  s.k = 0;
  if (x0.size() == 0) {
    s.x = NodeMatrix::Zero(d, n);
  } else {
    if (x0.rows() != d || x0.cols() != n) {
      throw std::invalid_argument("initial point has the wrong shape");
    }
    s.x = x0;
  }
  s.d = NodeMatrix::Zero(d, n);
  s.q = NodeMatrix::Zero(d, n);
  s.y = NodeMatrix::Zero(d, n);
  s.z = NodeMatrix::Zero(d, n);
  return s;
}

AlgState step(const AlgState& state, const AlgoParams& params,
              const Network& network, const Problem& problem,
              const NoiseDraw& noise) {
  check_shapes(state.x, network, problem);
  const double eta = params.eta.at(state.k);
  const NodeMatrix grads = problem.local_gradients(state.x);
  check_gradients(grads, state.k);

  AlgState next;
  next.k = state.k + 1;
  next.y = state.x + (1.0 - eta) * state.d + noise.w;
  // One aggregation of the neighbours' y feeds both z and q.
  const NodeMatrix mixed_y = network.apply(next.y);
  next.z = grads + eta * state.q + params.rho * mixed_y + noise.e;
  const NodeMatrix mixed_z = network.apply(next.z);
  next.x = state.x + noise.w - params.alpha * (next.z - noise.e) +
           params.beta * mixed_z;
  next.d = eta * state.d + next.y;
  next.q = eta * state.q + params.rho * mixed_y;
  return next;
}

AlgState step(const AlgState& state, const AlgoParams& params,
              const Network& network, const Problem& problem,
              NoiseGenerator& noise) {
  return step(state, params, network, problem, noise.draw(state.k));
}

EquivalentState step_equivalent(const EquivalentState& state,
                                const NoiseDraw& noise, const AlgoParams& params,
                                const Network& network, const Problem& problem) {
  check_shapes(state.x, network, problem);
  const NodeMatrix grads = problem.local_gradients(state.x);
  check_gradients(grads, state.k);

  const NodeMatrix consensus_push = params.rho * network.apply(state.x + noise.w);
  const NodeMatrix inner = grads + state.q + consensus_push;
  // G v = alpha v - beta L v
  const NodeMatrix g_inner = params.alpha * inner - params.beta * network.apply(inner);
  EquivalentState next;
  next.k = state.k + 1;
  next.x = state.x + noise.w - g_inner + params.beta * network.apply(noise.e);
  next.q = state.q + consensus_push;
  return next;
}

}  // namespace dpp2
