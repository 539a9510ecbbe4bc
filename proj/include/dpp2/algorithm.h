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

#ifndef DPP2_ALGORITHM_H_
#define DPP2_ALGORITHM_H_

#include <cstdint>
#include <stdexcept>
#include <string>

#include "dpp2/graph.h"
#include "dpp2/privacy.h"
#include "dpp2/problems.h"

namespace dpp2 {

// Predetermined sequence eta^k in (0, 1): a constant, or seeded uniform draws
// that are a pure function of (seed, k).
class EtaSchedule {
 public:
  static EtaSchedule constant(double eta);
  static EtaSchedule random(std::uint64_t seed);

  double at(int k) const;
  bool is_random() const { return random_; }
  double constant_value() const { return value_; }
  std::uint64_t seed() const { return seed_; }

 private:
  EtaSchedule(bool random, double value, std::uint64_t seed)
      : random_(random), value_(value), seed_(seed) {}
  bool random_ = false;
  double value_ = 0.5;
  std::uint64_t seed_ = 0;
};

struct AlgoParams {
  double alpha = 0.1;
  double beta = 0.05;
  double rho = 10.0;
  EtaSchedule eta = EtaSchedule::constant(0.5);
};

// Per-node state of the iteration; columns are nodes.
struct AlgState {
  int k = 0;
  NodeMatrix x;  // primal
  NodeMatrix d;  // merged dual
  NodeMatrix q;  // Laplacian dual
  NodeMatrix y;  // last transmitted x_i + (1 - eta) d_i + w_i
  NodeMatrix z;  // last transmitted gradient message
};

// d = q = 0 and the given x0 (zero when empty).
AlgState initial_state(const Problem& problem, const NodeMatrix& x0 = {});

// Raised when a local gradient is NaN or infinite.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(int node, int iteration, const std::string& what)
      : std::runtime_error(what), node_(node), iteration_(iteration) {}
  int node() const { return node_; }
  int iteration() const { return iteration_; }

 private:
  int node_;
  int iteration_;
};

// One synchronous round of the privacy-preserving primal-dual update with the
// supplied perturbations. Every node reads the previous snapshot.
AlgState step(const AlgState& state, const AlgoParams& params,
              const Network& network, const Problem& problem,
              const NoiseDraw& noise);

// Draws this round's perturbations from the generator, then steps.
AlgState step(const AlgState& state, const AlgoParams& params,
              const Network& network, const Problem& problem,
              NoiseGenerator& noise);

struct EquivalentState {
  int k = 0;
  NodeMatrix x;
  NodeMatrix q;
};

// The eta-free recursion the iteration reduces to when d0 = q0 = 0:
//   x' = x + w - G(grad(x) + q + rho L (x + w)) + beta L e
//   q' = q + rho L (x + w),  with G = alpha I - beta L.
EquivalentState step_equivalent(const EquivalentState& state,
                                const NoiseDraw& noise, const AlgoParams& params,
                                const Network& network, const Problem& problem);

}  // namespace dpp2

#endif  // DPP2_ALGORITHM_H_
