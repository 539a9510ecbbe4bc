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

#ifndef DPP2_RANDOM_H_
#define DPP2_RANDOM_H_

#include <cstdint>
#include <random>

namespace dpp2 {

// Deterministic seed derivation. Child seeds are a pure function of
// (parent, index) so parallel or reordered runs draw identical streams.
std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t index);

// Single-owner pseudo-random stream. Uniform draws are built directly from
// the engine bits so results do not depend on the standard library's
// distribution implementations.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const { return seed_; }

  // Uniform on the open interval (0, 1).
  double uniform();
  // Uniform on [lo, hi).
  double uniform(double lo, double hi);
  // Standard normal (Box-Muller).
  double normal();

  RandomStream child(std::uint64_t index) const {
    return RandomStream(derive_seed(seed_, index));
  }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace dpp2

#endif  // DPP2_RANDOM_H_
