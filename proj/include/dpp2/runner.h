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

#ifndef DPP2_RUNNER_H_
#define DPP2_RUNNER_H_

#include <cstdint>
#include <optional>

#include "dpp2/algorithm.h"
#include "dpp2/diagnostics.h"
#include "dpp2/validator.h"

namespace dpp2 {

struct RunOptions {
  int iterations = 0;  // K steps; the trace holds rows 0..K
  int stride = 1;      // record every stride-th iteration plus the last
  bool lyapunov = false;
  FreeConstants free;  // theory constants used for V, D1, D2
  NodeMatrix x0;       // empty means zero
  bool allow_disconnected = false;
};

struct RunResult {
  Trace trace;
  DerivedConstants constants;
  AlgState final_state;
};

// Drives the iteration for options.iterations steps from d0 = q0 = 0. The
// per-node noise streams and a random eta schedule (if any) derive from seed.
// Throws on a disconnected network unless allow_disconnected is set.
RunResult run(const Problem& problem, const Network& network,
              const AlgoParams& params, const NoiseSchedule& noise,
              std::uint64_t seed, const RunOptions& options);

}  // namespace dpp2

#endif  // DPP2_RUNNER_H_
