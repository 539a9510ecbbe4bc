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

#include "dpp2/runner.h"

#include <algorithm>
#include <limits>
#include <memory>
#include <stdexcept>

#include <fmt/format.h>

namespace dpp2 {
namespace {

constexpr std::uint64_t kNoiseStream = 1;

TraceRow measure(int k, const AlgState& state, const Problem& problem) {
  const NodeMatrix grads = problem.local_gradients(state.x);
  const OptimalityGap gap = optimality_gap(state.x, grads);
  const Eigen::VectorXd mean = node_average(state.x);
  TraceRow row;
  row.k = k;
  row.w_hat = gap.total;
  row.consensus = gap.consensus;
  row.stationarity = gap.stationarity;
  row.objective = problem.value(mean);
  if (problem.f_star()) row.excess = problem.excess(mean);
  return row;
}

}  // namespace

RunResult run(const Problem& problem, const Network& network,
              const AlgoParams& params, const NoiseSchedule& noise,
              std::uint64_t seed, const RunOptions& options) {
  if (!network.connected() && !options.allow_disconnected) {
    throw std::invalid_argument(
        "network is disconnected; set allow_disconnected to run anyway");
  }
  if (options.iterations < 0 || options.stride < 1) {
    throw std::invalid_argument("iterations must be >= 0 and stride >= 1");
  }
  if (noise.nodes() != problem.nodes()) {
    throw std::invalid_argument("noise schedule and problem disagree on N");
  }

  RunResult result;
  result.constants = validate_parameters(params, network, problem, options.free,
                                         noise.r_bar());
  std::unique_ptr<LyapunovEvaluator> lyapunov;
  const bool exact_f_star = problem.f_star().has_value();
  if (options.lyapunov) {
    lyapunov = std::make_unique<LyapunovEvaluator>(network, problem, result.constants);
  }

  Trace& trace = result.trace;
  trace.lyapunov_surrogate = options.lyapunov && !exact_f_star;
  trace.set_meta("seed", fmt::format("{}", seed));
  trace.set_meta("problem", problem.name());
  trace.set_meta("nodes", fmt::format("{}", problem.nodes()));
  trace.set_meta("dim", fmt::format("{}", problem.dim()));
  trace.set_meta("edges", fmt::format("{}", network.edges().size()));
  trace.set_meta("alpha", fmt::format("{:.17g}", params.alpha));
  trace.set_meta("beta", fmt::format("{:.17g}", params.beta));
  trace.set_meta("rho", fmt::format("{:.17g}", params.rho));
  trace.set_meta("eta", params.eta.is_random()
                            ? std::string("random")
                            : fmt::format("{:.17g}", params.eta.constant_value()));
  trace.set_meta("u_bar", fmt::format("{:.17g}", noise.u_bar()));
  trace.set_meta("r_bar", fmt::format("{:.17g}", noise.r_bar()));
  trace.set_meta("iterations", fmt::format("{}", options.iterations));
  if (options.lyapunov) {
    trace.set_meta("D1", fmt::format("{:.17g}", result.constants.d1));
    trace.set_meta("D2", fmt::format("{:.17g}", result.constants.d2));
  }

  NoiseGenerator generator(noise, problem.dim(), derive_seed(seed, kNoiseStream));

  AlgState state = initial_state(problem, options.x0);
  // For surrogate runs V is accumulated against f* = 0 and shifted by the
  // best observed objective once the run is over.
  auto evaluate_v = [&](const AlgState& s) {
    return exact_f_star ? lyapunov->evaluate_exact(s.x, s.q).total
                        : lyapunov->evaluate(s.x, s.q, 0.0).total;
  };
  double v_current = lyapunov ? evaluate_v(state) : 0.0;
  double best_objective = std::numeric_limits<double>::infinity();

  auto record = [&](int k) {
    return k % options.stride == 0 || k == options.iterations;
  };

  TraceRow pending = measure(0, state, problem);
  best_objective = std::min(best_objective, pending.objective);
  if (lyapunov) pending.lyapunov = v_current;
  for (int k = 0; k < options.iterations; ++k) {
    const NoiseDraw draw = generator.draw(k);
    const AlgState next = step(state, params, network, problem, draw);
    const double w_sq = draw.w.squaredNorm();
    const double e_sq = draw.e.squaredNorm();
    if (record(k)) {
      pending.w_sq = w_sq;
      pending.e_sq = e_sq;
    }
    double v_next = 0.0;
    if (lyapunov) {
      v_next = evaluate_v(next);
      if (record(k)) {
        pending.descent_residual = v_next - v_current -
                                   (result.constants.d1 * w_sq +
                                    result.constants.d2 * e_sq);
      }
    }
    if (record(k)) trace.rows.push_back(pending);

    state = next;
    v_current = v_next;
    pending = measure(k + 1, state, problem);
    best_objective = std::min(best_objective, pending.objective);
    if (lyapunov) pending.lyapunov = v_current;
  }
  trace.rows.push_back(pending);

  if (trace.lyapunov_surrogate) {
    for (TraceRow& r : trace.rows) {
      if (r.lyapunov) *r.lyapunov -= best_objective;
    }
    trace.set_meta("f_star_surrogate", fmt::format("{:.17g}", best_objective));
  }
  result.final_state = std::move(state);
  return result;
}

}  // namespace dpp2
