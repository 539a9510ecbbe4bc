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

// Acceptance suite. Usage: acceptance_test [--criterion N]...
// Prints one PASS/FAIL line per criterion and exits nonzero on any failure.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "dpp2/algorithm.h"
#include "dpp2/diagnostics.h"
#include "dpp2/experiment.h"
#include "dpp2/privacy.h"
#include "dpp2/problems.h"
#include "dpp2/random.h"
#include "dpp2/runner.h"
#include "dpp2/validator.h"

namespace {

using namespace dpp2;
namespace fs = std::filesystem;

struct Outcome {
  bool passed = false;
  std::string detail;
};

double relative_gap(const NodeMatrix& a, const NodeMatrix& b) {
  return (a - b).norm() / std::max(1.0, a.norm());
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Desk-scale logistic benchmark on a 10-node geometric graph.
struct Bench {
  Problem problem;
  Network network;
};

Bench desk_bench(int nodes, int dim, int samples) {
  Problem p = logistic_nonconvex(generate_dataset(nodes, dim, samples, 1), 0.001, 1.0);
  Network net(nodes, random_geometric_graph(nodes, 0.5, 1).edges, LaplacianScaling::kMaxDegree);
  return {std::move(p), std::move(net)};
}

AlgoParams reference_params() { return AlgoParams{0.1, 0.05, 10.0, EtaSchedule::constant(0.5)}; }

Outcome form_equivalence() {
  const auto t0 = std::chrono::steady_clock::now();
  Bench b = desk_bench(10, 5, 50);
  const AlgoParams params = reference_params();
  NoiseGenerator gen(NoiseSchedule::uniform(10, 1.0, 0.95), 5, 2026);
  AlgState a = initial_state(b.problem);
  EquivalentState e{0, a.x, a.q};
  double worst = 0.0;
  for (int k = 0; k < 500; ++k) {
    const NoiseDraw draw = gen.draw(k);
    a = step(a, params, b.network, b.problem, draw);
    e = step_equivalent(e, draw, params, b.network, b.problem);
    worst = std::max(worst, relative_gap(a.x, e.x));
  }
  const double secs = seconds_since(t0);
  return {worst <= 1e-8 && secs < 5.0,
          fmt::format("max relative x error {:.3e} over K=500 (limit 1e-8), {:.2f}s", worst, secs)};
}

Outcome eta_invariance() {
  Bench b = desk_bench(10, 5, 50);
  AlgoParams constant = reference_params();
  AlgoParams random = constant;
  random.eta = EtaSchedule::random(derive_seed(2026, 2));
  NoiseGenerator gen(NoiseSchedule::uniform(10, 1.0, 0.95), 5, 2027);
  AlgState a = initial_state(b.problem), c = initial_state(b.problem);
  double worst = 0.0;
  for (int k = 0; k < 500; ++k) {
    const NoiseDraw draw = gen.draw(k);
    a = step(a, constant, b.network, b.problem, draw);
    c = step(c, random, b.network, b.problem, draw);
    worst = std::max(worst, relative_gap(a.x, c.x));
  }
  return {worst <= 1e-8,
          fmt::format("eta 0.5 vs seeded random: max relative x error {:.3e} over K=500", worst)};
}

Outcome lyapunov_descent() {
  Problem p = quadratic_pl(5, 2, 0, 3);
  Network net(5, path_graph(5));
  auto cert = design_certified_parameters(net, p.max_smoothness());
  if (!cert) return {false, "grid search found no certified parameters"};
  const AlgoParams params{cert->alpha, cert->beta, cert->rho, EtaSchedule::constant(0.5)};
  const DerivedConstants c = validate_parameters(params, net, p, cert->free);
  if (!c.all_feasible()) return {false, "certified parameters fail validation"};
  NodeMatrix x0(2, 5);
  RandomStream rs(7);
  for (int i = 0; i < x0.size(); ++i) x0.data()[i] = rs.normal();

  RunOptions options;
  options.iterations = 1001;
  options.lyapunov = true;
  options.free = cert->free;
  options.x0 = x0;
  auto violations = [&](const NoiseSchedule& noise, double* worst) {
    const RunResult r = run(p, net, params, noise, 11, options);
    int count = 0;
    *worst = -std::numeric_limits<double>::infinity();
    for (const TraceRow& row : r.trace.rows) {
      if (!row.descent_residual) continue;
      *worst = std::max(*worst, *row.descent_residual);
      if (*row.descent_residual > 1e-10) ++count;
    }
    return count;
  };
  double worst_clean = 0.0, worst_noisy = 0.0;
  const int clean = violations(NoiseSchedule::none(5), &worst_clean);
  const int noisy = violations(NoiseSchedule::uniform(5, 1.0, 0.9), &worst_noisy);
  return {clean == 0 && noisy == 0,
          fmt::format("alpha={:.3g} beta={:.3g} rho={:.3g}; zero noise: {} of 1001 steps with "
                      "V increase > 1e-10 (worst {:.3e}); noisy: {} steps over D1|w|^2+D2|e|^2 "
                      "(worst {:.3e})",
                      cert->alpha, cert->beta, cert->rho, clean, worst_clean, noisy, worst_noisy)};
}

Outcome sublinear_rate() {
  const auto t0 = std::chrono::steady_clock::now();
  Bench b = desk_bench(10, 5, 50);
  RunOptions options;
  options.iterations = 5000;
  const RunResult r = run(b.problem, b.network, reference_params(), NoiseSchedule::none(10), 1, options);
  RateFitOptions fit_opts;
  fit_opts.burn_in = 100;
  fit_opts.last = 5000;
  const LineFit fit = rate_fit(r.trace, RateMode::kSublinear, fit_opts);
  const double final_gap = r.trace.rows.back().w_hat;
  const double secs = seconds_since(t0);
  const bool ok = fit.slope >= -1.4 && fit.slope <= -0.8 && final_gap <= 1e-6 && secs < 30.0;
  return {ok, fmt::format("running-average slope {:.4f} on k in [{}, {}] (target [-1.4, -0.8]), "
                          "final W_hat {:.3e} (limit 1e-6), {:.2f}s",
                          fit.slope, fit.first_k, fit.last_k, final_gap, secs)};
}

Outcome linear_rate() {
  Problem p = quadratic_pl(8, 4, 0, 5);
  Network net(8, path_graph(8), LaplacianScaling::kMaxDegree);
  const double alpha = 1.0 / p.max_smoothness();
  const AlgoParams params{alpha, 0.25 * alpha, 0.3, EtaSchedule::constant(0.5)};
  RunOptions options;
  options.iterations = 4000;
  const RunResult r = run(p, net, params, NoiseSchedule::none(8), 1, options);
  RateFitOptions fit_opts;
  fit_opts.floor = 1e-12;
  const LineFit fit = rate_fit(r.trace, RateMode::kLinear, fit_opts);
  const TraceRow& last = r.trace.rows.back();
  const double final_metric = last.consensus + *last.excess;
  const bool ok = fit.r_squared >= 0.99 && fit.slope < 0.0 && final_metric <= 1e-10;
  return {ok, fmt::format("log(|x - x_bar|^2 + f - f*) slope {:.4e} per iteration, R^2 {:.5f} on "
                          "k in [{}, {}], final {:.3e} (limit 1e-10)",
                          fit.slope, fit.r_squared, fit.first_k, fit.last_k, final_metric)};
}

Outcome noise_summability() {
  // d = 1: the bound is the exact infinite-horizon expectation for d = 1.
  constexpr int nodes = 10, horizon = 1000, seeds = 100;
  constexpr double u = 1.0, r = 0.9;
  Bench b = desk_bench(nodes, 1, 50);
  const DerivedConstants c = validate_parameters(reference_params(), b.network, b.problem, FreeConstants{}, r);
  const NoiseSchedule schedule = NoiseSchedule::uniform(nodes, u, r);
  double mean = 0.0, second = 0.0;
  for (int s = 0; s < seeds; ++s) {
    NoiseGenerator gen(schedule, 1, derive_seed(4242, static_cast<std::uint64_t>(s)));
    double total = 0.0;
    for (int k = 0; k < horizon; ++k) {
      const NoiseDraw draw = gen.draw(k);
      total += c.d1 * draw.w.squaredNorm() + c.d2 * draw.e.squaredNorm();
    }
    mean += total / seeds;
    second += total * total / seeds;
  }
  const double stderr_mean = std::sqrt((second - mean * mean) / (seeds - 1));
  const double bound = (c.d1 + c.d2) * 2.0 * nodes * u * u / (1.0 - r * r);
  return {mean <= bound,
          fmt::format("mean weighted noise sum {:.6e} vs bound {:.6e} (ratio {:.4f}, standard "
                      "error of mean {:.4f} of bound)",
                      mean, bound, mean / bound, stderr_mean / bound)};
}

Outcome privacy_consistency() {
  RandomStream rs(777);
  int checked = 0, attempts = 0;
  double worst_ratio = 0.0, worst_termwise = 0.0;
  while (checked < 50 && attempts < 10000) {
    ++attempts;
    SelectionInputs in;
    in.dim = 1 + static_cast<int>(rs.uniform() * 10);
    in.max_smoothness = rs.uniform(0.5, 5.0);
    in.horizon = 2 + static_cast<int>(rs.uniform() * 500);
    in.epsilon = rs.uniform(1.0, 50.0);
    in.u_w = rs.uniform(0.5, 5.0);
    in.delta = in.max_smoothness / in.horizon * rs.uniform(1e-4, 2e-2);
    const DpSelection sel = select_dp_parameters(in);
    if (!sel.feasible) continue;
    ++checked;
    BudgetInputs b;
    b.horizon = in.horizon;
    b.dim = in.dim;
    b.alpha = sel.alpha;
    b.delta = in.delta;
    b.max_smoothness = in.max_smoothness;
    b.u_e = sel.u_e;
    b.u_w = in.u_w;
    b.rate = 0.5 * (sel.r_low + sel.r_high);
    const double eps = *dp_budget(b).epsilon;
    const double termwise = *dp_budget_termwise(b);
    worst_ratio = std::max(worst_ratio, eps / in.epsilon);
    worst_termwise = std::max(worst_termwise, std::abs(eps - termwise) / termwise);
  }
  BudgetInputs example;
  example.horizon = 1;
  example.dim = 1;
  example.alpha = 0.1;
  example.delta = 1.0;
  example.max_smoothness = 5.0;
  example.u_e = 1.0;
  example.u_w = 1.0;
  example.rate = 0.5;
  const double worked = *dp_budget(example).epsilon;
  const bool ok = checked == 50 && worst_ratio <= 1.0 && worst_termwise <= 1e-12 &&
                  std::abs(worked - 4.4) <= 1e-12;
  return {ok, fmt::format("{} feasible selections: max eps/target {:.4f}, max closed-form vs "
                          "termwise {:.2e}; worked example {}",
                          checked, worst_ratio, worst_termwise, worked)};
}

Outcome figure_trends() {
  std::string detail;
  bool ok = true;
  const fs::path root = fs::temp_directory_path() / "dpp2_acceptance";
  for (const auto& [name, values] :
       {std::pair<std::string, std::vector<double>>{"figure1", {0.0, 0.5, 0.9, 0.95}},
        {"figure2", {0.0, 0.1, 1.0, 5.0}}}) {
    const auto t0 = std::chrono::steady_clock::now();
    SweepSpec spec = preset(name);
    spec.values = values;
    spec.base.output = (root / name).string();
    fs::remove_all(spec.base.output);
    const SweepResult r = run_sweep(spec);
    const double secs = seconds_since(t0);
    bool monotone = true;
    for (std::size_t i = 1; i < r.final_mean.size(); ++i)
      monotone = monotone && r.final_mean[i] >= r.final_mean[i - 1];
    ok = ok && monotone && secs < 300.0;
    detail += fmt::format("{}{} [{}] {:.3g} ({:.1f}s)", detail.empty() ? "" : "; ", name,
                          spec.parameter, fmt::join(r.final_mean, ", "), secs);
  }
  return {ok, detail};
}

Outcome structural_invariants() {
  int failures = 0;
  std::vector<std::string> notes;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const int n = 3 + static_cast<int>(seed);
    Network net(n, random_geometric_graph(n, 0.6, seed).edges);
    NodeMatrix c = Eigen::VectorXd::LinSpaced(3, -500.0, 500.0).replicate(1, n);
    if (net.apply(c).cwiseAbs().maxCoeff() > 1e-12 * 500.0) ++failures;
    if (net.eigenvalues().minCoeff() < -1e-10 || net.lambda_min_positive() <= 1e-10) ++failures;
  }
  if (failures) notes.push_back("laplacian null space");

  Bench b = desk_bench(10, 5, 50);
  NoiseGenerator gen(NoiseSchedule::uniform(10, 1.0, 0.95), 5, 5);
  AlgoParams params = reference_params();
  params.eta = EtaSchedule::random(9);
  AlgState s = initial_state(b.problem);
  int dual_fail = 0;
  for (int k = 0; k < 500; ++k) {
    s = step(s, params, b.network, b.problem, gen.draw(k));
    const NodeMatrix rho_ld = params.rho * b.network.apply(s.d);
    if ((s.q - rho_ld).norm() > 1e-9 * std::max(1.0, s.q.norm())) ++dual_fail;
    if (s.q.rowwise().sum().norm() > 1e-9 * (k + 1) * std::max(1.0, s.q.norm())) ++dual_fail;
  }
  if (dual_fail) notes.push_back("dual relation / column sum");
  failures += dual_fail;

  int grad_fail = 0;
  RandomStream rs(3);
  Problem quad = quadratic_pl(4, 3, 1, 2);
  for (const Problem* p : {&b.problem, &quad}) {
    for (int i = 0; i < p->nodes(); ++i) {
      for (int probe = 0; probe < 50; ++probe) {
        Eigen::VectorXd x(p->dim());
        for (int t = 0; t < x.size(); ++t) x(t) = rs.normal();
        const Eigen::VectorXd g = p->local(i).gradient(x);
        Eigen::VectorXd fd(x.size());
        for (int t = 0; t < x.size(); ++t) {
          Eigen::VectorXd up = x, down = x;
          up(t) += 1e-6;
          down(t) -= 1e-6;
          fd(t) = (p->local(i).value(up) - p->local(i).value(down)) / 2e-6;
        }
        if ((g - fd).norm() > 1e-4 * std::max(1.0, g.norm())) ++grad_fail;
      }
    }
  }
  if (grad_fail) notes.push_back("finite differences");
  failures += grad_fail;

  int laplace_fail = 0;
  for (double scale : {0.5, 2.0}) {
    RandomStream stream(11);
    constexpr int n = 1000000;
    const Eigen::VectorXd v = laplace_sample(scale, n, stream);
    if (std::abs(v.mean()) > 5.0 * std::sqrt(2.0 / n) * scale) ++laplace_fail;
    if (std::abs(v.squaredNorm() / n - 2.0 * scale * scale) > 5.0 * std::sqrt(20.0 / n) * scale * scale)
      ++laplace_fail;
  }
  if (laplace_fail) notes.push_back("laplace moments");
  failures += laplace_fail;
  return {failures == 0,
          failures == 0 ? "null space, q = rho L d, column sums, gradient checks, Laplace moments"
                        : fmt::format("{} failures: {}", failures, fmt::join(notes, ", "))};
}

Outcome determinism() {
  const fs::path root = fs::temp_directory_path() / "dpp2_acceptance" / "determinism";
  fs::remove_all(root);
  ExperimentConfig c;
  c.seed = 31337;
  c.repeats = 3;
  c.iterations = 300;
  c.lyapunov = false;
  c.params.eta.reset();
  c.noise.u_e = c.noise.u_w = 1.0;
  c.noise.rate = 0.95;
  c.output = (root / "a").string();
  const ExperimentResult a = run_experiment(c);
  c.output = (root / "b").string();
  const ExperimentResult b = run_experiment(c);
  auto slurp = [](const std::string& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  int files = 0, mismatched = 0;
  std::vector<std::string> pairs_a = a.trace_files, pairs_b = b.trace_files;
  pairs_a.push_back(a.summary_file);
  pairs_b.push_back(b.summary_file);
  for (std::size_t i = 0; i < pairs_a.size(); ++i) {
    ++files;
    if (slurp(pairs_a[i]) != slurp(pairs_b[i])) ++mismatched;
  }
  return {mismatched == 0 && files == 4,
          fmt::format("{} CSV files compared across reruns, {} differ", files, mismatched)};
}

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome()> check;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria = {
      {1, "form equivalence", form_equivalence},
      {2, "eta invariance", eta_invariance},
      {3, "Lyapunov descent", lyapunov_descent},
      {4, "sublinear rate", sublinear_rate},
      {5, "linear rate", linear_rate},
      {6, "noise summability bound", noise_summability},
      {7, "privacy budget consistency", privacy_consistency},
      {8, "noise sweep trends", figure_trends},
      {9, "structural invariants", structural_invariants},
      {10, "determinism", determinism},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--criterion" && i + 1 < argc) {
      selected.insert(std::atoi(argv[++i]));
    } else {
      std::cerr << "usage: acceptance_test [--criterion N]...\n";
      return 2;
    }
  }
  int failed = 0;
  for (const Criterion& c : criteria) {
    if (!selected.empty() && !selected.count(c.id)) continue;
    Outcome o;
    try {
      o = c.check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.passed) ++failed;
    std::cout << fmt::format("criterion {:>2} {} {}: {}\n", c.id, o.passed ? "PASS" : "FAIL",
                             c.name, o.detail)
              << std::flush;
  }
  return failed == 0 ? 0 : 1;
}
