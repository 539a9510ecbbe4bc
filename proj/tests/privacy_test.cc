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

#include "dpp2/privacy.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "dpp2/random.h"

namespace dpp2 {
namespace {

double laplace_cdf(double x, double scale) {
  return x < 0 ? 0.5 * std::exp(x / scale) : 1.0 - 0.5 * std::exp(-x / scale);
}

// Direct evaluation of the accumulated privacy sum, one term per iteration.
double budget_oracle(const BudgetInputs& in) {
  double total = 0.0;
  for (int k = 1; k <= in.horizon; ++k) {
    total += std::sqrt(static_cast<double>(in.dim)) *
             (1.0 / (in.alpha * in.u_e) + 1.0 / in.u_w) * in.alpha * in.delta /
             (std::pow(in.rate, k) * (1.0 - in.alpha * in.max_smoothness));
  }
  return total;
}

BudgetInputs worked_example() {
  BudgetInputs in;
  in.horizon = 1;
  in.dim = 1;
  in.alpha = 0.1;
  in.delta = 1.0;
  in.max_smoothness = 5.0;
  in.u_e = 1.0;
  in.u_w = 1.0;
  in.rate = 0.5;
  return in;
}

class LaplaceMoments : public ::testing::TestWithParam<double> {};

TEST_P(LaplaceMoments, MeanVarianceAndDistribution) {
  const double scale = GetParam();
  constexpr int n = 1000000;
  RandomStream rs(123);
  const Eigen::VectorXd x = laplace_sample(scale, n, rs);
  const double mean = x.mean();
  const double second = x.squaredNorm() / n;
  const double se_mean = std::sqrt(2.0 * scale * scale / n);
  const double se_var = std::sqrt(20.0 / n) * scale * scale;
  EXPECT_LE(std::abs(mean), 5.0 * se_mean);
  EXPECT_LE(std::abs(second - 2.0 * scale * scale), 5.0 * se_var);

  std::vector<double> sorted(x.data(), x.data() + n);
  std::sort(sorted.begin(), sorted.end());
  double ks = 0.0;
  for (int i = 0; i < n; i += 7) {
    const double f = laplace_cdf(sorted[i], scale);
    ks = std::max({ks, std::abs(f - static_cast<double>(i) / n),
                   std::abs(f - static_cast<double>(i + 1) / n)});
  }
  EXPECT_LT(ks, 1.63 / std::sqrt(static_cast<double>(n)));

  const double h = 0.02 * scale;
  const double near_zero = static_cast<double>((x.array().abs() < h).count());
  const double density = near_zero / (n * 2.0 * h);
  const double expected = (1.0 - std::exp(-h / scale)) / (2.0 * h);
  EXPECT_NEAR(density, expected, 5.0 * std::sqrt(expected / (n * 2.0 * h)));
  EXPECT_NEAR(expected, 1.0 / (2.0 * scale), 0.011 / (2.0 * scale));
}

INSTANTIATE_TEST_SUITE_P(Scales, LaplaceMoments, ::testing::Values(0.3, 1.0, 4.0));

TEST(Laplace, DeterministicGivenStream) {
  RandomStream a(9), b(9);
  EXPECT_EQ(laplace_sample(2.0, 50, a), laplace_sample(2.0, 50, b));
}

TEST(Laplace, RejectsNonPositiveScale) {
  RandomStream rs(1);
  EXPECT_THROW(laplace_sample(0.0, 3, rs), std::invalid_argument);
  EXPECT_THROW(laplace_sample(-1.0, 3, rs), std::invalid_argument);
}

TEST(Schedule, GeometricDecay) {
  NoiseSchedule s({1.0, 2.0}, {3.0, 0.5}, {0.5, 0.9});
  EXPECT_FALSE(s.zero_noise());
  EXPECT_DOUBLE_EQ(s.scale_e(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(s.scale_e(0, 3), 0.125);
  EXPECT_DOUBLE_EQ(s.scale_w(1, 2), 0.5 * 0.81);
  EXPECT_DOUBLE_EQ(s.u_bar(), 3.0);
  EXPECT_DOUBLE_EQ(s.r_bar(), 0.9);
  for (int k = 0; k < 50; ++k) {
    EXPECT_LT(s.scale_e(1, k + 1), s.scale_e(1, k));
    EXPECT_LT(s.scale_w(0, k + 1), s.scale_w(0, k));
  }
}

TEST(Schedule, ZeroRatePerturbsOnlyFirstIteration) {
  NoiseSchedule s = NoiseSchedule::uniform(3, 1.0, 0.0);
  EXPECT_DOUBLE_EQ(s.scale_e(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(s.scale_e(0, 1), 0.0);
  NoiseGenerator gen(s, 2, 5);
  EXPECT_GT(gen.draw(0).w.norm(), 0.0);
  const NoiseDraw later = gen.draw(1);
  EXPECT_EQ(later.w.norm(), 0.0);
  EXPECT_EQ(later.e.norm(), 0.0);
}

TEST(Schedule, ZeroNoise) {
  NoiseSchedule none = NoiseSchedule::none(4);
  EXPECT_TRUE(none.zero_noise());
  EXPECT_TRUE(NoiseSchedule::uniform(4, 0.0, 0.5).zero_noise());
  NoiseGenerator gen(none, 3, 1);
  const NoiseDraw d = gen.draw(0);
  EXPECT_EQ(d.w.rows(), 3);
  EXPECT_EQ(d.w.cols(), 4);
  EXPECT_EQ(d.w.norm() + d.e.norm(), 0.0);
}

TEST(Schedule, RejectsInvalidInput) {
  EXPECT_THROW(NoiseSchedule::uniform(2, 1.0, 1.0), std::invalid_argument);
  EXPECT_THROW(NoiseSchedule::uniform(2, 1.0, -0.1), std::invalid_argument);
  EXPECT_THROW(NoiseSchedule::uniform(2, -1.0, 0.5), std::invalid_argument);
  EXPECT_THROW(NoiseSchedule({1.0}, {1.0, 1.0}, {0.5}), std::invalid_argument);
}

TEST(Generator, DeterministicAndIndependentPerNode) {
  NoiseSchedule s = NoiseSchedule::uniform(3, 1.0, 0.9);
  NoiseGenerator a(s, 4, 77), b(s, 4, 77), c(s, 4, 78);
  for (int k = 0; k < 5; ++k) {
    const NoiseDraw da = a.draw(k), db = b.draw(k), dc = c.draw(k);
    EXPECT_EQ(da.w, db.w);
    EXPECT_EQ(da.e, db.e);
    EXPECT_NE(da.w, dc.w);
    EXPECT_NE(da.w.col(0), da.w.col(1));
  }
}

TEST(Generator, PerIterationVarianceTracksSchedule) {
  constexpr int nodes = 200, dim = 50;
  NoiseSchedule s = NoiseSchedule::uniform(nodes, 2.0, 0.5, 0.8);
  NoiseGenerator gen(s, dim, 3);
  for (int k = 0; k < 4; ++k) {
    const NoiseDraw d = gen.draw(k);
    const double n = nodes * dim;
    const double te = 2.0 * std::pow(0.8, k), tw = 0.5 * std::pow(0.8, k);
    EXPECT_NEAR(d.e.squaredNorm() / n, 2.0 * te * te, 5.0 * std::sqrt(20.0 / n) * te * te);
    EXPECT_NEAR(d.w.squaredNorm() / n, 2.0 * tw * tw, 5.0 * std::sqrt(20.0 / n) * tw * tw);
  }
}

TEST(Budget, WorkedExample) {
  PrivacyReport r = dp_budget(worked_example());
  ASSERT_TRUE(r.epsilon);
  EXPECT_NEAR(*r.epsilon, 4.4, 1e-12);
  EXPECT_NEAR(budget_oracle(worked_example()), 4.4, 1e-12);
  std::ostringstream text;
  write_report(text, r);
  EXPECT_NE(text.str().find("epsilon = 4.4\n"), std::string::npos) << text.str();
}

TEST(Budget, RequestedBudgetSetsFeasibility) {
  EXPECT_TRUE(dp_budget(worked_example(), 4.5).feasible);
  EXPECT_FALSE(dp_budget(worked_example(), 4.3).feasible);
}

TEST(Budget, VacuousWhenStepTooLarge) {
  BudgetInputs in = worked_example();
  in.alpha = 0.2;
  PrivacyReport r = dp_budget(in);
  EXPECT_FALSE(r.epsilon);
  EXPECT_FALSE(r.feasible);
  EXPECT_FALSE(r.reason.empty());
  EXPECT_FALSE(dp_budget_termwise(in));
  in.alpha = 0.5;
  EXPECT_FALSE(dp_budget(in).epsilon);
}

TEST(Budget, ClosedFormMatchesTermwise) {
  RandomStream rs(2024);
  for (int trial = 0; trial < 500; ++trial) {
    BudgetInputs in;
    in.horizon = 1 + static_cast<int>(rs.uniform() * 3000);
    in.dim = 1 + static_cast<int>(rs.uniform() * 20);
    in.max_smoothness = rs.uniform(0.1, 10.0);
    in.alpha = rs.uniform(0.01, 0.99) / in.max_smoothness;
    in.delta = rs.uniform(0.01, 3.0);
    in.u_e = rs.uniform(0.1, 10.0);
    in.u_w = rs.uniform(0.1, 10.0);
    in.rate = rs.uniform(0.9, 0.9999);
    const double closed = *dp_budget(in).epsilon;
    const double termwise = *dp_budget_termwise(in);
    EXPECT_LE(std::abs(closed - termwise), 1e-12 * termwise);
    if (in.horizon <= 200)
      EXPECT_LE(std::abs(closed - budget_oracle(in)), 1e-11 * closed);
  }
}

TEST(Budget, Monotonicity) {
  RandomStream rs(7);
  for (int trial = 0; trial < 100; ++trial) {
    BudgetInputs in;
    in.horizon = 1 + static_cast<int>(rs.uniform() * 200);
    in.dim = 1 + static_cast<int>(rs.uniform() * 10);
    in.max_smoothness = rs.uniform(0.5, 5.0);
    in.alpha = rs.uniform(0.05, 0.9) / in.max_smoothness;
    in.delta = rs.uniform(0.1, 2.0);
    in.u_e = rs.uniform(0.5, 5.0);
    in.u_w = rs.uniform(0.5, 5.0);
    in.rate = rs.uniform(0.5, 0.98);
    const double base = *dp_budget(in).epsilon;
    auto eps = [](BudgetInputs b) { return *dp_budget(b).epsilon; };
    BudgetInputs v = in;
    v.u_e *= 2.0;
    v.u_w *= 2.0;
    EXPECT_LT(eps(v), base);
    v = in;
    v.u_e *= 1.5;
    EXPECT_LT(eps(v), base);
    v = in;
    v.u_w *= 1.5;
    EXPECT_LT(eps(v), base);
    v = in;
    v.rate = 0.5 * (in.rate + 1.0);
    EXPECT_LT(eps(v), base);
    v = in;
    v.horizon += 1;
    EXPECT_GT(eps(v), base);
    v = in;
    v.delta *= 1.1;
    EXPECT_GT(eps(v), base);
    v = in;
    v.dim += 1;
    EXPECT_GT(eps(v), base);
  }
}

TEST(Budget, RejectsInvalidInputs) {
  BudgetInputs in = worked_example();
  in.horizon = 0;
  EXPECT_THROW(dp_budget(in), std::invalid_argument);
  in = worked_example();
  in.delta = 0.0;
  EXPECT_THROW(dp_budget(in), std::invalid_argument);
  in = worked_example();
  in.rate = 1.0;
  EXPECT_THROW(dp_budget(in), std::invalid_argument);
}

SelectionInputs selection_example() {
  SelectionInputs in;
  in.epsilon = 10.0;
  in.delta = 1.0;
  in.dim = 1;
  in.max_smoothness = 1.0;
  in.horizon = 100;
  in.u_w = 1.0;
  return in;
}

TEST(Select, ClosedFormQuantities) {
  const SelectionInputs in = selection_example();
  DpSelection s = select_dp_parameters(in);
  EXPECT_NEAR(s.u_e, 1.1 * 1.0 / 10.0, 1e-15);
  const double cap = (10.0 - 1.0 / s.u_e) / (1.0 * (1.0 + 10.0));
  EXPECT_NEAR(s.alpha_max, std::min(1.0, cap), 1e-15);
  EXPECT_NEAR(s.alpha, 0.99 * s.alpha_max, 1e-15);
  const double c = (1.0 / (s.alpha * s.u_e) + 1.0) * s.alpha / (1.0 - s.alpha);
  EXPECT_NEAR(s.c_tilde, c, 1e-12 * c);
  EXPECT_NEAR(s.formula_r_low, std::pow(c / 10.0, 1.0 / 99.0), 1e-12);
  EXPECT_GT(s.formula_r_low, 0.0);
  EXPECT_LT(s.formula_r_low, 1.0);
  EXPECT_EQ(s.r_high, 1.0);
}

TEST(Select, LargeEpsilonLimit) {
  SelectionInputs in = selection_example();
  in.max_smoothness = 2.0;
  in.delta = 0.8;
  in.u_e = 5.0;
  in.epsilon = 1e9;
  DpSelection s = select_dp_parameters(in);
  EXPECT_NEAR(s.alpha_max, std::min(1.0 / 2.0, 1.0 / 0.8), 1e-6);
  EXPECT_LT(s.formula_r_low, 0.9);
  in.epsilon = 1e15;
  s = select_dp_parameters(in);
  EXPECT_LT(s.formula_r_low, 0.75);
  EXPECT_TRUE(s.feasible);
  EXPECT_LT(s.r_low, 0.75);
}

TEST(Select, RoundTripThroughBudget) {
  RandomStream rs(99);
  int feasible = 0;
  for (int trial = 0; trial < 200; ++trial) {
    SelectionInputs in;
    in.dim = 1 + static_cast<int>(rs.uniform() * 10);
    in.max_smoothness = rs.uniform(0.5, 5.0);
    in.horizon = 2 + static_cast<int>(rs.uniform() * 500);
    in.epsilon = rs.uniform(1.0, 50.0);
    in.u_w = rs.uniform(0.5, 5.0);
    in.delta = in.max_smoothness / in.horizon * rs.uniform(1e-4, 2e-2);
    DpSelection s = select_dp_parameters(in);
    if (!s.feasible) continue;
    ++feasible;
    EXPECT_LT(s.r_low, s.r_high);
    EXPECT_GT(s.u_e, std::sqrt(static_cast<double>(in.dim)) * in.max_smoothness / in.epsilon);
    for (int j = 1; j <= 5; ++j) {
      BudgetInputs b;
      b.horizon = in.horizon;
      b.dim = in.dim;
      b.alpha = s.alpha;
      b.delta = in.delta;
      b.max_smoothness = in.max_smoothness;
      b.u_e = s.u_e;
      b.u_w = in.u_w;
      b.rate = s.r_low + (s.r_high - s.r_low) * j / 6.0;
      EXPECT_LE(*dp_budget(b).epsilon, in.epsilon * (1.0 + 1e-12));
    }
  }
  EXPECT_GT(feasible, 20);
}

TEST(Select, InfeasibleWhenBudgetTooTight) {
  SelectionInputs in = selection_example();
  in.epsilon = 0.5;
  in.delta = 5.0;
  in.horizon = 1000;
  DpSelection s = select_dp_parameters(in);
  EXPECT_FALSE(s.feasible);
  EXPECT_FALSE(s.certified_r_low);
  EXPECT_FALSE(s.reason.empty());
}

TEST(Select, RejectsTooSmallUe) {
  SelectionInputs in = selection_example();
  in.u_e = 0.05;
  DpSelection s = select_dp_parameters(in);
  EXPECT_FALSE(s.feasible);
  EXPECT_FALSE(s.reason.empty());
}

TEST(Select, RejectsBadInputs) {
  SelectionInputs in = selection_example();
  in.horizon = 1;
  EXPECT_THROW(select_dp_parameters(in), std::invalid_argument);
  in = selection_example();
  in.delta = 0.0;
  EXPECT_THROW(select_dp_parameters(in), std::invalid_argument);
}

TEST(Select, ReportText) {
  std::ostringstream text;
  write_selection(text, select_dp_parameters(selection_example()));
  EXPECT_NE(text.str().find("u_e"), std::string::npos);
  EXPECT_NE(text.str().find("feasible"), std::string::npos);
}

}  // namespace
}  // namespace dpp2
