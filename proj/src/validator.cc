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

#include "dpp2/validator.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include <fmt/format.h>

namespace dpp2 {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct SpectralInputs {
  double lambda_bar_l;
  double lambda_l;
  double kappa_g;
  double max_smoothness;
};

// xi[1..9] for the given free constants and penalty.
void fill_xi(double (&xi)[10], const SpectralInputs& s, double c_alpha,
             double c_theta, double gamma, double rho) {
  const double m2 = s.max_smoothness * s.max_smoothness;
  const double gap = 1.0 / s.kappa_g - c_theta;
  xi[1] = rho * s.lambda_bar_l / 2.0 * gap -
          (1.0 + 3.0 * m2 / 4.0 + m2 * c_alpha / 2.0);
  xi[2] = 0.5 * (1.0 + 1.0 / gamma) * rho * rho * s.lambda_bar_l +
          c_theta / 4.0 + 0.5 * c_theta * rho * s.lambda_bar_l + 11.0 / 4.0 +
          m2 * (2.0 / gamma + 0.25 * c_theta * rho * s.lambda_bar_l +
                0.5 * c_theta * c_theta);
  xi[3] = c_theta / 2.0 - 5.0 * gamma / 2.0 -
          1.0 / (rho * rho * s.lambda_l * s.lambda_l);
  xi[4] = c_theta * c_theta / 4.0;
  xi[5] = 7.0 * c_theta * c_theta / 4.0;
  xi[6] = 0.25;
  xi[7] = s.max_smoothness + 10.5 * m2;
  xi[8] = (4.0 + 3.0 * m2 + 2.0 * m2 * c_alpha) / (2.0 * s.lambda_bar_l * gap);
  const double inner = s.lambda_l * s.lambda_l * (c_theta / 2.0 - 5.0 * gamma / 2.0);
  xi[9] = inner > 0.0 ? 1.0 / std::sqrt(inner) : kInf;
}

// Upper limit on lambda_bar_g: min{xi1/xi2, positive root of
// xi3 - xi4 t - xi5 t^2, xi6 / (c_alpha xi7)}.
double lambda_g_ceiling(const double (&xi)[10], double c_alpha) {
  const double root =
      (-xi[4] + std::sqrt(xi[4] * xi[4] + 4.0 * xi[3] * xi[5])) / (2.0 * xi[5]);
  return std::min({xi[1] / xi[2], root, xi[6] / (c_alpha * xi[7])});
}

double kappa_g_for(double c_alpha, double kappa_l) {
  // lambda_g / lambda_bar_g = c_alpha - (c_alpha - 1) kappa_l
  const double ratio = c_alpha - (c_alpha - 1.0) * kappa_l;
  return ratio > 0.0 ? 1.0 / ratio : kInf;
}

Condition make(std::string name, bool passed, std::string detail) {
  return Condition{std::move(name), passed, std::move(detail)};
}

}  // namespace

bool DerivedConstants::all_feasible() const {
  return std::all_of(conditions.begin(), conditions.end(),
                     [](const Condition& c) { return c.passed; });
}

DerivedConstants validate_parameters(double alpha, double beta, double rho,
                                     const Network& network,
                                     double max_smoothness,
                                     const FreeConstants& free,
                                     std::optional<double> pl_constant,
                                     double r_bar) {
  DerivedConstants c;
  c.alpha = alpha;
  c.beta = beta;
  c.rho = rho;
  c.max_smoothness = max_smoothness;
  c.nodes = network.size();
  c.free = free;
  c.pl_constant = pl_constant;
  c.r_bar = r_bar;

  c.lambda_bar_l = network.lambda_max();
  c.lambda_l = network.lambda_min_positive();
  c.kappa_l = network.kappa();
  c.kappa_l_is_one = network.connected() && std::abs(c.kappa_l - 1.0) < 1e-12;

  c.lambda_bar_g = alpha - beta * c.lambda_l;
  c.lambda_g = alpha - beta * c.lambda_bar_l;
  c.kappa_g = c.lambda_g > 0.0 ? c.lambda_bar_g / c.lambda_g : kInf;
  c.g_positive_definite = c.lambda_g > 0.0;
  c.c_alpha = alpha / c.lambda_bar_g;
  c.theta = free.c_theta * c.lambda_bar_g;

  const SpectralInputs spectral{c.lambda_bar_l, c.lambda_l, c.kappa_g,
                                max_smoothness};
  fill_xi(c.xi, spectral, c.c_alpha, free.c_theta, free.gamma, rho);
  const double* xi = c.xi;
  const double lbg = c.lambda_bar_g;

  c.primal_margin = xi[1] - xi[2] * lbg;
  c.dual_margin = xi[3] - xi[4] * lbg - xi[5] * lbg * lbg;
  c.gradient_margin = xi[6] - xi[7] * alpha;

  const double c1 = lbg / c.kappa_g * (c.theta + 1.0 / (rho * c.lambda_bar_l));
  c.zeta1 = 1.0 - c1 + std::sqrt((c1 - 1.0) * (c1 - 1.0) + c.theta * c.theta);
  const double c2 = lbg * (c.theta + 1.0 / (rho * c.lambda_l));
  c.zeta2 = 1.0 - c2 + std::sqrt((c2 - 1.0) * (c2 - 1.0) + c.theta * c.theta);
  c.zeta3 = 0.5 - c.zeta1 / 4.0;
  c.zeta4 = std::max(0.5 + c.zeta2 / 4.0, 1.0);
  c.zeta5 = std::min(lbg * c.primal_margin, alpha * c.gradient_margin);
  if (pl_constant) {
    c.zeta6 = std::min({lbg * c.primal_margin, lbg * lbg * c.dual_margin,
                        alpha * *pl_constant * c.nodes / 4.0,
                        c.zeta4 * (1.0 - r_bar * r_bar)});
    c.zeta = *c.zeta6 / c.zeta4;
  }

  const double kg = c.kappa_g;
  const double lbl = c.lambda_bar_l;
  const double m = max_smoothness;
  c.d1 = kg / lbg + 2.0 * kg * kg / (lbg * lbg) + 2.0 + 3.0 * rho * rho * lbl * lbl +
         c.theta * rho * rho * lbl * lbl * lbg + rho * lbl * lbg +
         0.25 * c.theta * c.theta * rho * lbl * lbg * lbg + 2.0 / alpha + m +
         10.5 * m * m;
  c.d2 = beta * beta * (2.0 + kg / lbg + 2.0 * kg * kg / (lbg * lbg));

  // Conditions, in dependency order.
  c.conditions.push_back(make("network_connected", network.connected(),
                              network.connected() ? "" : "lambda_L = 0"));
  c.conditions.push_back(make(
      "G_positive_definite", c.g_positive_definite,
      fmt::format("lambda_G = alpha - beta*lambda_bar_L = {:.6g}", c.lambda_g)));
  const double c_alpha_cap =
      c.kappa_l_is_one ? kInf : c.kappa_l / (c.kappa_l - 1.0);
  c.conditions.push_back(make(
      "c_alpha_range", c.c_alpha > 1.0 && c.c_alpha < c_alpha_cap,
      fmt::format("1 < c_alpha = {:.6g} < kappa_L/(kappa_L-1) = {:.6g}",
                  c.c_alpha, c_alpha_cap)));
  c.conditions.push_back(make(
      "c_theta_range",
      free.c_theta > 0.0 && free.c_theta < 1.0 && free.c_theta < 1.0 / kg,
      fmt::format("0 < c_theta = {:.6g} < min(1, 1/kappa_G = {:.6g})",
                  free.c_theta, 1.0 / kg)));
  c.conditions.push_back(make(
      "gamma_range", free.gamma > 0.0 && free.gamma < free.c_theta / 5.0,
      fmt::format("0 < gamma = {:.6g} < c_theta/5 = {:.6g}", free.gamma,
                  free.c_theta / 5.0)));
  c.conditions.push_back(make(
      "rho_range", rho > std::max(xi[8], xi[9]),
      fmt::format("rho = {:.6g} > max(xi8, xi9) = {:.6g}", rho,
                  std::max(xi[8], xi[9]))));
  const double ceiling = lambda_g_ceiling(c.xi, c.c_alpha);
  c.conditions.push_back(make(
      "lambda_bar_G_range", lbg > 0.0 && lbg < ceiling,
      fmt::format("0 < lambda_bar_G = {:.6g} < {:.6g}", lbg, ceiling)));
  c.conditions.push_back(make(
      "alpha_range", alpha > lbg && alpha < xi[6] / xi[7],
      fmt::format("lambda_bar_G = {:.6g} < alpha = {:.6g} < xi6/xi7 = {:.6g}",
                  lbg, alpha, xi[6] / xi[7])));
  const double beta_implied = (alpha - lbg) / c.lambda_l;
  c.conditions.push_back(make(
      "beta_relation",
      std::abs(beta - beta_implied) <= 1e-12 * std::max(1.0, std::abs(beta)),
      fmt::format("beta = {:.6g}, (alpha - lambda_bar_G)/lambda_L = {:.6g}", beta,
                  beta_implied)));
  c.conditions.push_back(make("primal_margin_positive", c.primal_margin > 0.0,
                              fmt::format("{:.6g}", c.primal_margin)));
  c.conditions.push_back(make("dual_margin_positive", c.dual_margin > 0.0,
                              fmt::format("{:.6g}", c.dual_margin)));
  c.conditions.push_back(make("gradient_margin_positive", c.gradient_margin > 0.0,
                              fmt::format("{:.6g}", c.gradient_margin)));
  c.conditions.push_back(make("zeta3_positive", c.zeta3 > 0.0,
                              fmt::format("{:.6g}", c.zeta3)));
  if (c.zeta) {
    c.conditions.push_back(make("zeta_in_unit_interval",
                                *c.zeta > 0.0 && *c.zeta < 1.0,
                                fmt::format("{:.6g}", *c.zeta)));
  }
  return c;
}

DerivedConstants validate_parameters(const AlgoParams& params,
                                     const Network& network,
                                     const Problem& problem,
                                     const FreeConstants& free, double r_bar) {
  return validate_parameters(params.alpha, params.beta, params.rho, network,
                             problem.max_smoothness(), free,
                             problem.pl_constant(), r_bar);
}

std::optional<CertifiedParameters> design_certified_parameters(
    const Network& network, double max_smoothness, int grid) {
  if (!network.connected() || network.size() < 2 || grid < 1) return std::nullopt;
  const double kappa_l = network.kappa();
  const bool flat = std::abs(kappa_l - 1.0) < 1e-12;
  const double c_alpha_cap = flat ? 2.0 : kappa_l / (kappa_l - 1.0);

  std::optional<CertifiedParameters> best;
  double best_lambda = 0.0;
  for (int ia = 1; ia <= grid; ++ia) {
    const double c_alpha = 1.0 + (c_alpha_cap - 1.0) * ia / (grid + 1.0);
    const double kappa_g = flat ? 1.0 : kappa_g_for(c_alpha, kappa_l);
    const double c_theta_cap = std::min(1.0, 1.0 / kappa_g);
    for (int it = 1; it <= grid; ++it) {
      const double c_theta = c_theta_cap * it / (grid + 1.0);
      for (int ig = 1; ig <= grid; ++ig) {
        const double gamma = c_theta / 5.0 * ig / (grid + 1.0);
        const SpectralInputs s{network.lambda_max(), network.lambda_min_positive(),
                               kappa_g, max_smoothness};
        double xi[10];
        fill_xi(xi, s, c_alpha, c_theta, gamma, 1.0);
        const double rho_floor = std::max(xi[8], xi[9]);
        for (double rho_scale : {1.05, 1.25, 1.5, 2.0, 3.0}) {
          const double rho = rho_floor * rho_scale;
          fill_xi(xi, s, c_alpha, c_theta, gamma, rho);
          const double ceiling = lambda_g_ceiling(xi, c_alpha);
          if (!(ceiling > 0.0)) continue;
          const double lambda_bar_g = 0.9 * ceiling;
          if (lambda_bar_g <= best_lambda) continue;
          const double alpha = c_alpha * lambda_bar_g;
          const double beta = (alpha - lambda_bar_g) / network.lambda_min_positive();
          const FreeConstants free{c_theta, gamma};
          const DerivedConstants check = validate_parameters(
              alpha, beta, rho, network, max_smoothness, free);
          if (!check.all_feasible()) continue;
          best = CertifiedParameters{alpha, beta, rho, c_alpha, free};
          best_lambda = lambda_bar_g;
        }
      }
    }
  }
  return best;
}

void write_constants(std::ostream& out, const DerivedConstants& c) {
  auto line = [&out](const char* name, double v) {
    out << fmt::format("{:<16} {:.10g}\n", name, v);
  };
  out << "# inputs\n";
  line("alpha", c.alpha);
  line("beta", c.beta);
  line("rho", c.rho);
  line("M_bar", c.max_smoothness);
  line("c_theta", c.free.c_theta);
  line("gamma", c.free.gamma);
  out << "# spectra\n";
  line("lambda_bar_L", c.lambda_bar_l);
  line("lambda_L", c.lambda_l);
  line("kappa_L", c.kappa_l);
  line("lambda_bar_G", c.lambda_bar_g);
  line("lambda_G", c.lambda_g);
  line("kappa_G", c.kappa_g);
  line("c_alpha", c.c_alpha);
  line("theta", c.theta);
  out << "# derived\n";
  for (int i = 1; i <= 9; ++i) line(fmt::format("xi{}", i).c_str(), c.xi[i]);
  line("zeta1", c.zeta1);
  line("zeta2", c.zeta2);
  line("zeta3", c.zeta3);
  line("zeta4", c.zeta4);
  line("zeta5", c.zeta5);
  if (c.zeta6) line("zeta6", *c.zeta6);
  if (c.zeta) line("zeta", *c.zeta);
  line("D1", c.d1);
  line("D2", c.d2);
  out << "# conditions\n";
  for (const Condition& cond : c.conditions) {
    out << fmt::format("{:<26} {:<4} {}\n", cond.name,
                       cond.passed ? "pass" : "FAIL", cond.detail);
  }
  if (c.kappa_l_is_one) out << "note: kappa_L = 1, c_alpha has no upper bound\n";
  out << "all_feasible " << (c.all_feasible() ? "true" : "false") << '\n';
}

}  // namespace dpp2
