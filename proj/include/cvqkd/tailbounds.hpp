// Copyright 2026 The cvqkd Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Closed-form probabilistic bounds: sphere concentration factor g(delta),
// Laurent-Massart chi-squared tails, the Poisson Chernoff bound, the
// Gaussian-shell tail F with its exponent beta, and the single-mode
// maximum-photon tail of a generalized Fock state.

#ifndef CVQKD_TAILBOUNDS_HPP_
#define CVQKD_TAILBOUNDS_HPP_

#include <cstdint>
#include <limits>
#include <optional>
#include <string>

namespace cvqkd::tail {

enum class SphereVariant { real_sphere, complex_sphere };

const char* to_string(SphereVariant v);
SphereVariant sphere_variant_from_string(const std::string& s);

struct GFactorInputs {
  double delta = 0.0;  // failure probability
  std::uint64_t n = 1;  // kept modes
  std::uint64_t k = 1;  // tested modes
  SphereVariant variant = SphereVariant::real_sphere;
};

// A probability bound. `exponent` is the natural log of the unclamped bound;
// `bound` is exp(exponent) clamped to [0, 1].
struct TailBound {
  double bound = 1.0;
  double exponent = 0.0;
  // Event threshold for bounds of the form Pr[X <= t] or Pr[X >= t].
  double threshold = std::numeric_limits<double>::quiet_NaN();
  std::string meta;
};

TailBound make_tail_bound(double exponent, std::string meta);

// (1 - 1/sqrt(2))^2.
inline constexpr double kShellConstant = 0.08578643762690495;

// Concentration factor such that Pr[Z_n >= g * Y_k] <= delta for a uniform
// vector on the sphere. Accepts delta in (0, 2). Throws InfeasibleError when
// the denominator is nonpositive (k too small).
double g_factor(const GFactorInputs& in);
std::optional<double> try_g_factor(const GFactorInputs& in);

// Pr[chi2(k)/k <= 1 - 2 sqrt(x/k)] <= e^{-x}.
TailBound lm_lower_tail(std::uint64_t k, double x);
// Pr[chi2(n)/n >= 1 + 2 sqrt(x/n) + 2x/n] <= e^{-x}.
TailBound lm_upper_tail(std::uint64_t n, double x);

// Pr[Poisson(lambda) <= (1 - delta) lambda] <= (e^{-delta} / (1-delta)^{1-delta})^lambda.
TailBound chernoff_poisson_lower(double lambda, double delta);

// beta = c0 * d0 - ln(d0) / 2. May be negative (vacuous bound).
double beta_exponent(double d0);

// The Chernoff step behind beta needs n/2 below the Poisson mean n c0 d0,
// i.e. d0 > 1 / (2 c0). Below that e^{-beta n} is not a valid bound even
// where beta happens to be positive.
inline constexpr double kChernoffMinShellEnergy = 1.0 / (2.0 * kShellConstant);

struct ShellTail {
  TailBound gamma_form;     // Q(n/2, n d0 c0)
  TailBound chernoff_form;  // min(1, e^{-beta n})
  double beta = 0.0;
  bool chernoff_applicable = false;
};

ShellTail f_tail(std::uint64_t n, double d0);

// Union bound n * C(n+p-m-1, p-m) / C(n+p-1, p) on Pr[max occupation >= m]
// for the uniform mixture of n-mode Fock states with p photons. Exact zero
// when m > p.
TailBound max_photon_tail(std::uint64_t n, std::uint64_t p, std::uint64_t m);

// m* = ln(2n/eps) / ln(1 + 1/d).
double photon_cutoff(std::uint64_t n, double d, double eps);

}  // namespace cvqkd::tail

#endif  // CVQKD_TAILBOUNDS_HPP_
