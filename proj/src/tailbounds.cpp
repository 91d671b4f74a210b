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

#include "cvqkd/tailbounds.hpp"

#include <cmath>

#include "cvqkd/errors.hpp"
#include "cvqkd/specfun.hpp"

namespace cvqkd::tail {

const char* to_string(SphereVariant v) {
  return v == SphereVariant::real_sphere ? "real_sphere" : "complex_sphere";
}

SphereVariant sphere_variant_from_string(const std::string& s) {
  if (s == "real_sphere" || s == "real") return SphereVariant::real_sphere;
  if (s == "complex_sphere" || s == "complex") return SphereVariant::complex_sphere;
  throw DomainError("unknown sphere variant '" + s + "'");
}

TailBound make_tail_bound(double exponent, std::string meta) {
  TailBound t;
  t.exponent = exponent;
  t.bound = exponent >= 0.0 ? 1.0 : std::exp(exponent);
  t.meta = std::move(meta);
  return t;
}

namespace {

struct GTerms {
  double numerator;
  double denominator;
};

GTerms g_terms(const GFactorInputs& in) {
  if (!(in.delta > 0.0 && in.delta < 2.0)) {
    throw DomainError("g_factor: delta must lie in (0, 2)");
  }
  if (in.n == 0 || in.k == 0) throw DomainError("g_factor: n and k must be positive");
  const double n = static_cast<double>(in.n);
  const double k = static_cast<double>(in.k);
  const double log2d = std::log(2.0 / in.delta);
  if (in.variant == SphereVariant::real_sphere) {
    return {1.0 + 2.0 * std::sqrt(log2d / n) + 2.0 * log2d / n,
            1.0 - 2.0 * std::sqrt(log2d / k)};
  }
  // log(1/delta) turns negative for delta > 1; its positive part is used.
  const double log1d = std::max(0.0, std::log(1.0 / in.delta));
  return {1.0 + 2.0 * std::sqrt(log1d / (2.0 * n)) + 2.0 * log2d / (2.0 * n),
          1.0 - std::sqrt((2.0 / k) * log2d)};
}

}  // namespace

double g_factor(const GFactorInputs& in) {
  const GTerms t = g_terms(in);
  if (!(t.denominator > 0.0)) {
    throw InfeasibleError("g_factor: denominator " + std::to_string(t.denominator) +
                          " is not positive; increase k (k = " + std::to_string(in.k) +
                          ")");
  }
  return t.numerator / t.denominator;
}

std::optional<double> try_g_factor(const GFactorInputs& in) {
  const GTerms t = g_terms(in);
  if (!(t.denominator > 0.0)) return std::nullopt;
  return t.numerator / t.denominator;
}

TailBound lm_lower_tail(std::uint64_t k, double x) {
  if (k == 0 || !(x > 0.0)) throw DomainError("lm_lower_tail: need k >= 1 and x > 0");
  TailBound t = make_tail_bound(-x, "Laurent-Massart lower chi-squared tail");
  t.threshold = 1.0 - 2.0 * std::sqrt(x / static_cast<double>(k));
  return t;
}

TailBound lm_upper_tail(std::uint64_t n, double x) {
  if (n == 0 || !(x > 0.0)) throw DomainError("lm_upper_tail: need n >= 1 and x > 0");
  const double nn = static_cast<double>(n);
  TailBound t = make_tail_bound(-x, "Laurent-Massart upper chi-squared tail");
  t.threshold = 1.0 + 2.0 * std::sqrt(x / nn) + 2.0 * x / nn;
  return t;
}

TailBound chernoff_poisson_lower(double lambda, double delta) {
  if (!(lambda > 0.0)) throw DomainError("chernoff_poisson_lower: lambda must be positive");
  if (!(delta > 0.0 && delta < 1.0)) {
    throw DomainError("chernoff_poisson_lower: delta must lie in (0, 1)");
  }
  TailBound t = make_tail_bound(lambda * (-delta - (1.0 - delta) * std::log1p(-delta)),
                                "Chernoff lower tail of a Poisson variable");
  t.threshold = (1.0 - delta) * lambda;
  return t;
}

double beta_exponent(double d0) {
  if (!(d0 > 0.0)) throw DomainError("beta_exponent: d0 must be positive");
  return kShellConstant * d0 - 0.5 * std::log(d0);
}

ShellTail f_tail(std::uint64_t n, double d0) {
  if (n == 0) throw DomainError("f_tail: n must be positive");
  const double nn = static_cast<double>(n);
  ShellTail out;
  out.beta = beta_exponent(d0);
  out.chernoff_applicable = d0 > kChernoffMinShellEnergy;
  out.gamma_form = make_tail_bound(specfun::log_reg_upper_gamma(nn / 2.0, nn * d0 * kShellConstant),
                                   "Q(n/2, n d0 c0)");
  out.chernoff_form = make_tail_bound(-out.beta * nn, "exp(-beta n)");
  return out;
}

TailBound max_photon_tail(std::uint64_t n, std::uint64_t p, std::uint64_t m) {
  if (n == 0) throw DomainError("max_photon_tail: n must be positive");
  if (m == 0) throw DomainError("max_photon_tail: m must be positive");
  if (m > p) {
    TailBound t = make_tail_bound(-std::numeric_limits<double>::infinity(),
                                  "impossible: m exceeds total photon number");
    t.bound = 0.0;
    t.threshold = static_cast<double>(m);
    return t;
  }
  const double log_bound = std::log(static_cast<double>(n)) +
                           specfun::log_binomial(n + p - m - 1, p - m) -
                           specfun::log_binomial(n + p - 1, p);
  TailBound t = make_tail_bound(log_bound, "union bound over modes");
  t.threshold = static_cast<double>(m);
  return t;
}

double photon_cutoff(std::uint64_t n, double d, double eps) {
  if (n == 0) throw DomainError("photon_cutoff: n must be positive");
  if (!(d > 0.0)) throw DomainError("photon_cutoff: d must be positive");
  if (!(eps > 0.0 && eps < 1.0)) throw DomainError("photon_cutoff: eps must lie in (0, 1)");
  return std::log(2.0 * static_cast<double>(n) / eps) / std::log1p(1.0 / d);
}

}  // namespace cvqkd::tail
