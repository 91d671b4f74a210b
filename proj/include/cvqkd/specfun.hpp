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

// Log-space special functions: factorials, binomials, the regularized upper
// incomplete gamma function and overflow-free sums.

#ifndef CVQKD_SPECFUN_HPP_
#define CVQKD_SPECFUN_HPP_

#include <cstdint>
#include <limits>
#include <span>

namespace cvqkd::specfun {

// Natural logarithm of a nonnegative quantity. Negative infinity encodes zero.
struct LogReal {
  double value = -std::numeric_limits<double>::infinity();

  static constexpr LogReal zero() { return LogReal{}; }
  static constexpr LogReal one() { return LogReal{0.0}; }
  static LogReal from_linear(double x);

  bool is_zero() const { return value == -std::numeric_limits<double>::infinity(); }
  double linear() const;

  friend LogReal operator+(LogReal a, LogReal b);
  friend LogReal operator*(LogReal a, LogReal b) { return LogReal{a.value + b.value}; }
  friend bool operator==(LogReal a, LogReal b) = default;
};

// log(exp(a) + exp(b)) with the larger argument factored out.
double log_add(double a, double b);

// log(sum_i exp(terms[i])), max-shifted and Neumaier-compensated.
double log_sum_exp(std::span<const double> terms);

// ln(n!). Exact table for small n, Stirling series beyond.
double log_factorial(std::uint64_t n);
// Same value carried in extended precision; absolute error stays below
// 1e-10 even where ln(n!) is too large for a double ulp to resolve that.
long double log_factorial_extended(std::uint64_t n);

// ln C(n, k). Throws DomainError when k > n.
double log_binomial(std::uint64_t n, std::uint64_t k);

// Q(s, x) = Gamma(s, x) / Gamma(s). Throws DomainError for s <= 0 or x < 0.
double reg_upper_gamma(double s, double x);
// ln Q(s, x); finite far below the double underflow threshold.
double log_reg_upper_gamma(double s, double x);
// P(s, x) = 1 - Q(s, x), evaluated without cancellation when Q is near 1.
double reg_lower_gamma(double s, double x);

// Pr[Poisson(mean) <= k] = Q(k + 1, mean).
double poisson_cdf(std::uint64_t k, double mean);

}  // namespace cvqkd::specfun

#endif  // CVQKD_SPECFUN_HPP_
