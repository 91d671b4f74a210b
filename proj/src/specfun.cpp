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

#include "cvqkd/specfun.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "cvqkd/errors.hpp"

namespace cvqkd::specfun {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr long double kLnSqrt2Pi = 0.918938533204672741780329736405617639861L;
constexpr long double kSumTolerance = 1e-21L;
constexpr int kMaxIterations = 50'000'000;

// Neumaier's variant of Kahan summation.
class CompensatedSum {
 public:
  void add(long double x) {
    const long double t = sum_ + x;
    if (std::fabs(sum_) >= std::fabs(x)) {
      carry_ += (sum_ - t) + x;
    } else {
      carry_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  long double value() const { return sum_ + carry_; }

 private:
  long double sum_ = 0.0L;
  long double carry_ = 0.0L;
};

// ln(n!) for n < 32, from exactly accumulated products.
const std::array<long double, 32>& small_log_factorials() {
  static const std::array<long double, 32> table = [] {
    std::array<long double, 32> t{};
    long double f = 1.0L;
    t[0] = 0.0L;
    for (std::size_t i = 1; i < t.size(); ++i) {
      f *= static_cast<long double>(i);
      t[i] = std::log(f);
    }
    return t;
  }();
  return table;
}

long double log_gamma_l(long double s) {
  int sign = 0;
  return ::lgammal_r(s, &sign);
}

bool is_integral(double s) { return s == std::floor(s); }

void check_gamma_args(double s, double x) {
  if (!(s > 0.0) || !std::isfinite(s)) {
    throw DomainError("incomplete gamma: shape must be positive and finite, got " +
                      std::to_string(s));
  }
  if (!(x >= 0.0)) {
    throw DomainError("incomplete gamma: argument must be nonnegative, got " +
                      std::to_string(x));
  }
}

// Series for the lower tail, valid (and used) for x < s + 1.
long double log_lower_series(long double s, long double x) {
  long double term = 1.0L;
  CompensatedSum sum;
  sum.add(term);
  long double ap = s;
  for (int i = 0; i < kMaxIterations; ++i) {
    ap += 1.0L;
    term *= x / ap;
    sum.add(term);
    if (term < sum.value() * kSumTolerance) {
      return s * std::log(x) - x - log_gamma_l(s + 1.0L) + std::log(sum.value());
    }
  }
  throw DomainError("incomplete gamma: series failed to converge");
}

// Modified Lentz continued fraction for the upper tail, used for x >= s + 1.
long double log_upper_fraction(long double s, long double x) {
  constexpr long double kTiny = 1e-4000L;
  long double b = x + 1.0L - s;
  long double c = 1.0L / kTiny;
  long double d = 1.0L / b;
  long double h = d;
  for (int i = 1; i < kMaxIterations; ++i) {
    const long double an = -static_cast<long double>(i) * (static_cast<long double>(i) - s);
    b += 2.0L;
    d = an * d + b;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0L / d;
    const long double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0L) < kSumTolerance) {
      return s * std::log(x) - x - log_gamma_l(s) + std::log(h);
    }
  }
  throw DomainError("incomplete gamma: continued fraction failed to converge");
}

// Q(m, x) = e^{-x} sum_{j<m} x^j / j!, summed outward from the largest term.
long double log_upper_poisson_sum(std::uint64_t m, long double x) {
  const auto floor_x = static_cast<std::uint64_t>(std::floor(std::min(x, 1e18L)));
  const std::uint64_t peak = std::min<std::uint64_t>(m - 1, floor_x);
  const long double log_peak = -x + static_cast<long double>(peak) * std::log(x) -
                               log_factorial_extended(peak);
  CompensatedSum sum;
  sum.add(1.0L);
  long double ratio = 1.0L;
  for (std::uint64_t j = peak; j >= 1; --j) {
    ratio *= static_cast<long double>(j) / x;
    sum.add(ratio);
    if (ratio < sum.value() * kSumTolerance) break;
  }
  ratio = 1.0L;
  for (std::uint64_t j = peak + 1; j < m; ++j) {
    ratio *= x / static_cast<long double>(j);
    sum.add(ratio);
    if (ratio < sum.value() * kSumTolerance) break;
  }
  return log_peak + std::log(sum.value());
}

constexpr double kPoissonPathMaxShape = 1e12;

long double log_q_impl(double s, double x) {
  if (x == 0.0) return 0.0L;
  if (std::isinf(x)) return -std::numeric_limits<long double>::infinity();
  const long double ls = s;
  const long double lx = x;
  if (is_integral(s) && s <= kPoissonPathMaxShape) {
    return log_upper_poisson_sum(static_cast<std::uint64_t>(s), lx);
  }
  if (lx < ls + 1.0L) {
    return std::log1p(-std::exp(log_lower_series(ls, lx)));
  }
  return log_upper_fraction(ls, lx);
}

long double log_p_impl(double s, double x) {
  if (x == 0.0) return -std::numeric_limits<long double>::infinity();
  if (std::isinf(x)) return 0.0L;
  const long double ls = s;
  const long double lx = x;
  if (lx < ls + 1.0L) return log_lower_series(ls, lx);
  return std::log1p(-std::exp(log_q_impl(s, x)));
}

}  // namespace

LogReal LogReal::from_linear(double x) {
  if (x < 0.0) throw DomainError("LogReal: negative linear value");
  return LogReal{x == 0.0 ? kNegInf : std::log(x)};
}

double LogReal::linear() const { return std::exp(value); }

LogReal operator+(LogReal a, LogReal b) { return LogReal{log_add(a.value, b.value)}; }

double log_add(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double hi = std::max(a, b);
  const double lo = std::min(a, b);
  return hi + std::log1p(std::exp(lo - hi));
}

double log_sum_exp(std::span<const double> terms) {
  double hi = kNegInf;
  for (double t : terms) hi = std::max(hi, t);
  if (hi == kNegInf) return kNegInf;
  CompensatedSum sum;
  for (double t : terms) sum.add(std::exp(static_cast<long double>(t) - hi));
  return static_cast<double>(hi + std::log(sum.value()));
}

long double log_factorial_extended(std::uint64_t n) {
  const auto& table = small_log_factorials();
  if (n < table.size()) return table[n];
  const long double x = static_cast<long double>(n);
  const long double inv = 1.0L / x;
  const long double inv2 = inv * inv;
  // Stirling series through the 1/n^9 term; truncation error < 1e-21 here.
  const long double correction =
      inv * (1.0L / 12.0L -
             inv2 * (1.0L / 360.0L -
                     inv2 * (1.0L / 1260.0L -
                             inv2 * (1.0L / 1680.0L - inv2 * (1.0L / 1188.0L)))));
  return x * std::log(x) - x + 0.5L * std::log(x) + kLnSqrt2Pi + correction;
}

double log_factorial(std::uint64_t n) {
  return static_cast<double>(log_factorial_extended(n));
}

double log_binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) {
    throw DomainError("log_binomial: k = " + std::to_string(k) + " exceeds n = " +
                      std::to_string(n));
  }
  if (k == 0 || k == n) return 0.0;
  return static_cast<double>(log_factorial_extended(n) - log_factorial_extended(k) -
                             log_factorial_extended(n - k));
}

double reg_upper_gamma(double s, double x) {
  check_gamma_args(s, x);
  return static_cast<double>(std::min(1.0L, std::exp(log_q_impl(s, x))));
}

double log_reg_upper_gamma(double s, double x) {
  check_gamma_args(s, x);
  return static_cast<double>(std::min(0.0L, log_q_impl(s, x)));
}

double reg_lower_gamma(double s, double x) {
  check_gamma_args(s, x);
  return static_cast<double>(std::min(1.0L, std::exp(log_p_impl(s, x))));
}

double poisson_cdf(std::uint64_t k, double mean) {
  if (!(mean >= 0.0)) throw DomainError("poisson_cdf: negative mean");
  return reg_upper_gamma(static_cast<double>(k) + 1.0, mean);
}

}  // namespace cvqkd::specfun
