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

// Shared helpers for the test binaries: seeded generators for property
// tests and goodness-of-fit statistics.

#ifndef CVQKD_TESTS_SUPPORT_TESTING_HPP_
#define CVQKD_TESTS_SUPPORT_TESTING_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <random>
#include <span>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

#include "cvqkd/montecarlo.hpp"

namespace cvqkd::testing {

// Draws inputs for property tests. Each property gets its own stream so that
// adding a property does not perturb the others.
class Gen {
 public:
  explicit Gen(std::uint64_t stream) : rng_(mc::make_rng(0x7e57ULL, stream, 0)) {}

  std::uint64_t integer(std::uint64_t lo, std::uint64_t hi) {
    return std::uniform_int_distribution<std::uint64_t>(lo, hi)(rng_);
  }
  double real(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  double log_uniform(double lo, double hi) {
    return std::exp(real(std::log(lo), std::log(hi)));
  }
  mc::Rng& rng() { return rng_; }

 private:
  mc::Rng rng_;
};

struct FitResult {
  double statistic = 0.0;
  double p_value = 0.0;
};

// Asymptotic Kolmogorov distribution: Pr[K > t].
inline double kolmogorov_survival(double t) {
  if (t < 0.2) return 1.0;
  double s = 0.0;
  for (int j = 1; j <= 100; ++j) {
    const double term = std::exp(-2.0 * j * j * t * t);
    s += (j % 2 == 1 ? 2.0 : -2.0) * term;
    if (term < 1e-18) break;
  }
  return std::clamp(s, 0.0, 1.0);
}

inline FitResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  const double ne = na * nb / (na + nb);
  const double sq = std::sqrt(ne);
  return {d, kolmogorov_survival((sq + 0.12 + 0.11 / sq) * d)};
}

inline FitResult ks_one_sample(std::vector<double> xs, const std::function<double(double)>& cdf) {
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = cdf(xs[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  const double sq = std::sqrt(n);
  return {d, kolmogorov_survival((sq + 0.12 + 0.11 / sq) * d)};
}

// Pearson chi-squared goodness of fit; p-value from Boost's incomplete gamma.
inline FitResult chi_squared_gof(std::span<const std::uint64_t> observed,
                                 std::span<const double> probabilities) {
  const double total =
      static_cast<double>(std::accumulate(observed.begin(), observed.end(), std::uint64_t{0}));
  double stat = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    const double e = total * probabilities[i];
    const double diff = static_cast<double>(observed[i]) - e;
    stat += diff * diff / e;
  }
  const double dof = static_cast<double>(observed.size() - 1);
  return {stat, boost::math::gamma_q(dof / 2.0, stat / 2.0)};
}

struct Moments {
  double mean = 0.0;
  double variance = 0.0;
  double kurtosis = 0.0;  // E[(x - mu)^4] / sigma^4; 3 for a Gaussian
  double std_error = 0.0;
};

inline Moments moments(std::span<const double> xs) {
  Moments m;
  const double n = static_cast<double>(xs.size());
  for (double x : xs) m.mean += x;
  m.mean /= n;
  double m2 = 0.0;
  double m4 = 0.0;
  for (double x : xs) {
    const double d = x - m.mean;
    m2 += d * d;
    m4 += d * d * d * d;
  }
  m.variance = m2 / (n - 1.0);
  m.kurtosis = (m4 / n) / ((m2 / n) * (m2 / n));
  m.std_error = std::sqrt(m.variance / n);
  return m;
}

}  // namespace cvqkd::testing

#endif  // CVQKD_TESTS_SUPPORT_TESTING_HPP_
