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

#include "cvqkd/fockspace.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <random>
#include <string>

#include "cvqkd/errors.hpp"
#include "cvqkd/specfun.hpp"

namespace cvqkd::fock {
namespace {

// Uniform double in [0, 1) from the top 53 bits.
double uniform01(mc::Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

// Relative slack for monotonicity checks on independently rounded values.
constexpr double kMonotoneSlack = 4.0 * DBL_EPSILON;

std::uint64_t shell_k_min(std::uint64_t n, double d0) {
  return static_cast<std::uint64_t>(std::ceil(static_cast<double>(n) * d0 + 1.0));
}

}  // namespace

void CompositionDistribution::push_back(std::span<const std::uint32_t> occupation) {
  if (occupation.size() != modes_) {
    throw DomainError("CompositionDistribution: occupation vector has wrong length");
  }
  data_.insert(data_.end(), occupation.begin(), occupation.end());
}

std::optional<std::uint64_t> composition_count(std::uint64_t n, std::uint64_t p,
                                               std::uint64_t limit) {
  if (n == 0) throw DomainError("composition_count: n must be positive");
  const std::uint64_t total = n + p - 1;
  const std::uint64_t r = std::min<std::uint64_t>(p, n - 1);
  __extension__ using Wide = unsigned __int128;
  Wide c = 1;
  for (std::uint64_t i = 1; i <= r; ++i) {
    c = c * (total - r + i) / i;
    if (c > limit) return std::nullopt;
  }
  return static_cast<std::uint64_t>(c);
}

void for_each_composition(std::uint32_t n, std::uint64_t p,
                          const std::function<void(std::span<const std::uint32_t>)>& visit) {
  if (n == 0) throw DomainError("for_each_composition: n must be positive");
  if (!composition_count(n, p)) {
    throw SizeError("composition enumeration of p = " + std::to_string(p) + " into n = " +
                    std::to_string(n) + " modes exceeds " + std::to_string(kEnumerationLimit));
  }
  std::vector<std::uint32_t> occ(n, 0);
  auto recurse = [&](auto&& self, std::uint32_t mode, std::uint64_t left) -> void {
    if (mode + 1 == n) {
      occ[mode] = static_cast<std::uint32_t>(left);
      visit(occ);
      return;
    }
    for (std::uint64_t v = left + 1; v-- > 0;) {
      occ[mode] = static_cast<std::uint32_t>(v);
      self(self, mode + 1, left - v);
    }
  };
  recurse(recurse, 0, p);
}

CompositionDistribution enumerate_compositions(std::uint32_t n, std::uint64_t p) {
  CompositionDistribution out(n, p, DistributionKind::exact_enumeration);
  for_each_composition(n, p, [&](std::span<const std::uint32_t> occ) { out.push_back(occ); });
  return out;
}

std::vector<std::uint32_t> sample_composition(std::uint32_t n, std::uint64_t p, mc::Rng& rng) {
  if (n == 0) throw DomainError("sample_composition: n must be positive");
  // Selection sampling of the n - 1 bar positions among n + p - 1 slots.
  std::vector<std::uint32_t> occ(n, 0);
  std::uint64_t bars_needed = n - 1;
  std::uint64_t slots_left = n + p - 1;
  std::uint32_t mode = 0;
  while (slots_left > 0) {
    if (static_cast<double>(slots_left) * uniform01(rng) < static_cast<double>(bars_needed)) {
      --bars_needed;
      ++mode;
    } else {
      ++occ[mode];
    }
    --slots_left;
  }
  return occ;
}

CompositionDistribution sample_compositions(std::uint32_t n, std::uint64_t p,
                                            std::uint64_t count, mc::Rng& rng) {
  CompositionDistribution out(n, p, DistributionKind::sampled);
  for (std::uint64_t i = 0; i < count; ++i) out.push_back(sample_composition(n, p, rng));
  return out;
}

double closed_form_I(std::uint64_t n, double a) {
  if (n == 0) throw DomainError("closed_form_I: n must be positive");
  if (!(a >= 0.0)) throw DomainError("closed_form_I: a must be nonnegative");
  if (a == 0.0) return 1.0;
  std::vector<double> terms(n);
  const double log_a = std::log(a);
  for (std::uint64_t k = 0; k < n; ++k) {
    terms[k] = -a + static_cast<double>(k) * log_a - specfun::log_factorial(k);
  }
  return std::exp(specfun::log_sum_exp(terms));
}

JIntegral closed_form_J(std::uint64_t n, std::uint64_t k, double a) {
  if (n == 0) throw DomainError("closed_form_J: n must be positive");
  if (!(a >= 0.0)) throw DomainError("closed_form_J: a must be nonnegative");
  JIntegral out;
  out.gamma_identity = specfun::reg_upper_gamma(static_cast<double>(n + k), a);
  double tail_sum = 0.0;
  if (a > 0.0) {
    std::vector<double> terms;
    terms.reserve(n);
    const double log_a = std::log(a);
    for (std::uint64_t m = k + 1; m <= k + n; ++m) {
      terms.push_back(-a + static_cast<double>(m) * log_a - specfun::log_factorial(m));
    }
    tail_sum = std::exp(specfun::log_sum_exp(terms));
  }
  out.printed_form = specfun::reg_upper_gamma(static_cast<double>(k + 1), a) + tail_sum;
  return out;
}

IntegralEstimate mc_J_integral(std::uint64_t n, std::uint64_t k, double a,
                               std::uint64_t samples, std::uint64_t seed, unsigned workers) {
  if (n == 0) throw DomainError("mc_J_integral: n must be positive");
  if (!(a >= 0.0)) throw DomainError("mc_J_integral: a must be nonnegative");
  if (samples < 2) throw DomainError("mc_J_integral: need at least two samples");
  constexpr std::uint64_t kBatches = 256;
  constexpr std::uint64_t kStream = 0x4a494e54ULL;
  const double log_k_fact = specfun::log_factorial(k);
  const double rate = 1.0 / static_cast<double>(k + 1);
  const std::uint64_t batches = std::min(kBatches, samples);
  struct Moments {
    double sum = 0.0;
    double sum_sq = 0.0;
  };
  const auto parts = mc::map_trials<Moments>(
      batches, seed, kStream, workers, [&](mc::Rng& rng, std::uint64_t b) {
        const std::uint64_t begin = b * samples / batches;
        const std::uint64_t end = (b + 1) * samples / batches;
        std::exponential_distribution<double> expo(1.0);
        std::exponential_distribution<double> wide(rate);
        Moments m;
        for (std::uint64_t s = begin; s < end; ++s) {
          const double y1 = wide(rng);
          double total = y1;
          for (std::uint64_t i = 1; i < n; ++i) total += expo(rng);
          if (total < a) continue;
          // integrand y1^k e^{-y1} / k! over the proposal density rate e^{-rate y1}
          const double log_y1 = k == 0 ? 0.0 : static_cast<double>(k) * std::log(y1);
          const double w = std::exp(log_y1 - log_k_fact - (1.0 - rate) * y1 - std::log(rate));
          m.sum += w;
          m.sum_sq += w * w;
        }
        return m;
      });
  Moments total;
  for (const Moments& m : parts) {
    total.sum += m.sum;
    total.sum_sq += m.sum_sq;
  }
  const auto count = static_cast<double>(samples);
  IntegralEstimate est;
  est.samples = samples;
  est.mean = total.sum / count;
  const double var = std::max(0.0, (total.sum_sq - count * est.mean * est.mean) / (count - 1.0));
  est.std_error = std::sqrt(var / count);
  return est;
}

FockCoefficients t_coefficients(std::uint64_t n, double d0, std::uint64_t k_max) {
  if (n == 0) throw DomainError("t_coefficients: n must be positive");
  if (!(d0 >= 0.0)) throw DomainError("t_coefficients: d0 must be nonnegative");
  const auto needed = static_cast<std::uint64_t>(std::ceil(static_cast<double>(n) * d0)) + 1;
  if (k_max < needed) {
    throw DomainError("t_coefficients: k_max = " + std::to_string(k_max) +
                      " is below ceil(n d0) + 1 = " + std::to_string(needed));
  }
  FockCoefficients out{n, d0, {}};
  out.q.resize(k_max + 1);
  const double a = static_cast<double>(n) * d0;
  for (std::uint64_t k = 0; k <= k_max; ++k) {
    out.q[k] = specfun::reg_upper_gamma(static_cast<double>(n + k), a);
  }
  return out;
}

OperatorInequalityReport verify_operator_inequality(std::uint64_t n, double d0,
                                                    std::uint64_t k_max) {
  if (n == 0) throw DomainError("verify_operator_inequality: n must be positive");
  if (!(d0 >= 0.0)) throw DomainError("verify_operator_inequality: d0 must be nonnegative");
  OperatorInequalityReport r;
  r.n = n;
  r.d0 = d0;
  r.k_min = shell_k_min(n, d0);
  r.k_max = k_max;
  if (k_max < r.k_min) {
    throw DomainError("verify_operator_inequality: k_max = " + std::to_string(k_max) +
                      " is below n d0 + 1");
  }
  const double a = static_cast<double>(n) * d0;
  r.min_margin = std::numeric_limits<double>::infinity();
  double prev = -1.0;
  for (std::uint64_t k = 0; k <= k_max; ++k) {
    const double q = specfun::reg_upper_gamma(static_cast<double>(n + k), a);
    if (q < prev * (1.0 - kMonotoneSlack)) r.monotone = false;
    prev = q;
    if (k < r.k_min) continue;
    const double margin = 2.0 * q - 1.0;
    if (margin < r.min_margin) {
      r.min_margin = margin;
      r.argmin_k = k;
    }
    if (margin < 0.0 && !r.first_violation) r.first_violation = k;
  }
  return r;
}

double thermal_tail(double lambda, double d) {
  if (!(lambda > 0.0)) throw DomainError("thermal_tail: lambda must be positive");
  if (!(d >= 0.0)) throw DomainError("thermal_tail: d must be nonnegative");
  if (std::isinf(d)) return 0.0;
  return std::exp(-d * std::log1p(1.0 / lambda));
}

double exact_max_tail(std::uint32_t n, std::uint64_t p, std::uint64_t m) {
  std::uint64_t hits = 0;
  std::uint64_t total = 0;
  for_each_composition(n, p, [&](std::span<const std::uint32_t> occ) {
    ++total;
    if (*std::max_element(occ.begin(), occ.end()) >= m) ++hits;
  });
  return static_cast<double>(hits) / static_cast<double>(total);
}

std::vector<double> exact_max_tail_table(std::uint32_t n, std::uint64_t m, std::uint64_t p_max) {
  if (n == 0) throw DomainError("exact_max_tail_table: n must be positive");
  if (m == 0) throw DomainError("exact_max_tail_table: m must be positive");
  if (specfun::log_binomial(n + p_max - 1, p_max) > 11000.0) {
    throw SizeError("exact_max_tail_table: counts overflow extended precision");
  }
  // below[s] counts compositions of s into i parts with every part < m;
  // all[s] counts them without the restriction.
  std::vector<long double> below(p_max + 1, 0.0L);
  std::vector<long double> all(p_max + 1, 1.0L);
  std::vector<long double> next(p_max + 1, 0.0L);
  for (std::uint64_t s = 0; s <= p_max; ++s) below[s] = s < m ? 1.0L : 0.0L;
  for (std::uint32_t i = 2; i <= n; ++i) {
    for (std::uint64_t s = 0; s <= p_max; ++s) {
      long double acc = 0.0L;
      const std::uint64_t top = std::min<std::uint64_t>(s, m - 1);
      for (std::uint64_t t = 0; t <= top; ++t) acc += below[s - t];
      next[s] = acc;
    }
    below.swap(next);
    for (std::uint64_t s = 1; s <= p_max; ++s) all[s] += all[s - 1];
  }

  const long double lf_n1 = specfun::log_factorial_extended(n - 1);
  auto log_count = [&](std::uint64_t p) {  // ln C(n + p - 1, n - 1)
    return specfun::log_factorial_extended(n + p - 1) - specfun::log_factorial_extended(p) - lf_n1;
  };
  const long double lf_n = specfun::log_factorial_extended(n);
  std::vector<double> tail(p_max + 1, 0.0);
  for (std::uint64_t p = m; p <= p_max; ++p) {
    const long double log_total = log_count(p);
    // Inclusion-exclusion term j: C(n, j) Pr[j given modes all hold >= m].
    auto term = [&](std::uint64_t j) {
      return std::exp(lf_n - specfun::log_factorial_extended(j) -
                      specfun::log_factorial_extended(n - j) + log_count(p - j * m) - log_total);
    };
    const long double first = term(1);
    if (first < 0.5L) {
      // Partial sums bracket the tail and the terms shrink geometrically, so
      // the alternating sum keeps full relative precision for small tails.
      long double sum = first;
      const std::uint64_t j_max = std::min<std::uint64_t>(n, p / m);
      for (std::uint64_t j = 2; j <= j_max; ++j) {
        const long double t = term(j);
        sum += (j % 2 == 0) ? -t : t;
        if (t < 1e-22L * sum) break;
      }
      tail[p] = static_cast<double>(std::clamp(sum, 0.0L, 1.0L));
    } else {
      tail[p] = static_cast<double>(std::clamp(1.0L - below[p] / all[p], 0.0L, 1.0L));
    }
  }
  return tail;
}

}  // namespace cvqkd::fock
