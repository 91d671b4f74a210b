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

// Generalized Fock states sigma_p^n (uniform mixtures of n-mode number states
// with p photons in total), the Fock-basis coefficients of the heterodyne
// shell operator T_n, and the closed-form integrals I_n and J_n.

#ifndef CVQKD_FOCKSPACE_HPP_
#define CVQKD_FOCKSPACE_HPP_

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "cvqkd/montecarlo.hpp"

namespace cvqkd::fock {

inline constexpr std::uint64_t kEnumerationLimit = 10'000'000;

enum class DistributionKind { exact_enumeration, sampled };

// Occupation vectors stored row-major: entry (i, j) is the photon number of
// mode j in vector i.
class CompositionDistribution {
 public:
  CompositionDistribution(std::uint32_t modes, std::uint64_t photons, DistributionKind kind)
      : modes_(modes), photons_(photons), kind_(kind) {}

  std::uint32_t modes() const { return modes_; }
  std::uint64_t photons() const { return photons_; }
  DistributionKind kind() const { return kind_; }
  std::size_t size() const { return modes_ == 0 ? 0 : data_.size() / modes_; }
  std::span<const std::uint32_t> operator[](std::size_t i) const {
    return {data_.data() + i * modes_, modes_};
  }
  void push_back(std::span<const std::uint32_t> occupation);

 private:
  std::uint32_t modes_;
  std::uint64_t photons_;
  DistributionKind kind_;
  std::vector<std::uint32_t> data_;
};

// C(n + p - 1, p), or nullopt when it exceeds `limit`.
std::optional<std::uint64_t> composition_count(std::uint64_t n, std::uint64_t p,
                                               std::uint64_t limit = kEnumerationLimit);

// Calls visit(occupation) for every composition of p into n parts, first
// coordinate descending: (2,0), (1,1), (0,2). Throws SizeError past the guard.
void for_each_composition(std::uint32_t n, std::uint64_t p,
                          const std::function<void(std::span<const std::uint32_t>)>& visit);

CompositionDistribution enumerate_compositions(std::uint32_t n, std::uint64_t p);

// Uniform draw from the C(n+p-1, p) compositions (stars and bars).
std::vector<std::uint32_t> sample_composition(std::uint32_t n, std::uint64_t p, mc::Rng& rng);

CompositionDistribution sample_compositions(std::uint32_t n, std::uint64_t p,
                                            std::uint64_t count, mc::Rng& rng);

// e^{-a} sum_{k<n} a^k / k!, evaluated as the literal finite sum.
double closed_form_I(std::uint64_t n, double a);

struct JIntegral {
  // Q(n + k, a): the defining integral is the upper tail of a Gamma(n + k)
  // variable.
  double gamma_identity = 0.0;
  // Gamma(k+1, a)/Gamma(k+1) + e^{-a} sum_{m=k+1}^{k+n} a^m/m!, which equals
  // Q(n + k + 1, a) and disagrees with the integral by one shape unit.
  double printed_form = 0.0;
};

JIntegral closed_form_J(std::uint64_t n, std::uint64_t k, double a);

struct IntegralEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::uint64_t samples = 0;
};

// Plain Monte Carlo of the defining integral of J_n(k, a),
//   int_{y in R_+^n, sum y >= a} y_1^k / k! e^{-sum y} dy,
// drawing y_1 from an exponential with mean k + 1, the other coordinates from
// Exp(1), and scoring the importance weight on the event. The weight is
// bounded, so the reported standard error is reliable.
IntegralEstimate mc_J_integral(std::uint64_t n, std::uint64_t k, double a,
                               std::uint64_t samples, std::uint64_t seed,
                               unsigned workers = mc::default_workers());

// q_k of T_n = sum_k q_k Pi_k^n, for k = 0..k_max.
struct FockCoefficients {
  std::uint64_t n = 0;
  double d0 = 0.0;
  std::vector<double> q;
};

FockCoefficients t_coefficients(std::uint64_t n, double d0, std::uint64_t k_max);

// Coefficient-level check of U_n <= 2 T_n: q_k >= 1/2 for every integer k in
// [n d0 + 1, k_max] and q nondecreasing on [0, k_max].
struct OperatorInequalityReport {
  std::uint64_t n = 0;
  double d0 = 0.0;
  std::uint64_t k_min = 0;
  std::uint64_t k_max = 0;
  double min_margin = 0.0;  // min over checked k of 2 q_k - 1
  std::uint64_t argmin_k = 0;
  bool monotone = true;
  std::optional<std::uint64_t> first_violation;
  bool holds() const { return !first_violation && monotone; }
};

// Throws DomainError when k_max < n d0 + 1 (nothing to check).
OperatorInequalityReport verify_operator_inequality(std::uint64_t n, double d0,
                                                    std::uint64_t k_max);

// (lambda / (1 + lambda))^d: probability that a thermal mode with mean photon
// number lambda holds d or more photons.
double thermal_tail(double lambda, double d);

// Pr[max occupation >= m] under sigma_p^n by exhaustive enumeration.
double exact_max_tail(std::uint32_t n, std::uint64_t p, std::uint64_t m);

// Same probability for every p = 0..p_max, by counting compositions with all
// parts below m or, for small tails, by inclusion-exclusion over the modes
// that reach m. Exact up to extended-precision rounding, with no enumeration
// guard.
std::vector<double> exact_max_tail_table(std::uint32_t n, std::uint64_t m, std::uint64_t p_max);

}  // namespace cvqkd::fock

#endif  // CVQKD_FOCKSPACE_HPP_
