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

// Security-parameter calculator: Fock cutoffs d_A and d_B, the shell energy
// d_0, the homodyne exponent beta and the final general-attack epsilon.

#ifndef CVQKD_SECPARAMS_HPP_
#define CVQKD_SECPARAMS_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cvqkd/montecarlo.hpp"
#include "cvqkd/protocol.hpp"
#include "cvqkd/record.hpp"
#include "cvqkd/tailbounds.hpp"

namespace cvqkd::secparams {

struct SecurityInputs {
  std::uint64_t n = 0;
  std::uint64_t k = 0;
  double lambda = 0.0;
  double y_test = 0.0;
  double eps_test = 0.0;
  double eps_a = 0.0;
  // Share of eps_test given to Bob's projection; defaults to eps_test - eps_a.
  std::optional<double> eps_share;
  // Collective-attack constants of 2^{-c delta^2 n}. No defaults exist.
  std::optional<double> c;
  std::optional<double> delta;
  Detection detection = Detection::heterodyne;
  tail::SphereVariant g_variant = tail::SphereVariant::real_sphere;
  // Observed homodyne test statistic; Y_test is used when absent.
  std::optional<double> y_k_observed;

  // Throws DomainError naming the first invalid or missing field.
  void validate() const;
};

struct SecurityBounds {
  double d_a = 0.0;
  double d_0 = 0.0;
  double d_b = 0.0;
  std::uint64_t d_a_dim = 0;  // ceil(d_a), the Hilbert-space dimension used
  std::uint64_t d_b_dim = 0;
  double g = 0.0;
  double beta = 0.0;  // homodyne only; NaN for heterodyne
  double eps_share = 0.0;
  // log2 of the postselection factor, ((d_a_dim d_b_dim)^2 - 1) log2(n + 1).
  double postselection_exponent = 0.0;
  // log2 of the collective-attack term, -c delta^2 n.
  double collective_exponent = 0.0;
  double eps_total = 1.0;
  bool feasible = false;
  // Homodyne only: smallest feasible n at or above the input, and the
  // bisection edge of the feasible n below it.
  std::optional<std::uint64_t> minimal_feasible_n;
  std::optional<std::uint64_t> largest_feasible_n_below;
  std::vector<std::string> notes;
};

inline constexpr const char* kPostselectionFormula =
    "eps = 2^(-c delta^2 n + ((ceil(d_A) ceil(d_B))^2 - 1) log2(n+1)) + 2 eps_test";

// log(n / eps_a) / log(1 + 1/lambda).
double dim_alice(std::uint64_t n, double lambda, double eps_a);

// d_0 = g(eps/4) Y_test, d_B = log(4n/eps) / log(1 + 1/d_0).
SecurityBounds dims_heterodyne(const SecurityInputs& in, double eps);

// d_0 = 2 g(eps/16) Y_k, beta = c0 d_0 - log(d_0)/2; feasible iff the
// shell Chernoff step applies, beta > 0 and e^{-beta n} <= eps/16.
SecurityBounds dims_homodyne(const SecurityInputs& in, double eps, double y_k_observed);

// e^{-beta n} <= eps / 16, inclusive.
bool shell_tail_within_budget(double beta, std::uint64_t n, double eps);

// Upper root of beta(d0) = 0, bracketed by bisection to below 1e-12.
double beta_root();

// Throws InfeasibleError when bounds.feasible is false.
double epsilon_general(const SecurityInputs& in, const SecurityBounds& bounds);

// Whole pipeline: validate, split the budget, dimensions, final epsilon.
SecurityBounds compute_bounds(const SecurityInputs& in);

// Classical surrogate of the heterodyne bad event {test passes and some kept
// mode holds >= d_B photons}. A passing trial scores 1 if Z_n >= d_0, and
// otherwise the exact probability that sigma_p^n with p = floor(n Z_n) has a
// mode at or above ceil(d_B).
struct BadEventReport {
  std::uint64_t trials = 0;
  std::uint64_t passes = 0;
  std::uint64_t shell_exceedances = 0;
  double d_0 = 0.0;
  double d_b = 0.0;
  std::uint64_t cutoff = 0;
  double photon_tail_mass = 0.0;
  double frequency = 0.0;
  double eps = 0.0;
  bool within_eps() const { return frequency <= eps; }
};

BadEventReport estimate_bad_event_frequency(const protocol::ProtocolConfig& cfg, double eps,
                                            std::uint64_t trials,
                                            tail::SphereVariant variant =
                                                tail::SphereVariant::real_sphere,
                                            unsigned workers = mc::default_workers());

}  // namespace cvqkd::secparams

#endif  // CVQKD_SECPARAMS_HPP_
