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

// Desk-scale simulation of the entanglement-based Gaussian protocol front
// end: two-mode squeezed vacuum source, thermal-loss channel, heterodyne or
// homodyne detection, classical symmetrization and the energy test.
//
// Units: vacuum quadrature variance 1. A thermal mode with mean photon number
// N has quadrature variance 2N + 1; a heterodyne outcome of a mode with
// quadrature variance V has per-component variance (V + 1) / 2.

#ifndef CVQKD_PROTOCOL_HPP_
#define CVQKD_PROTOCOL_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "cvqkd/montecarlo.hpp"
#include "cvqkd/record.hpp"
#include "cvqkd/symmetry.hpp"

namespace cvqkd::protocol {

inline constexpr const char* kShotNoiseConvention =
    "vacuum quadrature variance 1; thermal N photons -> variance 2N+1; heterodyne outcome "
    "variance (V+1)/2 per quadrature";

inline constexpr double kDefaultTestMargin = 1.2;

struct ChannelModel {
  double transmittance = 1.0;  // tau in (0, 1]
  double excess_noise = 0.0;   // xi >= 0, shot-noise units
};

enum class RotationStrategy { automatic, explicit_matrix, implicit_sphere };

// Explicit Haar matrices are materialized up to this many modes under the
// automatic strategy.
inline constexpr std::uint64_t kExplicitRotationMaxModes = 64;

struct ProtocolConfig {
  std::uint64_t n = 1;
  std::uint64_t k = 1;
  double lambda = 1.0;  // mean photon number of Alice's thermal mode
  Detection detection = Detection::heterodyne;
  ChannelModel channel;
  double y_test = 1.0;
  std::uint64_t seed = 0;
  RotationStrategy rotation = RotationStrategy::automatic;

  void validate() const;
};

// Quadrature variance of Bob's thermal mode: 1 + 2 tau lambda + tau xi.
double bob_quadrature_variance(const ProtocolConfig& cfg);
// E[q^2 + p^2] (heterodyne) or E[x^2] (homodyne) per mode; this is E[Y_k].
double expected_mode_energy(const ProtocolConfig& cfg);
double default_y_test(const ProtocolConfig& cfg);

QuadratureRecord simulate_bob_outcomes(const ProtocolConfig& cfg, mc::Rng& rng);

// Alice's heterodyne outcomes together with Bob's, with the two-mode squeezed
// vacuum correlations. Alice is trusted: her record is never tested.
struct JointRecords {
  QuadratureRecord alice;
  QuadratureRecord bob;
};
JointRecords simulate_joint_outcomes(const ProtocolConfig& cfg, mc::Rng& rng);

struct FrontEndResult {
  symmetry::TestOutcome outcome;
  QuadratureRecord symmetrized;
  // Data of the n modes handed to the downstream protocol.
  std::span<const double> kept_values() const;
};

// Simulate, symmetrize with a fresh Haar rotation, test the first k modes.
FrontEndResult run_front_end(const ProtocolConfig& cfg, mc::Rng& rng);

struct TrialSummary {
  bool passed = false;
  double y_k = 0.0;
  double z_n = 0.0;
};

struct AbortRateReport {
  std::uint64_t trials = 0;
  std::uint64_t aborts = 0;
  mc::WilsonInterval interval;
  double expected_y_k = 0.0;
  double mean_y_k = 0.0;
  std::vector<TrialSummary> runs;
};

// Stream tag of the per-trial generators used by estimate_abort_rate: trial i
// runs on mc::make_rng(cfg.seed, kFrontEndStream, i).
inline constexpr std::uint64_t kFrontEndStream = 0x46524f4e54ULL;

// Trial i runs on a generator derived from (cfg.seed, i). Throws DomainError
// for trials == 0.
AbortRateReport estimate_abort_rate(const ProtocolConfig& cfg, std::uint64_t trials,
                                    unsigned workers = mc::default_workers());

}  // namespace cvqkd::protocol

#endif  // CVQKD_PROTOCOL_HPP_
