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

#include "cvqkd/protocol.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "cvqkd/errors.hpp"

namespace cvqkd::protocol {
namespace {

bool use_explicit_rotation(const ProtocolConfig& cfg) {
  switch (cfg.rotation) {
    case RotationStrategy::explicit_matrix:
      return true;
    case RotationStrategy::implicit_sphere:
      return false;
    case RotationStrategy::automatic:
      break;
  }
  return cfg.n + cfg.k <= kExplicitRotationMaxModes;
}

}  // namespace

void ProtocolConfig::validate() const {
  if (n < 1 || k < 1) throw DomainError("protocol: n and k must be at least 1");
  if (!(lambda > 0.0)) throw DomainError("protocol: lambda must be positive");
  if (!(channel.transmittance > 0.0 && channel.transmittance <= 1.0)) {
    throw DomainError("protocol: transmittance must lie in (0, 1]");
  }
  if (!(channel.excess_noise >= 0.0)) throw DomainError("protocol: excess noise must be >= 0");
  if (!(y_test >= 0.0)) throw DomainError("protocol: Y_test must be nonnegative");
}

double bob_quadrature_variance(const ProtocolConfig& cfg) {
  return 1.0 + 2.0 * cfg.channel.transmittance * cfg.lambda +
         cfg.channel.transmittance * cfg.channel.excess_noise;
}

double expected_mode_energy(const ProtocolConfig& cfg) {
  const double v = bob_quadrature_variance(cfg);
  return cfg.detection == Detection::heterodyne ? v + 1.0 : v;
}

double default_y_test(const ProtocolConfig& cfg) {
  return kDefaultTestMargin * expected_mode_energy(cfg);
}

QuadratureRecord simulate_bob_outcomes(const ProtocolConfig& cfg, mc::Rng& rng) {
  cfg.validate();
  const std::uint64_t m = cfg.n + cfg.k;
  const double v = bob_quadrature_variance(cfg);
  QuadratureRecord rec;
  rec.detection = cfg.detection;
  rec.tested_modes = cfg.k;
  if (cfg.detection == Detection::heterodyne) {
    std::normal_distribution<double> outcome(0.0, std::sqrt((v + 1.0) / 2.0));
    rec.values.resize(2 * m);
    for (double& x : rec.values) x = outcome(rng);
  } else {
    std::normal_distribution<double> outcome(0.0, std::sqrt(v));
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
    rec.values.resize(m);
    rec.angles.resize(m);
    for (std::uint64_t j = 0; j < m; ++j) {
      rec.angles[j] = angle(rng);
      rec.values[j] = outcome(rng);
    }
  }
  return rec;
}

JointRecords simulate_joint_outcomes(const ProtocolConfig& cfg, mc::Rng& rng) {
  cfg.validate();
  const std::uint64_t m = cfg.n + cfg.k;
  const double va = 2.0 * cfg.lambda + 1.0;
  const double vb = bob_quadrature_variance(cfg);
  const double c = std::sqrt(cfg.channel.transmittance * (va * va - 1.0));
  const double slope = c / vb;
  const double resid = std::sqrt(std::max(0.0, va - c * c / vb));
  std::normal_distribution<double> normal(0.0, 1.0);
  const double inv_sqrt2 = 1.0 / std::numbers::sqrt2;

  JointRecords out;
  out.alice.detection = Detection::heterodyne;
  out.alice.tested_modes = cfg.k;
  out.alice.values.resize(2 * m);
  out.bob.detection = cfg.detection;
  out.bob.tested_modes = cfg.k;
  out.bob.values.resize(cfg.detection == Detection::heterodyne ? 2 * m : m);
  if (cfg.detection == Detection::homodyne) out.bob.angles.resize(m);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);

  for (std::uint64_t j = 0; j < m; ++j) {
    // Wigner-function sample of the two-mode Gaussian state: covariance
    // [[va I, c Z], [c Z, vb I]] with Z = diag(1, -1).
    const double qb = std::sqrt(vb) * normal(rng);
    const double pb = std::sqrt(vb) * normal(rng);
    const double qa = slope * qb + resid * normal(rng);
    const double pa = -slope * pb + resid * normal(rng);
    out.alice.values[2 * j] = (qa + normal(rng)) * inv_sqrt2;
    out.alice.values[2 * j + 1] = (pa + normal(rng)) * inv_sqrt2;
    if (cfg.detection == Detection::heterodyne) {
      out.bob.values[2 * j] = (qb + normal(rng)) * inv_sqrt2;
      out.bob.values[2 * j + 1] = (pb + normal(rng)) * inv_sqrt2;
    } else {
      const double theta = angle(rng);
      out.bob.angles[j] = theta;
      out.bob.values[j] = std::cos(theta) * qb + std::sin(theta) * pb;
    }
  }
  return out;
}

std::span<const double> FrontEndResult::kept_values() const {
  const std::size_t offset = symmetrized.tested_modes * symmetrized.values_per_mode();
  return std::span<const double>(symmetrized.values).subspan(offset);
}

FrontEndResult run_front_end(const ProtocolConfig& cfg, mc::Rng& rng) {
  QuadratureRecord raw = simulate_bob_outcomes(cfg, rng);
  FrontEndResult out;
  const std::uint64_t m = cfg.n + cfg.k;
  if (!use_explicit_rotation(cfg)) {
    out.symmetrized = symmetry::symmetrize_implicit(raw, rng);
  } else if (cfg.detection == Detection::heterodyne) {
    const auto rot = symmetry::to_symplectic(symmetry::sample_haar_unitary(m, rng));
    out.symmetrized = symmetry::symmetrize(raw, rot);
  } else {
    const symmetry::OrthogonalRotation rot{symmetry::sample_haar_orthogonal(m, rng)};
    out.symmetrized = symmetry::symmetrize(raw, rot);
  }
  out.outcome = symmetry::energy_test(out.symmetrized, cfg.y_test);
  return out;
}

AbortRateReport estimate_abort_rate(const ProtocolConfig& cfg, std::uint64_t trials,
                                    unsigned workers) {
  if (trials == 0) throw DomainError("estimate_abort_rate: trials must be positive");
  cfg.validate();
  AbortRateReport r;
  r.trials = trials;
  r.expected_y_k = expected_mode_energy(cfg);
  r.runs = mc::map_trials<TrialSummary>(trials, cfg.seed, kFrontEndStream, workers,
                                        [&](mc::Rng& rng, std::uint64_t) {
                                          const auto fe = run_front_end(cfg, rng);
                                          return TrialSummary{fe.outcome.passed, fe.outcome.y_k,
                                                              fe.outcome.z_n};
                                        });
  double sum_y = 0.0;
  for (const auto& run : r.runs) {
    if (!run.passed) ++r.aborts;
    sum_y += run.y_k;
  }
  r.mean_y_k = sum_y / static_cast<double>(trials);
  r.interval = mc::wilson_interval(r.aborts, trials);
  return r;
}

}  // namespace cvqkd::protocol
