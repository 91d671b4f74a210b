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

#include "cvqkd/secparams.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "cvqkd/errors.hpp"
#include "cvqkd/fockspace.hpp"

namespace cvqkd::secparams {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr std::uint64_t kMaxSearchModes = 1ULL << 50;

bool in_unit_interval(double x) { return x > 0.0 && x < 1.0; }

std::uint64_t dimension_ceiling(double d) {
  return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::ceil(d)));
}

std::string fmt(double x) {
  std::ostringstream ss;
  ss.precision(6);
  ss << x;
  return ss.str();
}

double bob_cutoff(std::uint64_t n, double eps, double d0) {
  return std::log(4.0 * static_cast<double>(n) / eps) / std::log1p(1.0 / d0);
}

struct HomodyneCore {
  std::optional<double> g;
  double d_0 = kNaN;
  double beta = kNaN;
  bool feasible = false;
};

HomodyneCore homodyne_core(std::uint64_t n, std::uint64_t k, tail::SphereVariant variant,
                           double eps, double y_k) {
  HomodyneCore c;
  c.g = tail::try_g_factor({eps / 16.0, n, k, variant});
  if (!c.g) return c;
  c.d_0 = 2.0 * *c.g * y_k;
  c.beta = tail::beta_exponent(c.d_0);
  c.feasible = c.d_0 > tail::kChernoffMinShellEnergy && c.beta > 0.0 &&
               shell_tail_within_budget(c.beta, n, eps);
  return c;
}

}  // namespace

void SecurityInputs::validate() const {
  if (n < 1) throw DomainError("n must be at least 1");
  if (k < 1) throw DomainError("k must be at least 1");
  if (!(lambda > 0.0)) throw DomainError("lambda must be positive");
  if (!(y_test > 0.0)) throw DomainError("y_test must be positive");
  if (!in_unit_interval(eps_test)) throw DomainError("eps_test must lie in (0, 1)");
  if (!in_unit_interval(eps_a)) throw DomainError("eps_a must lie in (0, 1)");
  if (eps_share && !in_unit_interval(*eps_share)) {
    throw DomainError("eps_share must lie in (0, 1)");
  }
  if (!c) throw DomainError("c (collective-attack constant) is required");
  if (!delta) throw DomainError("delta (collective-attack key-rate fraction) is required");
  if (!(*c > 0.0)) throw DomainError("c must be positive");
  if (!(*delta > 0.0)) throw DomainError("delta must be positive");
  if (y_k_observed && !(*y_k_observed > 0.0)) throw DomainError("y_k_observed must be positive");
}

double dim_alice(std::uint64_t n, double lambda, double eps_a) {
  if (n < 1) throw DomainError("dim_alice: n must be at least 1");
  if (!(lambda > 0.0)) throw DomainError("dim_alice: lambda must be positive");
  if (!(eps_a > 0.0 && eps_a <= 1.0)) throw DomainError("dim_alice: eps_a must lie in (0, 1]");
  return std::log(static_cast<double>(n) / eps_a) / std::log1p(1.0 / lambda);
}

bool shell_tail_within_budget(double beta, std::uint64_t n, double eps) {
  return std::exp(-beta * static_cast<double>(n)) <= eps / 16.0;
}

double beta_root() {
  double lo = tail::kChernoffMinShellEnergy;  // beta < 0 here
  double hi = 100.0;                          // beta > 0 here
  while (hi - lo > 1e-13) {
    const double mid = 0.5 * (lo + hi);
    (tail::beta_exponent(mid) > 0.0 ? hi : lo) = mid;
  }
  return hi;
}

SecurityBounds dims_heterodyne(const SecurityInputs& in, double eps) {
  if (!in_unit_interval(eps)) throw DomainError("dims_heterodyne: eps must lie in (0, 1)");
  SecurityBounds b;
  b.beta = kNaN;
  b.eps_share = eps;
  b.d_a = dim_alice(in.n, in.lambda, in.eps_a);
  b.d_a_dim = dimension_ceiling(b.d_a);
  const auto g = tail::try_g_factor({eps / 4.0, in.n, in.k, in.g_variant});
  if (!g) {
    b.g = kNaN;
    b.d_0 = kNaN;
    b.d_b = kNaN;
    b.notes.push_back("g(eps/4) undefined: denominator <= 0 at k = " + std::to_string(in.k) +
                      "; increase k");
    return b;
  }
  b.g = *g;
  b.d_0 = b.g * in.y_test;
  b.d_b = bob_cutoff(in.n, eps, b.d_0);
  b.d_b_dim = dimension_ceiling(b.d_b);
  b.feasible = true;
  return b;
}

SecurityBounds dims_homodyne(const SecurityInputs& in, double eps, double y_k_observed) {
  if (!in_unit_interval(eps)) throw DomainError("dims_homodyne: eps must lie in (0, 1)");
  if (!(y_k_observed > 0.0)) throw DomainError("dims_homodyne: Y_k must be positive");
  SecurityBounds b;
  b.eps_share = eps;
  b.d_a = dim_alice(in.n, in.lambda, in.eps_a);
  b.d_a_dim = dimension_ceiling(b.d_a);
  const HomodyneCore core = homodyne_core(in.n, in.k, in.g_variant, eps, y_k_observed);
  if (!core.g) {
    b.g = kNaN;
    b.d_0 = kNaN;
    b.d_b = kNaN;
    b.beta = kNaN;
    b.notes.push_back("g(eps/16) undefined: denominator <= 0 at k = " + std::to_string(in.k) +
                      "; increase k");
    return b;
  }
  b.g = *core.g;
  b.d_0 = core.d_0;
  b.beta = core.beta;
  b.d_b = bob_cutoff(in.n, eps, b.d_0);
  b.d_b_dim = dimension_ceiling(b.d_b);
  b.feasible = core.feasible;
  if (b.feasible) return b;

  if (b.d_0 <= tail::kChernoffMinShellEnergy || b.beta <= 0.0) {
    b.notes.push_back("beta = " + fmt(b.beta) + " at d_0 = " + fmt(b.d_0) +
                      ": the shell bound is vacuous below d_0 = " + fmt(beta_root()) +
                      " (requires Y_k >= " + fmt(beta_root() / (2.0 * b.g)) + ")");
  } else {
    b.notes.push_back("exp(-beta n) = " + fmt(std::exp(-b.beta * static_cast<double>(in.n))) +
                      " exceeds eps/16 = " + fmt(eps / 16.0));
  }
  // Search over n with k, eps and Y_k held fixed; g shrinks as n grows, so
  // the feasible n usually form an initial segment.
  if (in.n > 1 && homodyne_core(1, in.k, in.g_variant, eps, y_k_observed).feasible) {
    std::uint64_t good = 1;
    std::uint64_t bad = in.n;
    while (bad - good > 1) {
      const std::uint64_t mid = good + (bad - good) / 2;
      (homodyne_core(mid, in.k, in.g_variant, eps, y_k_observed).feasible ? good : bad) = mid;
    }
    b.largest_feasible_n_below = good;
    b.notes.push_back("largest feasible n below the input = " + std::to_string(good));
  }
  std::uint64_t hi = std::max<std::uint64_t>(in.n, 1);
  while (hi < kMaxSearchModes &&
         !homodyne_core(hi, in.k, in.g_variant, eps, y_k_observed).feasible) {
    hi *= 2;
  }
  if (!homodyne_core(hi, in.k, in.g_variant, eps, y_k_observed).feasible) {
    b.notes.push_back("no larger n up to 2^50 restores feasibility at this Y_k");
    return b;
  }
  std::uint64_t lo = std::max<std::uint64_t>(in.n, hi / 2);
  while (lo < hi) {
    const std::uint64_t mid = lo + (hi - lo) / 2;
    if (homodyne_core(mid, in.k, in.g_variant, eps, y_k_observed).feasible) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  b.minimal_feasible_n = hi;
  b.notes.push_back("minimal feasible n = " + std::to_string(hi));
  return b;
}

double epsilon_general(const SecurityInputs& in, const SecurityBounds& bounds) {
  if (!bounds.feasible) throw InfeasibleError("epsilon_general: bounds are infeasible");
  in.validate();
  const double dim = static_cast<double>(bounds.d_a_dim) * static_cast<double>(bounds.d_b_dim);
  const double n = static_cast<double>(in.n);
  const double postselection = (dim * dim - 1.0) * std::log2(n + 1.0);
  const double collective = -(*in.c) * (*in.delta) * (*in.delta) * n;
  const double budget = std::max(in.eps_test, in.eps_a + bounds.eps_share);
  return std::min(1.0, std::exp2(collective + postselection) + 2.0 * budget);
}

SecurityBounds compute_bounds(const SecurityInputs& in) {
  in.validate();
  const double share = in.eps_share.value_or(in.eps_test - in.eps_a);
  SecurityBounds b;
  if (!in_unit_interval(share)) {
    b.beta = in.detection == Detection::heterodyne ? kNaN : 0.0;
    b.eps_share = share;
    b.d_a = dim_alice(in.n, in.lambda, in.eps_a);
    b.d_a_dim = dimension_ceiling(b.d_a);
    b.notes.push_back("eps_test - eps_a leaves no budget for Bob's projection");
    return b;
  }
  if (in.detection == Detection::heterodyne) {
    b = dims_heterodyne(in, share);
  } else {
    const double y_k = in.y_k_observed.value_or(in.y_test);
    b = dims_homodyne(in, share, y_k);
    if (!in.y_k_observed) {
      b.notes.push_back("y_k_observed absent: Y_test used as the worst passing Y_k");
    }
  }
  if (in.eps_a + share > in.eps_test) {
    b.notes.push_back("eps_a + eps_share exceeds eps_test; their sum enters the final epsilon");
  }
  if (!b.feasible) return b;
  const double dim = static_cast<double>(b.d_a_dim) * static_cast<double>(b.d_b_dim);
  const double n = static_cast<double>(in.n);
  b.postselection_exponent = (dim * dim - 1.0) * std::log2(n + 1.0);
  b.collective_exponent = -(*in.c) * (*in.delta) * (*in.delta) * n;
  b.eps_total = epsilon_general(in, b);
  if (b.collective_exponent + b.postselection_exponent >= 0.0) {
    b.notes.push_back("postselection factor dominates: collective term clamps epsilon to 1");
  }
  return b;
}

BadEventReport estimate_bad_event_frequency(const protocol::ProtocolConfig& cfg, double eps,
                                            std::uint64_t trials, tail::SphereVariant variant,
                                            unsigned workers) {
  if (trials == 0) throw DomainError("estimate_bad_event_frequency: trials must be positive");
  if (!in_unit_interval(eps)) throw DomainError("estimate_bad_event_frequency: eps in (0, 1)");
  if (cfg.detection != Detection::heterodyne) {
    throw DomainError("estimate_bad_event_frequency: heterodyne detection only");
  }
  cfg.validate();
  BadEventReport r;
  r.trials = trials;
  r.eps = eps;
  r.d_0 = tail::g_factor({eps / 4.0, cfg.n, cfg.k, variant}) * cfg.y_test;
  r.d_b = bob_cutoff(cfg.n, eps, r.d_0);
  r.cutoff = dimension_ceiling(r.d_b);
  const auto p_max =
      static_cast<std::uint64_t>(std::floor(static_cast<double>(cfg.n) * r.d_0));
  const std::vector<double> photon_tail =
      fock::exact_max_tail_table(static_cast<std::uint32_t>(cfg.n), r.cutoff, p_max);

  struct Score {
    bool passed;
    bool shell;
    double weight;
  };
  const auto scores = mc::map_trials<Score>(
      trials, cfg.seed, protocol::kFrontEndStream, workers, [&](mc::Rng& rng, std::uint64_t) {
        const auto fe = protocol::run_front_end(cfg, rng);
        if (!fe.outcome.passed) return Score{false, false, 0.0};
        if (fe.outcome.z_n >= r.d_0) return Score{true, true, 1.0};
        const auto p = static_cast<std::uint64_t>(
            std::floor(static_cast<double>(cfg.n) * fe.outcome.z_n));
        return Score{true, false, photon_tail[std::min(p, p_max)]};
      });
  double mass = 0.0;
  for (const Score& s : scores) {
    if (s.passed) ++r.passes;
    if (s.shell) ++r.shell_exceedances;
    if (s.passed && !s.shell) mass += s.weight;
  }
  r.photon_tail_mass = mass;
  r.frequency = (static_cast<double>(r.shell_exceedances) + mass) / static_cast<double>(trials);
  return r;
}

}  // namespace cvqkd::secparams
