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

#include <doctest.h>

#include <atomic>
#include <cmath>
#include <cstdint>
#include <set>
#include <vector>

#include "cvqkd/errors.hpp"
#include "cvqkd/montecarlo.hpp"

namespace mc = cvqkd::mc;

TEST_CASE("splitmix64 reference outputs") {
  // First outputs of the reference generator seeded with 0.
  CHECK(mc::splitmix64(0) == 0xe220a8397b1dcdafULL);
  CHECK(mc::splitmix64(0x9e3779b97f4a7c15ULL) == 0x6e789e6aa1b965f4ULL);
}

TEST_CASE("derived seeds do not collide") {
  std::set<std::uint64_t> seen;
  for (std::uint64_t stream = 0; stream < 10; ++stream) {
    for (std::uint64_t i = 0; i < 10'000; ++i) seen.insert(mc::derive_seed(42, stream, i));
  }
  CHECK(seen.size() == 100'000);
  CHECK(mc::derive_seed(1, 0, 0) != mc::derive_seed(2, 0, 0));
  CHECK(mc::derive_seed(1, 0, 5) == mc::derive_seed(1, 0, 5));
}

TEST_CASE("parallel_for visits every index exactly once") {
  for (unsigned workers : {1u, 2u, 3u, 8u, 64u}) {
    for (std::uint64_t count : {0ULL, 1ULL, 2ULL, 7ULL, 100ULL, 1001ULL}) {
      std::vector<std::atomic<int>> hits(count);
      mc::parallel_for(count, workers, [&](std::uint64_t i) { hits[i].fetch_add(1); });
      for (std::uint64_t i = 0; i < count; ++i) CHECK(hits[i].load() == 1);
    }
  }
}

TEST_CASE("map_trials is independent of the worker count") {
  auto draw = [](mc::Rng& rng, std::uint64_t i) {
    std::normal_distribution<double> g;
    double s = static_cast<double>(i);
    for (int j = 0; j < 10; ++j) s += g(rng);
    return s;
  };
  const auto ref = mc::map_trials<double>(5000, 99, 3, 1, draw);
  for (unsigned workers : {2u, 3u, 5u, 16u}) {
    CHECK(mc::map_trials<double>(5000, 99, 3, workers, draw) == ref);
  }
  const auto other_seed = mc::map_trials<double>(5000, 100, 3, 1, draw);
  CHECK(other_seed != ref);
  const auto other_stream = mc::map_trials<double>(5000, 99, 4, 1, draw);
  CHECK(other_stream != ref);
}

TEST_CASE("count_events is independent of the worker count") {
  auto pred = [](mc::Rng& rng, std::uint64_t) { return (rng() & 7) == 0; };
  const std::uint64_t ref = mc::count_events(20'000, 5, 1, 1, pred);
  CHECK(mc::count_events(20'000, 5, 1, 4, pred) == ref);
  CHECK(std::abs(static_cast<double>(ref) / 20'000.0 - 0.125) < 0.01);
}

TEST_CASE("Wilson bounds solve the score equation") {
  for (std::uint64_t n : {1ULL, 10ULL, 1000ULL, 100000ULL}) {
    for (std::uint64_t s : std::vector<std::uint64_t>{0, 1, n / 3, n / 2, n}) {
      if (s > n) continue;
      for (double z : {1.0, 1.96, 3.0}) {
        const auto w = mc::wilson_interval(s, n, z);
        const double p = static_cast<double>(s) / static_cast<double>(n);
        CHECK(w.rate == p);
        CHECK(w.lower <= p + 1e-15);
        CHECK(w.upper >= p - 1e-15);
        CHECK(w.lower >= 0.0);
        CHECK(w.upper <= 1.0);
        // (p - pi)^2 = z^2 pi (1 - pi) / n at both unclamped endpoints.
        for (double pi : {w.center - w.half_width, w.center + w.half_width}) {
          const double lhs = (p - pi) * (p - pi);
          const double rhs = z * z * pi * (1.0 - pi) / static_cast<double>(n);
          // Endpoints near 0 carry cancellation error of order 1e-16 in pi.
          CHECK(std::abs(lhs - rhs) <= 1e-9 * std::abs(rhs) + 1e-15);
        }
      }
    }
  }
  CHECK_THROWS_AS(mc::wilson_interval(0, 0), cvqkd::DomainError);
  CHECK_THROWS_AS(mc::wilson_interval(3, 2), cvqkd::DomainError);
}

TEST_CASE("Wilson interval coverage at z = 1") {
  // About 68% of intervals from Binomial(400, 0.1) draws cover 0.1.
  mc::Rng rng = mc::make_rng(7, 0, 0);
  std::binomial_distribution<std::uint64_t> binom(400, 0.1);
  int covered = 0;
  constexpr int kReps = 20'000;
  for (int r = 0; r < kReps; ++r) {
    const auto w = mc::wilson_interval(binom(rng), 400);
    if (w.lower <= 0.1 && 0.1 <= w.upper) ++covered;
  }
  const double rate = static_cast<double>(covered) / kReps;
  CHECK(rate > 0.64);
  CHECK(rate < 0.73);
}
