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

// Seeded, worker-count-independent Monte Carlo harness.
//
// Each trial owns a generator seeded from (master seed, stream, trial index)
// through a splitmix64 counter construction, so the value computed for trial
// i never depends on which worker ran it. Reductions are done in trial order.

#ifndef CVQKD_MONTECARLO_HPP_
#define CVQKD_MONTECARLO_HPP_

#include <algorithm>
#include <cstdint>
#include <random>
#include <thread>
#include <vector>

namespace cvqkd::mc {

using Rng = std::mt19937_64;

std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream, std::uint64_t index);

inline Rng make_rng(std::uint64_t master, std::uint64_t stream, std::uint64_t index) {
  return Rng(derive_seed(master, stream, index));
}

unsigned default_workers();

// Runs body(i) for i in [0, count) over `workers` threads in contiguous blocks.
template <class Body>
void parallel_for(std::uint64_t count, unsigned workers, Body&& body) {
  workers = std::max(1u, workers);
  if (workers == 1 || count < 2) {
    for (std::uint64_t i = 0; i < count; ++i) body(i);
    return;
  }
  const std::uint64_t w = std::min<std::uint64_t>(workers, count);
  std::vector<std::thread> pool;
  pool.reserve(w);
  for (std::uint64_t t = 0; t < w; ++t) {
    const std::uint64_t begin = count * t / w;
    const std::uint64_t end = count * (t + 1) / w;
    pool.emplace_back([begin, end, &body] {
      for (std::uint64_t i = begin; i < end; ++i) body(i);
    });
  }
  for (auto& th : pool) th.join();
}

// Evaluates fn(rng, i) -> T for every trial with its own derived generator.
template <class T, class Fn>
std::vector<T> map_trials(std::uint64_t trials, std::uint64_t master_seed,
                          std::uint64_t stream, unsigned workers, Fn&& fn) {
  std::vector<T> out(trials);
  parallel_for(trials, workers, [&](std::uint64_t i) {
    Rng rng = make_rng(master_seed, stream, i);
    out[i] = fn(rng, i);
  });
  return out;
}

// Counts trials for which pred(rng, i) is true.
template <class Pred>
std::uint64_t count_events(std::uint64_t trials, std::uint64_t master_seed,
                           std::uint64_t stream, unsigned workers, Pred&& pred) {
  const auto hits = map_trials<std::uint8_t>(
      trials, master_seed, stream, workers,
      [&](Rng& rng, std::uint64_t i) -> std::uint8_t { return pred(rng, i) ? 1 : 0; });
  std::uint64_t total = 0;
  for (std::uint8_t h : hits) total += h;
  return total;
}

// Wilson score interval for a binomial proportion. With the default z = 1 the
// half-width is on the scale of one standard error.
struct WilsonInterval {
  double rate = 0.0;
  double center = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  double half_width = 0.0;
};

WilsonInterval wilson_interval(std::uint64_t successes, std::uint64_t trials, double z = 1.0);

}  // namespace cvqkd::mc

#endif  // CVQKD_MONTECARLO_HPP_
