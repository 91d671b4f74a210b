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

#include <boost/math/special_functions/gamma.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <thread>
#include <vector>

#include "cvqkd/errors.hpp"
#include "cvqkd/specfun.hpp"
#include "support/testing.hpp"

namespace sf = cvqkd::specfun;
using Float50 = boost::multiprecision::cpp_bin_float_50;

namespace {

// ln Gamma(n + 1) with 50 significant digits.
Float50 lgamma50(std::uint64_t n) {
  return boost::math::lgamma(Float50(n) + 1);
}

// Boost's double evaluation overflows internally for some large shapes; fall
// back to 50 digits there.
double oracle_q(double s, double x) {
  try {
    return boost::math::gamma_q(s, x);
  } catch (const std::overflow_error&) {
    return static_cast<double>(boost::math::gamma_q(Float50(s), Float50(x)));
  }
}

double oracle_p(double s, double x) {
  try {
    return boost::math::gamma_p(s, x);
  } catch (const std::overflow_error&) {
    return static_cast<double>(boost::math::gamma_p(Float50(s), Float50(x)));
  }
}

double rel_err(double got, double want) {
  if (got == want) return 0.0;
  return std::abs(got - want) / std::abs(want);
}

}  // namespace

TEST_CASE("log_factorial small values") {
  CHECK(sf::log_factorial(0) == 0.0);
  CHECK(sf::log_factorial(1) == 0.0);
  CHECK(sf::log_factorial(10) == doctest::Approx(std::log(3628800.0)).epsilon(1e-15));
  CHECK(sf::log_factorial(10) == doctest::Approx(15.104412573).epsilon(1e-10));
}

TEST_CASE("log_factorial matches exact integer factorials up to 20") {
  std::uint64_t f = 1;
  for (std::uint64_t n = 1; n <= 20; ++n) {
    f *= n;
    CHECK(std::exp(sf::log_factorial(n)) == doctest::Approx(static_cast<double>(f)).epsilon(1e-14));
  }
}

TEST_CASE("log_factorial against a 50-digit oracle") {
  std::vector<std::uint64_t> ns;
  for (std::uint64_t n = 0; n <= 200; ++n) ns.push_back(n);
  cvqkd::testing::Gen gen(1);
  for (int i = 0; i < 300; ++i) ns.push_back(gen.integer(201, 10'000'000));
  ns.push_back(10'000'000);
  for (std::uint64_t n : ns) {
    const Float50 want = lgamma50(n);
    const long double ext = sf::log_factorial_extended(n);
    const double dbl = sf::log_factorial(n);
    CAPTURE(n);
    // Extended precision meets 1e-10 absolute everywhere on [0, 1e7].
    CHECK(static_cast<double>(abs(Float50(ext) - want)) <= 1e-10);
    // The double result is the extended value rounded: within 1e-10 or half
    // an ulp of the true value, whichever is larger.
    const double want_d = static_cast<double>(want);
    const double half_ulp = 0.5 * (std::nextafter(want_d, INFINITY) - want_d);
    CHECK(std::abs(dbl - want_d) <= std::max(1e-10, half_ulp + 1e-10));
  }
}

TEST_CASE("Stirling sandwich holds for n x >= 1") {
  const double ln_sqrt_2pi = 0.5 * std::log(2.0 * M_PI);
  for (double x : {0.5, 1.0, 2.0, 5.0}) {
    for (std::uint64_t n = 1; n <= 5000; ++n) {
      const double nn = static_cast<double>(n);
      const double N = nn * x;
      if (N < 1.0) continue;
      const double core =
          nn * x * std::log(nn) + nn * x * (std::log(x) - 1.0) + 0.5 * std::log(nn) + 0.5 * std::log(x);
      const double value = std::lgamma(N + 1.0);
      CAPTURE(n);
      CAPTURE(x);
      CHECK(core + ln_sqrt_2pi <= value + 1e-12 * std::abs(value));
      CHECK(value <= core + 1.0 + 1e-12 * std::abs(value));
      if (x == std::floor(x)) {
        CHECK(sf::log_factorial(static_cast<std::uint64_t>(N)) >= core + ln_sqrt_2pi - 1e-9);
        CHECK(sf::log_factorial(static_cast<std::uint64_t>(N)) <= core + 1.0 + 1e-9);
      }
    }
  }
}

TEST_CASE("Stirling upper bound fails at n x = 1/2") {
  // ln Gamma(3/2) exceeds the upper expression at n = 1, x = 1/2.
  const double core = 0.5 * (std::log(0.5) - 1.0) + 0.5 * std::log(0.5);
  CHECK(std::lgamma(1.5) > core + 1.0);
}

TEST_CASE("log_binomial") {
  CHECK(sf::log_binomial(3, 2) == doctest::Approx(std::log(3.0)).epsilon(1e-15));
  CHECK(sf::log_binomial(10, 5) == doctest::Approx(std::log(252.0)).epsilon(1e-15));
  for (std::uint64_t n : {0ULL, 1ULL, 7ULL, 1000000ULL}) CHECK(sf::log_binomial(n, 0) == 0.0);
  CHECK_THROWS_AS(sf::log_binomial(3, 4), cvqkd::DomainError);

  // Pascal's rule in exact integers for n <= 60.
  std::vector<std::vector<double>> pascal(61);
  for (std::uint64_t n = 0; n <= 60; ++n) {
    pascal[n].assign(n + 1, 1.0);
    for (std::uint64_t k = 1; k < n; ++k) pascal[n][k] = pascal[n - 1][k - 1] + pascal[n - 1][k];
    for (std::uint64_t k = 0; k <= n; ++k) {
      CHECK(rel_err(std::exp(sf::log_binomial(n, k)), pascal[n][k]) <= 1e-10);
    }
  }
}

TEST_CASE("log_binomial relative error in linear scale up to n = 1e6") {
  cvqkd::testing::Gen gen(2);
  for (int i = 0; i < 300; ++i) {
    const std::uint64_t n = gen.integer(1, 1'000'000);
    const std::uint64_t k = gen.integer(0, n);
    const Float50 want = lgamma50(n) - lgamma50(k) - lgamma50(n - k);
    const double got = sf::log_binomial(n, k);
    CAPTURE(n);
    CAPTURE(k);
    // Relative error of C(n, k) is |exp(got - want) - 1| ~ |got - want|.
    CHECK(std::abs(std::expm1(static_cast<double>(Float50(got) - want))) <= 1e-10);
  }
}

TEST_CASE("reg_upper_gamma closed-form examples") {
  for (double x : {0.0, 0.3, 1.0, 7.5, 40.0}) {
    CHECK(sf::reg_upper_gamma(1.0, x) == doctest::Approx(std::exp(-x)).epsilon(1e-14));
  }
  for (double s : {0.1, 1.0, 2.5, 1000.0}) CHECK(sf::reg_upper_gamma(s, 0.0) == 1.0);
  CHECK(sf::reg_upper_gamma(2.0, 1.0) == doctest::Approx(2.0 * std::exp(-1.0)).epsilon(1e-15));
  CHECK(sf::reg_upper_gamma(2.0, 1.0) == doctest::Approx(0.735758882).epsilon(1e-9));
}

TEST_CASE("reg_upper_gamma rejects bad arguments") {
  CHECK_THROWS_AS(sf::reg_upper_gamma(0.0, 1.0), cvqkd::DomainError);
  CHECK_THROWS_AS(sf::reg_upper_gamma(-2.0, 1.0), cvqkd::DomainError);
  CHECK_THROWS_AS(sf::reg_upper_gamma(1.0, -1.0), cvqkd::DomainError);
  CHECK_THROWS_AS(sf::reg_upper_gamma(std::nan(""), 1.0), cvqkd::DomainError);
}

TEST_CASE("reg_upper_gamma matches Boost within 1e-10 relative") {
  std::vector<double> ss{0.5, 1.0, 1.5, 2.0, 3.7, 10.0, 25.0, 50.0, 99.5, 100.0, 250.0, 1000.0,
                         5000.5, 20000.0, 100000.0};
  std::vector<double> fractions{0.0, 0.01, 0.2, 0.5, 0.8, 0.95, 1.0, 1.05, 1.2, 1.5, 2.0, 5.0};
  for (double s : ss) {
    for (double f : fractions) {
      const double x = std::min(1e6, f * s + (f > 1.0 ? 3.0 : 0.0));
      const double want = oracle_q(s, x);
      if (want < 1e-300) continue;
      CAPTURE(s);
      CAPTURE(x);
      CHECK(rel_err(sf::reg_upper_gamma(s, x), want) <= 1e-10);
      CHECK(rel_err(sf::reg_lower_gamma(s, x), oracle_p(s, x)) <= 1e-10);
    }
  }
  cvqkd::testing::Gen gen(3);
  for (int i = 0; i < 2000; ++i) {
    const double s = gen.log_uniform(0.05, 1e5);
    const double x = std::min(1e6, gen.real(0.0, 3.0) * s);
    const double want = oracle_q(s, x);
    if (want < 1e-300) continue;
    CAPTURE(s);
    CAPTURE(x);
    CHECK(rel_err(sf::reg_upper_gamma(s, x), want) <= 1e-10);
  }
}

TEST_CASE("integer shape equals the Poisson sum") {
  for (std::uint64_t s = 1; s <= 60; ++s) {
    for (double x : {0.1, 1.0, 5.0, 17.3, 60.0, 120.0}) {
      long double term = std::exp(-static_cast<long double>(x));
      long double sum = 0.0L;
      for (std::uint64_t j = 0; j < s; ++j) {
        sum += term;
        term *= static_cast<long double>(x) / static_cast<long double>(j + 1);
      }
      CAPTURE(s);
      CAPTURE(x);
      CHECK(rel_err(sf::reg_upper_gamma(static_cast<double>(s), x), static_cast<double>(sum)) <=
            1e-12);
      CHECK(sf::poisson_cdf(s - 1, x) == sf::reg_upper_gamma(static_cast<double>(s), x));
    }
  }
}

TEST_CASE("log_reg_upper_gamma below the underflow threshold") {
  const double lq = sf::log_reg_upper_gamma(10.0, 2000.0);
  // ln Q(10, 2000) = -2000 + 9 ln 2000 - ln 9! + ln(1 + 9/2000 + ...)
  const double lead = -2000.0 + 9.0 * std::log(2000.0) - std::log(362880.0);
  CHECK(std::isfinite(lq));
  CHECK(lq == doctest::Approx(lead).epsilon(1e-5));
  CHECK(sf::reg_upper_gamma(10.0, 2000.0) == 0.0);
  const double mid = sf::log_reg_upper_gamma(30.0, 60.0);
  CHECK(std::exp(mid) == doctest::Approx(sf::reg_upper_gamma(30.0, 60.0)).epsilon(1e-12));
}

TEST_CASE("Q is nonincreasing in x and nondecreasing in s") {
  std::vector<double> ss;
  for (double s = 0.5; s <= 100.0; s += 0.5) ss.push_back(s);
  std::vector<double> xs;
  for (double x = 0.0; x <= 200.0; x += 0.5) xs.push_back(x);
  for (double s : ss) {
    double prev = 1.0;
    for (double x : xs) {
      const double q = sf::reg_upper_gamma(s, x);
      CHECK(q >= 0.0);
      CHECK(q <= 1.0);
      CHECK(q <= prev);
      prev = q;
    }
  }
  for (double x : xs) {
    double prev = 0.0;
    for (double s : ss) {
      const double q = sf::reg_upper_gamma(s, x);
      CHECK(q >= prev);
      prev = q;
    }
  }
}

TEST_CASE("Q(x + 1, x) >= 1/2 on [0, 1e4]") {
  for (double x = 0.0; x <= 1e4; x += 0.25) {
    CAPTURE(x);
    REQUIRE(sf::reg_upper_gamma(x + 1.0, x) >= 0.5);
  }
}

TEST_CASE("LogReal and log-space sums") {
  using sf::LogReal;
  for (double x : {-700.0, -3.0, 0.0, 2.5, 700.0}) {
    CHECK(sf::log_add(x, x) == doctest::Approx(x + std::log(2.0)).epsilon(1e-15));
  }
  CHECK(LogReal::zero().is_zero());
  CHECK(LogReal::zero().linear() == 0.0);
  CHECK(LogReal::one().linear() == 1.0);
  CHECK((LogReal::zero() + LogReal::from_linear(3.0)).linear() == doctest::Approx(3.0));
  CHECK((LogReal::from_linear(2.0) * LogReal::from_linear(4.0)).linear() == doctest::Approx(8.0));
  CHECK(LogReal::from_linear(0.0).is_zero());
  CHECK_THROWS_AS(LogReal::from_linear(-1.0), cvqkd::DomainError);

  cvqkd::testing::Gen gen(4);
  for (int i = 0; i < 1000; ++i) {
    const LogReal a{gen.real(-800.0, 800.0)};
    const LogReal b{gen.real(-800.0, 800.0)};
    CHECK((a + b).linear() >= 0.0);
    CHECK((a + b).value >= std::max(a.value, b.value));
    CHECK((a + b).value <= std::max(a.value, b.value) + std::log(2.0) + 1e-15);
  }

  // 1e5 equal terms of e^{-1000}: the sum is e^{-1000} * 1e5.
  const std::vector<double> terms(100000, -1000.0);
  CHECK(sf::log_sum_exp(terms) == doctest::Approx(-1000.0 + std::log(1e5)).epsilon(1e-14));
  CHECK(sf::log_sum_exp(std::vector<double>{}) == -std::numeric_limits<double>::infinity());
}

TEST_CASE("special functions are safe to call concurrently") {
  std::vector<double> serial(64);
  for (int i = 0; i < 64; ++i) serial[i] = sf::reg_upper_gamma(0.5 + i * 3.1, 2.0 + i * 2.9);
  std::vector<double> threaded(64);
  std::vector<std::thread> pool;
  for (int t = 0; t < 4; ++t) {
    pool.emplace_back([&, t] {
      for (int i = t; i < 64; i += 4) threaded[i] = sf::reg_upper_gamma(0.5 + i * 3.1, 2.0 + i * 2.9);
    });
  }
  for (auto& th : pool) th.join();
  CHECK(serial == threaded);
}
