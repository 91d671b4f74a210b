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

#include <cmath>
#include <cstdint>
#include <random>

#include "cvqkd/errors.hpp"
#include "cvqkd/fockspace.hpp"
#include "cvqkd/montecarlo.hpp"
#include "cvqkd/specfun.hpp"
#include "cvqkd/symmetry.hpp"
#include "cvqkd/tailbounds.hpp"
#include "support/testing.hpp"

namespace tail = cvqkd::tail;
using tail::SphereVariant;

TEST_CASE("g_factor reference value") {
  // 30-digit reference: 1.00926045786787467772
  const double g = tail::g_factor({0.01, 1'000'000, 1'000'000, SphereVariant::real_sphere});
  CHECK(g == doctest::Approx(1.00926045786787467772).epsilon(1e-14));
}

TEST_CASE("g_factor tends to 1 as delta approaches 2") {
  for (SphereVariant v : {SphereVariant::real_sphere, SphereVariant::complex_sphere}) {
    const double g = tail::g_factor({2.0 - 1e-12, 50, 50, v});
    CHECK(g == doctest::Approx(1.0).epsilon(1e-5));
  }
}

TEST_CASE("g_factor infeasible when k is too small") {
  // 2 sqrt(log 40 / k) >= 1 for k <= 4 log 40 = 14.75
  for (std::uint64_t k = 1; k <= 14; ++k) {
    CHECK_THROWS_AS(tail::g_factor({0.05, 100, k, SphereVariant::real_sphere}),
                    cvqkd::InfeasibleError);
    CHECK_FALSE(tail::try_g_factor({0.05, 100, k, SphereVariant::real_sphere}).has_value());
  }
  CHECK(tail::try_g_factor({0.05, 100, 15, SphereVariant::real_sphere}).has_value());
  CHECK_THROWS_AS(tail::g_factor({0.0, 10, 10, SphereVariant::real_sphere}), cvqkd::DomainError);
  CHECK_THROWS_AS(tail::g_factor({2.0, 10, 10, SphereVariant::real_sphere}), cvqkd::DomainError);
  CHECK_THROWS_AS(tail::g_factor({0.1, 0, 10, SphereVariant::real_sphere}), cvqkd::DomainError);
}

TEST_CASE("g_factor complex variant follows its closed form") {
  const double d = 0.01;
  const double n = 400.0;
  const double k = 900.0;
  const double num = 1.0 + 2.0 * std::sqrt(std::log(1.0 / d) / (2.0 * n)) + 2.0 * std::log(2.0 / d) / (2.0 * n);
  const double den = 1.0 - std::sqrt(2.0 / k * std::log(2.0 / d));
  CHECK(tail::g_factor({d, 400, 900, SphereVariant::complex_sphere}) ==
        doctest::Approx(num / den).epsilon(1e-15));
}

TEST_CASE("g_factor properties") {
  cvqkd::testing::Gen gen(11);
  for (int i = 0; i < 2000; ++i) {
    const double delta = gen.log_uniform(1e-12, 0.999);
    const std::uint64_t n = gen.integer(1, 1'000'000);
    const std::uint64_t k = gen.integer(1, 1'000'000);
    const SphereVariant v = gen.integer(0, 1) ? SphereVariant::real_sphere : SphereVariant::complex_sphere;
    const auto g = tail::try_g_factor({delta, n, k, v});
    if (!g) continue;
    CHECK(*g > 1.0);
    // More modes on either side tighten the factor.
    const auto g_more_k = tail::try_g_factor({delta, n, k + 1000, v});
    const auto g_more_n = tail::try_g_factor({delta, n + 1000, k, v});
    REQUIRE(g_more_k.has_value());
    REQUIRE(g_more_n.has_value());
    CHECK(*g_more_k <= *g);
    CHECK(*g_more_n <= *g);
    // Smaller delta loosens it.
    const auto g_tighter = tail::try_g_factor({delta / 2.0, n, k, v});
    if (g_tighter) CHECK(*g_tighter >= *g);
  }
}

TEST_CASE("Laurent-Massart bounds") {
  const auto lo = tail::lm_lower_tail(100, 2.0);
  CHECK(lo.bound == doctest::Approx(std::exp(-2.0)).epsilon(1e-15));
  CHECK(lo.bound == doctest::Approx(0.13534).epsilon(1e-4));
  CHECK(lo.threshold == doctest::Approx(0.71716).epsilon(1e-5));
  const auto hi = tail::lm_upper_tail(100, 3.0);
  CHECK(hi.bound == doctest::Approx(0.049787).epsilon(1e-5));
  CHECK(hi.threshold == doctest::Approx(1.40641).epsilon(1e-5));
  CHECK(tail::lm_lower_tail(10, 1e-300).bound == doctest::Approx(1.0));
  CHECK(tail::lm_upper_tail(10, 1e-300).bound == doctest::Approx(1.0));
  CHECK_THROWS_AS(tail::lm_lower_tail(10, 0.0), cvqkd::DomainError);
  CHECK_THROWS_AS(tail::lm_upper_tail(0, 1.0), cvqkd::DomainError);

  // Empirical tails over 1e6 chi-squared(100) draws stay below the bounds.
  cvqkd::mc::Rng rng = cvqkd::mc::make_rng(12, 0, 0);
  std::chi_squared_distribution<double> chi2(100.0);
  std::uint64_t below = 0;
  std::uint64_t above = 0;
  constexpr std::uint64_t kDraws = 1'000'000;
  for (std::uint64_t i = 0; i < kDraws; ++i) {
    const double y = chi2(rng) / 100.0;
    if (y <= lo.threshold) ++below;
    if (y >= hi.threshold) ++above;
  }
  CHECK(static_cast<double>(below) / kDraws <= lo.bound);
  CHECK(static_cast<double>(above) / kDraws <= hi.bound);
}

TEST_CASE("Chernoff bound for the Poisson lower tail") {
  const auto t = tail::chernoff_poisson_lower(10.0, 0.5);
  // 30-digit reference of (e^{-1/2} / 0.5^{1/2})^10
  CHECK(t.bound == doctest::Approx(0.215614303970734947).epsilon(1e-14));
  CHECK(t.threshold == 5.0);
  const double exact = cvqkd::specfun::poisson_cdf(5, 10.0);
  CHECK(exact == doctest::Approx(0.0671).epsilon(1e-3));
  CHECK(exact <= t.bound);
  CHECK(tail::chernoff_poisson_lower(10.0, 1e-12).bound == doctest::Approx(1.0));
  CHECK_THROWS_AS(tail::chernoff_poisson_lower(10.0, 1.0), cvqkd::DomainError);
  CHECK_THROWS_AS(tail::chernoff_poisson_lower(0.0, 0.5), cvqkd::DomainError);

  cvqkd::testing::Gen gen(13);
  for (int i = 0; i < 2000; ++i) {
    const double lambda = gen.log_uniform(0.1, 1e4);
    const double delta = gen.real(1e-3, 0.999);
    const auto b = tail::chernoff_poisson_lower(lambda, delta);
    const double exact_tail = cvqkd::specfun::poisson_cdf(
        static_cast<std::uint64_t>(std::floor(b.threshold)), lambda);
    CAPTURE(lambda);
    CAPTURE(delta);
    CHECK(exact_tail <= b.bound * (1.0 + 1e-12));
  }
}

TEST_CASE("beta exponent") {
  CHECK(tail::beta_exponent(1.0) == doctest::Approx(0.0857864376269049512).epsilon(1e-15));
  CHECK(tail::beta_exponent(20.0) == doctest::Approx(0.217862615761103527).epsilon(1e-14));
  CHECK(tail::beta_exponent(15.0) == doctest::Approx(-0.0672285361475307650).epsilon(1e-13));
  CHECK(tail::kShellConstant == doctest::Approx(std::pow(1.0 - 1.0 / std::sqrt(2.0), 2.0)).epsilon(1e-16));
  CHECK_THROWS_AS(tail::beta_exponent(0.0), cvqkd::DomainError);
}

TEST_CASE("f_tail") {
  const auto zero = tail::f_tail(10, 1e-300);
  CHECK(zero.gamma_form.bound == doctest::Approx(1.0));
  const auto t = tail::f_tail(100, 20.0);
  CHECK(t.chernoff_form.bound == doctest::Approx(3.45419472164937985e-10).epsilon(1e-12));
  CHECK(t.gamma_form.bound == doctest::Approx(2.16469217191053763e-28).epsilon(1e-9));
  CHECK(t.gamma_form.bound <= t.chernoff_form.bound);
  CHECK(t.chernoff_applicable);
  CHECK_FALSE(tail::f_tail(100, 5.0).chernoff_applicable);
}

TEST_CASE("f_tail gamma form stays below the Chernoff form where beta > 0") {
  for (std::uint64_t n = 2; n <= 500; n += 2) {
    for (double d0 = 17.0; d0 <= 100.0; d0 += 0.5) {
      const auto t = tail::f_tail(n, d0);
      REQUIRE(t.beta > 0.0);
      CAPTURE(n);
      CAPTURE(d0);
      CHECK(t.gamma_form.exponent <= t.chernoff_form.exponent);
    }
  }
}

TEST_CASE("max_photon_tail") {
  CHECK(tail::max_photon_tail(2, 2, 2).bound == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(tail::max_photon_tail(4, 7, 8).bound == 0.0);
  CHECK(tail::max_photon_tail(3, 1, 1).bound == 1.0);
  CHECK(tail::max_photon_tail(3, 2, 1).bound == 1.0);
  CHECK(tail::max_photon_tail(3, 2, 1).exponent == doctest::Approx(std::log(1.5)));
  CHECK_THROWS_AS(tail::max_photon_tail(3, 1, 0), cvqkd::DomainError);
  for (std::uint32_t n = 1; n <= 5; ++n) {
    for (std::uint64_t p = 0; p <= 12; ++p) {
      for (std::uint64_t m = 1; m <= p; ++m) {
        const double exact = cvqkd::fock::exact_max_tail(n, p, m);
        const double bound = tail::max_photon_tail(n, p, m).bound;
        CAPTURE(n);
        CAPTURE(p);
        CAPTURE(m);
        CHECK(exact <= bound * (1.0 + 1e-12));
      }
    }
  }
}

TEST_CASE("photon_cutoff") {
  // 30-digit reference: 769.304824187920723605
  CHECK(tail::photon_cutoff(1'000'000, 20.0, 1e-10) ==
        doctest::Approx(769.304824187920723605).epsilon(1e-13));
  CHECK(tail::photon_cutoff(2, 1.0, 2.0 / 3.0) == doctest::Approx(std::log(6.0) / std::log(2.0)));
  CHECK(cvqkd::fock::exact_max_tail(2, 2, 3) == 0.0);
  CHECK(tail::photon_cutoff(1, 1e-9, 0.5) < 0.1);
  CHECK_THROWS_AS(tail::photon_cutoff(1, 1.0, 1.0), cvqkd::DomainError);

  // The cutoff guarantee: union bound at ceil(m*) is at most eps.
  cvqkd::testing::Gen gen(14);
  for (int i = 0; i < 500; ++i) {
    const std::uint64_t n = gen.integer(1, 10'000);
    const double d = gen.log_uniform(0.01, 50.0);
    const double eps = gen.log_uniform(1e-15, 0.9);
    const double m_star = tail::photon_cutoff(n, d, eps);
    const auto p = static_cast<std::uint64_t>(std::floor(static_cast<double>(n) * d));
    const auto m = static_cast<std::uint64_t>(std::ceil(m_star));
    CAPTURE(n);
    CAPTURE(d);
    CAPTURE(eps);
    CHECK(tail::max_photon_tail(n, p, std::max<std::uint64_t>(m, 1)).bound <= eps);
  }
}

TEST_CASE("every TailBound lies in [0, 1]") {
  cvqkd::testing::Gen gen(15);
  for (int i = 0; i < 3000; ++i) {
    const std::uint64_t n = gen.integer(1, 1000);
    const double x = gen.log_uniform(1e-6, 1e3);
    for (const auto& b : {tail::lm_lower_tail(n, x), tail::lm_upper_tail(n, x),
                          tail::chernoff_poisson_lower(x, gen.real(1e-6, 0.999)),
                          tail::f_tail(n, x).gamma_form, tail::f_tail(n, x).chernoff_form,
                          tail::max_photon_tail(n, gen.integer(0, 200), gen.integer(1, 200))}) {
      CHECK(b.bound >= 0.0);
      CHECK(b.bound <= 1.0);
    }
  }
}

TEST_CASE("sphere concentration soundness at small dimensions") {
  struct Case {
    std::uint64_t n;
    std::uint64_t k;
    double delta;
    SphereVariant variant;
  };
  for (const Case& c : {Case{50, 50, 0.1, SphereVariant::real_sphere},
                        Case{200, 100, 0.05, SphereVariant::real_sphere},
                        Case{30, 300, 0.2, SphereVariant::real_sphere},
                        Case{50, 50, 0.1, SphereVariant::complex_sphere},
                        Case{400, 40, 0.3, SphereVariant::complex_sphere}}) {
    constexpr std::uint64_t kTrials = 100'000;
    const auto r = cvqkd::symmetry::mc_lemma1(c.n, c.k, c.delta, kTrials, c.variant, 16);
    CAPTURE(c.n);
    CAPTURE(c.k);
    CHECK(r.interval.rate <= c.delta + 3.0 * std::sqrt(c.delta / kTrials));
  }
}
