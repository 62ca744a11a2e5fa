#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "ccm/analysis.hpp"
#include "ccm/special_functions.hpp"

using namespace ccm;

namespace {

const MapModel kBsm{MapKind::BSM, 20};
const MapModel kTent{MapKind::Tent, 20};
const MapModel kLog{MapKind::Logistic, 20};

double geometric_prefactor(double g) {
  return 1.0 + std::exp(-2.0 * g) / (1.0 - std::exp(-g));
}

}  // namespace

TEST_CASE("rho_bar") {
  for (int d : {1, 2, 4, 9})
    for (int n : {1, 3, 6})
      CHECK(rho_bar(n, d, (1ull << n) - 1, kBsm, 2.0) ==
            doctest::Approx(std::sqrt(static_cast<double>(d))).epsilon(1e-12));
  CHECK(rho_bar(2, 1, 1, kBsm, 1.0) == doctest::Approx(0.5).epsilon(1e-12));

  // logistic: single-term finite-difference cross-check, n=2, iota=1, d=1
  const double gj = 2.0 * std::ldexp(1.0, 2);  // Gamma_2 = 8
  const auto finv = [](double x) {
    const double c = std::cos(std::numbers::pi / 2.0 * (1.0 - x));
    return c * c;
  };
  const double gap = finv(0.25 + 0.125) - finv(0.25 - 0.125);
  CHECK(rho_bar(2, 1, 1, kLog, 2.0) ==
        doctest::Approx(0.5 * std::sqrt(gj * gj * gap * gap)).epsilon(1e-10));
}

TEST_CASE("rho_min equals rho_bar for the uniform cdf") {
  std::mt19937_64 rng(89);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 8);
    const int d = 1 + static_cast<int>(rng() % 6);
    BitPrefix bits(static_cast<std::size_t>(n));
    for (auto& b : bits) b = static_cast<std::uint8_t>(rng() & 1);
    CHECK(rho_min(n, d, bits, kBsm, 2.0) ==
          doctest::Approx(std::sqrt(static_cast<double>(d))).epsilon(1e-12));
  }
}

TEST_CASE("tsb closed forms") {
  CHECK(tsb(1, 2, 0.2, kBsm, 2.0).value == doctest::Approx(std::exp(-5.0)).epsilon(1e-10));
  CHECK(tsb(1, 3, 1e6, kBsm, 2.0).value == doctest::Approx(1.0).epsilon(1e-3));
  // d=4 at sigma2=0.1: rho^2 = 4, Q(d/2, rho^2/(2 sigma2)) = Q(2,20) = 21 e^-20
  CHECK(tsb(2, 4, 0.1, kBsm, 2.0).value ==
        doctest::Approx(21.0 * std::exp(-20.0)).epsilon(1e-9));
  CHECK(tsb(2, 4, 0.1, kBsm, 2.0).value == doctest::Approx(gamma_q(2.0, 20.0)).epsilon(1e-12));
}

TEST_CASE("tsb monotone nonincreasing in d") {
  for (const auto& map : {kBsm, kTent}) {
    double prev = 1.0;
    for (int d = 1; d <= 20; ++d) {
      const double v = tsb(3, d, 0.15, map, 2.0).value;
      REQUIRE(v <= prev + 1e-12);
      prev = v;
    }
  }
}

TEST_CASE("tsb sampled mode agrees with exact") {
  const MapModel big{MapKind::BSM, 20};
  const auto exact = tsb(10, 3, 0.2, big, 2.0, 12);
  const auto sampled = tsb(10, 3, 0.2, big, 2.0, /*exact_limit=*/5, 20000, 7);
  REQUIRE(sampled.std_error.has_value());
  CHECK_FALSE(exact.std_error.has_value());
  CHECK(std::abs(sampled.value - exact.value) <= 4.0 * *sampled.std_error + 1e-12);
}

TEST_CASE("beta_size") {
  REQUIRE(beta_size(kBsm, 2.0).has_value());
  CHECK(*beta_size(kBsm, 2.0) == 1.0);
  REQUIRE(beta_size(kTent, 2.0).has_value());
  CHECK(*beta_size(kTent, 2.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_FALSE(beta_size(kLog, 2.0).has_value());
  CHECK(*beta_size(kBsm, 1.0) == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("gamma_bar_size and sigma2_sup") {
  CHECK(gamma_bar_size(1.0, 0.1, 3) == doctest::Approx(2.4528).epsilon(1e-4));
  CHECK(gamma_bar_size(1.0, sigma2_sup(1.0, 3), 3) == doctest::Approx(0.0).scale(1).epsilon(1e-8));
  CHECK(gamma_bar_size(1.0, 0.5, 3) < 0.0);
  CHECK(sigma2_sup(1.0, 3) == doctest::Approx(0.2361).epsilon(5e-4 / 0.2361));
  CHECK(sigma2_sup(1.0, 1000000) == doctest::Approx(0.373).epsilon(2e-3));

  std::mt19937_64 rng(97);
  std::uniform_real_distribution<double> uc(0.1, 10.0);
  for (int i = 0; i < 50; ++i) {
    const double c = uc(rng);
    CHECK(sigma2_sup(c, 3) == doctest::Approx(c * sigma2_sup(1.0, 3)).epsilon(1e-10));
  }
}

TEST_CASE("beta_bw_bsm") {
  CHECK(beta_bw_bsm(5, kBsm) == std::ldexp(1.0, -12));
  // g = identity: offset 2^-(m_r+2) about 1/2, gap 2^-(m_r+1)
  CHECK(beta_bw_bsm(0, kBsm) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(beta_bw_bsm(1, kBsm) == doctest::Approx(1.0 / 16.0).epsilon(1e-15));
  for (int m = 1; m < 8; ++m) REQUIRE(beta_bw_bsm(m + 1, kBsm) < beta_bw_bsm(m, kBsm));
  // logistic conjugation shrinks the gap through g
  const double s5 = std::sin(3.0 * std::numbers::pi / 8.0);
  const double s3 = std::sin(std::numbers::pi / 8.0);
  CHECK(beta_bw_bsm(0, kLog) ==
        doctest::Approx((s5 * s5 - s3 * s3) * (s5 * s5 - s3 * s3)).epsilon(1e-12));
}

TEST_CASE("beta_bw_tent") {
  CHECK(beta_bw_tent(kTent) == doctest::Approx(1.0 / 9.0).epsilon(1e-12));
  CHECK(beta_bw_tent(kLog) == doctest::Approx(0.1875).epsilon(1e-4 / 0.1875));
  // logistic objective at x = 1/3 is (sin^2(pi/6) - sin^2(pi/3))^2 = 1/4,
  // well above the infimum at the left endpoint
  const auto g = [](double x) {
    const double s = std::sin(std::numbers::pi * x / 2.0);
    return s * s;
  };
  const double at_third = (g(1.0 / 3.0) - g(2.0 / 3.0)) * (g(1.0 / 3.0) - g(2.0 / 3.0));
  CHECK(at_third == doctest::Approx(0.25).epsilon(1e-12));
  const double at_sixth = (g(1.0 / 6.0) - g(0.5)) * (g(1.0 / 6.0) - g(0.5));
  CHECK(at_sixth == doctest::Approx(0.1875).epsilon(1e-12));
}

TEST_CASE("gamma_bar_bw") {
  CHECK(gamma_bar_bw(0.1875, 0.5) == doctest::Approx(0.046875).epsilon(1e-12));
  CHECK(gamma_bar_bw(1.0 / 9.0, 1.0 / 72.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(gamma_bar_bw(0.5, 1e12) == doctest::Approx(0.0).scale(1).epsilon(1e-12));
}

TEST_CASE("efficiency tail") {
  const double expected = (1.0 + (1.0 / 16.0) / (3.0 / 4.0)) / 64.0;
  CHECK(efficiency_tail(1.0, std::log(4.0), 3) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(efficiency_tail(1.0, 50.0, 3) == doctest::Approx(0.0).scale(1).epsilon(1e-12));
}

TEST_CASE("energy bound series oracle") {
  CHECK_FALSE(energy_bound_size(1.0, std::log(4.0), 1.0, 3, 0.0, 1).has_value());

  const auto series = [](double K, double gamma, double gamma0, int d0, int m) {
    double s = 0.0;
    for (int d = d0; d < d0 + 1000; ++d)
      s += std::exp(m * d * std::log(4.0) - gamma * d);
    return K * std::pow(gamma0, 2.0 * m) * geometric_prefactor(gamma) * s;
  };
  const auto b1 = energy_bound_size(1.0, 2.0, 1.0, 3, 0.0, 1);
  REQUIRE(b1.has_value());
  CHECK(*b1 == doctest::Approx(series(1.0, 2.0, 1.0, 3, 1)).epsilon(1e-9));
  const auto b2 = energy_bound_size(0.7, 3.0, 2.0, 4, 1.5, 2);
  REQUIRE(b2.has_value());
  CHECK(*b2 == doctest::Approx(1.5 + series(0.7, 3.0, 2.0, 4, 2)).epsilon(1e-9));
}

TEST_CASE("bandwidth and energy bounds, bw scheme") {
  const auto tail = [](double K, double gamma, int d0) {
    const double pre = 1.0 + std::exp(-2.0 * gamma) / (1.0 + std::exp(-gamma));
    double s = 0.0;
    for (int d = d0; d < d0 + 2000; ++d) s += d * std::exp(-gamma * d);
    return K * pre * s;
  };
  CHECK(bandwidth_bound_bw(1.0, 1.0, 1.0, 3, 0.0) ==
        doctest::Approx(tail(1.0, 1.0, 3)).epsilon(1e-9));
  CHECK(bandwidth_bound_bw(1.0, 1.0, 2.5, 3, 0.0) ==
        doctest::Approx(2.5 * tail(1.0, 1.0, 3)).epsilon(1e-9));
  CHECK(energy_bound_bw(0.4, 0.8, 5, 1.0) ==
        doctest::Approx(1.0 + tail(0.4, 0.8, 5)).epsilon(1e-9));
  CHECK(bandwidth_bound_bw(1.0, 40.0, 1.0, 3, 0.125) == doctest::Approx(0.125).epsilon(1e-9));
}

TEST_CASE("required exponent") {
  CHECK(required_exponent({{2.0}}) == doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-10));
  CHECK(required_exponent({{1.0}}) == doctest::Approx(0.0).scale(1).epsilon(1e-10));
  const double rho = (3.0 + std::sqrt(17.0)) / 2.0;
  CHECK(required_exponent({{0.0, 1.0}, {-2.0, 3.0}}) ==
        doctest::Approx(2.0 * std::log(rho)).epsilon(1e-8));
}
