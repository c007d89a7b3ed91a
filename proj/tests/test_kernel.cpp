#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "boltz/kernel.hpp"

using namespace boltz;

namespace {

// int_0^{pi/2} sin^a = sqrt(pi) Gamma((a+1)/2) / (2 Gamma(a/2 + 1))
double half_sine_power(double a) {
  return std::sqrt(std::numbers::pi) * std::tgamma(0.5 * (a + 1.0)) / (2.0 * std::tgamma(0.5 * a + 1.0));
}

}  // namespace

TEST_CASE("angular kernel values") {
  CollisionParams p{2, 1.0, 0.5, 1.0, 1.0};
  CHECK(angular_b(std::cos(std::numbers::pi / 6), p) == doctest::Approx(2.828427).epsilon(1e-6));
  CHECK(angular_b(std::cos(3 * std::numbers::pi / 4), p) == doctest::Approx(0.420448).epsilon(1e-5));
  CHECK(angular_b(0.0, p) == doctest::Approx(1.0));
  CHECK(angular_b(1e-300, p) == doctest::Approx(1.0));
  CHECK(angular_b(-1e-300, p) == doctest::Approx(1.0));
  CHECK(std::isinf(angular_b(1.0, p)));
  CHECK(angular_b(-1.0, p) == 0.0);
  CHECK_THROWS_AS(angular_b(1.5, p), std::invalid_argument);
  CHECK_THROWS_AS(angular_b(std::nan(""), p), std::invalid_argument);
}

TEST_CASE("angular kernel is nonnegative on random angles") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int d : {2, 3})
    for (double nu : {0.25, 0.5, 1.0}) {
      CollisionParams p{d, 0.5, nu, 1.0, 1.0};
      for (int i = 0; i < 1000; ++i) CHECK(angular_b(u(rng) * 0.999999, p) >= 0.0);
    }
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS((CollisionParams{2, 1.0, 1.5, 1, 1}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((CollisionParams{2, 0.0, 0.5, 1, 1}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((CollisionParams{4, 1.0, 0.5, 1, 1}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((CollisionParams{2, 1.0, 0.5, 0, 1}.validate()), std::invalid_argument);
  try {
    CollisionParams{2, 1.0, 1.5, 1, 1}.validate();
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("nu <= 1") != std::string::npos);
  }
}

TEST_CASE("integrability probe against closed form") {
  CollisionParams p{2, 1.0, 0.5, 1.0, 1.0};
  std::vector<int> levels;
  for (int k = 1; k <= 24; ++k) levels.push_back(k);
  const auto conv = integrability_probe(p, 2.0, levels);
  CHECK(std::abs(conv[23] - conv[22]) < 1e-6);
  // |S^0| (int sin^{1/2} + int sin^{9/2}) over the two quarter-turns
  const double exact = 2.0 * (half_sine_power(0.5) + half_sine_power(4.5));
  CHECK(conv.back() == doctest::Approx(exact).epsilon(1e-7));

  const auto div = integrability_probe(p, 0.25, levels);
  CHECK(div.back() > 10.0 * div.front());

  const auto border = integrability_probe(p, 0.5, levels);
  // logarithmic growth: equal increments per halving of theta_min
  const double inc1 = border[20] - border[19];
  const double inc2 = border[23] - border[22];
  CHECK(inc1 == doctest::Approx(inc2).epsilon(1e-6));
  CHECK(inc1 == doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-4));
}

TEST_CASE("integrability probe classifies the whole parameter matrix") {
  std::vector<int> levels{6, 12, 18, 24, 30};
  for (int d : {2, 3})
    for (double g : {0.5, 1.0})
      for (double nu : {0.25, 0.5, 1.0}) {
        CollisionParams p{d, g, nu, 1.0, 1.0};
        const auto c = integrability_probe(p, nu + 0.5, levels);
        CHECK(std::abs(c[4] - c[3]) < 1e-3 * c[4]);
        const auto dv = integrability_probe(p, nu - 0.25 > 0 ? nu - 0.25 : nu, levels);
        CHECK(dv[4] - dv[3] > 0.9 * (dv[1] - dv[0]));
      }
}

TEST_CASE("tau relation") {
  auto t = tau_relation(CollisionParams{3, 1.0, 0.5, 1, 1});
  CHECK(t.tau_plus == -2.5);
  CHECK(t.tau_minus == 2.5);
  CHECK(t.sum == 0.0);
  t = tau_relation(CollisionParams{2, 0.5, 0.5, 1, 1});
  CHECK(t.tau_plus == -1.5);
  CHECK(t.tau_minus == 2.0);
  CHECK(t.sum == 0.5);
  t = tau_relation(CollisionParams{2, 1.0, 1.0, 1, 1});
  CHECK(t.tau_plus == -2.0);
  CHECK(t.tau_minus == 3.0);
  CHECK(t.sum == 1.0);
}

TEST_CASE("sphere measures") {
  CHECK(sphere_measure(0) == doctest::Approx(2.0));
  CHECK(sphere_measure(1) == doctest::Approx(2.0 * std::numbers::pi));
  CHECK(sphere_measure(2) == doctest::Approx(4.0 * std::numbers::pi));
  CHECK(unit_ball_volume(2) == doctest::Approx(std::numbers::pi));
  CHECK(unit_ball_volume(3) == doctest::Approx(4.0 * std::numbers::pi / 3.0));
}
