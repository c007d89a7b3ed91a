#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "boltz/grid.hpp"
#include "boltz/weights.hpp"

using namespace boltz;

namespace {

// E_2(x) = cosh(sqrt(x)); summed as an even series in sqrt(x) in long double.
double even_series_e2(double x) {
  long double s = std::sqrt(static_cast<long double>(x));
  long double term = 1.0L, acc = 1.0L;
  for (int k = 1; k < 400; ++k) {
    term *= s * s / ((2.0L * k - 1.0L) * (2.0L * k));
    acc += term;
  }
  return static_cast<double>(acc);
}

double fd_component(const Weight& w, std::vector<double> v, int k, double step) {
  auto inv = [&](const std::vector<double>& x) { return 1.0 / weight_eval(w, x); };
  std::vector<double> a = v, b = v;
  a[k] += step;
  b[k] -= step;
  return (inv(a) - inv(b)) / (2.0 * step);
}

}  // namespace

TEST_CASE("mittag-leffler reference values") {
  CHECK(mittag_leffler(0.7, 0.0) == 1.0);
  CHECK(mittag_leffler(3.0, 0.0) == 1.0);
  CHECK(mittag_leffler(1.0, 1.0) == doctest::Approx(2.718281828459045).epsilon(1e-14));
  CHECK(mittag_leffler(2.0, 4.0) == doctest::Approx(3.762195691083631).epsilon(1e-13));
  CHECK(mittag_leffler(2.0, 4.0) == doctest::Approx(even_series_e2(4.0)).epsilon(1e-13));
  CHECK_THROWS_AS(mittag_leffler(1.0, -1.0), std::invalid_argument);
  CHECK_THROWS_AS(mittag_leffler(0.0, 1.0), std::invalid_argument);
}

TEST_CASE("mittag-leffler with a = 1 is the exponential on [0, 30]") {
  for (int i = 0; i <= 3000; ++i) {
    const double x = 0.01 * i;
    CHECK(std::abs(mittag_leffler(1.0, x) / std::exp(x) - 1.0) < 1e-10);
  }
}

TEST_CASE("mittag-leffler with a = 2 matches cosh of the root") {
  for (double x : {0.1, 1.0, 10.0, 100.0, 1000.0})
    CHECK(mittag_leffler(2.0, x) == doctest::Approx(even_series_e2(x)).epsilon(1e-12));
}

TEST_CASE("mittag-leffler asymptotic branch is continuous at the switch") {
  MLSeriesConfig series;
  series.asymptotic_switch_x = 1e9;
  MLSeriesConfig asym;
  asym.asymptotic_switch_x = 1.0;
  for (double a : {1.0, 4.0 / 3.0, 2.0})
    for (double x : {2000.0, 3000.0})
      CHECK(log_mittag_leffler(a, x, series) == doctest::Approx(log_mittag_leffler(a, x, asym)).epsilon(1e-10));
}

TEST_CASE("mittag-leffler config validation") {
  MLSeriesConfig c;
  CHECK_NOTHROW(c.validate());
  c.max_terms = 10;
  CHECK_THROWS(c.validate());
  MLSeriesConfig tiny;
  tiny.max_terms = 50;
  CHECK_THROWS_AS(mittag_leffler(1.0, 200.0, tiny), std::runtime_error);
}

TEST_CASE("weight values") {
  std::vector<double> zero{0.0, 0.0};
  CHECK(weight_eval(Weight::exponential(0.5, 2.0), zero) == doctest::Approx(1.6487212707).epsilon(1e-10));
  CHECK(weight_eval(Weight::constant(), std::vector<double>{3.0, -7.0}) == 1.0);
  CHECK(weight_eval(Weight::mittag_leffler(0.5, 1.0), zero) == doctest::Approx(std::cosh(0.5)).epsilon(1e-12));
  CHECK_THROWS_AS(weight_eval(Weight::exponential(10.0, 2.0), std::vector<double>{10.0, 0.0}), std::overflow_error);
  CHECK_THROWS_AS(Weight::exponential(-1.0, 1.0).validate(), std::invalid_argument);
  CHECK_THROWS_AS(Weight::exponential(1.0, 2.5).validate(), std::invalid_argument);
}

TEST_CASE("weights are radially nondecreasing") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-6.0, 6.0);
  const std::vector<Weight> ws{Weight::exponential(0.25, 1.0), Weight::exponential(1.0, 2.0),
                               Weight::mittag_leffler(0.25, 1.5), Weight::mittag_leffler(1.0, 1.0)};
  for (const auto& w : ws) {
    for (int i = 0; i < 10000 / 4; ++i) {
      std::vector<double> a{u(rng), u(rng)}, b{u(rng), u(rng)};
      if (std::hypot(a[0], a[1]) > std::hypot(b[0], b[1])) std::swap(a, b);
      CHECK(weight_eval(w, a) <= weight_eval(w, b));
    }
  }
}

TEST_CASE("gradient of the inverse weight") {
  auto g0 = grad_inv_weight(Weight::exponential(0.7, 1.5), std::vector<double>{0.0, 0.0});
  CHECK(g0[0] == 0.0);
  CHECK(g0[1] == 0.0);
  auto g = grad_inv_weight(Weight::exponential(1.0, 2.0), std::vector<double>{1.0, 0.0});
  CHECK(g[0] == doctest::Approx(-2.0 * std::exp(-2.0)).epsilon(1e-12));
  CHECK(g[0] == doctest::Approx(fd_component(Weight::exponential(1.0, 2.0), {1.0, 0.0}, 0, 1e-5)).epsilon(1e-8));
  CHECK(g[1] == 0.0);
}

TEST_CASE("gradient matches central differences at random points") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-4.2, 4.2);
  const std::vector<Weight> ws{Weight::exponential(0.5, 1.0), Weight::exponential(0.25, 2.0),
                               Weight::mittag_leffler(0.5, 1.0), Weight::mittag_leffler(1.0, 1.5)};
  int checked = 0;
  for (const auto& w : ws) {
    for (int i = 0; i < 250; ++i) {
      std::vector<double> v{u(rng), u(rng)};
      if (std::hypot(v[0], v[1]) > 6.0) continue;
      const auto g = grad_inv_weight(w, v);
      for (int k = 0; k < 2; ++k) {
        const double fd = fd_component(w, v, k, 1e-4 * bracket(v));
        const double scale = std::hypot(g[0], g[1]);
        CHECK(std::abs(g[k] - fd) <= 1e-6 * scale);
      }
      ++checked;
    }
  }
  CHECK(checked > 600);
}

TEST_CASE("mittag-leffler gradient bound p alpha^{2/p} <v>") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-8.0, 8.0);
  for (double alpha : {0.25, 0.5, 1.0}) {
    const Weight w = Weight::mittag_leffler(alpha, 1.0);
    for (int i = 0; i < 10000 / 3; ++i) {
      std::vector<double> v{u(rng), u(rng)};
      const auto g = grad_inv_weight(w, v);
      CHECK(std::hypot(g[0], g[1]) <= w.p * std::pow(alpha, 2.0 / w.p) * bracket(v) * (1.0 + 1e-12));
    }
  }
}

TEST_CASE("validate P1-P4") {
  const Grid g{2, 49, 8.0};
  const std::vector<PartnerParams> partners{{0.1, 1.0}, {0.5, 1.0}, {2.0, 1.0}};
  const std::vector<double> ks{1, 2, 4, 3};

  auto rep = validate_P1_P4(Weight::exponential(1.0, 2.0), {{0.05, 2}, {0.25, 2}}, g, ks);
  CHECK(rep.pass());
  CHECK(rep.c2 == 4.0);
  CHECK(rep.p2_constant <= 1.0);

  for (double a : {0.25, 1.0})
    for (double p : {1.0, 2.0}) {
      std::vector<PartnerParams> pp{{0.05, p}, {0.5 * a, p}, {2.0 * a, p}};
      auto r = validate_P1_P4(Weight::exponential(a, p), pp, g, ks);
      CHECK(r.pass());
      CHECK(r.c2 == std::pow(2.0, p));
    }

  auto rc = validate_P1_P4(Weight::constant(), partners, g, ks);
  CHECK(rc.p1);
  CHECK(rc.p4);
  CHECK(rc.p4_constant == 0.0);

  auto rml = validate_P1_P4(Weight::mittag_leffler(1.0, 1.0), partners, g, ks);
  CHECK(rml.pass());
  CHECK(std::isfinite(rml.p2_constant));
  CHECK(rml.p3_lower > 0.0);

  CHECK_THROWS_AS(validate_P1_P4(Weight::exponential(1.0, 1.0), partners, Grid{2, 32, 6.0}, ks),
                  std::invalid_argument);
}

TEST_CASE("mittag-leffler / exponential equivalence bounds") {
  auto e2 = ml_exp_equivalence(0.7, 2.0, 12.0);
  CHECK(e2.c_low == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(e2.c_high == doctest::Approx(1.0).epsilon(1e-10));
  auto e1 = ml_exp_equivalence(1.0, 1.0, 20.0);
  CHECK(e1.c_low > 0.0);
  CHECK(e1.c_low <= e1.c_high);
  CHECK(std::isfinite(e1.c_high));
  CHECK(e1.x_at_high == 0.0);
  CHECK(e1.c_high == doctest::Approx(1.0));
  CHECK(e1.c_low == doctest::Approx(0.5).epsilon(1e-6));
  for (double a : {0.25, 1.0})
    for (double s : {0.5, 1.0, 1.5}) CHECK(ml_exp_equivalence(a, s, 20.0, 2000).c_low > 0.0);
}

TEST_CASE("alpha cascade") {
  auto c = alpha_cascade(1.0, 4.0, 2, 0.5, 1.0);
  CHECK(c.alpha1 == 0.5);
  CHECK(c.alpha2 == doctest::Approx(0.5 / 33.0));
  CHECK(c.alpha3 == doctest::Approx(8.0 * 0.5 / 33.0));
  CHECK(c.alpha2 + 4.0 * c.alpha3 == doctest::Approx(0.5));
  CHECK_FALSE(c.strict);
  auto s = alpha_cascade(1.0, 4.0, 2, 0.5, 0.9);
  CHECK(s.alpha2 == doctest::Approx(0.0136364).epsilon(1e-5));
  CHECK(s.strict);
  CHECK(s.alpha1 - (s.alpha2 + 4.0 * s.alpha3) == doctest::Approx(0.05));
  CHECK(s.alpha3 * 0.5 / 2.0 > s.alpha2);
  auto n1 = alpha_cascade(1.0, 4.0, 2, 1.0, 0.8);
  CHECK(n1.alpha2 == doctest::Approx(0.8 * 0.5 / 17.0));
  CHECK_THROWS(alpha_cascade(1.0, 4.0, 2, 0.5, 0.0));
}
