#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "boltz/dynamics.hpp"

using namespace boltz;

namespace {

Distribution standard(int N, double L = 8.0) {
  std::vector<double> u{0.0, 0.0};
  return maxwellian(Grid{2, N, L}, 1.0, u, 1.0);
}

Distribution bimodal(int N, double L = 8.0) {
  Grid g{2, N, L};
  std::vector<double> a{-2.0, 0.0}, b{2.0, 0.0};
  auto f = maxwellian(g, 0.5, a, 0.5);
  auto f2 = maxwellian(g, 0.5, b, 0.5);
  for (std::size_t i = 0; i < f.values.size(); ++i) f.values[i] += f2.values[i];
  return f;
}

double max_diff(const Distribution& a, const Distribution& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) m = std::max(m, std::abs(a.values[i] - b.values[i]));
  return m;
}

DiagnosticSeries synthetic(const std::vector<double>& t, const std::vector<double>& m) {
  DiagnosticSeries s;
  s.times = t;
  s.m_w = {m};
  s.l1_w = {std::vector<double>(t.size(), 1.0)};
  s.exp_moment_gamma = std::vector<double>(t.size(), 1.0);
  return s;
}

const CollisionParams kParams{};

}  // namespace

TEST_CASE("zero step is the identity") {
  auto f = bimodal(24);
  Stepper st(f.grid, kParams, SplitConfig{}, CollisionQuad::for_grid(f.grid));
  CHECK(st.step(f, 0.0, Method::RK4).values == f.values);
  CHECK_THROWS_AS(st.step(f, -1e-3, Method::Euler), std::invalid_argument);
}

TEST_CASE("Maxwellian is a fixed point up to the equilibrium residual") {
  auto f = standard(32);
  Stepper st(f.grid, kParams, SplitConfig{}, CollisionQuad::for_grid(f.grid));
  const double dt = 2e-3;
  auto r = st.rhs(f);
  double res = 0.0;
  for (double x : r) res = std::max(res, std::abs(x));
  CHECK(res < 0.1);
  auto f1 = st.step(f, dt, Method::RK4);
  CHECK(max_diff(f1, f) <= 1.05 * res * dt);
}

TEST_CASE("conservative right-hand side has vanishing invariants") {
  auto f = bimodal(24);
  const auto& g = f.grid;
  auto quad = CollisionQuad::for_grid(g);
  Stepper cons(g, kParams, SplitConfig{}, quad, true);
  Stepper raw(g, kParams, SplitConfig{}, quad, false);
  auto qc = collision_invariants(g, cons.rhs(f));
  auto qr = collision_invariants(g, raw.rhs(f));
  REQUIRE(qc.size() == 4);
  CHECK(std::abs(qr[0]) > 1e-4);
  for (double x : qc) CHECK(std::abs(x) < 1e-12);
  // the projection only touches the invariant directions
  auto a = cons.rhs(f), b = raw.rhs(f);
  double diff = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    diff = std::max(diff, std::abs(a[i] - b[i]));
    scale = std::max(scale, std::abs(b[i]));
  }
  CHECK(diff < 0.2 * scale);
}

TEST_CASE("RK4 step halving shows fifth-order local error") {
  auto f = bimodal(24);
  Stepper st(f.grid, kParams, SplitConfig{}, CollisionQuad::for_grid(f.grid));
  auto gap = [&](double dt) {
    auto full = st.step(f, dt, Method::RK4);
    auto half = st.step(st.step(f, 0.5 * dt, Method::RK4), 0.5 * dt, Method::RK4);
    return max_diff(full, half);
  };
  const double e1 = gap(4e-3), e2 = gap(2e-3);
  MESSAGE("step-halving gaps " << e1 << " " << e2 << " ratio " << e1 / e2);
  CHECK(e1 / e2 > 16.0);
  CHECK(e1 / e2 < 40.0);
}

TEST_CASE("Euler step halving shows second-order local error") {
  auto f = bimodal(24);
  Stepper st(f.grid, kParams, SplitConfig{}, CollisionQuad::for_grid(f.grid));
  auto gap = [&](double dt) {
    auto full = st.step(f, dt, Method::Euler);
    auto half = st.step(st.step(f, 0.5 * dt, Method::Euler), 0.5 * dt, Method::Euler);
    return max_diff(full, half);
  };
  const double r = gap(1e-3) / gap(5e-4);
  CHECK(r == doctest::Approx(4.0).epsilon(0.1));
}

TEST_CASE("oversized steps abort on clipped mass") {
  auto f = bimodal(24);
  Stepper st(f.grid, kParams, SplitConfig{}, CollisionQuad::for_grid(f.grid));
  CHECK_THROWS_AS(st.step(f, 0.5, Method::Euler), StepAborted);
  SimConfig sim;
  sim.dt = 0.5;
  sim.T_final = 1.0;
  CHECK_THROWS_AS(simulate(f, sim, SplitConfig{}, kParams, CollisionQuad::for_grid(f.grid)), std::invalid_argument);
  sim.stability_limit = 1e9;
  try {
    simulate(f, sim, SplitConfig{}, kParams, CollisionQuad::for_grid(f.grid));
    FAIL("expected an abort");
  } catch (const StepAborted& e) {
    CHECK(e.time() == 0.0);
    CHECK(std::string(e.what()).find("t = 0") != std::string::npos);
  }
}

TEST_CASE("short bimodal run conserves invariants and dissipates entropy") {
  auto f = bimodal(24);
  SimConfig sim;
  sim.T_final = 0.04;
  sim.dt = 2e-3;
  sim.record_every = 4;
  sim.weights_tracked = {Weight::exponential(0.5, 1.0), Weight::constant()};
  sim.track_q11 = true;
  auto s = simulate(f, sim, SplitConfig{}, kParams, CollisionQuad::for_grid(f.grid));
  REQUIRE(s.size() == 6);
  CHECK(s.times.back() == doctest::Approx(0.04));
  for (std::size_t i = 1; i < s.size(); ++i) {
    CHECK(s.mass[i] == doctest::Approx(s.mass[0]).epsilon(1e-12));
    CHECK(s.energy[i] == doctest::Approx(s.energy[0]).epsilon(1e-12));
    CHECK(std::abs(s.momentum[0][i]) < 1e-12);
    CHECK(s.entropy[i] < s.entropy[i - 1]);
    CHECK(s.q11_w[0][i] <= 0.0);
    CHECK(s.q11_w[1][i] <= 0.0);
  }
  CHECK(s.m_w[1][0] == doctest::Approx(f.max_value()));
  CHECK(s.exp_moment_gamma[0] == doctest::Approx(s.mass[0]));
  CHECK(s.exp_moment_gamma.back() > s.exp_moment_gamma[0]);
}

TEST_CASE("Maxwellian run keeps diagnostics flat") {
  auto f = standard(24);
  SimConfig sim;
  sim.T_final = 0.02;
  sim.record_every = 5;
  sim.weights_tracked = {Weight::exponential(0.2, 2.0)};
  auto s = simulate(f, sim, SplitConfig{}, kParams, CollisionQuad::for_grid(f.grid));
  for (std::size_t i = 1; i < s.size(); ++i) {
    CHECK(s.entropy[i] == doctest::Approx(s.entropy[0]).epsilon(1e-4));
    CHECK(s.m_w[0][i] == doctest::Approx(s.m_w[0][0]).epsilon(1e-3));
  }
  auto rep = moment_generation_check(s, 0.05, kParams.gamma);
  CHECK(rep.bounded);
  CHECK(rep.ratio < 1.01);
  CHECK_THROWS_AS(moment_generation_check(s, 0.1, kParams.gamma), std::invalid_argument);
}

TEST_CASE("envelope check on constructed series") {
  const double a = 2.0, b = 0.5, d = 2, nu = 0.5;
  std::vector<double> t{0.0, 0.1, 0.2, 0.4, 0.8};
  auto flat = synthetic(t, std::vector<double>(t.size(), a / 2));
  auto ok = envelope_check(flat, 0, a, b, d, nu);
  CHECK(ok.pass);
  CHECK(ok.min_slack >= a / 2);
  CHECK(ok.checked == 4);
  CHECK(std::isnan(ok.first_violation));

  std::vector<double> m;
  for (double x : t) m.push_back(x > 0 ? a + 2 * b * std::pow(x, -d / nu) : 1e9);
  auto bad = envelope_check(synthetic(t, m), 0, a, b, d, nu);
  CHECK_FALSE(bad.pass);
  CHECK(bad.first_violation == 0.1);
  CHECK(bad.min_slack < 0.0);
  CHECK_THROWS_AS(envelope_check(DiagnosticSeries{}, 0, a, b, d, nu), std::invalid_argument);
}

TEST_CASE("envelope fit on synthetic series") {
  std::vector<double> t;
  for (int i = 1; i <= 40; ++i) t.push_back(0.1 * i);
  auto c = fit_envelope(synthetic(t, std::vector<double>(t.size(), 5.0)), 0, 2, 0.5);
  CHECK(c.a == doctest::Approx(5.5));
  CHECK(c.b == 0.0);

  std::vector<double> m;
  for (double x : t) m.push_back(1.0 + std::pow(x, -4.0));
  auto s = synthetic(t, m);
  auto e = fit_envelope(s, 0, 2, 0.5);
  CHECK(e.a == doctest::Approx(1.1).epsilon(1e-2));
  CHECK(e.b == doctest::Approx(1.1).epsilon(1e-2));
  CHECK(envelope_check(s, 0, e.a, e.b, 2, 0.5).pass);

  std::vector<double> dec;
  for (double x : t) dec.push_back(3.0 * std::exp(-x) + 1.0);
  auto sd = synthetic(t, dec);
  auto ed = fit_envelope(sd, 0, 2, 0.5);
  CHECK(ed.b > 0.0);
  CHECK(envelope_check(sd, 0, ed.a, ed.b, 2, 0.5).pass);
  CHECK_THROWS_AS(fit_envelope(synthetic({0.1, 0.2}, {1.0, 1.0}), 0, 2, 0.5), std::invalid_argument);
}

TEST_CASE("sup over L1 constant") {
  auto s = synthetic({0.0, 0.5, 1.0}, {2.0, 3.0, 1.0});
  s.l1_w[0] = {4.0, 2.0, 1.0};
  CHECK(linf_l1_constant(s, 0, 0) == doctest::Approx(1.5));
  CHECK_THROWS_AS(linf_l1_constant(s, 1, 0), std::invalid_argument);
}

TEST_CASE("CSV output has a header and twelve significant digits") {
  auto s = synthetic({0.0, 1.0 / 3.0}, {1.0, 2.0});
  s.mass = {1.0, 1.0};
  s.momentum = {{0.0, 0.0}, {0.0, 0.0}};
  s.energy = {2.0, 2.0};
  s.entropy = {-1.0, -1.25};
  s.clipped = {0.0, 0.0};
  std::ostringstream os;
  write_csv(os, s);
  std::istringstream is(os.str());
  std::string header, row0, row1;
  std::getline(is, header);
  std::getline(is, row0);
  std::getline(is, row1);
  CHECK(header == "t,mass,momentum_0,momentum_1,energy,entropy,exp_moment,m_w0,l1_w0,clipped");
  CHECK(row1.rfind("0.333333333333,", 0) == 0);
  CHECK(std::count(row1.begin(), row1.end(), ',') == std::count(header.begin(), header.end(), ','));
}

TEST_CASE("configuration validation") {
  SimConfig sim;
  CHECK_NOTHROW(sim.validate());
  sim.dt = 0.0;
  CHECK_THROWS_AS(sim.validate(), std::invalid_argument);
  sim.dt = 1e-3;
  sim.record_every = 0;
  CHECK_THROWS_AS(sim.validate(), std::invalid_argument);
  CHECK(parse_method("rk4") == Method::RK4);
  CHECK(to_string(parse_method("euler")) == "euler");
  CHECK_THROWS_AS(parse_method("leapfrog"), std::invalid_argument);
}
