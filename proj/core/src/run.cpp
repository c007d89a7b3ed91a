#include "boltz/run.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "boltz/warn.hpp"

namespace boltz {

namespace {

namespace fs = std::filesystem;

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

class Report {
 public:
  void section(const std::string& name) { os_ << "\n[" << name << "]\n"; }
  void kv(const std::string& k, const std::string& v) { os_ << k << " = " << v << "\n"; }
  void kv(const std::string& k, double v) { kv(k, num(v)); }
  void text(const std::string& t) { os_ << t; }
  void check(RunOutcome& out, const std::string& name, bool pass, const std::string& detail) {
    out.checks.push_back({name, pass, detail});
    os_ << "check " << name << " = " << (pass ? "pass" : "FAIL") << " (" << detail << ")\n";
  }
  std::string str() const { return os_.str(); }

 private:
  std::ostringstream os_;
};

class Table {
 public:
  explicit Table(std::vector<std::string> header) : cols_(header.size()) {
    for (std::size_t i = 0; i < header.size(); ++i) os_ << (i ? "," : "") << header[i];
    os_ << "\n";
  }
  Table& operator<<(const std::string& s) {
    put(s);
    return *this;
  }
  Table& operator<<(double x) {
    put(num(x));
    return *this;
  }
  std::string str() const { return os_.str(); }

 private:
  void put(const std::string& s) {
    os_ << (col_ ? "," : "") << s;
    if (++col_ == cols_) {
      os_ << "\n";
      col_ = 0;
    }
  }
  std::size_t cols_;
  std::size_t col_ = 0;
  std::ostringstream os_;
};

void write_file(RunOutcome& out, const fs::path& dir, const std::string& name, const std::string& content) {
  const fs::path p = dir / name;
  std::ofstream os(p, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + p.string());
  os << content;
  out.files.push_back(p.string());
}

void say(std::ostream* log, const std::string& s) {
  if (log) *log << s << std::endl;
}

double sq(std::span<const double> y) {
  double s = 0.0;
  for (double c : y) s += c * c;
  return s;
}

// Simulation pipeline shared by simulate and envelope-report.
void run_simulation(const RunConfig& cfg, const fs::path& dir, RunOutcome& out, Report& rep, std::ostream* log,
                    bool envelope_report) {
  const auto f0 = cfg.initial_distribution();
  const auto quad = cfg.collision_quad();
  const auto sim = cfg.sim_config();
  const int d = cfg.grid.d;
  const double nu = cfg.kernel.nu;

  rep.section("initial");
  rep.kv("mass", mass(f0));
  rep.kv("energy", energy(f0));
  rep.kv("entropy", entropy(f0));
  rep.kv("boundary_ratio", boundary_ratio(f0));
  {
    Stepper raw(cfg.grid, cfg.kernel, cfg.split, quad, false);
    const auto q = raw.rhs(f0);
    const auto inv = collision_invariants(cfg.grid, q);
    rep.kv("raw_mass_rate", inv[0]);
    for (int i = 0; i < d; ++i) rep.kv("raw_momentum_rate_" + std::to_string(i), inv[1 + i]);
    rep.kv("raw_energy_rate", inv[d + 1]);
    rep.kv("stability_number", raw.stability_number(f0, sim.dt));
  }

  Distribution last = f0;
  auto progress = [&](double t, const Distribution& f) {
    last = f;
    say(log, "t = " + num(t));
  };
  say(log, "simulating to T = " + num(sim.T_final));
  const auto s = simulate(f0, sim, cfg.split, cfg.kernel, quad, progress);
  write_file(out, dir, "diagnostics.csv", [&] {
    std::ostringstream os;
    write_csv(os, s);
    return os.str();
  }());
  if (cfg.dump) {
    std::ostringstream a, b;
    write_btgrid(a, f0);
    write_btgrid(b, last);
    write_file(out, dir, "f_initial.btgrid", a.str());
    write_file(out, dir, "f_final.btgrid", b.str());
  }

  rep.section("conservation");
  const double m0 = s.mass.front(), e0 = s.energy.front();
  double dm = 0.0, dp = 0.0, de = 0.0, clipped = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    dm = std::max(dm, std::abs(s.mass[i] - m0) / m0);
    for (int c = 0; c < d; ++c) dp = std::max(dp, std::abs(s.momentum[c][i] - s.momentum[c].front()) / m0);
    de = std::max(de, std::abs(s.energy[i] - e0) / e0);
    clipped += s.clipped[i];
  }
  rep.kv("mass_drift", dm);
  rep.kv("momentum_drift", dp);
  rep.kv("energy_drift", de);
  rep.kv("clipped_mass", clipped);
  rep.check(out, "conservation", dm < 1e-3 && dp < 1e-3 && de < 1e-3,
            "max relative drift " + num(std::max({dm, dp, de})) + " < 0.001");

  rep.section("entropy");
  double rise = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < s.size(); ++i) rise = std::max(rise, s.entropy[i] - s.entropy[i - 1]);
  rep.kv("entropy_initial", s.entropy.front());
  rep.kv("entropy_final", s.entropy.back());
  rep.kv("max_increment", s.size() > 1 ? rise : 0.0);
  rep.check(out, "entropy", s.size() < 2 || rise <= 1e-4, "max increment " + num(rise) + " <= 1e-4");

  rep.section("moment_generation");
  const auto mg = moment_generation_check(s, sim.moment_alpha, cfg.kernel.gamma);
  rep.kv("alpha", sim.moment_alpha);
  rep.kv("C", mg.C);
  rep.kv("ratio_to_initial", mg.ratio);
  rep.check(out, "moment_generation", mg.bounded && mg.ratio <= 2.0,
            "sup " + num(mg.C) + ", ratio to initial " + num(mg.ratio) + " <= 2");

  if (sim.weights_tracked.empty()) return;

  rep.section("weights");
  const auto cascade = cfg.weights.cascade(d, nu);
  const double c2 = std::pow(2.0, cfg.weights.p);
  rep.kv("family", to_string(cfg.weights.family));
  rep.kv("p", cfg.weights.p);
  rep.kv("alpha0", cfg.weights.alpha0);
  rep.kv("alpha1", cascade.alpha1);
  rep.kv("alpha2", cascade.alpha2);
  rep.kv("alpha3", cascade.alpha3);
  rep.kv("hypothesis_p_bound", 4.0 / (nu + 2.0));
  rep.check(out, "alpha_cascade", cascade.strict && cascade.alpha2 + c2 * cascade.alpha3 < cascade.alpha1,
            "alpha2 + c2 alpha3 = " + num(cascade.alpha2 + c2 * cascade.alpha3) + " < alpha1 = " +
                num(cascade.alpha1));
  double mmax = 0.0;
  for (double x : s.m_w[0]) mmax = std::max(mmax, x);
  rep.kv("sup_m_alpha2", mmax);
  const double chain = linf_l1_constant(s, 0, 1);
  double l1max = 0.0;
  for (double x : s.l1_w[1]) l1max = std::max(l1max, x);
  rep.kv("sup_l1_alpha1", l1max);
  rep.kv("linf_l1_constant", chain);
  rep.check(out, "linf_l1_chain", std::isfinite(chain) && mmax <= chain * l1max * (1 + 1e-12),
            "m(alpha2) <= " + num(chain) + " * ||f w(alpha1)||_1 at every record");

  if (sim.track_q11) {
    double qmax = -std::numeric_limits<double>::infinity();
    for (const auto& c : s.q11_w)
      for (double x : c) qmax = std::max(qmax, x);
    rep.kv("max_q11_at_argmax", qmax);
    rep.check(out, "q11_sign", qmax <= 0.0, "max q11 at the f w argmax " + num(qmax) + " <= 0");
  }

  rep.section("envelope");
  std::size_t first = 0;
  double a = sim.envelope.a, b = sim.envelope.b;
  if (sim.envelope.fit) {
    first = (s.size() + 1) / 2;
    if (first < 8) {
      rep.check(out, "envelope", false, "need at least 8 records in the fitting half, got " + std::to_string(first));
      return;
    }
    const auto fit = fit_envelope(s, 0, d, nu, first);
    a = fit.a;
    b = fit.b;
    rep.kv("fit_records", static_cast<double>(first));
  }
  rep.kv("a", a);
  rep.kv("b", b);
  const auto fit_window = envelope_check(s, 0, a, b, d, nu, 0);
  const auto holdout = envelope_check(s, 0, a, b, d, nu, first);
  rep.kv("min_slack_all", fit_window.min_slack);
  rep.kv("min_slack_holdout", holdout.min_slack);
  rep.check(out, "envelope", holdout.pass && holdout.checked > 0,
            std::to_string(holdout.checked) + " holdout records, min slack " + num(holdout.min_slack));

  if (!envelope_report) return;
  Table env({"t", "m_w", "envelope", "slack", "window"});
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double t = s.times[i];
    const double bound = t > 0.0 ? a + b * std::pow(t, -d / nu) : std::numeric_limits<double>::infinity();
    env << t << s.m_w[0][i] << bound << bound - s.m_w[0][i] << (i < first ? "fit" : "holdout");
  }
  write_file(out, dir, "envelope.csv", env.str());

  const Weight base{cfg.weights.family, cfg.weights.alpha0, cfg.weights.p};
  for (const auto& [label, f] : {std::pair<std::string, const Distribution*>{"initial", &f0}, {"final", &last}}) {
    rep.section("q11_bound_" + label);
    const auto r = q11_upper_bound_check(*f, base, cascade, cfg.kernel, quad);
    rep.text(r.to_text());
    rep.check(out, "q11_bound_" + label, r.holds, "q11 " + num(r.q11) + " <= bound " + num(r.bound));
  }
}

void run_validate_weights(const RunConfig& cfg, const fs::path& dir, RunOutcome& out, Report& rep,
                          std::ostream* log) {
  const auto& vp = cfg.validation;
  const Grid sample{2, 49, 8.0};
  Table t({"family", "alpha", "p", "P1", "P2", "P3", "P4", "c2", "p2_constant", "p3_upper", "p3_lower",
           "p4_constant", "samples"});
  bool all = true, c2_exact = true;
  std::string first_bad;
  auto one = [&](const Weight& w) {
    say(log, "validating " + to_string(w));
    const std::vector<PartnerParams> partners{{0.05, w.p}, {0.5 * w.alpha, w.p}, {2.0 * w.alpha, w.p}};
    const auto r = validate_P1_P4(w, partners, sample, vp.k_range);
    t << to_string(w.family) << w.alpha << w.p << (r.p1 ? "pass" : "fail") << (r.p2 ? "pass" : "fail")
      << (r.p3 ? "pass" : "fail") << (r.p4 ? "pass" : "fail") << r.c2 << r.p2_constant << r.p3_upper
      << r.p3_lower << r.p4_constant << static_cast<double>(r.samples);
    rep.section(to_string(w));
    rep.text(r.to_text());
    if (!r.pass() && all) first_bad = to_string(w) + ": " + r.first_violation;
    all = all && r.pass();
    if (w.family == WeightFamily::Exponential && !(r.c2 == std::pow(2.0, w.p) && r.p2_constant <= 1.0))
      c2_exact = false;
  };
  for (double a : vp.alphas)
    for (double p : vp.exp_p) one(Weight::exponential(a, p));
  for (double a : vp.alphas)
    for (double p : vp.ml_p) one(Weight::mittag_leffler(a, p));
  write_file(out, dir, "diagnostics.csv", t.str());
  rep.section("summary");
  rep.check(out, "P1_P4", all, all ? "every weight in the matrix" : first_bad);
  rep.check(out, "exponential_c2", c2_exact, "c2 = 2^p with P2 constant <= 1");

  rep.section("mittag_leffler");
  double worst = 0.0;
  for (int i = 0; i <= 3000; ++i) {
    const double x = 0.01 * i;
    worst = std::max(worst, std::abs(mittag_leffler(1.0, x) / std::exp(x) - 1.0));
  }
  rep.kv("max_relerr_E1_vs_exp", worst);
  rep.check(out, "ml_exponential", worst < 1e-10, "max relative error " + num(worst) + " < 1e-10 on [0, 30]");

  double route = 0.0;
  for (double T : {0.5, 1.0})
    for (double alpha : vp.alphas)
      for (double s : {1.0, 1.5}) {
        const auto f = maxwellian(cfg.grid, 1.0, std::vector<double>(cfg.grid.d, 0.0), T);
        if (alpha * std::pow(bracket_norm(cfg.grid.L * std::sqrt(cfg.grid.d)), s) > 600.0) continue;
        const double a = moment_ml(f, alpha, s, MLRoute::Direct);
        const double b = moment_ml(f, alpha, s, MLRoute::PartialSum, 80);
        route = std::max(route, std::abs(a / b - 1.0));
      }
  rep.kv("max_route_gap", route);
  rep.check(out, "ml_moment_routes", route < 1e-5, "direct vs partial sum " + num(route) + " < 1e-5");

  bool eq_ok = true;
  for (double alpha : vp.alphas)
    for (double s : {1.0, 1.5, 2.0}) {
      const auto e = ml_exp_equivalence(alpha, s, 12.0);
      rep.kv("equivalence_" + num(alpha) + "_" + num(s), num(e.c_low) + " " + num(e.c_high));
      eq_ok = eq_ok && e.c_low > 0.0 && std::isfinite(e.c_high) && e.c_high >= e.c_low;
    }
  rep.check(out, "ml_equivalence", eq_ok, "positive finite bounds");

  bool strict = true;
  for (double a0 : vp.alphas)
    for (double p : vp.exp_p) {
      const auto c = alpha_cascade(a0, std::pow(2.0, p), cfg.grid.d, cfg.kernel.nu, 0.9);
      strict = strict && c.strict;
    }
  rep.check(out, "alpha_cascade", strict, "alpha2 + c2 alpha3 < alpha1 for every alpha0 and p");
}

void run_validate_kernel(const RunConfig& cfg, const fs::path& dir, RunOutcome& out, Report& rep,
                         std::ostream* log) {
  const auto& p = cfg.kernel;
  rep.section("angular");
  std::vector<int> levels;
  for (int l = 1; l <= 24; ++l) levels.push_back(l);
  const auto conv = integrability_probe(p, 2.0, levels);
  const auto div = integrability_probe(p, p.nu > 0.25 ? p.nu - 0.25 : 0.5 * p.nu, levels);
  rep.kv("probe_beta2_last", conv.back());
  rep.kv("probe_beta2_gap", std::abs(conv.back() - conv[levels.size() - 2]));
  rep.kv("probe_below_nu_growth", div.back() / div.front());
  rep.check(out, "integrability", std::abs(conv.back() - conv[levels.size() - 2]) < 1e-6 && div.back() > 2 * div.front(),
            "sin^2 weight converges, sin^(nu - 1/4) weight grows");
  const auto tau = tau_relation(p);
  rep.kv("tau_plus", tau.tau_plus);
  rep.kv("tau_minus", tau.tau_minus);
  rep.kv("tau_sum", tau.sum);

  rep.section("kernel_equivalence");
  const auto f = cfg.initial_distribution();
  auto q = HyperplaneQuad::for_grid(cfg.grid, cfg.density);
  auto qr = q.refined();
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> U(-4.0, 4.0);
  Table t({"v0", "v1", "vp0", "vp1", "ratio", "ratio_refined"});
  double c1 = std::numeric_limits<double>::infinity(), c2 = 0.0, r1 = c1, r2 = 0.0;
  int n = 0;
  say(log, "sampling " + std::to_string(cfg.validation.kernel_pairs) + " pairs");
  const int d = cfg.grid.d;
  std::vector<double> v(d), vp(d);
  while (n < cfg.validation.kernel_pairs) {
    for (int i = 0; i < d; ++i) v[i] = U(rng);
    for (int i = 0; i < d; ++i) vp[i] = U(rng);
    double z2 = 0.0;
    for (int i = 0; i < d; ++i) z2 += (vp[i] - v[i]) * (vp[i] - v[i]);
    if (z2 < 1e-2) continue;
    const double a = kf_hyperplane(f, v, vp, p, q) / kf_equivalent(f, v, vp, p, q);
    const double b = kf_hyperplane(f, v, vp, p, qr) / kf_equivalent(f, v, vp, p, qr);
    t << v[0] << v[1] << vp[0] << vp[1] << a << b;
    c1 = std::min(c1, a);
    c2 = std::max(c2, a);
    r1 = std::min(r1, b);
    r2 = std::max(r2, b);
    ++n;
  }
  write_file(out, dir, "diagnostics.csv", t.str());
  rep.kv("c1", c1);
  rep.kv("c2", c2);
  rep.kv("c1_refined", r1);
  rep.kv("c2_refined", r2);
  rep.check(out, "kernel_equivalence_spread", c1 > 0.0 && c2 / c1 < 50.0, "c2/c1 = " + num(c2 / c1) + " < 50");
  const bool stable = std::abs(r1 / c1 - 1.0) <= 0.2 && std::abs(r2 / c2 - 1.0) <= 0.2;
  rep.check(out, "kernel_equivalence_refinement", stable,
            "c1 ratio " + num(r1 / c1) + ", c2 ratio " + num(r2 / c2) + " within 20%");
}

void run_carleman_check(const RunConfig& cfg, const fs::path& dir, RunOutcome& out, Report& rep,
                        std::ostream* log) {
  Table t({"check", "case", "lhs", "rhs", "relerr"});
  if (cfg.grid.d == 2) {
    rep.section("identity");
    const auto f = cfg.initial_distribution();
    TestFunction H = [](std::span<const double> v, std::span<const double> w) {
      double s = 0.0;
      for (std::size_t i = 0; i < v.size(); ++i) s += (w[i] - v[i]) * (w[i] - v[i]);
      return s * std::exp(-s);
    };
    const std::vector<double> v{0.0, 0.0};
    auto q = CarlemanQuad::for_grid(cfg.grid);
    say(log, "identity at production quadrature");
    const auto r0 = carleman_identity_check(f, H, v, cfg.kernel, q);
    say(log, "identity at refined quadrature");
    const auto r1 = carleman_identity_check(f, H, v, cfg.kernel, q.refined());
    t << "identity" << "production" << r0.lhs << r0.rhs << r0.relerr;
    t << "identity" << "refined" << r1.lhs << r1.rhs << r1.relerr;
    rep.kv("relerr", r0.relerr);
    rep.kv("relerr_refined", r1.relerr);
    rep.kv("extrapolation_gap", r0.extrapolation_gap);
    rep.check(out, "identity", r0.relerr < 2e-2, "relative error " + num(r0.relerr) + " < 0.02");
    rep.check(out, "identity_refinement", r1.relerr < r0.relerr,
              "refined " + num(r1.relerr) + " < " + num(r0.relerr));
  }

  rep.section("change_of_variables");
  const std::vector<std::pair<std::string, Field>> fns{
      {"gaussian", [](std::span<const double> y) { return std::exp(-sq(y)); }},
      {"annulus",
       [](std::span<const double> y) {
         const double s = sq(y);
         return (s >= 1.0 && s <= 4.0) ? 1.0 : 0.0;
       }},
      {"skewed", [](std::span<const double> y) { return std::exp(-std::sqrt(sq(y))) * (1.0 + y[0] * y[0]); }}};
  bool two_ok = true;
  std::vector<double> c3;
  for (const auto& [name, g] : fns) {
    const auto r2 = change_of_vars_check(g, 2, {});
    t << "change_of_vars_2d" << name << r2.lhs << r2.rhs_integral << r2.c_d;
    rep.kv("c2_" + name, r2.c_d);
    two_ok = two_ok && std::abs(r2.c_d - 2.0) <= 5e-3;
    const auto r3 = change_of_vars_check(g, 3, {});
    t << "change_of_vars_3d" << name << r3.lhs << r3.rhs_integral << r3.c_d;
    rep.kv("c3_" + name, r3.c_d);
    c3.push_back(r3.c_d);
  }
  write_file(out, dir, "diagnostics.csv", t.str());
  rep.check(out, "change_of_vars_2d", two_ok, "c2 = 2 +- 0.005 for every test function");
  double spread = 0.0;
  for (double c : c3) spread = std::max(spread, std::abs(c / c3.front() - 1.0));
  rep.check(out, "change_of_vars_3d", spread <= 1e-2, "relative spread " + num(spread) + " <= 0.01");
}

void run_cone_check(const RunConfig& cfg, const fs::path& dir, RunOutcome& out, Report& rep, std::ostream* log) {
  if (cfg.grid.d != 2) throw std::invalid_argument("cone-check supports d = 2");
  const auto f = cfg.initial_distribution();
  const auto ls = level_set_constants(f, stats_bounds_of(f));
  const double delta = default_cone_delta(ls, 2);
  const auto q = HyperplaneQuad::for_grid(cfg.grid, cfg.density);
  rep.section("level_set");
  rep.kv("r", ls.r);
  rep.kv("l", ls.l);
  rep.kv("m", ls.m);
  rep.kv("measured", ls.measured);
  rep.kv("delta", delta);

  Table t({"speed", "directions", "measure", "lambda", "max_abs_dot_v", "symmetric", "min_integral_ratio"});
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> width(0.3, 2.0), amp(0.2, 1.0);
  bool nonempty = true, sym = true, lam_ok = true;
  double dot_bound = 0.0, min_ratio = std::numeric_limits<double>::infinity();
  for (double speed : cfg.validation.cone_speeds) {
    say(log, "cone at |v| = " + num(speed));
    const std::vector<double> v{speed, 0.0};
    ConeSet cone;
    try {
      cone = cone_set(f, v, ls, delta, 128);
    } catch (const std::runtime_error&) {
      nonempty = false;
      t << speed << 0.0 << 0.0 << 0.0 << 0.0 << "no" << 0.0;
      continue;
    }
    const auto k = cone_kf_lower_bound_check(f, v, cone, cfg.kernel, q, 48);
    double local = std::numeric_limits<double>::infinity();
    for (int trial = 0; trial < 4; ++trial) {
      const double s = width(rng), m = amp(rng);
      Field g = [&](std::span<const double> x) {
        const double dx = x[0] - v[0], dy = x[1] - v[1];
        return m * std::exp(-(dx * dx + dy * dy) / (s * s));
      };
      const auto r = cone_integral_lower_bound_check(g, v, m, cone, cfg.kernel.nu, cfg.grid.h(), 12.0 * s);
      local = std::min(local, r.ratio);
    }
    min_ratio = std::min(min_ratio, local);
    sym = sym && cone.symmetric();
    lam_ok = lam_ok && k.lambda > 0.0 && cone.measure > 0.0;
    dot_bound = std::max(dot_bound, cone.max_abs_dot_v());
    t << speed << static_cast<double>(cone.directions.size()) << cone.measure << k.lambda << cone.max_abs_dot_v()
      << (cone.symmetric() ? "yes" : "no") << local;
  }
  write_file(out, dir, "diagnostics.csv", t.str());
  rep.section("cones");
  rep.kv("max_abs_dot_v", dot_bound);
  rep.kv("min_integral_ratio", min_ratio);
  rep.check(out, "cone_nonempty", nonempty, "A(v) nonempty at every speed");
  rep.check(out, "cone_symmetric", sym, "A(v) = -A(v)");
  rep.check(out, "cone_constants", lam_ok, "measure and lambda positive");
  rep.check(out, "cone_dot_bound", std::isfinite(dot_bound) && dot_bound < 2.0 * ls.r,
            "|sigma . v| <= " + num(dot_bound) + " < 2 r");
  rep.check(out, "cone_integral", min_ratio > 0.0 && std::isfinite(min_ratio),
            "min lower-bound ratio " + num(min_ratio) + " > 0");

  // indicator profile: the chain is an equality up to the closed-form constant
  ConeSet full;
  full.v = {0.0, 0.0};
  full.directions = sphere_nodes(2, 256);
  full.node_weight = 2.0 * std::numbers::pi / 256;
  full.measure = 2.0 * std::numbers::pi;
  const double nu = cfg.kernel.nu, m = 0.7;
  const std::vector<double> origin{0.0, 0.0};
  Field ind = [&](std::span<const double> x) { return sq(x) <= 1.0 ? m : 0.0; };
  const auto r = cone_integral_lower_bound_check(ind, origin, m, full, nu, 0.05, 2.0);
  const double closed = m * full.measure / nu;
  const double err = std::abs(r.lhs - closed) / closed;
  rep.kv("indicator_lhs", r.lhs);
  rep.kv("indicator_closed_form", closed);
  rep.check(out, "cone_equality_case", err < 1e-3, "relative error " + num(err) + " < 0.001");
}

}  // namespace

bool RunOutcome::pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

std::string RunOutcome::failure_list() const {
  std::string s;
  for (const auto& c : checks)
    if (!c.pass) s += "FAIL " + c.name + ": " + c.detail + "\n";
  return s;
}

RunOutcome run(const RunConfig& cfg, const std::string& out_dir, std::ostream* log) {
  cfg.validate();
  const fs::path dir(out_dir);
  fs::create_directories(dir);
  RunOutcome out;
  Report rep;
  rep.kv("command", cfg.command);
  rep.kv("seed", std::to_string(cfg.seed));
  rep.kv("grid", "d=" + std::to_string(cfg.grid.d) + " N=" + std::to_string(cfg.grid.N) + " L=" + num(cfg.grid.L));
  rep.kv("kernel", "gamma=" + num(cfg.kernel.gamma) + " nu=" + num(cfg.kernel.nu));
  write_file(out, dir, "config.cfg", serialize(cfg));

  std::vector<std::string> warnings;
  auto previous = set_warning_handler([&](const std::string& w) {
    warnings.push_back(w);
    say(log, "warning: " + w);
  });
  try {
    if (cfg.command == "simulate")
      run_simulation(cfg, dir, out, rep, log, false);
    else if (cfg.command == "envelope-report")
      run_simulation(cfg, dir, out, rep, log, true);
    else if (cfg.command == "validate-weights")
      run_validate_weights(cfg, dir, out, rep, log);
    else if (cfg.command == "validate-kernel")
      run_validate_kernel(cfg, dir, out, rep, log);
    else if (cfg.command == "carleman-check")
      run_carleman_check(cfg, dir, out, rep, log);
    else if (cfg.command == "cone-check")
      run_cone_check(cfg, dir, out, rep, log);
  } catch (const StepAborted& e) {
    rep.check(out, "integration", false, e.what());
  } catch (...) {
    set_warning_handler(previous);
    throw;
  }
  set_warning_handler(previous);
  if (!warnings.empty()) {
    rep.section("warnings");
    for (const auto& w : warnings) rep.text(w + "\n");
  }
  rep.section("result");
  rep.kv("status", out.pass() ? "pass" : "fail");
  write_file(out, dir, "report.txt", rep.str());
  return out;
}

}  // namespace boltz
