#include "boltz/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>

namespace boltz {

namespace {

std::vector<double> solve_small(std::vector<std::vector<double>> a, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(a[i][k]) > std::abs(a[piv][k])) piv = i;
    if (a[piv][k] == 0.0) throw std::runtime_error("conservative projection: singular moment matrix");
    std::swap(a[k], a[piv]);
    std::swap(b[k], b[piv]);
    for (std::size_t i = k + 1; i < n; ++i) {
      const double m = a[i][k] / a[k][k];
      for (std::size_t j = k; j < n; ++j) a[i][j] -= m * a[k][j];
      b[i] -= m * b[k];
    }
  }
  std::vector<double> x(n);
  for (std::size_t k = n; k-- > 0;) {
    double s = b[k];
    for (std::size_t j = k + 1; j < n; ++j) s -= a[k][j] * x[j];
    x[k] = s / a[k][k];
  }
  return x;
}

// psi_0 = 1, psi_{1..d} = v, psi_{d+1} = |v|^2
void invariant_basis(const Grid& g, std::size_t n, std::vector<double>& psi, std::vector<double>& c) {
  g.coords(n, c);
  psi[0] = 1.0;
  double s = 0.0;
  for (int i = 0; i < g.d; ++i) {
    psi[i + 1] = c[i];
    s += c[i] * c[i];
  }
  psi[g.d + 1] = s;
}

Distribution axpy(const Distribution& f, double a, const std::vector<double>& k) {
  Distribution out = f;
  for (std::size_t i = 0; i < k.size(); ++i) out.values[i] += a * k[i];
  return out;
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

std::string to_string(Method method) { return method == Method::Euler ? "euler" : "rk4"; }

Method parse_method(const std::string& name) {
  if (name == "euler") return Method::Euler;
  if (name == "rk4") return Method::RK4;
  throw std::invalid_argument("unknown method '" + name + "' (expected euler or rk4)");
}

void SimConfig::validate() const {
  if (!(dt > 0.0)) throw std::invalid_argument("SimConfig: dt must be positive");
  if (!(T_final >= 0.0)) throw std::invalid_argument("SimConfig: T_final must be nonnegative");
  if (record_every < 1) throw std::invalid_argument("SimConfig: record_every must be at least 1");
  if (!(moment_alpha > 0.0)) throw std::invalid_argument("SimConfig: moment_alpha must be positive");
  if (!(clip_threshold > 0.0)) throw std::invalid_argument("SimConfig: clip_threshold must be positive");
  if (!(stability_limit > 0.0)) throw std::invalid_argument("SimConfig: stability_limit must be positive");
  if (!envelope.fit && (envelope.a < 0.0 || envelope.b < 0.0))
    throw std::invalid_argument("SimConfig: envelope constants must be nonnegative");
  for (const auto& w : weights_tracked) w.validate();
}

void DiagnosticSeries::validate() const {
  for (std::size_t i = 1; i < times.size(); ++i)
    if (!(times[i] > times[i - 1])) throw std::runtime_error("DiagnosticSeries: times not strictly increasing");
  auto finite = [](const std::vector<double>& v, const char* name) {
    for (double x : v)
      if (!std::isfinite(x)) throw std::runtime_error(std::string("DiagnosticSeries: non-finite ") + name);
  };
  finite(times, "time");
  finite(mass, "mass");
  finite(energy, "energy");
  finite(entropy, "entropy");
  finite(exp_moment_gamma, "exponential moment");
  for (const auto& c : momentum) finite(c, "momentum");
  for (const auto& c : m_w) finite(c, "weighted sup");
  for (const auto& c : l1_w) finite(c, "weighted L1 norm");
  for (const auto& c : q11_w) finite(c, "q11");
}

void write_csv(std::ostream& os, const DiagnosticSeries& s) {
  os << "t,mass";
  for (std::size_t i = 0; i < s.momentum.size(); ++i) os << ",momentum_" << i;
  os << ",energy,entropy,exp_moment";
  for (std::size_t i = 0; i < s.m_w.size(); ++i) os << ",m_w" << i;
  for (std::size_t i = 0; i < s.l1_w.size(); ++i) os << ",l1_w" << i;
  for (std::size_t i = 0; i < s.q11_w.size(); ++i) os << ",q11_w" << i;
  os << ",clipped\n";
  char buf[32];
  auto put = [&](double x) {
    std::snprintf(buf, sizeof buf, "%.12g", x);
    os << buf;
  };
  for (std::size_t r = 0; r < s.size(); ++r) {
    put(s.times[r]);
    os << ',';
    put(s.mass[r]);
    for (const auto& c : s.momentum) os << ',', put(c[r]);
    os << ',';
    put(s.energy[r]);
    os << ',';
    put(s.entropy[r]);
    os << ',';
    put(s.exp_moment_gamma[r]);
    for (const auto& c : s.m_w) os << ',', put(c[r]);
    for (const auto& c : s.l1_w) os << ',', put(c[r]);
    for (const auto& c : s.q11_w) os << ',', put(c[r]);
    os << ',';
    put(s.clipped[r]);
    os << '\n';
  }
}

void write_csv(const std::string& path, const DiagnosticSeries& series) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  write_csv(os, series);
}

Stepper::Stepper(const Grid& grid, const CollisionParams& params, const SplitConfig& cfg, const CollisionQuad& quad,
                 bool conservative, double clip_threshold)
    : op_(grid, params, cfg, quad), conservative_(conservative), clip_threshold_(clip_threshold),
      qw_(grid.quad_weights()) {}

std::vector<double> Stepper::rhs(const Distribution& f) const {
  auto q = op_.apply(f);
  if (!conservative_) return q;
  const Grid& g = f.grid;
  const std::size_t k = g.d + 2;
  std::vector<std::vector<double>> a(k, std::vector<double>(k, 0.0));
  std::vector<double> b(k, 0.0), psi(k), c(g.d);
  for (std::size_t n = 0; n < g.size(); ++n) {
    invariant_basis(g, n, psi, c);
    const double fw = qw_[n] * std::max(f.values[n], 0.0);
    for (std::size_t i = 0; i < k; ++i) {
      b[i] += qw_[n] * psi[i] * q[n];
      for (std::size_t j = 0; j < k; ++j) a[i][j] += fw * psi[i] * psi[j];
    }
  }
  const auto coef = solve_small(std::move(a), std::move(b));
  for (std::size_t n = 0; n < g.size(); ++n) {
    invariant_basis(g, n, psi, c);
    double s = 0.0;
    for (std::size_t i = 0; i < k; ++i) s += coef[i] * psi[i];
    q[n] -= std::max(f.values[n], 0.0) * s;
  }
  return q;
}

Distribution Stepper::step(const Distribution& f, double dt, Method method, StepStats* stats) const {
  if (!(dt >= 0.0)) throw std::invalid_argument("step: dt must be nonnegative");
  if (f.grid != op_.grid()) throw std::invalid_argument("step: distribution grid differs from the operator grid");
  if (dt == 0.0) {
    if (stats) *stats = {};
    return f;
  }
  Distribution out;
  if (method == Method::Euler) {
    out = axpy(f, dt, rhs(f));
  } else {
    const auto k1 = rhs(f);
    const auto k2 = rhs(axpy(f, 0.5 * dt, k1));
    const auto k3 = rhs(axpy(f, 0.5 * dt, k2));
    const auto k4 = rhs(axpy(f, dt, k3));
    out = f;
    for (std::size_t i = 0; i < out.values.size(); ++i)
      out.values[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  }
  double clipped = 0.0, total = 0.0;
  for (std::size_t i = 0; i < out.values.size(); ++i) {
    if (out.values[i] < 0.0) {
      clipped -= qw_[i] * out.values[i];
      out.values[i] = 0.0;
    }
    total += qw_[i] * out.values[i];
  }
  if (clipped > clip_threshold_ * total) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "step: clipped mass %.3e exceeds %.1e of the total; reduce dt", clipped / total,
                  clip_threshold_);
    throw StepAborted(buf, 0.0);
  }
  if (stats) stats->clipped_mass = clipped;
  return out;
}

double Stepper::stability_number(const Distribution& f, double dt) const {
  return dt * max_abs(rhs(f)) / f.max_value();
}

Distribution step(const Distribution& f, double dt, Method method, const SplitConfig& cfg,
                  const CollisionParams& params, const CollisionQuad& quad) {
  return Stepper(f.grid, params, cfg, quad).step(f, dt, method);
}

std::vector<double> collision_invariants(const Grid& g, const std::vector<double>& q) {
  const auto w = g.quad_weights();
  const std::size_t k = g.d + 2;
  std::vector<double> out(k, 0.0), psi(k), c(g.d);
  for (std::size_t n = 0; n < g.size(); ++n) {
    invariant_basis(g, n, psi, c);
    for (std::size_t i = 0; i < k; ++i) out[i] += w[n] * psi[i] * q[n];
  }
  return out;
}

DiagnosticSeries simulate(const Distribution& f0, const SimConfig& sim, const SplitConfig& cfg,
                          const CollisionParams& params, const CollisionQuad& quad, const ProgressFn& progress) {
  sim.validate();
  f0.validate();
  for (double x : f0.values)
    if (x < 0.0) throw std::invalid_argument("simulate: f0 must be nonnegative");
  if (!std::isfinite(entropy(f0))) throw std::invalid_argument("simulate: f0 must have finite entropy");
  const Grid& g = f0.grid;
  Stepper stepper(g, params, cfg, quad, sim.conservative, sim.clip_threshold);
  const double stab = stepper.stability_number(f0, sim.dt);
  if (stab > sim.stability_limit) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "simulate: dt max|Q| / max f = %.3g exceeds the stability limit %.3g", stab,
                  sim.stability_limit);
    throw std::invalid_argument(buf);
  }

  DiagnosticSeries s;
  s.d = g.d;
  s.moment_alpha = sim.moment_alpha;
  s.gamma = params.gamma;
  s.momentum.resize(g.d);
  const std::size_t nw = sim.weights_tracked.size();
  s.m_w.resize(nw);
  s.l1_w.resize(nw);
  if (sim.track_q11) s.q11_w.resize(nw);
  double clipped_since = 0.0;

  auto record = [&](double t, const Distribution& f) {
    s.times.push_back(t);
    s.mass.push_back(mass(f));
    const auto p = momentum(f);
    for (int i = 0; i < g.d; ++i) s.momentum[i].push_back(p[i]);
    s.energy.push_back(energy(f));
    s.entropy.push_back(entropy(f));
    const double rate = sim.moment_alpha * std::min(t, 1.0);
    s.exp_moment_gamma.push_back(rate > 0.0 ? moment_exp(f, rate, params.gamma) : s.mass.back());
    for (std::size_t w = 0; w < nw; ++w) {
      const auto& weight = sim.weights_tracked[w];
      const auto sup = weighted_sup(f, weight);
      s.m_w[w].push_back(sup.m);
      s.l1_w[w].push_back(weighted_l1(f, weight));
      if (sim.track_q11) {
        SplitConfig c = cfg;
        c.weight = weight;
        s.q11_w[w].push_back(q11(f, sup.v_star, c, params, quad));
      }
    }
    s.clipped.push_back(clipped_since);
    clipped_since = 0.0;
    if (progress) progress(t, f);
  };

  const long steps = std::lround(sim.T_final / sim.dt);
  Distribution f = f0;
  record(0.0, f);
  for (long n = 1; n <= steps; ++n) {
    StepStats st;
    try {
      f = stepper.step(f, sim.dt, sim.method, &st);
    } catch (const StepAborted& e) {
      const double t = (n - 1) * sim.dt;
      char buf[64];
      std::snprintf(buf, sizeof buf, " (at t = %.6g)", t);
      throw StepAborted(e.what() + std::string(buf), t);
    }
    clipped_since += st.clipped_mass;
    if (n % sim.record_every == 0 || n == steps) record(n * sim.dt, f);
  }
  s.validate();
  return s;
}

EnvelopeReport envelope_check(const DiagnosticSeries& series, std::size_t weight, double a, double b, int d,
                              double nu, std::size_t first) {
  if (series.size() == 0) throw std::invalid_argument("envelope_check: empty series");
  if (weight >= series.m_w.size()) throw std::invalid_argument("envelope_check: weight index out of range");
  EnvelopeReport r;
  for (std::size_t i = first; i < series.size(); ++i) {
    const double t = series.times[i];
    if (!(t > 0.0)) continue;
    const double slack = a + b * std::pow(t, -d / nu) - series.m_w[weight][i];
    ++r.checked;
    r.min_slack = std::min(r.min_slack, slack);
    if (!(slack > 0.0) && r.pass) {
      r.pass = false;
      r.first_violation = t;
    }
  }
  return r;
}

EnvelopeFit fit_envelope(const DiagnosticSeries& series, std::size_t weight, int d, double nu, std::size_t count) {
  if (weight >= series.m_w.size()) throw std::invalid_argument("fit_envelope: weight index out of range");
  const std::size_t n = count == 0 ? series.size() : std::min(count, series.size());
  if (n < 8) throw std::invalid_argument("fit_envelope: at least 8 recorded times are required");
  const auto& m = series.m_w[weight];
  const std::size_t q = n - n / 4;
  double plateau = 0.0;
  for (std::size_t i = q; i < n; ++i) plateau += m[i];
  plateau /= static_cast<double>(n - q);
  EnvelopeFit fit{1.1 * plateau, 0.0};
  double bmax = 0.0;
  for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
    const double t = series.times[i];
    if (!(t > 0.0)) continue;
    bmax = std::max(bmax, (m[i] - fit.a) * std::pow(t, d / nu));
  }
  fit.b = 1.1 * bmax;
  return fit;
}

MomentReport moment_generation_check(const DiagnosticSeries& series, double alpha, double gamma) {
  if (series.size() == 0) throw std::invalid_argument("moment_generation_check: empty series");
  if (std::abs(alpha - series.moment_alpha) > 1e-15 || std::abs(gamma - series.gamma) > 1e-15)
    throw std::invalid_argument("moment_generation_check: series was recorded with a different alpha or gamma");
  MomentReport r{0.0, series.exp_moment_gamma.front(), 0.0, true};
  for (double x : series.exp_moment_gamma) {
    if (!std::isfinite(x)) r.bounded = false;
    r.C = std::max(r.C, x);
  }
  r.ratio = r.C / r.initial;
  return r;
}

double linf_l1_constant(const DiagnosticSeries& series, std::size_t sup_weight, std::size_t l1_weight) {
  if (sup_weight >= series.m_w.size() || l1_weight >= series.l1_w.size())
    throw std::invalid_argument("linf_l1_constant: weight index out of range");
  double c = 0.0;
  for (std::size_t i = 0; i < series.size(); ++i)
    c = std::max(c, series.m_w[sup_weight][i] / series.l1_w[l1_weight][i]);
  return c;
}

}  // namespace boltz
