#include "boltz/weights.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "boltz/grid.hpp"

namespace boltz {

namespace {

constexpr double kLogOverflow = 709.0;

struct LogSum {
  double m = -std::numeric_limits<double>::infinity();
  double s = 0.0;

  void add(double log_term) {
    if (log_term <= m) {
      s += std::exp(log_term - m);
    } else {
      s = s * std::exp(m - log_term) + 1.0;
      m = log_term;
    }
  }
  double log() const { return m + std::log(s); }
};

// log sum_{q >= q0} c(q) x^{q - shift} / Gamma(a q + 1) with log c(q) = log_coeff(q).
template <class Coeff>
double log_series(double a, double x, int q0, int shift, Coeff log_coeff, const MLSeriesConfig& cfg) {
  const double lx = std::log(x);
  LogSum acc;
  double prev = -std::numeric_limits<double>::infinity();
  for (int q = q0; q < q0 + cfg.max_terms; ++q) {
    const double lt = log_coeff(q) + (q - shift) * lx - std::lgamma(a * q + 1.0);
    acc.add(lt);
    if (q > q0 && lt < prev) {
      const double log_ratio = lt - prev;
      // Term ratios decrease monotonically, so the tail is dominated by a geometric series.
      const double r = std::exp(log_ratio);
      if (r < 1.0) {
        const double log_tail = lt + std::log(r / (1.0 - r));
        if (log_tail - acc.log() < std::log(cfg.tail_tolerance)) return acc.log();
      }
    }
    prev = lt;
  }
  throw std::runtime_error("mittag_leffler: series did not converge within max_terms");
}

}  // namespace

void Weight::validate() const {
  if (family == WeightFamily::Constant) return;
  if (!(alpha > 0.0)) throw std::invalid_argument("weight alpha must be positive");
  if (!(p > 0.0 && p <= 2.0)) throw std::invalid_argument("weight order p must lie in (0, 2]");
}

std::string to_string(WeightFamily family) {
  switch (family) {
    case WeightFamily::Exponential: return "exponential";
    case WeightFamily::MittagLeffler: return "mittag-leffler";
    case WeightFamily::Constant: return "constant";
  }
  return "constant";
}

WeightFamily parse_weight_family(const std::string& name) {
  if (name == "exponential" || name == "exp") return WeightFamily::Exponential;
  if (name == "mittag-leffler" || name == "ml") return WeightFamily::MittagLeffler;
  if (name == "constant") return WeightFamily::Constant;
  throw std::invalid_argument("unknown weight family '" + name +
                              "' (expected exponential, mittag-leffler or constant)");
}

void MLSeriesConfig::validate() const {
  if (max_terms < 50) throw std::invalid_argument("MLSeriesConfig: max_terms must be >= 50");
  if (!(tail_tolerance > 0.0 && tail_tolerance < 1e-10))
    throw std::invalid_argument("MLSeriesConfig: tail_tolerance must lie in (0, 1e-10)");
  if (!(asymptotic_switch_x > 0.0))
    throw std::invalid_argument("MLSeriesConfig: asymptotic_switch_x must be positive");
}

double log_mittag_leffler(double a, double x, const MLSeriesConfig& cfg) {
  if (!(a > 0.0)) throw std::invalid_argument("mittag_leffler: a must be positive");
  if (!(x >= 0.0)) throw std::invalid_argument("mittag_leffler: x must be nonnegative");
  if (x == 0.0) return 0.0;
  if (x > cfg.asymptotic_switch_x && a >= 1.0) return std::pow(x, 1.0 / a) - std::log(a);
  return log_series(a, x, 0, 0, [](int) { return 0.0; }, cfg);
}

double mittag_leffler(double a, double x, const MLSeriesConfig& cfg) {
  return std::exp(log_mittag_leffler(a, x, cfg));
}

double mittag_leffler_dlog_over(double a, double x, const MLSeriesConfig& cfg) {
  if (!(x >= 0.0)) throw std::invalid_argument("mittag_leffler: x must be nonnegative");
  if (x == 0.0) return 1.0 / std::tgamma(a + 1.0);
  if (x > cfg.asymptotic_switch_x && a >= 1.0) {
    const double y = std::pow(x, 1.0 / a);
    return std::exp(std::log(y / x) - y);
  }
  const double log_d =
      log_series(a, x, 1, 1, [](int q) { return std::log(static_cast<double>(q)); }, cfg);
  return std::exp(log_d - 2.0 * log_mittag_leffler(a, x, cfg));
}

double bracket_norm(double norm) { return std::sqrt(1.0 + norm * norm); }

double bracket(std::span<const double> v) {
  double s = 1.0;
  for (double c : v) s += c * c;
  return std::sqrt(s);
}

double log_weight(const Weight& w, double speed) {
  const double b = bracket_norm(speed);
  switch (w.family) {
    case WeightFamily::Exponential: return w.alpha * std::pow(b, w.p);
    case WeightFamily::MittagLeffler:
      return log_mittag_leffler(2.0 / w.p, std::pow(w.alpha, 2.0 / w.p) * b * b);
    case WeightFamily::Constant: return 0.0;
  }
  return 0.0;
}

double weight_of_speed(const Weight& w, double speed) {
  const double lw = log_weight(w, speed);
  if (lw > kLogOverflow) throw std::overflow_error("weight_eval: weight overflows double range");
  return std::exp(lw);
}

double weight_eval(const Weight& w, std::span<const double> v) {
  double s = 0.0;
  for (double c : v) s += c * c;
  return weight_of_speed(w, std::sqrt(s));
}

std::vector<double> grad_inv_weight(const Weight& w, std::span<const double> v) {
  std::vector<double> g(v.size(), 0.0);
  const double b = bracket(v);
  double scale = 0.0;
  switch (w.family) {
    case WeightFamily::Exponential:
      scale = -w.alpha * w.p * std::pow(b, w.p - 2.0) * std::exp(-w.alpha * std::pow(b, w.p));
      break;
    case WeightFamily::MittagLeffler: {
      const double c = std::pow(w.alpha, 2.0 / w.p);
      scale = -2.0 * c * mittag_leffler_dlog_over(2.0 / w.p, c * b * b);
      break;
    }
    case WeightFamily::Constant: break;
  }
  for (std::size_t i = 0; i < v.size(); ++i) g[i] = scale * v[i];
  return g;
}

std::string WeightReport::to_text() const {
  std::ostringstream os;
  os.precision(6);
  os << "P1 " << (p1 ? "pass" : "FAIL") << "\n";
  os << "P2 " << (p2 ? "pass" : "FAIL") << " c2=" << c2 << " C=" << p2_constant << "\n";
  os << "P3 " << (p3 ? "pass" : "FAIL") << " C=" << p3_upper << " D=" << p3_lower << "\n";
  os << "P4 " << (p4 ? "pass" : "FAIL") << " C=" << p4_constant << "\n";
  os << "samples " << samples << "\n";
  if (!first_violation.empty()) os << "first_violation " << first_violation << "\n";
  return os.str();
}

WeightReport validate_P1_P4(const Weight& w, const std::vector<PartnerParams>& partners,
                            const Grid& sample_grid, const std::vector<double>& k_range) {
  w.validate();
  sample_grid.validate();
  if (sample_grid.L < 8.0)
    throw std::invalid_argument("validate_P1_P4: sample grid must cover a ball of radius 8");
  WeightReport rep;
  auto violate = [&](const std::string& what) {
    if (rep.first_violation.empty()) rep.first_violation = what;
  };

  // Distinct node speeds inside the ball of radius L, sorted.
  std::vector<double> speeds;
  const std::size_t n = sample_grid.size();
  speeds.reserve(n);
  std::vector<double> x(sample_grid.d);
  for (std::size_t i = 0; i < n; ++i) {
    sample_grid.coords(i, x);
    double s = 0.0;
    for (double c : x) s += c * c;
    s = std::sqrt(s);
    if (s <= sample_grid.L) speeds.push_back(s);
  }
  std::sort(speeds.begin(), speeds.end());
  speeds.erase(std::unique(speeds.begin(), speeds.end(),
                           [](double a, double b) { return b - a <= 1e-12 * (1.0 + b); }),
               speeds.end());
  rep.samples = static_cast<int>(speeds.size());
  const bool is_const = w.family == WeightFamily::Constant;

  // P1
  rep.p1 = true;
  double prev = -std::numeric_limits<double>::infinity();
  for (double s : speeds) {
    const double lw = log_weight(w, s);
    if (!std::isfinite(lw)) {
      rep.p1 = false;
      violate("P1 non-finite weight at |v|=" + std::to_string(s));
      break;
    }
    if (lw < prev) {
      rep.p1 = false;
      violate("P1 radial decrease at |v|=" + std::to_string(s));
      break;
    }
    prev = lw;
  }
  if (!is_const) {
    std::vector<double> alphas{w.alpha * 1.1};
    for (const auto& pp : partners)
      if (pp.alpha > w.alpha) alphas.push_back(pp.alpha);
    for (double a2 : alphas) {
      const Weight hi = w.with_alpha(a2);
      for (double s : speeds) {
        if (log_weight(hi, s) < log_weight(w, s)) {
          rep.p1 = false;
          violate("P1 alpha monotonicity fails at |v|=" + std::to_string(s));
          break;
        }
      }
    }
  }

  // P2
  rep.c2 = is_const ? 0.0 : std::pow(2.0, w.p);
  rep.p2_constant = is_const ? 1.0 : 0.0;
  rep.p2 = true;
  if (!is_const) {
    for (const auto& pp : partners) {
      const Weight partner = w.with_alpha(pp.alpha);
      const Weight merged = w.with_alpha(w.alpha + rep.c2 * pp.alpha);
      for (double s : speeds) {
        const double lr = log_weight(w, s) + log_weight(partner, 2.0 * s) - log_weight(merged, s);
        rep.p2_constant = std::max(rep.p2_constant, std::exp(lr));
      }
    }
    if (!std::isfinite(rep.p2_constant)) {
      rep.p2 = false;
      violate("P2 constant is not finite");
    }
    if (w.family == WeightFamily::Exponential && rep.p2_constant > 1.0 + 1e-12) {
      rep.p2 = false;
      violate("P2 exponential witness exceeds 1");
    }
  }

  // P3
  rep.p3 = true;
  rep.p3_upper = 0.0;
  rep.p3_lower = std::numeric_limits<double>::infinity();
  bool any_upper = false, any_lower = false;
  for (const auto& pp : partners) {
    const Weight partner = w.with_alpha(pp.alpha);
    for (double delta : {0.0, 0.5, 1.0}) {
      const double lhs = delta * w.alpha;
      if (lhs == pp.alpha) continue;
      for (double k : k_range) {
        for (double s : speeds) {
          const double lr = delta * log_weight(w, s) - log_weight(partner, s);
          const double lb = k * std::log(bracket_norm(s));
          if (lhs < pp.alpha) {
            rep.p3_upper = std::max(rep.p3_upper, std::exp(lr + lb));
            any_upper = true;
          } else {
            rep.p3_lower = std::min(rep.p3_lower, std::exp(lr - lb));
            any_lower = true;
          }
        }
      }
    }
  }
  if (any_upper && !std::isfinite(rep.p3_upper)) {
    rep.p3 = false;
    violate("P3 upper constant is not finite");
  }
  if (any_lower && !(rep.p3_lower > 0.0)) {
    rep.p3 = false;
    violate("P3 lower constant is not positive");
  }
  if (!any_lower) rep.p3_lower = 0.0;

  // P4
  rep.p4 = true;
  rep.p4_constant = 0.0;
  std::vector<double> v(sample_grid.d, 0.0);
  for (double s : speeds) {
    v[0] = s;
    const auto g = grad_inv_weight(w, v);
    double mag = 0.0;
    for (double c : g) mag += c * c;
    rep.p4_constant = std::max(rep.p4_constant, std::sqrt(mag) / bracket_norm(s));
  }
  if (!std::isfinite(rep.p4_constant)) {
    rep.p4 = false;
    violate("P4 constant is not finite");
  }
  return rep;
}

EquivalenceBounds ml_exp_equivalence(double alpha, double s, double x_max, int samples) {
  if (!(alpha > 0.0)) throw std::invalid_argument("ml_exp_equivalence: alpha must be positive");
  if (!(s > 0.0 && s <= 2.0)) throw std::invalid_argument("ml_exp_equivalence: s must lie in (0, 2]");
  if (!(x_max >= 10.0)) throw std::invalid_argument("ml_exp_equivalence: x_max must be >= 10");
  if (samples < 2) throw std::invalid_argument("ml_exp_equivalence: need at least 2 samples");
  const double a = 2.0 / s;
  const double c = std::pow(alpha, a);
  EquivalenceBounds out{std::numeric_limits<double>::infinity(), 0.0, 0.0};
  for (int i = 0; i < samples; ++i) {
    const double x = x_max * i / (samples - 1);
    const double lr = log_mittag_leffler(a, c * x * x) - alpha * std::pow(x, s);
    const double r = std::exp(lr);
    out.c_low = std::min(out.c_low, r);
    if (r > out.c_high) {
      out.c_high = r;
      out.x_at_high = x;
    }
  }
  return out;
}

AlphaCascade alpha_cascade(double alpha0, double c2, int d, double nu, double safety) {
  if (!(alpha0 > 0.0)) throw std::invalid_argument("alpha_cascade: alpha0 must be positive");
  if (!(c2 > 0.0)) throw std::invalid_argument("alpha_cascade: c2 must be positive");
  if (!(safety > 0.0 && safety <= 1.0))
    throw std::invalid_argument("alpha_cascade: safety must lie in (0, 1]");
  if (!(nu > 0.0 && nu <= 1.0)) throw std::invalid_argument("alpha_cascade: nu must lie in (0, 1]");
  if (d < 1) throw std::invalid_argument("alpha_cascade: d must be positive");
  AlphaCascade out{};
  out.alpha1 = 0.5 * alpha0;
  out.alpha2 = safety * out.alpha1 / (1.0 + 2.0 * c2 * d / nu);
  out.alpha3 = 2.0 * out.alpha2 * d / nu;
  const double lhs = out.alpha2 + c2 * out.alpha3;
  if (lhs > out.alpha1 * (1.0 + 1e-12))
    throw std::logic_error("alpha_cascade: alpha2 + c2 alpha3 exceeds alpha1");
  if (!(out.alpha3 * nu / d > out.alpha2))
    throw std::logic_error("alpha_cascade: alpha3 nu / d must exceed alpha2");
  out.strict = safety < 1.0 && lhs < out.alpha1;
  return out;
}

}  // namespace boltz
