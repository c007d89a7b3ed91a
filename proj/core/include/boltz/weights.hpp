#pragma once

#include <span>
#include <string>
#include <vector>

namespace boltz {

struct Grid;

enum class WeightFamily { Exponential, MittagLeffler, Constant };

struct Weight {
  WeightFamily family = WeightFamily::Constant;
  double alpha = 0.0;
  double p = 1.0;

  static Weight exponential(double alpha, double p) { return {WeightFamily::Exponential, alpha, p}; }
  static Weight mittag_leffler(double alpha, double p) { return {WeightFamily::MittagLeffler, alpha, p}; }
  static Weight constant() { return {WeightFamily::Constant, 0.0, 1.0}; }

  void validate() const;
  Weight with_alpha(double a) const { return {family, a, p}; }
};

std::string to_string(WeightFamily family);
WeightFamily parse_weight_family(const std::string& name);

struct MLSeriesConfig {
  int max_terms = 4000;
  double tail_tolerance = 1e-15;
  double asymptotic_switch_x = 2500.0;

  void validate() const;
};

// E_a(x) = sum x^q / Gamma(a q + 1) for x >= 0.
double mittag_leffler(double a, double x, const MLSeriesConfig& cfg = {});

// log E_a(x). Beyond cfg.asymptotic_switch_x uses x^{1/a} - log a, whose relative
// error is bounded by the neglected algebraic tail x^{-1}/|Gamma(1-a)| * a e^{-x^{1/a}}
// plus, for a > 2, the subdominant exponentials of relative size e^{-x^{1/a}(1-cos(2 pi/a))}.
double log_mittag_leffler(double a, double x, const MLSeriesConfig& cfg = {});

// d/dx E_a(x) divided by E_a(x)^2, evaluated stably in log space.
double mittag_leffler_dlog_over(double a, double x, const MLSeriesConfig& cfg = {});

// <v> = (1 + |v|^2)^{1/2}
double bracket(std::span<const double> v);
double bracket_norm(double norm);

double log_weight(const Weight& w, double speed);
double weight_eval(const Weight& w, std::span<const double> v);
double weight_of_speed(const Weight& w, double speed);

// Gradient of 1/w at v.
std::vector<double> grad_inv_weight(const Weight& w, std::span<const double> v);

struct PartnerParams {
  double alpha;
  double p;
};

struct WeightReport {
  bool p1 = false;
  bool p2 = false;
  bool p3 = false;
  bool p4 = false;
  double c2 = 0.0;           // P2 exponent constant used
  double p2_constant = 0.0;  // max of w(v;a) w(2v;a') / w(v; a + c2 a')
  double p3_upper = 0.0;     // max over P3a cases of ratio * <v>^k
  double p3_lower = 0.0;     // min over P3b cases of ratio / <v>^k
  double p4_constant = 0.0;  // max |grad(1/w)| / <v>
  int samples = 0;
  std::string first_violation;

  bool pass() const { return p1 && p2 && p3 && p4; }
  std::string to_text() const;
};

WeightReport validate_P1_P4(const Weight& w, const std::vector<PartnerParams>& partners,
                            const Grid& sample_grid, const std::vector<double>& k_range);

struct EquivalenceBounds {
  double c_low;
  double c_high;
  double x_at_high;
};

// min/max over x in [0, x_max] of E_{2/s}(alpha^{2/s} x^2) / e^{alpha x^s}.
EquivalenceBounds ml_exp_equivalence(double alpha, double s, double x_max, int samples = 10000);

struct AlphaCascade {
  double alpha1;
  double alpha2;
  double alpha3;
  bool strict;  // alpha2 + c2 alpha3 < alpha1 strictly
};

AlphaCascade alpha_cascade(double alpha0, double c2, int d, double nu, double safety);

}  // namespace boltz
