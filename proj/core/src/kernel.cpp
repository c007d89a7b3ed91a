#include "boltz/kernel.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "boltz/quadrature.hpp"

namespace boltz {

void CollisionParams::validate() const {
  if (d != 2 && d != 3) throw std::invalid_argument("dimension d must be 2 or 3");
  if (!(gamma > 0.0 && gamma <= 1.0))
    throw std::invalid_argument("gamma must satisfy 0 < gamma <= 1");
  if (!(nu > 0.0 && nu <= 1.0)) {
    std::ostringstream os;
    os << "nu = " << nu << " violates the bound 0 < nu <= 1";
    throw std::invalid_argument(os.str());
  }
  if (!(c_pos > 0.0) || !(c_neg > 0.0))
    throw std::invalid_argument("kernel constants c_pos, c_neg must be positive");
}

double angular_b_sin(double sin_theta, bool positive_cos, const CollisionParams& params) {
  const double s = std::abs(sin_theta);
  if (positive_cos) {
    if (s == 0.0) return std::numeric_limits<double>::infinity();
    return params.c_pos * std::pow(s, -(params.d - 1) - params.nu);
  }
  return params.c_neg * std::pow(s, 1.0 + params.gamma + params.nu);
}

double angular_b(double cos_theta, const CollisionParams& params) {
  if (!(std::abs(cos_theta) <= 1.0))
    throw std::invalid_argument("angular_b: |cos theta| must not exceed 1");
  if (cos_theta == 1.0) return std::numeric_limits<double>::infinity();
  const double s = std::sqrt((1.0 - cos_theta) * (1.0 + cos_theta));
  return angular_b_sin(s, cos_theta > 0.0, params);
}

double collision_kernel(double speed, double cos_theta, const CollisionParams& params) {
  return std::pow(std::abs(speed), params.gamma) * angular_b(cos_theta, params);
}

double sphere_measure(int k) {
  // 2 pi^{(k+1)/2} / Gamma((k+1)/2)
  return 2.0 * std::pow(std::numbers::pi, 0.5 * (k + 1)) / std::tgamma(0.5 * (k + 1));
}

double unit_ball_volume(int d) {
  return std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d + 1.0);
}

std::vector<double> integrability_probe(const CollisionParams& params, double beta,
                                        const std::vector<int>& levels) {
  params.validate();
  if (!(beta > 0.0)) throw std::invalid_argument("integrability_probe: beta must be positive");
  const double pi = std::numbers::pi;
  const double surface = sphere_measure(params.d - 2);
  auto integrand = [&](double theta) {
    const double s = std::sin(theta);
    return angular_b_sin(s, theta < 0.5 * pi, params) * std::pow(s, beta + params.d - 2);
  };
  // Upper half is smooth; the lower half is integrated in log(theta).
  const double upper = integrate_gl(integrand, 0.5 * pi, pi, 8, 16);
  std::vector<double> out;
  out.reserve(levels.size());
  for (int level : levels) {
    if (level < 1) throw std::invalid_argument("integrability_probe: levels start at 1");
    const double theta_min = pi * std::ldexp(1.0, -level);
    const double lo = std::log(theta_min);
    const double hi = std::log(0.5 * pi);
    double lower = 0.0;
    if (hi > lo) {
      auto in_log = [&](double s) {
        const double t = std::exp(s);
        return integrand(t) * t;
      };
      lower = integrate_gl(in_log, lo, hi, 4 * level, 16);
    }
    out.push_back(surface * (lower + upper));
  }
  return out;
}

TauPair tau_relation(const CollisionParams& params) {
  params.validate();
  TauPair t;
  t.tau_plus = -params.d + 1.0 - params.nu;
  t.tau_minus = 1.0 + params.gamma + params.nu;
  t.sum = t.tau_plus + t.tau_minus;
  const double expected = -params.d + 2.0 + params.gamma;
  if (std::abs(t.sum - expected) > 1e-12)
    throw std::logic_error("tau_relation: exponent sum identity violated");
  return t;
}

}  // namespace boltz
