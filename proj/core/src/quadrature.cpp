#include "boltz/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace boltz {

GaussRule gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be positive");
  static std::mutex mu;
  static std::map<int, GaussRule> cache;
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
  }
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  std::lock_guard<std::mutex> lock(mu);
  cache.emplace(n, rule);
  return rule;
}

double integrate_gl(const std::function<double(double)>& fn, double a, double b,
                    int panels, int order) {
  const GaussRule rule = gauss_legendre(order);
  const double width = (b - a) / panels;
  double total = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double lo = a + p * width;
    const double mid = lo + 0.5 * width;
    double s = 0.0;
    for (int k = 0; k < order; ++k) s += rule.weights[k] * fn(mid + 0.5 * width * rule.nodes[k]);
    total += 0.5 * width * s;
  }
  return total;
}

double integrate_graded(const std::function<double(double)>& fn, double a, double b,
                        int levels, double ratio, int order) {
  // Panels [a + (b-a) r^{k+1}, a + (b-a) r^k]; the innermost sliver is dropped.
  double total = 0.0;
  double hi = b;
  for (int k = 0; k < levels; ++k) {
    double lo = a + (b - a) * std::pow(ratio, k + 1);
    total += integrate_gl(fn, lo, hi, 1, order);
    hi = lo;
  }
  return total;
}

}  // namespace boltz
