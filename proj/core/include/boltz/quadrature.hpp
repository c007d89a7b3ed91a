#pragma once

#include <functional>
#include <vector>

namespace boltz {

struct GaussRule {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;
};

// Gauss-Legendre rule with n nodes (Newton iteration on P_n).
GaussRule gauss_legendre(int n);

// Composite Gauss-Legendre over [a, b] with `panels` equal panels.
double integrate_gl(const std::function<double(double)>& fn, double a, double b,
                    int panels, int order = 16);

// Composite Gauss-Legendre with panels graded geometrically toward a.
// Suited to integrable power singularities at the left endpoint.
double integrate_graded(const std::function<double(double)>& fn, double a, double b,
                        int levels, double ratio = 0.5, int order = 16);

}  // namespace boltz
