#pragma once

#include <vector>

namespace boltz {

struct CollisionParams {
  int d = 2;
  double gamma = 1.0;
  double nu = 0.5;
  double c_pos = 1.0;
  double c_neg = 1.0;

  // Throws std::invalid_argument naming the first violated bound.
  void validate() const;
};

// b~(cos theta) on the two half spheres. Returns +inf at cos theta == 1.
double angular_b(double cos_theta, const CollisionParams& params);

// Same kernel parameterized by sin theta and the sign of cos theta; avoids
// cancellation in 1 - cos^2 near grazing angles.
double angular_b_sin(double sin_theta, bool positive_cos, const CollisionParams& params);

// B(|u|, theta) = |u|^gamma b~(cos theta).
double collision_kernel(double speed, double cos_theta, const CollisionParams& params);

// Truncated integrals |S^{d-2}| * int_{theta_min}^{pi} b~ sin^beta sin^{d-2} dtheta
// with theta_min = pi * 2^{-level} for each requested level.
std::vector<double> integrability_probe(const CollisionParams& params, double beta,
                                        const std::vector<int>& levels);

struct TauPair {
  double tau_plus;
  double tau_minus;
  double sum;
};

TauPair tau_relation(const CollisionParams& params);

// |S^{k}|, surface measure of the unit k-sphere in R^{k+1}; |S^0| = 2.
double sphere_measure(int k);

// Volume of the unit ball in R^d.
double unit_ball_volume(int d);

}  // namespace boltz
