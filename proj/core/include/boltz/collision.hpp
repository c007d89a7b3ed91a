#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "boltz/carleman.hpp"
#include "boltz/grid.hpp"
#include "boltz/kernel.hpp"
#include "boltz/weights.hpp"

namespace boltz {

enum class Q2Mode { Direct, Convolution };

std::string to_string(Q2Mode mode);
Q2Mode parse_q2_mode(const std::string& name);

struct SplitConfig {
  Weight weight = Weight::constant();
  double exclusion_radius = 0.0;  // 0 selects h
  double unit_ball_radius = 1.0;
  Q2Mode q2_mode = Q2Mode::Convolution;

  double exclusion(const Grid& g) const;
  void validate(const Grid& g) const;
};

// Angular quadrature for the direct form of Q2.
struct Q2Quad {
  int n_angle = 64;         // azimuthal nodes (d = 2) or polar nodes on the sphere (d = 3)
  int n_theta = 10;         // Gauss panels per unit of log(theta)
  int n_ray = 48;           // radial panels along each ray
  double theta_min = 1e-2;

  Q2Quad refined() const { return {2 * n_angle, 2 * n_theta, 2 * n_ray, 0.5 * theta_min}; }
};

struct CollisionQuad {
  HyperplaneQuad hyper;
  double transition = 8.0;  // width of the smooth lattice cutoff beyond 2 L sqrt(d)
  Q2Quad q2;

  static CollisionQuad for_grid(const Grid& g, double density = 1.0);
  void validate() const;
};

// Smooth cutoff: 1 below r1, 0 beyond r1 + width, C-infinity in between.
double lattice_cutoff(double rho, double r1, double width);

// Far-field potential Phi(s) such that int (1 - chi(|z|)) K_f(v, v + z) dz = int f(v + y) Phi(|y|) dy.
double far_field_potential(double s, const CollisionParams& params, double r1, double width);

// int int (F(v'_*) - F(v_*)) B dsigma dv_* for a field F vanishing beyond `support` from v.
struct Q2Direct {
  double value;
  double cutoff_value;
  double extrapolation_gap;
};
Q2Direct q2_direct_field(const Field& F, std::span<const double> v, double support, const CollisionParams& params,
                         const Q2Quad& quad);

// |S^{d-2}| int_0^pi b~ sin^{d-2} theta (cos^{-d-gamma}(theta/2) - 1) dtheta by direct quadrature calibration.
// Cached per kernel parameters.
double calibrated_cb(const CollisionParams& params);

double q11(const Distribution& f, std::span<const double> v, const SplitConfig& cfg, const CollisionParams& params,
           const CollisionQuad& quad);

struct Q12Parts {
  double inside;
  double outside;
  double total() const { return inside + outside; }
};
Q12Parts q12(const Distribution& f, std::span<const double> v, const SplitConfig& cfg, const CollisionParams& params,
             const CollisionQuad& quad);

double q2(const Distribution& f, std::span<const double> v, const SplitConfig& cfg, const CollisionParams& params,
          const CollisionQuad& quad);

// Unweighted int (f' - f) K_f over the lattice plus the far field.
double q1(const Distribution& f, std::span<const double> v, const SplitConfig& cfg, const CollisionParams& params,
          const CollisionQuad& quad);

double q_total(const Distribution& f, std::span<const double> v, const SplitConfig& cfg,
               const CollisionParams& params, const CollisionQuad& quad);

// Q(f, f) at every node. Construction precomputes translation-invariant tables for the grid.
class CollisionOperator {
 public:
  CollisionOperator(const Grid& grid, const CollisionParams& params, const SplitConfig& cfg,
                    const CollisionQuad& quad);
  ~CollisionOperator();
  CollisionOperator(CollisionOperator&&) noexcept;
  CollisionOperator& operator=(CollisionOperator&&) noexcept;

  void apply(const Distribution& f, std::vector<double>& out) const;
  std::vector<double> apply(const Distribution& f) const;

  // Rate multiplying f(v) in the Q1 loss term; used for step-size control.
  std::vector<double> loss_rate(const Distribution& f) const;

  const Grid& grid() const;
  double cb() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

struct Q11BoundReport {
  std::vector<double> v0;
  double speed0;
  double q11;
  double bound;           // -C_R <v0>^{1+gamma+nu} m^{1+nu/d} / ||f w(alpha1)||^{nu/d}
  double c_r;
  double lambda;
  double cone_measure;
  double m;
  double norm_alpha1;
  double split_radius;    // R
  bool case2;
  bool holds;
  // Case 2 pointwise checks on cone samples.
  int samples;
  bool half_speed_ok;     // |v0| < 2 |v'|
  bool monotone_ok;       // w(2 v'; alpha3) >= w(v0; alpha3)
  double p2_constant;     // max of w(v'; a2) w(2v'; a3) / w(v'; a2 + c2 a3)

  std::string to_text() const;
};

// Evaluates q11 at the argmax of f w(alpha2) and compares with the lower-bound chain built from the
// measured cone constants. R defaults to 4 r.
Q11BoundReport q11_upper_bound_check(const Distribution& f, const Weight& base, const AlphaCascade& cascade,
                                     const CollisionParams& params, const CollisionQuad& quad,
                                     double split_radius = 0.0, int sphere_nodes = 128);

}  // namespace boltz
