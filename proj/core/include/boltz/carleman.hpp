#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "boltz/grid.hpp"
#include "boltz/kernel.hpp"

namespace boltz {

using Field = std::function<double(std::span<const double>)>;

// Discretization of the hyperplane integral defining K_f. Midpoint nodes in
// the radial hyperplane coordinate; uniform angles in the plane for d = 3.
struct HyperplaneQuad {
  int n_radial = 64;
  double w_max = 0.0;
  int n_phi = 32;

  void validate() const;
  // w_max = 2 L sqrt(d), radial spacing close to h / density.
  static HyperplaneQuad for_grid(const Grid& g, double density = 1.0);
  HyperplaneQuad refined() const { return {2 * n_radial, w_max, 2 * n_phi}; }
};

// r^gamma b~(cos theta) r^{2-d} as a function of |z| and the hyperplane radius |w|.
double carleman_weight(double zn, double wn, const CollisionParams& params);

double kf_hyperplane(const Distribution& f, std::span<const double> v, std::span<const double> vp,
                     const CollisionParams& params, const HyperplaneQuad& quad);
double kf_hyperplane(const Field& f, int d, std::span<const double> v, std::span<const double> vp,
                     const CollisionParams& params, const HyperplaneQuad& quad);

double kf_equivalent(const Distribution& f, std::span<const double> v, std::span<const double> vp,
                     const CollisionParams& params, const HyperplaneQuad& quad);

struct CarlemanQuad {
  HyperplaneQuad hyper;
  int n_angle = 64;      // outer azimuthal nodes
  int n_speed = 24;      // radial panels (8-point Gauss each)
  int n_theta = 12;      // graded theta panels per decade-like level
  double theta_min = 1e-3;

  CarlemanQuad refined() const;
  static CarlemanQuad for_grid(const Grid& g);
};

using TestFunction = std::function<double(std::span<const double>, std::span<const double>)>;

struct IdentityCheck {
  double lhs;
  double rhs;
  double relerr;
  double lhs_cutoff;         // lhs at the coarsest angular cutoff, before extrapolation
  double extrapolation_gap;  // |difference of the two extrapolants| / |lhs|
};

// Compares the sigma-representation of int int H f(v'_*) B with int H K_f dv' at fixed v (d = 2).
IdentityCheck carleman_identity_check(const Distribution& f, const TestFunction& H, std::span<const double> v,
                                      const CollisionParams& params, const CarlemanQuad& quad);

struct ChangeOfVarsQuad {
  int n_sphere = 256;
  double radius = 8.0;
  double panel = 0.125;
};

struct ChangeOfVars {
  double lhs;
  double rhs_integral;
  double c_d;  // NaN when both sides vanish
};

ChangeOfVars change_of_vars_check(const Field& g, int d, const ChangeOfVarsQuad& quad);

struct ConeSet {
  std::vector<double> v;
  std::vector<std::vector<double>> directions;
  std::vector<double> sections;  // hyperplane-section measure per direction
  double delta = 0.0;
  double measure = 0.0;
  double node_weight = 0.0;
  int sphere_nodes = 0;

  double max_abs_dot_v() const;
  bool symmetric() const;
};

// Symmetric nodes on S^{d-1}: uniform angles for d = 2, Fibonacci hemisphere plus antipodes for d = 3.
std::vector<std::vector<double>> sphere_nodes(int d, int n);

// Default section threshold m / (8 c_d).
double default_cone_delta(const LevelSet& ls, int d);

ConeSet cone_set(const Distribution& f, std::span<const double> v, const LevelSet& levelset, double delta,
                 int sphere_nodes);

struct ConeKfReport {
  double lambda;
  double max_scaled;
  int samples;
  std::vector<double> worst_vp;
};

ConeKfReport cone_kf_lower_bound_check(const Distribution& f, std::span<const double> v, const ConeSet& cone,
                                       const CollisionParams& params, const HyperplaneQuad& quad,
                                       int n_samples);

struct ConeIntegralReport {
  double lhs;
  double rhs;
  double ratio;
  double int_g;          // int over the cone of |g|
  double r_worst;        // (2 d int|g| / (|A| m))^{1/d}
  double worst_direct;   // (m/2) int_{C \ B_r} |v' - v~|^{-d-nu}, by quadrature
  double worst_closed;   // |A| m r^{-nu} / (2 nu)
  double constant;       // c_{nu,d} used in rhs
};

// lhs = int_C (m~ - g(v')) |v~ - v'|^{-d-nu} dv' over the cone with apex v~, omitting the ball of
// radius apex_radius. g must vanish beyond `reach` from v~.
ConeIntegralReport cone_integral_lower_bound_check(const Field& g, std::span<const double> v_tilde,
                                                   double m_tilde, const ConeSet& cone, double nu,
                                                   double apex_radius, double reach, double panel = 1.0 / 64);

}  // namespace boltz
