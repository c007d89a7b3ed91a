#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "boltz/weights.hpp"

namespace boltz {

// Uniform tensor grid on [-L, L]^d. Axis 0 varies fastest in the flat index.
struct Grid {
  int d = 2;
  int N = 48;
  double L = 8.0;

  void validate() const;
  double h() const { return 2.0 * L / (N - 1); }
  std::size_t size() const;
  double coord(int i) const { return -L + i * h(); }
  void coords(std::size_t flat, std::span<double> out) const;
  void multi_index(std::size_t flat, std::span<int> out) const;
  std::size_t flat_index(std::span<const int> idx) const;
  // Trapezoid quadrature weights, including h^d.
  std::vector<double> quad_weights() const;
  double speed(std::size_t flat) const;
  bool on_boundary(std::size_t flat) const;

  bool operator==(const Grid&) const = default;
};

struct Distribution {
  Grid grid;
  std::vector<double> values;

  static Distribution zeros(const Grid& g);
  // Multilinear interpolation of the lattice values extended by 0 beyond the cube.
  double interp(std::span<const double> v) const;
  double max_value() const;
  void validate() const;
};

Distribution maxwellian(const Grid& grid, double rho, std::span<const double> u, double T);

double mass(const Distribution& f);
std::vector<double> momentum(const Distribution& f);
double energy(const Distribution& f);  // int f |v|^2
double moment_poly(const Distribution& f, double q);
double moment_exp(const Distribution& f, double alpha, double s);

enum class MLRoute { Direct, PartialSum };
double moment_ml(const Distribution& f, double alpha, double s, MLRoute route, int Q = 60);

double entropy(const Distribution& f);
// int f max(log f, 0); the entropy quantity the level-set bound consumes.
double entropy_positive_part(const Distribution& f);
double weighted_l1(const Distribution& f, const Weight& w);

struct SupResult {
  double m;
  std::vector<double> v_star;
  std::size_t index;
};
SupResult weighted_sup(const Distribution& f, const Weight& w);

// Largest boundary-shell value divided by the global maximum.
double boundary_ratio(const Distribution& f);

// H0 bounds int f log+ f.
struct StatsBounds {
  double M0;
  double M1;
  double E0;
  double H0;
  void validate() const;
};

// Mass, energy and entropy of f, padded by `slack` so that f satisfies them.
StatsBounds stats_bounds_of(const Distribution& f, double slack = 1e-9);

struct LevelSet {
  double r;
  double l;
  double m;                  // theoretical lower bound M1 e^{-8 H0 / M1} / 8
  double measured;           // grid measure of S
  std::vector<char> mask;    // 1 on S = B_r cap {f > l}
};

LevelSet level_set_constants(const Distribution& f, const StatsBounds& bounds);

void write_btgrid(std::ostream& os, const Distribution& f);
void write_btgrid(const std::string& path, const Distribution& f);
Distribution read_btgrid(std::istream& is);
Distribution read_btgrid(const std::string& path);

}  // namespace boltz
