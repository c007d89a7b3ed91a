#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "boltz/carleman.hpp"
#include "boltz/collision.hpp"
#include "boltz/dynamics.hpp"
#include "boltz/grid.hpp"
#include "boltz/kernel.hpp"
#include "boltz/weights.hpp"

namespace boltz {

// One Maxwellian component of the initial datum.
struct Hump {
  double mass = 1.0;
  std::vector<double> center;
  double T = 1.0;
};

struct WeightPlan {
  WeightFamily family = WeightFamily::Exponential;
  double p = 1.0;
  double alpha0 = 0.0;  // 0 disables the tracked cascade
  double safety = 0.9;

  // alpha_cascade(alpha0, 2^p, d, nu, safety)
  AlphaCascade cascade(int d, double nu) const;
  // w(alpha2), w(alpha1) when alpha0 > 0, otherwise empty.
  std::vector<Weight> tracked(int d, double nu) const;
};

struct ValidationPlan {
  std::vector<double> alphas{0.25, 1.0};
  std::vector<double> exp_p{1.0, 2.0};
  std::vector<double> ml_p{1.0, 1.5};
  std::vector<double> k_range{1.0, 2.0, 3.0, 4.0};
  int kernel_pairs = 1000;
  std::vector<double> cone_speeds{0.0, 2.0, 4.0, 6.0};
};

struct RunConfig {
  std::string command = "simulate";
  std::uint64_t seed = 1;
  Grid grid;
  CollisionParams kernel;
  std::vector<Hump> initial;
  SimConfig sim;  // weights_tracked is derived from `weights`
  bool dump = false;
  WeightPlan weights;
  SplitConfig split;
  double density = 1.0;
  double transition = 8.0;
  Q2Quad q2;
  ValidationPlan validation;

  void validate() const;
  Distribution initial_distribution() const;
  CollisionQuad collision_quad() const;
  SimConfig sim_config() const;
};

const std::vector<std::string>& command_names();
const std::vector<std::string>& preset_names();

// Throws std::invalid_argument listing the valid names for an unknown preset.
RunConfig preset(const std::string& name);

RunConfig parse_config(std::istream& is);
RunConfig parse_config(const std::string& text, const std::string& origin);
RunConfig load_config(const std::string& path);
std::string serialize(const RunConfig& cfg);

std::string to_string(const Weight& w);  // family:alpha:p
Weight parse_weight(const std::string& spec);

}  // namespace boltz
