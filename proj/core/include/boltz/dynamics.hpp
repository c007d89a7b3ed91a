#pragma once

#include <functional>
#include <iosfwd>
#include <limits>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "boltz/collision.hpp"

namespace boltz {

enum class Method { Euler, RK4 };

std::string to_string(Method method);
Method parse_method(const std::string& name);

struct Envelope {
  bool fit = true;
  double a = 0.0;
  double b = 0.0;
};

struct SimConfig {
  double T_final = 1.0;
  double dt = 2e-3;
  Method method = Method::RK4;
  int record_every = 25;
  std::vector<Weight> weights_tracked;
  Envelope envelope;
  double moment_alpha = 0.05;      // rate of the generated exponential moment
  bool conservative = true;        // project Q onto zero mass, momentum and energy
  bool track_q11 = false;          // q11 at the argmax of f w for each tracked weight
  double clip_threshold = 1e-6;    // clipped mass per step, relative to the total
  double stability_limit = 0.2;    // dt max|Q| / max f at t = 0

  void validate() const;
};

struct DiagnosticSeries {
  int d = 2;
  double moment_alpha = 0.05;
  double gamma = 1.0;
  std::vector<double> times;
  std::vector<double> mass;
  std::vector<std::vector<double>> momentum;  // [component][record]
  std::vector<double> energy;
  std::vector<double> entropy;
  std::vector<std::vector<double>> m_w;       // [weight][record], sup f w
  std::vector<std::vector<double>> l1_w;      // [weight][record], int f w
  std::vector<std::vector<double>> q11_w;     // [weight][record], empty unless tracked
  std::vector<double> exp_moment_gamma;
  std::vector<double> clipped;                // clipped mass since the previous record

  std::size_t size() const { return times.size(); }
  void validate() const;
};

void write_csv(std::ostream& os, const DiagnosticSeries& series);
void write_csv(const std::string& path, const DiagnosticSeries& series);

class StepAborted : public std::runtime_error {
 public:
  StepAborted(const std::string& what, double time) : std::runtime_error(what), time_(time) {}
  double time() const { return time_; }

 private:
  double time_;
};

struct StepStats {
  double clipped_mass = 0.0;
};

// Holds the collision operator for one grid and advances f by explicit steps.
class Stepper {
 public:
  Stepper(const Grid& grid, const CollisionParams& params, const SplitConfig& cfg, const CollisionQuad& quad,
          bool conservative = true, double clip_threshold = 1e-6);

  // Right-hand side; conservative mode removes the discrete mass, momentum and energy of Q by a correction
  // proportional to f.
  std::vector<double> rhs(const Distribution& f) const;
  Distribution step(const Distribution& f, double dt, Method method, StepStats* stats = nullptr) const;
  // dt max|Q| / max f.
  double stability_number(const Distribution& f, double dt) const;

  const CollisionOperator& op() const { return op_; }

 private:
  CollisionOperator op_;
  bool conservative_;
  double clip_threshold_;
  std::vector<double> qw_;
};

Distribution step(const Distribution& f, double dt, Method method, const SplitConfig& cfg,
                  const CollisionParams& params, const CollisionQuad& quad);

// Integral moments of Q against 1, v and |v|^2 under the trapezoid rule.
std::vector<double> collision_invariants(const Grid& g, const std::vector<double>& q);

using ProgressFn = std::function<void(double t, const Distribution& f)>;

DiagnosticSeries simulate(const Distribution& f0, const SimConfig& sim, const SplitConfig& cfg,
                          const CollisionParams& params, const CollisionQuad& quad,
                          const ProgressFn& progress = nullptr);

struct EnvelopeReport {
  bool pass = true;
  double min_slack = std::numeric_limits<double>::infinity();  // min of a + b t^{-d/nu} - m_w
  double first_violation = std::numeric_limits<double>::quiet_NaN();
  int checked = 0;
};

// Checks records with index >= first; t = 0 is skipped.
EnvelopeReport envelope_check(const DiagnosticSeries& series, std::size_t weight, double a, double b, int d,
                              double nu, std::size_t first = 0);

struct EnvelopeFit {
  double a;
  double b;
};

// Fit on records [0, count); count = 0 uses the whole series.
EnvelopeFit fit_envelope(const DiagnosticSeries& series, std::size_t weight, int d, double nu,
                         std::size_t count = 0);

struct MomentReport {
  double C;
  double initial;
  double ratio;  // C / initial
  bool bounded;
};

MomentReport moment_generation_check(const DiagnosticSeries& series, double alpha, double gamma);

// max over records of m_w[sup_weight] / l1_w[l1_weight].
double linf_l1_constant(const DiagnosticSeries& series, std::size_t sup_weight, std::size_t l1_weight);

}  // namespace boltz
