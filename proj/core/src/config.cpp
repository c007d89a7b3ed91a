#include "boltz/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace boltz {

namespace {

std::string fmt(double x) {
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

std::string fmt_list(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + fmt(v[i]);
  return s;
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

class Parser {
 public:
  explicit Parser(std::string origin) : origin_(std::move(origin)) {}

  [[noreturn]] void fail(const std::string& msg) const {
    throw std::invalid_argument(origin_ + ":" + std::to_string(line_) + ": " + msg);
  }

  void at(int line) { line_ = line; }

  double number(const std::string& v) const {
    double x = 0.0;
    const char* end = v.data() + v.size();
    auto r = std::from_chars(v.data(), end, x);
    if (r.ec != std::errc() || r.ptr != end) fail("expected a number, got '" + v + "'");
    return x;
  }

  long integer(const std::string& v) const {
    long x = 0;
    const char* end = v.data() + v.size();
    auto r = std::from_chars(v.data(), end, x);
    if (r.ec != std::errc() || r.ptr != end) fail("expected an integer, got '" + v + "'");
    return x;
  }

  bool boolean(const std::string& v) const {
    if (v == "true") return true;
    if (v == "false") return false;
    fail("expected true or false, got '" + v + "'");
  }

  std::vector<double> numbers(const std::string& v) const {
    std::istringstream is(v);
    std::vector<double> out;
    std::string tok;
    while (is >> tok) out.push_back(number(tok));
    return out;
  }

  template <class Fn>
  auto wrap(Fn fn) const {
    try {
      return fn();
    } catch (const std::invalid_argument& e) {
      fail(e.what());
    }
  }

 private:
  std::string origin_;
  int line_ = 0;
};

}  // namespace

AlphaCascade WeightPlan::cascade(int d, double nu) const {
  return alpha_cascade(alpha0, std::pow(2.0, p), d, nu, safety);
}

std::vector<Weight> WeightPlan::tracked(int d, double nu) const {
  if (!(alpha0 > 0.0) || family == WeightFamily::Constant) return {};
  const auto c = cascade(d, nu);
  return {Weight{family, c.alpha2, p}, Weight{family, c.alpha1, p}};
}

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"simulate",     "validate-weights", "validate-kernel",
                                              "carleman-check", "cone-check",     "envelope-report"};
  return names;
}

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names{"maxwellian-2d", "bimodal-2d", "shifted-bump-2d", "cone-2d",
                                              "ml-weights"};
  return names;
}

void RunConfig::validate() const {
  const auto& cmds = command_names();
  if (std::find(cmds.begin(), cmds.end(), command) == cmds.end())
    throw std::invalid_argument("unknown command '" + command + "'");
  grid.validate();
  kernel.validate();
  if (grid.d != kernel.d) throw std::invalid_argument("grid.d and kernel.d differ");
  if (initial.empty()) throw std::invalid_argument("initial: at least one hump is required");
  for (const auto& h : initial) {
    if (static_cast<int>(h.center.size()) != grid.d)
      throw std::invalid_argument("initial: hump center must have d components");
    if (!(h.mass > 0.0) || !(h.T > 0.0)) throw std::invalid_argument("initial: hump mass and T must be positive");
  }
  sim.validate();
  if (!(weights.alpha0 >= 0.0)) throw std::invalid_argument("weights.alpha0 must be nonnegative");
  if (!(weights.safety > 0.0 && weights.safety <= 1.0))
    throw std::invalid_argument("weights.safety must lie in (0, 1]");
  if (weights.alpha0 > 0.0) Weight{weights.family, weights.alpha0, weights.p}.validate();
  split.validate(grid);
  split.weight.validate();
  if (!(density > 0.0)) throw std::invalid_argument("quadrature.density must be positive");
  if (!(transition > 0.0)) throw std::invalid_argument("quadrature.transition must be positive");
  collision_quad().validate();
  if (validation.alphas.empty()) throw std::invalid_argument("validate.alphas must not be empty");
  if (validation.k_range.empty()) throw std::invalid_argument("validate.k_range must not be empty");
  if (validation.kernel_pairs < 1) throw std::invalid_argument("validate.kernel_pairs must be positive");
  if (validation.cone_speeds.empty()) throw std::invalid_argument("validate.cone_speeds must not be empty");
}

Distribution RunConfig::initial_distribution() const {
  Distribution f = Distribution::zeros(grid);
  for (const auto& h : initial) {
    const auto m = maxwellian(grid, h.mass, h.center, h.T);
    for (std::size_t i = 0; i < f.values.size(); ++i) f.values[i] += m.values[i];
  }
  return f;
}

CollisionQuad RunConfig::collision_quad() const {
  auto q = CollisionQuad::for_grid(grid, density);
  q.transition = transition;
  q.q2 = q2;
  return q;
}

SimConfig RunConfig::sim_config() const {
  SimConfig s = sim;
  s.weights_tracked = weights.tracked(grid.d, kernel.nu);
  return s;
}

std::string to_string(const Weight& w) {
  if (w.family == WeightFamily::Constant) return "constant";
  return to_string(w.family) + ":" + fmt(w.alpha) + ":" + fmt(w.p);
}

Weight parse_weight(const std::string& spec) {
  if (spec == "constant") return Weight::constant();
  const auto a = spec.find(':');
  const auto b = a == std::string::npos ? a : spec.find(':', a + 1);
  if (b == std::string::npos) throw std::invalid_argument("weight spec must be constant or family:alpha:p");
  Parser p("weight");
  Weight w{parse_weight_family(spec.substr(0, a)), p.number(spec.substr(a + 1, b - a - 1)),
           p.number(spec.substr(b + 1))};
  w.validate();
  return w;
}

RunConfig preset(const std::string& name) {
  RunConfig c;
  c.grid = Grid{2, 48, 8.0};
  c.kernel = CollisionParams{};
  c.sim.T_final = 0.2;
  c.sim.dt = 2e-3;
  c.sim.method = Method::RK4;
  c.sim.record_every = 5;
  c.initial = {Hump{1.0, {0.0, 0.0}, 1.0}};
  c.weights = WeightPlan{WeightFamily::Exponential, 1.0, 0.25, 0.9};
  if (name == "maxwellian-2d") {
    c.command = "simulate";
  } else if (name == "bimodal-2d") {
    c.command = "simulate";
    c.initial = {Hump{0.5, {-2.0, 0.0}, 0.5}, Hump{0.5, {2.0, 0.0}, 0.5}};
    c.sim.T_final = 1.0;
    c.sim.record_every = 25;
    c.sim.track_q11 = true;
    c.weights = WeightPlan{WeightFamily::Exponential, 1.0, 1.0, 0.9};
  } else if (name == "shifted-bump-2d") {
    c.command = "envelope-report";
    c.initial = {Hump{0.8, {0.0, 0.0}, 1.0}, Hump{0.2, {3.0, 0.0}, 0.25}};
    c.sim.T_final = 0.5;
    c.sim.track_q11 = true;
    c.weights = WeightPlan{WeightFamily::Exponential, 1.0, 1.0, 0.9};
  } else if (name == "cone-2d") {
    c.command = "cone-check";
  } else if (name == "ml-weights") {
    c.command = "envelope-report";
    c.initial = {Hump{0.7, {-1.0, 0.0}, 0.8}, Hump{0.3, {2.5, 1.0}, 0.3}};
    c.sim.T_final = 0.5;
    c.sim.track_q11 = true;
    c.weights = WeightPlan{WeightFamily::MittagLeffler, 1.0, 1.0, 0.9};
  } else {
    std::string valid;
    for (const auto& n : preset_names()) valid += (valid.empty() ? "" : ", ") + n;
    throw std::invalid_argument("unknown preset '" + name + "' (valid presets: " + valid + ")");
  }
  c.validate();
  return c;
}

std::string serialize(const RunConfig& c) {
  std::ostringstream os;
  os << "command = " << c.command << "\n"
     << "seed = " << c.seed << "\n\n"
     << "[grid]\n"
     << "d = " << c.grid.d << "\n"
     << "N = " << c.grid.N << "\n"
     << "L = " << fmt(c.grid.L) << "\n\n"
     << "[kernel]\n"
     << "gamma = " << fmt(c.kernel.gamma) << "\n"
     << "nu = " << fmt(c.kernel.nu) << "\n"
     << "c_pos = " << fmt(c.kernel.c_pos) << "\n"
     << "c_neg = " << fmt(c.kernel.c_neg) << "\n\n"
     << "[initial]\n"
     << "# mass, center components, temperature\n";
  for (const auto& h : c.initial) os << "hump = " << fmt(h.mass) << " " << fmt_list(h.center) << " " << fmt(h.T) << "\n";
  os << "\n[sim]\n"
     << "T_final = " << fmt(c.sim.T_final) << "\n"
     << "dt = " << fmt(c.sim.dt) << "\n"
     << "method = " << to_string(c.sim.method) << "\n"
     << "record_every = " << c.sim.record_every << "\n"
     << "moment_alpha = " << fmt(c.sim.moment_alpha) << "\n"
     << "conservative = " << (c.sim.conservative ? "true" : "false") << "\n"
     << "track_q11 = " << (c.sim.track_q11 ? "true" : "false") << "\n"
     << "envelope = " << (c.sim.envelope.fit ? "fit" : fmt(c.sim.envelope.a) + " " + fmt(c.sim.envelope.b)) << "\n"
     << "clip_threshold = " << fmt(c.sim.clip_threshold) << "\n"
     << "stability_limit = " << fmt(c.sim.stability_limit) << "\n"
     << "dump = " << (c.dump ? "true" : "false") << "\n\n"
     << "[weights]\n"
     << "family = " << to_string(c.weights.family) << "\n"
     << "p = " << fmt(c.weights.p) << "\n"
     << "alpha0 = " << fmt(c.weights.alpha0) << "\n"
     << "safety = " << fmt(c.weights.safety) << "\n\n"
     << "[split]\n"
     << "weight = " << to_string(c.split.weight) << "\n"
     << "exclusion_radius = " << fmt(c.split.exclusion_radius) << "\n"
     << "unit_ball_radius = " << fmt(c.split.unit_ball_radius) << "\n"
     << "q2_mode = " << to_string(c.split.q2_mode) << "\n\n"
     << "[quadrature]\n"
     << "density = " << fmt(c.density) << "\n"
     << "transition = " << fmt(c.transition) << "\n"
     << "q2_angle = " << c.q2.n_angle << "\n"
     << "q2_theta = " << c.q2.n_theta << "\n"
     << "q2_ray = " << c.q2.n_ray << "\n"
     << "q2_theta_min = " << fmt(c.q2.theta_min) << "\n\n"
     << "[validate]\n"
     << "alphas = " << fmt_list(c.validation.alphas) << "\n"
     << "exp_p = " << fmt_list(c.validation.exp_p) << "\n"
     << "ml_p = " << fmt_list(c.validation.ml_p) << "\n"
     << "k_range = " << fmt_list(c.validation.k_range) << "\n"
     << "kernel_pairs = " << c.validation.kernel_pairs << "\n"
     << "cone_speeds = " << fmt_list(c.validation.cone_speeds) << "\n";
  return os.str();
}

RunConfig parse_config(std::istream& is) {
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str(), "config");
}

RunConfig parse_config(const std::string& text, const std::string& origin) {
  RunConfig c;
  c.initial.clear();
  Parser P(origin);
  std::istringstream is(text);
  std::string raw, section;
  std::set<std::string> seen;
  int line = 0;
  while (std::getline(is, raw)) {
    P.at(++line);
    const auto hash = raw.find('#');
    const std::string s = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') P.fail("malformed section header");
      section = trim(s.substr(1, s.size() - 2));
      static const std::set<std::string> sections{"grid",   "kernel", "initial",    "sim",
                                                  "weights", "split", "quadrature", "validate"};
      if (!sections.count(section)) P.fail("unknown section [" + section + "]");
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) P.fail("expected key = value");
    const std::string key = trim(s.substr(0, eq));
    const std::string v = trim(s.substr(eq + 1));
    const std::string full = section.empty() ? key : section + "." + key;
    if (full != "initial.hump" && !seen.insert(full).second) P.fail("duplicate key " + full);
    auto num = [&] { return P.number(v); };
    auto integer = [&] { return P.integer(v); };
    if (full == "command") c.command = v;
    else if (full == "seed") {
      const long x = integer();
      if (x < 0) P.fail("seed must be nonnegative");
      c.seed = static_cast<std::uint64_t>(x);
    }
    else if (full == "grid.d") c.grid.d = static_cast<int>(integer()), c.kernel.d = c.grid.d;
    else if (full == "grid.N") c.grid.N = static_cast<int>(integer());
    else if (full == "grid.L") c.grid.L = num();
    else if (full == "kernel.gamma") c.kernel.gamma = num();
    else if (full == "kernel.nu") c.kernel.nu = num();
    else if (full == "kernel.c_pos") c.kernel.c_pos = num();
    else if (full == "kernel.c_neg") c.kernel.c_neg = num();
    else if (full == "initial.hump") {
      auto xs = P.numbers(v);
      if (xs.size() < 3) P.fail("hump needs mass, center components and temperature");
      c.initial.push_back(Hump{xs.front(), std::vector<double>(xs.begin() + 1, xs.end() - 1), xs.back()});
    }
    else if (full == "sim.T_final") c.sim.T_final = num();
    else if (full == "sim.dt") c.sim.dt = num();
    else if (full == "sim.method") c.sim.method = P.wrap([&] { return parse_method(v); });
    else if (full == "sim.record_every") c.sim.record_every = static_cast<int>(integer());
    else if (full == "sim.moment_alpha") c.sim.moment_alpha = num();
    else if (full == "sim.conservative") c.sim.conservative = P.boolean(v);
    else if (full == "sim.track_q11") c.sim.track_q11 = P.boolean(v);
    else if (full == "sim.envelope") {
      if (v == "fit") {
        c.sim.envelope = Envelope{};
      } else {
        auto xs = P.numbers(v);
        if (xs.size() != 2) P.fail("envelope must be 'fit' or two numbers a b");
        c.sim.envelope = Envelope{false, xs[0], xs[1]};
      }
    }
    else if (full == "sim.clip_threshold") c.sim.clip_threshold = num();
    else if (full == "sim.stability_limit") c.sim.stability_limit = num();
    else if (full == "sim.dump") c.dump = P.boolean(v);
    else if (full == "weights.family") c.weights.family = P.wrap([&] { return parse_weight_family(v); });
    else if (full == "weights.p") c.weights.p = num();
    else if (full == "weights.alpha0") c.weights.alpha0 = num();
    else if (full == "weights.safety") c.weights.safety = num();
    else if (full == "split.weight") c.split.weight = P.wrap([&] { return parse_weight(v); });
    else if (full == "split.exclusion_radius") c.split.exclusion_radius = num();
    else if (full == "split.unit_ball_radius") c.split.unit_ball_radius = num();
    else if (full == "split.q2_mode") c.split.q2_mode = P.wrap([&] { return parse_q2_mode(v); });
    else if (full == "quadrature.density") c.density = num();
    else if (full == "quadrature.transition") c.transition = num();
    else if (full == "quadrature.q2_angle") c.q2.n_angle = static_cast<int>(integer());
    else if (full == "quadrature.q2_theta") c.q2.n_theta = static_cast<int>(integer());
    else if (full == "quadrature.q2_ray") c.q2.n_ray = static_cast<int>(integer());
    else if (full == "quadrature.q2_theta_min") c.q2.theta_min = num();
    else if (full == "validate.alphas") c.validation.alphas = P.numbers(v);
    else if (full == "validate.exp_p") c.validation.exp_p = P.numbers(v);
    else if (full == "validate.ml_p") c.validation.ml_p = P.numbers(v);
    else if (full == "validate.k_range") c.validation.k_range = P.numbers(v);
    else if (full == "validate.kernel_pairs") c.validation.kernel_pairs = static_cast<int>(integer());
    else if (full == "validate.cone_speeds") c.validation.cone_speeds = P.numbers(v);
    else P.fail("unknown key " + full);
  }
  c.validate();
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::invalid_argument("cannot open config file " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str(), path);
}

}  // namespace boltz
