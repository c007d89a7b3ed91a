#include "boltz/collision.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include "boltz/detail/lattice.hpp"
#include "boltz/quadrature.hpp"
#include "boltz/warn.hpp"

namespace boltz {

namespace {

constexpr double kPi = std::numbers::pi;

double norm(std::span<const double> x) {
  double s = 0.0;
  for (double c : x) s += c * c;
  return std::sqrt(s);
}

struct ThetaNode {
  double theta;
  double weight;
};

// Gauss nodes in log(theta) on [lo, hi].
void log_panels(double lo, double hi, int panels, std::vector<ThetaNode>& out) {
  const GaussRule gl = gauss_legendre(8);
  const double a = std::log(lo), b = std::log(hi);
  const double width = (b - a) / panels;
  for (int p = 0; p < panels; ++p)
    for (std::size_t q = 0; q < gl.nodes.size(); ++q) {
      const double t = std::exp(a + width * (p + 0.5 * (gl.nodes[q] + 1.0)));
      out.push_back({t, 0.5 * width * gl.weights[q] * t});
    }
}

// Nodes on [pi/2, pi) in t = (pi - theta)^nu, which removes the endpoint singularity of the gain factor.
void upper_panels(double nu, int panels, std::vector<ThetaNode>& out) {
  const GaussRule gl = gauss_legendre(8);
  const double tmax = std::pow(0.5 * kPi, nu);
  const double width = tmax / panels;
  for (int p = 0; p < panels; ++p)
    for (std::size_t q = 0; q < gl.nodes.size(); ++q) {
      const double t = width * (p + 0.5 * (gl.nodes[q] + 1.0));
      const double theta = kPi - std::pow(t, 1.0 / nu);
      out.push_back({theta, 0.5 * width * gl.weights[q] * std::pow(t, 1.0 / nu - 1.0) / nu});
    }
}

struct RayRule {
  std::vector<double> tau;
  std::vector<double> weight;  // includes tau^{d-1+gamma}
};

RayRule ray_rule(double support, int panels, int d, double gamma) {
  const GaussRule gl = gauss_legendre(4);
  RayRule r;
  const double width = support / panels;
  for (int p = 0; p < panels; ++p)
    for (std::size_t q = 0; q < gl.nodes.size(); ++q) {
      const double t = width * (p + 0.5 * (gl.nodes[q] + 1.0));
      r.tau.push_back(t);
      r.weight.push_back(0.5 * width * gl.weights[q] * std::pow(t, d - 1 + gamma));
    }
  return r;
}

struct DirectParts {
  double cutoff;    // theta > theta_min
  double sliver1;   // theta in [theta_min/2, theta_min]
  double sliver2;   // theta in [theta_min/4, theta_min/2]
  double conv;      // int over the sphere of the ray integral
};

DirectParts direct_parts(const Field& F, std::span<const double> v, double support, const CollisionParams& params,
                         const Q2Quad& quad) {
  const int d = params.d;
  const RayRule ray = ray_rule(support, quad.n_ray, d, params.gamma);
  std::vector<double> x(d);
  auto I = [&](const double* n) {
    double acc = 0.0;
    for (std::size_t k = 0; k < ray.tau.size(); ++k) {
      for (int i = 0; i < d; ++i) x[i] = v[i] - ray.tau[k] * n[i];
      acc += ray.weight[k] * F(x);
    }
    return acc;
  };

  const double tmin = quad.theta_min;
  std::vector<ThetaNode> main_nodes, s1, s2;
  log_panels(tmin, 0.5 * kPi, std::max(2, static_cast<int>(std::ceil(quad.n_theta * std::log(0.5 * kPi / tmin)))),
             main_nodes);
  upper_panels(params.nu, std::max(2, quad.n_theta / 2), main_nodes);
  const int sp = std::max(2, static_cast<int>(std::ceil(quad.n_theta * std::log(2.0))));
  log_panels(0.5 * tmin, tmin, sp, s1);
  log_panels(0.25 * tmin, 0.5 * tmin, sp, s2);

  DirectParts out{0.0, 0.0, 0.0, 0.0};
  if (d == 2) {
    const int n = quad.n_angle;
    const double dphi = 2.0 * kPi / n;
    std::vector<double> base(n);
    for (int k = 0; k < n; ++k) {
      const double phi = (k + 0.5) * dphi;
      const double u[2] = {std::cos(phi), std::sin(phi)};
      base[k] = I(u);
      out.conv += dphi * base[k];
    }
    auto layer = [&](const std::vector<ThetaNode>& nodes) {
      double total = 0.0;
      for (const auto& nd : nodes) {
        const double bt = angular_b_sin(std::sin(nd.theta), nd.theta < 0.5 * kPi, params);
        const double c = std::pow(std::cos(0.5 * nd.theta), -d - params.gamma);
        double acc = 0.0;
        for (int k = 0; k < n; ++k) {
          const double phi = (k + 0.5) * dphi;
          const double a1[2] = {std::cos(phi + 0.5 * nd.theta), std::sin(phi + 0.5 * nd.theta)};
          const double a2[2] = {std::cos(phi - 0.5 * nd.theta), std::sin(phi - 0.5 * nd.theta)};
          acc += c * (I(a1) + I(a2)) - 2.0 * base[k];
        }
        total += nd.weight * bt * acc * dphi;
      }
      return total;
    };
    out.cutoff = layer(main_nodes);
    out.sliver1 = layer(s1);
    out.sliver2 = layer(s2);
    return out;
  }

  // d = 3: u on the sphere (Gauss in cos x uniform azimuth), sigma by polar angle theta and azimuth beta about u.
  const int n_c = std::max(8, quad.n_angle / 4);
  const int n_az = 2 * n_c;
  const GaussRule gc = gauss_legendre(n_c);
  const double daz = 2.0 * kPi / n_az;
  struct Frame {
    double u[3], e1[3], e2[3];
    double w;
    double base;
  };
  std::vector<Frame> frames;
  for (int i = 0; i < n_c; ++i) {
    const double ct = gc.nodes[i], st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
    for (int j = 0; j < n_az; ++j) {
      const double az = (j + 0.5) * daz;
      Frame fr{};
      fr.u[0] = st * std::cos(az);
      fr.u[1] = st * std::sin(az);
      fr.u[2] = ct;
      fr.e1[0] = ct * std::cos(az);
      fr.e1[1] = ct * std::sin(az);
      fr.e1[2] = -st;
      fr.e2[0] = -std::sin(az);
      fr.e2[1] = std::cos(az);
      fr.e2[2] = 0.0;
      fr.w = gc.weights[i] * daz;
      fr.base = I(fr.u);
      out.conv += fr.w * fr.base;
      frames.push_back(fr);
    }
  }
  const int n_beta = n_az;
  const double dbeta = 2.0 * kPi / n_beta;
  auto layer = [&](const std::vector<ThetaNode>& nodes) {
    double total = 0.0;
    for (const auto& nd : nodes) {
      const double st = std::sin(nd.theta);
      const double bt = angular_b_sin(st, nd.theta < 0.5 * kPi, params);
      const double c = std::pow(std::cos(0.5 * nd.theta), -d - params.gamma);
      const double ch = std::cos(0.5 * nd.theta), sh = std::sin(0.5 * nd.theta);
      double acc = 0.0;
      for (const auto& fr : frames) {
        double inner = 0.0;
        for (int b = 0; b < n_beta; ++b) {
          const double beta = (b + 0.5) * dbeta;
          const double cb = std::cos(beta), sb = std::sin(beta);
          double n[3];
          for (int i = 0; i < 3; ++i) n[i] = ch * fr.u[i] + sh * (cb * fr.e1[i] + sb * fr.e2[i]);
          inner += c * I(n) - fr.base;
        }
        acc += fr.w * inner * dbeta;
      }
      total += nd.weight * bt * st * acc;
    }
    return total;
  };
  out.cutoff = layer(main_nodes);
  out.sliver1 = layer(s1);
  out.sliver2 = layer(s2);
  return out;
}

Q2Direct finish_direct(const DirectParts& p, double nu) {
  const double factor = 1.0 / (std::pow(2.0, 2.0 - nu) - 1.0);
  const double l1 = p.cutoff, l2 = l1 + p.sliver1, l3 = l2 + p.sliver2;
  const double e2 = l2 + (l2 - l1) * factor;
  const double e3 = l3 + (l3 - l2) * factor;
  Q2Direct out{e3, l1, 0.0};
  const double scale = std::max(std::abs(e3), std::abs(p.conv) * 1e-300);
  out.extrapolation_gap = scale > 0.0 ? std::abs(e3 - e2) / scale : 0.0;
  return out;
}

// Phi(|o|) tabulated by the integer squared lattice length.
struct FarKey {
  int d, N;
  double L, gamma, nu, c_pos, c_neg, transition;
  auto tie() const { return std::tie(d, N, L, gamma, nu, c_pos, c_neg, transition); }
  bool operator<(const FarKey& o) const { return tie() < o.tie(); }
};

const std::vector<double>& far_table(const Grid& g, const CollisionParams& params, double transition) {
  static std::mutex mu;
  static std::map<FarKey, std::vector<double>> cache;
  FarKey key{g.d, g.N, g.L, params.gamma, params.nu, params.c_pos, params.c_neg, transition};
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  const double h = g.h();
  const double r1 = 2.0 * g.L * std::sqrt(static_cast<double>(g.d));
  const int max_n2 = g.d * (g.N - 1) * (g.N - 1);
  std::vector<double> table(max_n2 + 1, 0.0);
  for (int n2 = 1; n2 <= max_n2; ++n2) table[n2] = far_field_potential(h * std::sqrt(n2), params, r1, transition);
  return cache.emplace(key, std::move(table)).first->second;
}

// Node index of v, which must coincide with a grid node.
std::vector<int> node_of(const Grid& g, std::span<const double> v) {
  if (static_cast<int>(v.size()) != g.d) throw std::invalid_argument("collision: v has the wrong dimension");
  std::vector<int> idx(g.d);
  const double h = g.h();
  for (int i = 0; i < g.d; ++i) {
    const double t = (v[i] + g.L) / h;
    const long k = std::lround(t);
    if (k < 0 || k >= g.N || std::abs(t - k) > 1e-9)
      throw std::invalid_argument("collision: pointwise evaluation requires v at a grid node");
    idx[i] = static_cast<int>(k);
  }
  return idx;
}

struct NodeTerms {
  std::size_t flat;
  double fv;
  std::vector<std::size_t> nodes;  // partner nodes v + z inside the cube
  std::vector<double> kh;          // K_f(v, v + z) h^d
  double loss_rate;                // sum chi K h^d over the lattice plus the far field
};

NodeTerms node_terms(const Distribution& f, std::span<const double> v, const SplitConfig& cfg,
                     const CollisionParams& params, const CollisionQuad& quad) {
  const Grid& g = f.grid;
  params.validate();
  quad.validate();
  cfg.validate(g);
  if (g.d != params.d) throw std::invalid_argument("collision: grid and kernel dimensions differ");
  const auto idx = node_of(g, v);
  const int d = g.d;
  const double h = g.h();
  const double hd = std::pow(h, d);
  const double excl = cfg.exclusion(g) * (1.0 + 1e-9);
  const double r1 = 2.0 * g.L * std::sqrt(static_cast<double>(d));
  const double rcut = r1 + quad.transition;

  NodeTerms t;
  t.flat = g.flat_index(idx);
  t.fv = f.values[t.flat];
  t.loss_rate = 0.0;
  std::vector<double> vp(d);
  std::vector<int> other(d);
  detail::for_half_lattice(d, static_cast<int>(std::ceil(rcut / h)), [&](const int* z) {
    double zn2 = 0.0;
    for (int i = 0; i < d; ++i) zn2 += static_cast<double>(z[i]) * z[i];
    const double zn = h * std::sqrt(zn2);
    if (zn <= excl || zn > rcut) return;
    for (int i = 0; i < d; ++i) vp[i] = v[i] + h * z[i];
    const double k = kf_hyperplane(f, v, vp, params, quad.hyper);
    t.loss_rate += 2.0 * lattice_cutoff(zn, r1, quad.transition) * k * hd;
    for (int sign = -1; sign <= 1; sign += 2) {
      bool inside = true;
      for (int i = 0; i < d; ++i) {
        other[i] = idx[i] + sign * z[i];
        if (other[i] < 0 || other[i] >= g.N) inside = false;
      }
      if (!inside) continue;
      t.nodes.push_back(g.flat_index(other));
      t.kh.push_back(k * hd);
    }
  });
  const auto& far = far_table(g, params, quad.transition);
  std::vector<int> u(d);
  for (std::size_t n = 0; n < g.size(); ++n) {
    if (f.values[n] == 0.0) continue;
    g.multi_index(n, u);
    long n2 = 0;
    for (int i = 0; i < d; ++i) n2 += static_cast<long>(u[i] - idx[i]) * (u[i] - idx[i]);
    t.loss_rate += f.values[n] * far[n2] * hd;
  }
  return t;
}

double lattice_distance(const Grid& g, std::size_t a, std::size_t b) {
  std::vector<int> ia(g.d), ib(g.d);
  g.multi_index(a, ia);
  g.multi_index(b, ib);
  double s = 0.0;
  for (int i = 0; i < g.d; ++i) s += static_cast<double>(ia[i] - ib[i]) * (ia[i] - ib[i]);
  return g.h() * std::sqrt(s);
}

}  // namespace

std::string to_string(Q2Mode mode) { return mode == Q2Mode::Direct ? "direct" : "convolution"; }

Q2Mode parse_q2_mode(const std::string& name) {
  if (name == "direct") return Q2Mode::Direct;
  if (name == "convolution") return Q2Mode::Convolution;
  throw std::invalid_argument("unknown q2 mode '" + name + "' (expected direct or convolution)");
}

double SplitConfig::exclusion(const Grid& g) const { return exclusion_radius > 0.0 ? exclusion_radius : g.h(); }

void SplitConfig::validate(const Grid& g) const {
  weight.validate();
  const double h = g.h();
  const double e = exclusion(g);
  if (exclusion_radius < 0.0 || e < 0.5 * h * (1 - 1e-12) || e > 4.0 * h * (1 + 1e-12)) {
    std::ostringstream os;
    os << "SplitConfig: exclusion_radius " << e << " must lie in [h/2, 4h] with h = " << h;
    throw std::invalid_argument(os.str());
  }
  if (!(unit_ball_radius > 0.0)) throw std::invalid_argument("SplitConfig: unit_ball_radius must be positive");
}

CollisionQuad CollisionQuad::for_grid(const Grid& g, double density) {
  CollisionQuad q;
  q.hyper = HyperplaneQuad::for_grid(g, density);
  return q;
}

void CollisionQuad::validate() const {
  hyper.validate();
  if (!(transition > 0.0)) throw std::invalid_argument("CollisionQuad: transition must be positive");
  if (q2.n_angle < 8 || q2.n_theta < 2 || q2.n_ray < 4 || !(q2.theta_min > 0.0 && q2.theta_min < 0.5))
    throw std::invalid_argument("CollisionQuad: invalid Q2 quadrature");
}

double lattice_cutoff(double rho, double r1, double width) {
  const double s = (rho - r1) / width;
  if (s <= 0.0) return 1.0;
  if (s >= 1.0) return 0.0;
  const double a = std::exp(-1.0 / s), b = std::exp(-1.0 / (1.0 - s));
  return b / (a + b);
}

double far_field_potential(double s, const CollisionParams& params, double r1, double width) {
  if (s <= 0.0) return 0.0;
  const int d = params.d;
  auto integrand = [&](double rho) {
    return (1.0 - lattice_cutoff(rho, r1, width)) * std::pow(rho, d - 2) * carleman_weight(rho, s, params);
  };
  double psi = 0.0;
  // transition band, with a breakpoint where the kernel switches branch
  std::vector<double> edges{r1, r1 + width};
  if (s > r1 && s < r1 + width) edges.insert(edges.begin() + 1, s);
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) psi += integrate_gl(integrand, edges[i], edges[i + 1], 8, 16);
  // beyond the band, in log(rho)
  double lo = r1 + width;
  if (s > lo) {
    psi += integrate_gl(integrand, lo, s, 8, 16);
    lo = s;
  }
  psi += integrate_gl([&](double t) {
    const double rho = std::exp(t);
    return integrand(rho) * rho;
  }, std::log(lo), std::log(lo) + 40.0 / params.nu, 60, 16);
  return sphere_measure(d - 2) * std::ldexp(psi, d - 1) / s;
}

Q2Direct q2_direct_field(const Field& F, std::span<const double> v, double support, const CollisionParams& params,
                         const Q2Quad& quad) {
  params.validate();
  if (static_cast<int>(v.size()) != params.d) throw std::invalid_argument("q2_direct_field: dimension mismatch");
  if (!(support > 0.0)) throw std::invalid_argument("q2_direct_field: support must be positive");
  auto out = finish_direct(direct_parts(F, v, support, params, quad), params.nu);
  if (out.extrapolation_gap > 1e-3) {
    std::ostringstream os;
    os << "q2 direct: angular cutoff extrapolation not converged (gap " << out.extrapolation_gap << ")";
    warn(os.str());
  }
  return out;
}

double calibrated_cb(const CollisionParams& params) {
  params.validate();
  static std::mutex mu;
  static std::map<std::tuple<int, double, double, double, double>, double> cache;
  const auto key = std::make_tuple(params.d, params.gamma, params.nu, params.c_pos, params.c_neg);
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }
  const int d = params.d;
  const double norm_const = std::pow(2.0 * kPi, -0.5 * d);
  Field maxwell = [&](std::span<const double> x) {
    double s = 0.0;
    for (double c : x) s += c * c;
    return norm_const * std::exp(-0.5 * s);
  };
  std::vector<double> v(d, 0.0);
  v[0] = 0.6;
  v[1] = 0.3;
  Q2Quad q;
  if (d == 2) {
    q = {64, 12, 24, 1e-3};
  } else {
    q = {32, 6, 16, 1e-2};
  }
  const auto parts = direct_parts(maxwell, v, norm(v) + 12.0, params, q);
  const double cb = finish_direct(parts, params.nu).value / parts.conv;
  std::lock_guard<std::mutex> lock(mu);
  cache[key] = cb;
  return cb;
}

double q1(const Distribution& f, std::span<const double> v, const SplitConfig& cfg, const CollisionParams& params,
          const CollisionQuad& quad) {
  const auto t = node_terms(f, v, cfg, params, quad);
  double gain = 0.0;
  for (std::size_t i = 0; i < t.nodes.size(); ++i) gain += f.values[t.nodes[i]] * t.kh[i];
  return gain - t.fv * t.loss_rate;
}

double q11(const Distribution& f, std::span<const double> v, const SplitConfig& cfg, const CollisionParams& params,
           const CollisionQuad& quad) {
  const auto t = node_terms(f, v, cfg, params, quad);
  const Grid& g = f.grid;
  const double lw = log_weight(cfg.weight, g.speed(t.flat));
  double gain = 0.0;
  for (std::size_t i = 0; i < t.nodes.size(); ++i) {
    const double ratio = std::exp(log_weight(cfg.weight, g.speed(t.nodes[i])) - lw);
    gain += f.values[t.nodes[i]] * ratio * t.kh[i];
  }
  return gain - t.fv * t.loss_rate;
}

Q12Parts q12(const Distribution& f, std::span<const double> v, const SplitConfig& cfg, const CollisionParams& params,
             const CollisionQuad& quad) {
  const auto t = node_terms(f, v, cfg, params, quad);
  const Grid& g = f.grid;
  const double lw = log_weight(cfg.weight, g.speed(t.flat));
  Q12Parts out{0.0, 0.0};
  for (std::size_t i = 0; i < t.nodes.size(); ++i) {
    const double ratio = std::exp(log_weight(cfg.weight, g.speed(t.nodes[i])) - lw);
    const double term = f.values[t.nodes[i]] * (1.0 - ratio) * t.kh[i];
    if (lattice_distance(g, t.flat, t.nodes[i]) <= cfg.unit_ball_radius)
      out.inside += term;
    else
      out.outside += term;
  }
  return out;
}

double q2(const Distribution& f, std::span<const double> v, const SplitConfig& cfg, const CollisionParams& params,
          const CollisionQuad& quad) {
  const Grid& g = f.grid;
  cfg.validate(g);
  quad.validate();
  const auto idx = node_of(g, v);
  const double fv = f.values[g.flat_index(idx)];
  if (cfg.q2_mode == Q2Mode::Direct) {
    Field F = [&](std::span<const double> x) { return f.interp(x); };
    const double support = norm(v) + g.L * std::sqrt(static_cast<double>(g.d));
    return fv * q2_direct_field(F, v, support, params, quad.q2).value;
  }
  const double cb = calibrated_cb(params);
  const double hd = std::pow(g.h(), g.d);
  std::vector<int> u(g.d);
  double conv = 0.0;
  for (std::size_t n = 0; n < g.size(); ++n) {
    g.multi_index(n, u);
    double s = 0.0;
    for (int i = 0; i < g.d; ++i) s += static_cast<double>(u[i] - idx[i]) * (u[i] - idx[i]);
    if (s > 0.0) conv += f.values[n] * std::pow(g.h() * std::sqrt(s), params.gamma);
  }
  return fv * cb * conv * hd;
}

double q_total(const Distribution& f, std::span<const double> v, const SplitConfig& cfg,
               const CollisionParams& params, const CollisionQuad& quad) {
  return q11(f, v, cfg, params, quad) + q12(f, v, cfg, params, quad).total() + q2(f, v, cfg, params, quad);
}

std::string Q11BoundReport::to_text() const {
  std::ostringstream os;
  os.precision(6);
  os << "v0_speed = " << speed0 << "\n"
     << "case = " << (case2 ? 2 : 1) << " (R = " << split_radius << ")\n"
     << "q11 = " << q11 << "\n"
     << "bound = " << bound << "\n"
     << "C_R = " << c_r << "\n"
     << "lambda = " << lambda << "\n"
     << "cone_measure = " << cone_measure << "\n"
     << "m = " << m << "\n"
     << "norm_alpha1 = " << norm_alpha1 << "\n";
  if (case2)
    os << "cone_samples = " << samples << "\n"
       << "half_speed = " << (half_speed_ok ? "ok" : "violated") << "\n"
       << "alpha3_monotone = " << (monotone_ok ? "ok" : "violated") << "\n"
       << "p2_constant = " << p2_constant << "\n";
  os << "holds = " << (holds ? "yes" : "no") << "\n";
  return os.str();
}

Q11BoundReport q11_upper_bound_check(const Distribution& f, const Weight& base, const AlphaCascade& cascade,
                                     const CollisionParams& params, const CollisionQuad& quad, double split_radius,
                                     int n_sphere) {
  params.validate();
  const Grid& g = f.grid;
  const int d = g.d;
  const Weight w1 = base.with_alpha(cascade.alpha1);
  const Weight w2 = base.with_alpha(cascade.alpha2);
  const Weight w3 = base.with_alpha(cascade.alpha3);
  const auto sup = weighted_sup(f, w2);

  Q11BoundReport rep{};
  rep.v0 = sup.v_star;
  rep.speed0 = norm(rep.v0);
  rep.m = sup.m;
  SplitConfig cfg;
  cfg.weight = w2;
  rep.q11 = q11(f, rep.v0, cfg, params, quad);

  const auto ls = level_set_constants(f, stats_bounds_of(f));
  rep.split_radius = split_radius > 0.0 ? split_radius : 4.0 * ls.r;
  rep.case2 = rep.speed0 > rep.split_radius;
  const auto cone = cone_set(f, rep.v0, ls, default_cone_delta(ls, d), n_sphere);
  const auto kf = cone_kf_lower_bound_check(f, rep.v0, cone, params, quad.hyper, 96);
  rep.lambda = kf.lambda;
  rep.cone_measure = cone.measure;
  const double nu = params.nu;
  const double c = (1.0 / (2.0 * nu)) * std::pow(2.0 * d, -nu / d);
  rep.c_r = rep.lambda * c * std::pow(cone.measure, 1.0 + nu / d) / weight_eval(w2, rep.v0);
  rep.norm_alpha1 = weighted_l1(f, w1);
  rep.bound = -rep.c_r * std::pow(bracket(rep.v0), 1.0 + params.gamma + nu) * std::pow(rep.m, 1.0 + nu / d) /
              std::pow(rep.norm_alpha1, nu / d);
  rep.holds = rep.q11 <= rep.bound;

  rep.half_speed_ok = true;
  rep.monotone_ok = true;
  rep.p2_constant = 0.0;
  if (rep.case2) {
    const double c2 = std::pow(2.0, base.p);
    const Weight w_sum = base.with_alpha(cascade.alpha2 + c2 * cascade.alpha3);
    const double lw_v0 = log_weight(w3, rep.speed0);
    std::vector<double> vp(d);
    for (const auto& s : cone.directions) {
      for (int j = 0; j < 7; ++j) {
        const double rho = g.h() * std::ldexp(1.0, j);
        for (int i = 0; i < d; ++i) vp[i] = rep.v0[i] + rho * s[i];
        const double sp = norm(vp);
        ++rep.samples;
        if (!(rep.speed0 < 2.0 * sp)) rep.half_speed_ok = false;
        if (log_weight(w3, 2.0 * sp) < lw_v0) rep.monotone_ok = false;
        const double lr = log_weight(w2, sp) + log_weight(w3, 2.0 * sp) - log_weight(w_sum, sp);
        rep.p2_constant = std::max(rep.p2_constant, std::exp(lr));
      }
    }
    rep.holds = rep.holds && rep.half_speed_ok && rep.monotone_ok;
  }
  return rep;
}

}  // namespace boltz
