#include "boltz/carleman.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

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

// Orthonormal basis of the hyperplane orthogonal to unit vector n.
std::array<std::array<double, 3>, 2> plane_basis(int d, const double* n) {
  std::array<std::array<double, 3>, 2> e{};
  if (d == 2) {
    e[0] = {-n[1], n[0], 0.0};
    return e;
  }
  std::array<double, 3> a{1.0, 0.0, 0.0};
  if (std::abs(n[0]) > 0.6) a = {0.0, 1.0, 0.0};
  double dot = a[0] * n[0] + a[1] * n[1] + a[2] * n[2];
  for (int i = 0; i < 3; ++i) e[0][i] = a[i] - dot * n[i];
  double l = std::sqrt(e[0][0] * e[0][0] + e[0][1] * e[0][1] + e[0][2] * e[0][2]);
  for (int i = 0; i < 3; ++i) e[0][i] /= l;
  e[1] = {n[1] * e[0][2] - n[2] * e[0][1], n[2] * e[0][0] - n[0] * e[0][2],
          n[0] * e[0][1] - n[1] * e[0][0]};
  return e;
}

template <class F>
double hyperplane_sum(F&& f_at, int d, std::span<const double> v, std::span<const double> vp,
                      const CollisionParams& params, const HyperplaneQuad& quad, bool equivalent,
                      double* edge_value) {
  if (static_cast<int>(v.size()) != d || static_cast<int>(vp.size()) != d)
    throw std::invalid_argument("kf: vector dimension does not match d");
  double z[3] = {0, 0, 0};
  double zn = 0.0;
  for (int i = 0; i < d; ++i) {
    z[i] = vp[i] - v[i];
    zn += z[i] * z[i];
  }
  zn = std::sqrt(zn);
  if (zn == 0.0) throw std::invalid_argument("kf: v and v' must differ");
  for (int i = 0; i < d; ++i) z[i] /= zn;
  const auto e = plane_basis(d, z);
  const double ds = quad.w_max / quad.n_radial;
  const double power = 1.0 + params.gamma + params.nu;
  double pt[3];
  double sum = 0.0;
  double edge = 0.0;
  for (int k = 0; k < quad.n_radial; ++k) {
    const double s = (k + 0.5) * ds;
    const double wt = equivalent ? std::pow(s, power) : carleman_weight(zn, s, params);
    if (d == 2) {
      double acc = 0.0;
      for (int sign = -1; sign <= 1; sign += 2) {
        for (int i = 0; i < 2; ++i) pt[i] = v[i] + sign * s * e[0][i];
        double fv = f_at(std::span<const double>(pt, 2));
        acc += fv;
        if (k == quad.n_radial - 1) edge = std::max(edge, std::abs(fv));
      }
      sum += wt * acc * ds;
    } else {
      const double dphi = 2.0 * kPi / quad.n_phi;
      double acc = 0.0;
      for (int j = 0; j < quad.n_phi; ++j) {
        const double phi = (j + 0.5) * dphi;
        const double c = std::cos(phi), sn = std::sin(phi);
        for (int i = 0; i < 3; ++i) pt[i] = v[i] + s * (c * e[0][i] + sn * e[1][i]);
        double fv = f_at(std::span<const double>(pt, 3));
        acc += fv;
        if (k == quad.n_radial - 1) edge = std::max(edge, std::abs(fv));
      }
      sum += wt * acc * s * ds * dphi;
    }
  }
  if (edge_value) *edge_value = edge;
  if (equivalent) return sum * std::pow(zn, -d - params.nu);
  return std::ldexp(1.0, d - 1) / zn * sum;
}

double dist_kf(const Distribution& f, std::span<const double> v, std::span<const double> vp,
               const CollisionParams& params, const HyperplaneQuad& quad, bool equivalent) {
  params.validate();
  quad.validate();
  if (f.grid.d != params.d) throw std::invalid_argument("kf: grid and kernel dimensions differ");
  double edge = 0.0;
  double out = hyperplane_sum([&](std::span<const double> x) { return f.interp(x); }, params.d, v, vp,
                              params, quad, equivalent, &edge);
  const double fmax = f.max_value();
  if (fmax > 0.0 && edge > 1e-10 * fmax) {
    std::ostringstream os;
    os << "kf: distribution mass reaches the hyperplane cutoff w_max = " << quad.w_max;
    warn(os.str());
  }
  return out;
}

}  // namespace

void HyperplaneQuad::validate() const {
  if (n_radial < 64) throw std::invalid_argument("HyperplaneQuad: n_radial must be at least 64");
  if (!(w_max > 0.0)) throw std::invalid_argument("HyperplaneQuad: w_max must be positive");
  if (n_phi < 4) throw std::invalid_argument("HyperplaneQuad: n_phi must be at least 4");
}

HyperplaneQuad HyperplaneQuad::for_grid(const Grid& g, double density) {
  g.validate();
  if (!(density > 0.0)) throw std::invalid_argument("HyperplaneQuad: density must be positive");
  HyperplaneQuad q;
  q.w_max = 2.0 * g.L * std::sqrt(static_cast<double>(g.d));
  q.n_radial = std::max(64, static_cast<int>(std::ceil(q.w_max / g.h() * density)));
  q.n_phi = std::max(16, static_cast<int>(std::ceil(8.0 * density)) * 4);
  return q;
}

double carleman_weight(double zn, double wn, const CollisionParams& params) {
  const double r2 = zn * zn + wn * wn;
  const double r = std::sqrt(r2);
  const double sin_theta = 2.0 * zn * wn / r2;
  const double b = angular_b_sin(sin_theta, wn > zn, params);
  double out = std::pow(r, params.gamma) * b;
  if (params.d != 2) out *= std::pow(r, 2 - params.d);
  return out;
}

double kf_hyperplane(const Distribution& f, std::span<const double> v, std::span<const double> vp,
                     const CollisionParams& params, const HyperplaneQuad& quad) {
  return dist_kf(f, v, vp, params, quad, false);
}

double kf_hyperplane(const Field& f, int d, std::span<const double> v, std::span<const double> vp,
                     const CollisionParams& params, const HyperplaneQuad& quad) {
  params.validate();
  quad.validate();
  if (d != params.d) throw std::invalid_argument("kf: dimension mismatch");
  return hyperplane_sum(f, d, v, vp, params, quad, false, nullptr);
}

double kf_equivalent(const Distribution& f, std::span<const double> v, std::span<const double> vp,
                     const CollisionParams& params, const HyperplaneQuad& quad) {
  return dist_kf(f, v, vp, params, quad, true);
}

CarlemanQuad CarlemanQuad::refined() const {
  CarlemanQuad q = *this;
  q.hyper = hyper.refined();
  q.n_angle *= 2;
  q.n_speed *= 2;
  q.n_theta *= 2;
  q.theta_min *= 0.5;
  return q;
}

CarlemanQuad CarlemanQuad::for_grid(const Grid& g) {
  CarlemanQuad q;
  q.hyper = HyperplaneQuad::for_grid(g);
  return q;
}

IdentityCheck carleman_identity_check(const Distribution& f, const TestFunction& H, std::span<const double> v,
                                      const CollisionParams& params, const CarlemanQuad& quad) {
  params.validate();
  quad.hyper.validate();
  if (params.d != 2 || f.grid.d != 2)
    throw std::invalid_argument("carleman_identity_check supports d = 2");
  if (v.size() != 2) throw std::invalid_argument("carleman_identity_check: v must have 2 components");
  if (quad.n_angle < 8 || quad.n_speed < 2 || quad.n_theta < 2 || !(quad.theta_min > 0.0 && quad.theta_min < 0.5))
    throw std::invalid_argument("carleman_identity_check: invalid quadrature resolution");

  const double reach = f.grid.L * std::sqrt(2.0) + norm(v);
  const GaussRule gl = gauss_legendre(8);
  const double dphi = 2.0 * kPi / quad.n_angle;

  // lhs: v_* = v - rho u, sigma = R(theta) u.
  const double rho_max = std::sqrt(2.0) * reach;
  auto angular_layer = [&](double t_lo, double t_hi, int panels, bool log_scale) {
    double total = 0.0;
    const double a = log_scale ? std::log(t_lo) : t_lo;
    const double b = log_scale ? std::log(t_hi) : t_hi;
    const double width = (b - a) / panels;
    for (int pt = 0; pt < panels; ++pt) {
      for (std::size_t q = 0; q < gl.nodes.size(); ++q) {
        const double x = a + width * (pt + 0.5 * (gl.nodes[q] + 1.0));
        const double theta = log_scale ? std::exp(x) : x;
        const double jac = 0.5 * width * gl.weights[q] * (log_scale ? theta : 1.0);
        const double bt = angular_b_sin(std::sin(theta), theta < 0.5 * kPi, params);
        double inner = 0.0;
        for (int ia = 0; ia < quad.n_angle; ++ia) {
          const double phi = (ia + 0.5) * dphi;
          const double u[2] = {std::cos(phi), std::sin(phi)};
          for (int sign = -1; sign <= 1; sign += 2) {
            const double th = sign * theta;
            const double sg[2] = {std::cos(th) * u[0] - std::sin(th) * u[1],
                                  std::sin(th) * u[0] + std::cos(th) * u[1]};
            const double rwidth = rho_max / quad.n_speed;
            for (int pr = 0; pr < quad.n_speed; ++pr) {
              for (std::size_t qr = 0; qr < gl.nodes.size(); ++qr) {
                const double rho = rwidth * (pr + 0.5 * (gl.nodes[qr] + 1.0));
                const double wr = 0.5 * rwidth * gl.weights[qr];
                const double vpr[2] = {v[0] - 0.5 * rho * u[0] + 0.5 * rho * sg[0],
                                       v[1] - 0.5 * rho * u[1] + 0.5 * rho * sg[1]};
                const double vps[2] = {v[0] - 0.5 * rho * u[0] - 0.5 * rho * sg[0],
                                       v[1] - 0.5 * rho * u[1] - 0.5 * rho * sg[1]};
                const double hv = H(v, std::span<const double>(vpr, 2));
                if (hv == 0.0) continue;
                const double fs = f.interp(std::span<const double>(vps, 2));
                inner += wr * hv * fs * std::pow(rho, params.gamma) * rho;
              }
            }
          }
        }
        total += jac * bt * inner * dphi;
      }
    }
    return total;
  };

  const double t0 = quad.theta_min;
  const double split = 1.0;
  const int log_panels = std::max(2, static_cast<int>(std::ceil(quad.n_theta * std::log10(split / t0) / 3.0)));
  double base = angular_layer(t0, split, log_panels, true) + angular_layer(split, kPi, std::max(2, quad.n_theta / 2), false);
  const int sliver_panels = std::max(1, quad.n_theta / 4);
  const double l1 = base;
  const double l2 = l1 + angular_layer(0.5 * t0, t0, sliver_panels, true);
  const double l3 = l2 + angular_layer(0.25 * t0, 0.5 * t0, sliver_panels, true);
  const double factor = 1.0 / (std::pow(2.0, 2.0 - params.nu) - 1.0);
  const double e2 = l2 + (l2 - l1) * factor;
  const double e3 = l3 + (l3 - l2) * factor;
  const double lhs = e3;
  const double gap = lhs != 0.0 ? std::abs(e3 - e2) / std::abs(lhs) : 0.0;

  // rhs: v' = v + rho omega with K_f on the orthogonal line.
  double rhs = 0.0;
  {
    const double r_lo = 1e-6 * reach;
    const double a = std::log(r_lo), b = std::log(reach);
    const int panels = quad.n_speed;
    const double width = (b - a) / panels;
    for (int ia = 0; ia < quad.n_angle; ++ia) {
      const double phi = (ia + 0.5) * dphi;
      const double om[2] = {std::cos(phi), std::sin(phi)};
      for (int pr = 0; pr < panels; ++pr) {
        for (std::size_t q = 0; q < gl.nodes.size(); ++q) {
          const double rho = std::exp(a + width * (pr + 0.5 * (gl.nodes[q] + 1.0)));
          const double wr = 0.5 * width * gl.weights[q] * rho;
          const double vpr[2] = {v[0] + rho * om[0], v[1] + rho * om[1]};
          const double hv = H(v, std::span<const double>(vpr, 2));
          if (hv == 0.0) continue;
          const double k = kf_hyperplane(f, v, std::span<const double>(vpr, 2), params, quad.hyper);
          rhs += wr * rho * hv * k * dphi;
        }
      }
    }
  }

  if (gap > 1e-2) {
    std::ostringstream os;
    os << "carleman_identity_check: angular cutoff extrapolation not converged (gap " << gap << ")";
    warn(os.str());
  }
  IdentityCheck out{};
  out.lhs = lhs;
  out.rhs = rhs;
  out.relerr = (lhs == 0.0 && rhs == 0.0) ? 0.0 : std::abs(lhs - rhs) / std::max(std::abs(rhs), std::abs(lhs));
  out.lhs_cutoff = l1;
  out.extrapolation_gap = gap;
  return out;
}

ChangeOfVars change_of_vars_check(const Field& g, int d, const ChangeOfVarsQuad& quad) {
  if (d != 2 && d != 3) throw std::invalid_argument("change_of_vars_check: d must be 2 or 3");
  if (quad.n_sphere < 8 || !(quad.radius > 0.0) || !(quad.panel > 0.0))
    throw std::invalid_argument("change_of_vars_check: invalid quadrature");
  const GaussRule gl = gauss_legendre(8);
  const int panels = static_cast<int>(std::ceil(quad.radius / quad.panel - 1e-12));
  // int_0^R fn(s) ds with panel edges at multiples of quad.panel.
  auto radial = [&](auto&& fn) {
    double total = 0.0;
    for (int p = 0; p < panels; ++p) {
      const double a = p * quad.panel;
      const double b = std::min(quad.radius, a + quad.panel);
      for (std::size_t q = 0; q < gl.nodes.size(); ++q) {
        const double s = 0.5 * (a + b) + 0.5 * (b - a) * gl.nodes[q];
        total += 0.5 * (b - a) * gl.weights[q] * fn(s);
      }
    }
    return total;
  };
  double lhs = 0.0, rhs = 0.0;
  if (d == 2) {
    const int n = quad.n_sphere;
    const double dphi = 2.0 * kPi / n;
    for (int k = 0; k < n; ++k) {
      const double phi = (k + 0.5) * dphi;
      const double c = std::cos(phi), s = std::sin(phi);
      // line orthogonal to sigma = (c, s), both half-lines
      lhs += dphi * radial([&](double t) {
               const double p1[2] = {-s * t, c * t};
               const double p2[2] = {s * t, -c * t};
               return g(std::span<const double>(p1, 2)) + g(std::span<const double>(p2, 2));
             });
      rhs += dphi * radial([&](double r) {
               const double p[2] = {c * r, s * r};
               return g(std::span<const double>(p, 2));
             });
    }
  } else {
    const int n_cos = std::max(8, static_cast<int>(std::lround(std::sqrt(quad.n_sphere / 2.0))));
    const int n_az = 2 * n_cos;
    const GaussRule gc = gauss_legendre(n_cos);
    const double daz = 2.0 * kPi / n_az;
    for (int i = 0; i < n_cos; ++i) {
      const double ct = gc.nodes[i];
      const double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
      for (int j = 0; j < n_az; ++j) {
        const double az = (j + 0.5) * daz;
        const double sigma[3] = {st * std::cos(az), st * std::sin(az), ct};
        const double wsig = gc.weights[i] * daz;
        const auto e = plane_basis(3, sigma);
        double plane = 0.0;
        for (int k = 0; k < n_az; ++k) {
          const double psi = (k + 0.5) * daz;
          const double cp = std::cos(psi), sp = std::sin(psi);
          plane += daz * radial([&](double t) {
                     const double p[3] = {t * (cp * e[0][0] + sp * e[1][0]), t * (cp * e[0][1] + sp * e[1][1]),
                                          t * (cp * e[0][2] + sp * e[1][2])};
                     return g(std::span<const double>(p, 3)) * t;
                   });
        }
        lhs += wsig * plane;
        rhs += wsig * radial([&](double r) {
                 const double p[3] = {sigma[0] * r, sigma[1] * r, sigma[2] * r};
                 return g(std::span<const double>(p, 3)) * r;
               });
      }
    }
  }
  ChangeOfVars out{lhs, rhs, std::numeric_limits<double>::quiet_NaN()};
  if (rhs != 0.0) out.c_d = lhs / rhs;
  return out;
}

double ConeSet::max_abs_dot_v() const {
  double best = 0.0;
  for (const auto& s : directions) {
    double dot = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) dot += s[i] * v[i];
    best = std::max(best, std::abs(dot));
  }
  return best;
}

bool ConeSet::symmetric() const {
  for (const auto& s : directions) {
    bool found = false;
    for (const auto& t : directions) {
      bool neg = true;
      for (std::size_t i = 0; i < s.size(); ++i)
        if (t[i] != -s[i]) neg = false;
      if (neg) {
        found = true;
        break;
      }
    }
    if (!found) return false;
  }
  return true;
}

std::vector<std::vector<double>> sphere_nodes(int d, int n) {
  if (d != 2 && d != 3) throw std::invalid_argument("sphere_nodes: d must be 2 or 3");
  if (n < 4 || n % 2 != 0) throw std::invalid_argument("sphere_nodes: node count must be even and at least 4");
  const int half = n / 2;
  std::vector<std::vector<double>> out;
  out.reserve(n);
  if (d == 2) {
    for (int k = 0; k < half; ++k) {
      const double phi = kPi * (k + 0.5) / half;
      out.push_back({std::cos(phi), std::sin(phi)});
    }
  } else {
    const double golden = kPi * (3.0 - std::sqrt(5.0));
    for (int k = 0; k < half; ++k) {
      const double z = (k + 0.5) / half;
      const double rad = std::sqrt(std::max(0.0, 1.0 - z * z));
      const double phi = golden * k;
      out.push_back({rad * std::cos(phi), rad * std::sin(phi), z});
    }
  }
  for (int k = 0; k < half; ++k) {
    std::vector<double> neg = out[k];
    for (double& c : neg) c = -c;
    out.push_back(std::move(neg));
  }
  return out;
}

double default_cone_delta(const LevelSet& ls, int d) { return ls.m / (8.0 * sphere_measure(d - 2)); }

ConeSet cone_set(const Distribution& f, std::span<const double> v, const LevelSet& levelset, double delta,
                 int n_nodes) {
  const Grid& g = f.grid;
  g.validate();
  const int d = g.d;
  if (static_cast<int>(v.size()) != d) throw std::invalid_argument("cone_set: v has the wrong dimension");
  if (!(delta > 0.0)) throw std::invalid_argument("cone_set: delta must be positive");
  if (levelset.mask.size() != g.size()) throw std::invalid_argument("cone_set: level set does not match the grid");
  const auto nodes = sphere_nodes(d, n_nodes);
  const double h = g.h();
  const double ds = 0.25 * h;
  const double reach = norm(v) + levelset.r + 2.0 * h;
  const int ns = static_cast<int>(std::ceil(reach / ds));

  auto in_set = [&](const double* x) {
    int idx[3];
    for (int i = 0; i < d; ++i) {
      const long k = std::lround((x[i] + g.L) / h);
      if (k < 0 || k >= g.N) return false;
      idx[i] = static_cast<int>(k);
    }
    return levelset.mask[g.flat_index(std::span<const int>(idx, d))] != 0;
  };

  const int half = n_nodes / 2;
  std::vector<double> section(half, 0.0);
  for (int k = 0; k < half; ++k) {
    const auto e = plane_basis(d, nodes[k].data());
    long count = 0;
    double x[3];
    if (d == 2) {
      for (int i = -ns; i < ns; ++i) {
        const double t = (i + 0.5) * ds;
        for (int c = 0; c < 2; ++c) x[c] = v[c] + t * e[0][c];
        count += in_set(x);
      }
      section[k] = count * ds;
    } else {
      for (int i = -ns; i < ns; ++i) {
        const double a = (i + 0.5) * ds;
        for (int j = -ns; j < ns; ++j) {
          const double b = (j + 0.5) * ds;
          for (int c = 0; c < 3; ++c) x[c] = v[c] + a * e[0][c] + b * e[1][c];
          count += in_set(x);
        }
      }
      section[k] = count * ds * ds;
    }
  }

  ConeSet cone;
  cone.v.assign(v.begin(), v.end());
  cone.delta = delta;
  cone.sphere_nodes = n_nodes;
  cone.node_weight = sphere_measure(d - 1) / n_nodes;
  std::vector<int> chosen;
  for (int k = 0; k < half; ++k)
    if (section[k] > delta) chosen.push_back(k);
  for (int k : chosen) {
    cone.directions.push_back(nodes[k]);
    cone.sections.push_back(section[k]);
  }
  for (int k : chosen) {
    cone.directions.push_back(nodes[k + half]);
    cone.sections.push_back(section[k]);
  }
  cone.measure = cone.node_weight * static_cast<double>(cone.directions.size());
  if (cone.directions.empty()) {
    std::ostringstream os;
    os << "cone_set: A(v) is empty (largest section " << *std::max_element(section.begin(), section.end())
       << ", threshold " << delta << ", level-set measure " << levelset.measured << ")";
    throw std::runtime_error(os.str());
  }
  return cone;
}

ConeKfReport cone_kf_lower_bound_check(const Distribution& f, std::span<const double> v, const ConeSet& cone,
                                       const CollisionParams& params, const HyperplaneQuad& quad,
                                       int n_samples) {
  if (cone.directions.empty()) throw std::invalid_argument("cone_kf_lower_bound_check: empty cone");
  if (n_samples < 1) throw std::invalid_argument("cone_kf_lower_bound_check: n_samples must be positive");
  const int d = params.d;
  const double h = f.grid.h();
  constexpr int kRadii = 6;
  const int n_dir = std::max(1, std::min<int>(static_cast<int>(cone.directions.size()), n_samples / kRadii));
  const double stride = static_cast<double>(cone.directions.size()) / n_dir;
  double bracket2 = 1.0;
  for (double c : v) bracket2 += c * c;
  const double scale = std::pow(bracket2, 0.5 * (1.0 + params.gamma + params.nu));

  ConeKfReport rep{std::numeric_limits<double>::infinity(), 0.0, 0, {}};
  std::vector<double> vp(d);
  for (int i = 0; i < n_dir; ++i) {
    const auto& s = cone.directions[static_cast<std::size_t>(i * stride)];
    for (int j = 0; j < kRadii; ++j) {
      const double rho = h * std::ldexp(1.0, j);
      for (int c = 0; c < d; ++c) vp[c] = v[c] + rho * s[c];
      const double k = kf_hyperplane(f, v, vp, params, quad);
      const double val = k * std::pow(rho, d + params.nu) / scale;
      ++rep.samples;
      if (val < rep.lambda) {
        rep.lambda = val;
        rep.worst_vp = vp;
      }
      rep.max_scaled = std::max(rep.max_scaled, val);
    }
  }
  return rep;
}

ConeIntegralReport cone_integral_lower_bound_check(const Field& g, std::span<const double> v_tilde,
                                                   double m_tilde, const ConeSet& cone, double nu,
                                                   double apex_radius, double reach, double panel) {
  const int d = static_cast<int>(v_tilde.size());
  if (d != 2 && d != 3) throw std::invalid_argument("cone_integral_lower_bound_check: d must be 2 or 3");
  if (cone.directions.empty()) throw std::invalid_argument("cone_integral_lower_bound_check: empty cone");
  if (!(nu > 0.0 && nu <= 1.0)) throw std::invalid_argument("cone_integral_lower_bound_check: nu must lie in (0, 1]");
  if (!(m_tilde > 0.0) || !(apex_radius > 0.0) || !(reach > apex_radius) || !(panel > 0.0))
    throw std::invalid_argument("cone_integral_lower_bound_check: invalid arguments");
  const GaussRule gl = gauss_legendre(8);
  // Panels with edges at multiples of `panel`, covering [lo, hi].
  auto radial = [&](double lo, double hi, auto&& fn) {
    double total = 0.0;
    double a = lo;
    while (a < hi) {
      double b = std::min(hi, (std::floor(a / panel + 1e-12) + 1.0) * panel);
      if (b <= a) b = std::min(hi, a + panel);
      for (std::size_t q = 0; q < gl.nodes.size(); ++q) {
        const double s = 0.5 * (a + b) + 0.5 * (b - a) * gl.nodes[q];
        total += 0.5 * (b - a) * gl.weights[q] * fn(s);
      }
      a = b;
    }
    return total;
  };
  std::vector<double> x(d);
  double lhs = 0.0, int_g = 0.0;
  for (const auto& s : cone.directions) {
    auto at = [&](double rho) {
      for (int c = 0; c < d; ++c) x[c] = v_tilde[c] + rho * s[c];
      return g(x);
    };
    const double tail = radial(apex_radius, reach, [&](double rho) { return at(rho) * std::pow(rho, -1.0 - nu); });
    lhs += cone.node_weight * (m_tilde * std::pow(apex_radius, -nu) / nu - tail);
    int_g += cone.node_weight * radial(0.0, reach, [&](double rho) { return std::abs(at(rho)) * std::pow(rho, d - 1); });
  }
  ConeIntegralReport rep{};
  rep.lhs = lhs;
  rep.int_g = int_g;
  rep.constant = (1.0 / (2.0 * nu)) * std::pow(2.0 * d, -nu / d);
  const double mu = cone.measure;
  rep.rhs = int_g > 0.0 ? rep.constant * std::pow(m_tilde * mu, 1.0 + nu / d) / std::pow(int_g, nu / d)
                        : std::numeric_limits<double>::infinity();
  rep.ratio = lhs / rep.rhs;
  rep.r_worst = std::pow(2.0 * d * int_g / (mu * m_tilde), 1.0 / d);
  rep.worst_closed = mu * m_tilde * std::pow(rep.r_worst, -nu) / (2.0 * nu);
  if (int_g > 0.0) {
    // (m/2) int over C \ B_r of |x|^{-d-nu}, radial part in log(rho).
    const double a = std::log(rep.r_worst);
    const int panels = 120;
    const double width = 60.0 / panels;
    double radial_part = 0.0;
    for (int p = 0; p < panels; ++p)
      for (std::size_t q = 0; q < gl.nodes.size(); ++q) {
        const double rho = std::exp(a + width * (p + 0.5 * (gl.nodes[q] + 1.0)));
        radial_part += 0.5 * width * gl.weights[q] * std::pow(rho, -nu);
      }
    rep.worst_direct = 0.5 * m_tilde * mu * radial_part;
  } else {
    rep.worst_direct = std::numeric_limits<double>::infinity();
  }
  return rep;
}

}  // namespace boltz
