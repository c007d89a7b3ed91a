#include "boltz/grid.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "boltz/kernel.hpp"
#include "boltz/warn.hpp"

namespace boltz {

void Grid::validate() const {
  if (d != 2 && d != 3) throw std::invalid_argument("grid dimension d must be 2 or 3");
  if (N < 16) throw std::invalid_argument("grid N must be at least 16");
  if (!(L >= 6.0)) throw std::invalid_argument("grid half-width L must be at least 6");
}

std::size_t Grid::size() const {
  std::size_t n = 1;
  for (int k = 0; k < d; ++k) n *= static_cast<std::size_t>(N);
  return n;
}

void Grid::multi_index(std::size_t flat, std::span<int> out) const {
  for (int k = 0; k < d; ++k) {
    out[k] = static_cast<int>(flat % N);
    flat /= N;
  }
}

void Grid::coords(std::size_t flat, std::span<double> out) const {
  const double hh = h();
  for (int k = 0; k < d; ++k) {
    out[k] = -L + static_cast<double>(flat % N) * hh;
    flat /= N;
  }
}

std::size_t Grid::flat_index(std::span<const int> idx) const {
  std::size_t flat = 0;
  for (int k = d - 1; k >= 0; --k) flat = flat * N + static_cast<std::size_t>(idx[k]);
  return flat;
}

std::vector<double> Grid::quad_weights() const {
  const std::size_t n = size();
  std::vector<double> w(n);
  const double cell = std::pow(h(), d);
  for (std::size_t i = 0; i < n; ++i) {
    double wi = cell;
    std::size_t f = i;
    for (int k = 0; k < d; ++k) {
      const auto ik = f % N;
      if (ik == 0 || ik == static_cast<std::size_t>(N - 1)) wi *= 0.5;
      f /= N;
    }
    w[i] = wi;
  }
  return w;
}

double Grid::speed(std::size_t flat) const {
  double s = 0.0;
  const double hh = h();
  for (int k = 0; k < d; ++k) {
    const double x = -L + static_cast<double>(flat % N) * hh;
    s += x * x;
    flat /= N;
  }
  return std::sqrt(s);
}

bool Grid::on_boundary(std::size_t flat) const {
  for (int k = 0; k < d; ++k) {
    const auto ik = flat % N;
    if (ik == 0 || ik == static_cast<std::size_t>(N - 1)) return true;
    flat /= N;
  }
  return false;
}

Distribution Distribution::zeros(const Grid& g) {
  g.validate();
  return Distribution{g, std::vector<double>(g.size(), 0.0)};
}

double Distribution::interp(std::span<const double> v) const {
  const int d = grid.d;
  const int N = grid.N;
  const double h = grid.h();
  int base[3];
  double frac[3];
  for (int k = 0; k < d; ++k) {
    const double t = (v[k] + grid.L) / h;
    if (!(t > -1.0) || !(t < N)) return 0.0;
    const int i = static_cast<int>(std::floor(t));
    base[k] = i;
    frac[k] = t - i;
  }
  double acc = 0.0;
  const int corners = 1 << d;
  for (int c = 0; c < corners; ++c) {
    double wgt = 1.0;
    std::size_t flat = 0;
    std::size_t stride = 1;
    bool inside = true;
    for (int k = 0; k < d; ++k) {
      const int bit = (c >> k) & 1;
      const int idx = base[k] + bit;
      if (idx < 0 || idx >= N) inside = false;
      wgt *= bit ? frac[k] : 1.0 - frac[k];
      flat += static_cast<std::size_t>(idx) * stride;
      stride *= N;
    }
    if (inside && wgt != 0.0) acc += wgt * values[flat];
  }
  return acc;
}

double Distribution::max_value() const {
  double m = 0.0;
  for (double x : values) m = std::max(m, x);
  return m;
}

void Distribution::validate() const {
  grid.validate();
  if (values.size() != grid.size()) throw std::invalid_argument("distribution size does not match grid");
  for (double x : values)
    if (!(x >= 0.0) || !std::isfinite(x))
      throw std::invalid_argument("distribution values must be finite and nonnegative");
}

Distribution maxwellian(const Grid& grid, double rho, std::span<const double> u, double T) {
  grid.validate();
  if (!(rho > 0.0) || !(T > 0.0)) throw std::invalid_argument("maxwellian: rho and T must be positive");
  if (static_cast<int>(u.size()) != grid.d) throw std::invalid_argument("maxwellian: u has wrong dimension");
  double unorm = 0.0;
  for (double c : u) unorm += c * c;
  unorm = std::sqrt(unorm);
  const double gap = std::max(grid.L - unorm, 0.0);
  if (std::exp(-gap * gap / (2.0 * T)) > 1e-8) warn("maxwellian: domain truncation too aggressive for this T and u");
  Distribution f = Distribution::zeros(grid);
  const double norm = rho * std::pow(2.0 * std::numbers::pi * T, -0.5 * grid.d);
  std::vector<double> x(grid.d);
  for (std::size_t i = 0; i < f.values.size(); ++i) {
    grid.coords(i, x);
    double r2 = 0.0;
    for (int k = 0; k < grid.d; ++k) r2 += (x[k] - u[k]) * (x[k] - u[k]);
    f.values[i] = norm * std::exp(-r2 / (2.0 * T));
  }
  return f;
}

namespace {

template <class Fn>
double quad(const Distribution& f, Fn weight_of_node) {
  const auto w = f.grid.quad_weights();
  double s = 0.0;
  for (std::size_t i = 0; i < f.values.size(); ++i) {
    if (f.values[i] == 0.0) continue;
    s += w[i] * f.values[i] * weight_of_node(i);
  }
  return s;
}

}  // namespace

double mass(const Distribution& f) {
  return quad(f, [](std::size_t) { return 1.0; });
}

std::vector<double> momentum(const Distribution& f) {
  std::vector<double> out(f.grid.d, 0.0);
  std::vector<double> x(f.grid.d);
  const auto w = f.grid.quad_weights();
  for (std::size_t i = 0; i < f.values.size(); ++i) {
    f.grid.coords(i, x);
    for (int k = 0; k < f.grid.d; ++k) out[k] += w[i] * f.values[i] * x[k];
  }
  return out;
}

double energy(const Distribution& f) {
  return quad(f, [&](std::size_t i) {
    const double s = f.grid.speed(i);
    return s * s;
  });
}

double moment_poly(const Distribution& f, double q) {
  if (!(q >= 0.0)) throw std::invalid_argument("moment_poly: q must be nonnegative");
  return quad(f, [&](std::size_t i) { return std::pow(bracket_norm(f.grid.speed(i)), q); });
}

double moment_exp(const Distribution& f, double alpha, double s) {
  if (!(alpha > 0.0)) throw std::invalid_argument("moment_exp: alpha must be positive");
  if (!(s > 0.0 && s <= 2.0)) throw std::invalid_argument("moment_exp: s must lie in (0, 2]");
  const double corner = bracket_norm(f.grid.L * std::sqrt(static_cast<double>(f.grid.d)));
  if (alpha * std::pow(corner, s) > 700.0) throw std::overflow_error("moment_exp: weight overflows on this grid");
  return quad(f, [&](std::size_t i) { return std::exp(alpha * std::pow(bracket_norm(f.grid.speed(i)), s)); });
}

double moment_ml(const Distribution& f, double alpha, double s, MLRoute route, int Q) {
  if (!(alpha > 0.0)) throw std::invalid_argument("moment_ml: alpha must be positive");
  if (!(s > 0.0 && s <= 2.0)) throw std::invalid_argument("moment_ml: s must lie in (0, 2]");
  const double a = 2.0 / s;
  const double c = std::pow(alpha, a);
  if (route == MLRoute::Direct) {
    return quad(f, [&](std::size_t i) {
      const double b = bracket_norm(f.grid.speed(i));
      return mittag_leffler(a, c * b * b);
    });
  }
  if (Q < 20) throw std::invalid_argument("moment_ml: partial_sum route needs Q >= 20");
  double sum = 0.0;
  double last = 0.0, before_last = 0.0;
  for (int q = 0; q <= Q; ++q) {
    const double m2q = moment_poly(f, 2.0 * q);
    const double term = m2q * std::exp(q * std::log(c) - std::lgamma(a * q + 1.0));
    sum += term;
    before_last = last;
    last = term;
  }
  if ((last > 0.0 && last >= before_last) || last > 1e-10 * sum)
    throw std::runtime_error("moment_ml: partial sum has not entered its decaying regime by Q");
  return sum;
}

double entropy(const Distribution& f) {
  return quad(f, [&](std::size_t i) { return std::log(f.values[i]); });
}

double entropy_positive_part(const Distribution& f) {
  return quad(f, [&](std::size_t i) { return std::max(std::log(f.values[i]), 0.0); });
}

double weighted_l1(const Distribution& f, const Weight& w) {
  return quad(f, [&](std::size_t i) { return std::exp(log_weight(w, f.grid.speed(i))); });
}

SupResult weighted_sup(const Distribution& f, const Weight& w) {
  SupResult r{-1.0, std::vector<double>(f.grid.d, 0.0), 0};
  for (std::size_t i = 0; i < f.values.size(); ++i) {
    const double fv = f.values[i];
    const double val = fv > 0.0 ? std::exp(std::log(fv) + log_weight(w, f.grid.speed(i))) : 0.0;
    if (val > r.m) {
      r.m = val;
      r.index = i;
    }
  }
  f.grid.coords(r.index, r.v_star);
  return r;
}

double boundary_ratio(const Distribution& f) {
  const double mx = f.max_value();
  if (mx == 0.0) return 0.0;
  double b = 0.0;
  for (std::size_t i = 0; i < f.values.size(); ++i)
    if (f.grid.on_boundary(i)) b = std::max(b, f.values[i]);
  return b / mx;
}

void StatsBounds::validate() const {
  if (!(M1 > 0.0 && M1 <= M0)) throw std::invalid_argument("StatsBounds: need 0 < M1 <= M0");
  if (!std::isfinite(E0) || !std::isfinite(H0)) throw std::invalid_argument("StatsBounds: E0, H0 must be finite");
}

StatsBounds stats_bounds_of(const Distribution& f, double slack) {
  const double m = mass(f);
  const double h = entropy_positive_part(f);
  return StatsBounds{m * (1.0 + slack), m * (1.0 - slack), energy(f) * (1.0 + slack) + slack,
                     h * (1.0 + slack) + slack};
}

LevelSet level_set_constants(const Distribution& f, const StatsBounds& bounds) {
  bounds.validate();
  const double m = mass(f);
  if (m > bounds.M0 || m < bounds.M1) throw std::invalid_argument("level_set_constants: mass outside [M1, M0]");
  if (energy(f) > bounds.E0) throw std::invalid_argument("level_set_constants: energy exceeds E0");
  if (entropy_positive_part(f) > bounds.H0)
    throw std::invalid_argument("level_set_constants: int f log+ f exceeds H0");
  LevelSet ls{};
  int k = -20;
  while (bounds.E0 / std::ldexp(1.0, 2 * k) >= 0.5 * bounds.M1) ++k;
  ls.r = std::ldexp(1.0, k);
  const int d = f.grid.d;
  ls.l = bounds.M1 / (16.0 * unit_ball_volume(d) * std::pow(ls.r, d));
  ls.m = bounds.M1 * std::exp(-8.0 * bounds.H0 / bounds.M1) / 8.0;
  ls.mask.assign(f.values.size(), 0);
  const auto w = f.grid.quad_weights();
  ls.measured = 0.0;
  for (std::size_t i = 0; i < f.values.size(); ++i) {
    if (f.values[i] > ls.l && f.grid.speed(i) <= ls.r) {
      ls.mask[i] = 1;
      ls.measured += w[i];
    }
  }
  return ls;
}

void write_btgrid(std::ostream& os, const Distribution& f) {
  os << "BTGRID1\n" << f.grid.d << "\n" << f.grid.N << "\n";
  os << std::setprecision(17) << f.grid.L << "\n";
  for (double x : f.values) os << x << "\n";
}

void write_btgrid(const std::string& path, const Distribution& f) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  write_btgrid(os, f);
}

Distribution read_btgrid(std::istream& is) {
  std::string magic;
  std::getline(is, magic);
  if (magic != "BTGRID1") throw std::runtime_error("read_btgrid: bad magic '" + magic + "'");
  Grid g;
  if (!(is >> g.d >> g.N >> g.L)) throw std::runtime_error("read_btgrid: malformed header");
  g.validate();
  Distribution f{g, std::vector<double>(g.size())};
  for (double& x : f.values)
    if (!(is >> x)) throw std::runtime_error("read_btgrid: truncated value list");
  return f;
}

Distribution read_btgrid(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path);
  return read_btgrid(is);
}

}  // namespace boltz
