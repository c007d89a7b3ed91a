#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "boltz/collision.hpp"
#include "boltz/detail/lattice.hpp"

namespace boltz {

namespace {

// Bilinear interpolation taps of every quadrature node on the hyperplane, merged by lattice offset.
// The fractional parts do not depend on the base node, so one stencil serves the whole grid.
struct Tap {
  int ox, oy;
  double c;
};

struct LineStencil {
  int a, b;
  std::size_t begin, end;  // taps sorted by (oy, ox)
};

}  // namespace

struct CollisionOperator::Impl {
  Grid grid;
  CollisionParams params;
  SplitConfig cfg;
  CollisionQuad quad;
  double cb = 0.0;
  double hd = 0.0;
  int n_line = 0;
  std::vector<LineStencil> lines;
  std::vector<Tap> taps;
  std::vector<double> loss_kernel;  // kappa + far field, over offsets in [-(N-1), N-1]^2
  std::vector<double> corr_kernel;  // Q2 kernel minus loss_kernel
  double gain_skip = 1e-15;

  int width() const { return 2 * grid.N - 1; }
  std::size_t offset_index(int oa, int ob) const {
    return static_cast<std::size_t>(oa + grid.N - 1) + static_cast<std::size_t>(ob + grid.N - 1) * width();
  }

  void build();
  // Gain term for rows [j0, j1), written to gain[(j - j0) N + i].
  void gain_rows(const std::vector<double>& fv, int j0, int j1, double fmax, double* gain) const;
};

void CollisionOperator::Impl::build() {
  const int N = grid.N;
  const double h = grid.h();
  hd = h * h;
  cb = calibrated_cb(params);
  const double excl = cfg.exclusion(grid) * (1.0 + 1e-9);
  const double r1 = 2.0 * grid.L * std::sqrt(2.0);
  const double rcut = r1 + quad.transition;
  n_line = quad.hyper.n_radial;
  const double ds = quad.hyper.w_max / n_line;
  const double step = ds / h;

  loss_kernel.assign(static_cast<std::size_t>(width()) * width(), 0.0);
  std::vector<double> wk(n_line);
  std::vector<Tap> raw;
  detail::for_half_lattice(2, static_cast<int>(std::ceil(rcut / h)), [&](const int* z) {
    const double zn = h * std::hypot(static_cast<double>(z[0]), static_cast<double>(z[1]));
    if (zn <= excl || zn > rcut) return;
    for (int k = 0; k < n_line; ++k) wk[k] = 2.0 / zn * ds * carleman_weight(zn, (k + 0.5) * ds, params);
    const double ex = -z[1] * h / zn, ey = z[0] * h / zn;
    const double dx = ex * step, dy = ey * step;
    if (std::abs(z[0]) <= N - 1 && std::abs(z[1]) <= N - 1) {
      raw.clear();
      for (int k = 0; k < n_line; ++k)
        for (int sign = -1; sign <= 1; sign += 2) {
          const double x = sign * (k + 0.5) * dx, y = sign * (k + 0.5) * dy;
          const int ix = static_cast<int>(std::floor(x)), iy = static_cast<int>(std::floor(y));
          const double fx = x - ix, fy = y - iy;
          raw.push_back({ix, iy, wk[k] * (1 - fx) * (1 - fy)});
          raw.push_back({ix + 1, iy, wk[k] * fx * (1 - fy)});
          raw.push_back({ix, iy + 1, wk[k] * (1 - fx) * fy});
          raw.push_back({ix + 1, iy + 1, wk[k] * fx * fy});
        }
      std::sort(raw.begin(), raw.end(),
                [](const Tap& l, const Tap& r) { return l.oy != r.oy ? l.oy < r.oy : l.ox < r.ox; });
      const std::size_t begin = taps.size();
      for (const auto& t : raw) {
        if (std::abs(t.oy) > N - 1 || std::abs(t.ox) > N - 1 || t.c == 0.0) continue;
        if (taps.size() > begin && taps.back().ox == t.ox && taps.back().oy == t.oy)
          taps.back().c += t.c;
        else
          taps.push_back(t);
      }
      lines.push_back({z[0], z[1], begin, taps.size()});
    }
    const double chi = lattice_cutoff(zn, r1, quad.transition);
    const double pref = 2.0 * chi * hd;
    for (int k = 0; k < n_line; ++k) {
      for (int sign = -1; sign <= 1; sign += 2) {
        const double x = sign * (k + 0.5) * dx, y = sign * (k + 0.5) * dy;
        const int ix = static_cast<int>(std::floor(x)), iy = static_cast<int>(std::floor(y));
        const double fx = x - ix, fy = y - iy;
        const double c[4] = {(1 - fx) * (1 - fy), fx * (1 - fy), (1 - fx) * fy, fx * fy};
        for (int q = 0; q < 4; ++q) {
          const int oa = ix + (q & 1), ob = iy + (q >> 1);
          if (std::abs(oa) > N - 1 || std::abs(ob) > N - 1) continue;
          loss_kernel[offset_index(oa, ob)] += pref * wk[k] * c[q];
        }
      }
    }
  });

  corr_kernel.assign(loss_kernel.size(), 0.0);
  for (int ob = -(N - 1); ob <= N - 1; ++ob)
    for (int oa = -(N - 1); oa <= N - 1; ++oa) {
      const std::size_t k = offset_index(oa, ob);
      const double dist = h * std::hypot(static_cast<double>(oa), static_cast<double>(ob));
      if (dist > 0.0) {
        loss_kernel[k] += far_field_potential(dist, params, r1, quad.transition) * hd;
        corr_kernel[k] = cb * std::pow(dist, params.gamma) * hd;
      }
      corr_kernel[k] -= loss_kernel[k];
    }
}

void CollisionOperator::Impl::gain_rows(const std::vector<double>& fv, int j0, int j1, double fmax,
                                        double* gain) const {
  const int N = grid.N;
  const int rows = j1 - j0;
  const double threshold = gain_skip * fmax;
  std::vector<double> pair(static_cast<std::size_t>(rows) * N), kline(pair.size());
  std::fill(gain, gain + pair.size(), 0.0);
  for (const auto& ln : lines) {
    int i_lo = N, i_hi = -1, r_lo = rows, r_hi = -1;
    for (int r = 0; r < rows; ++r) {
      const int j = j0 + r;
      const int jp = j + ln.b, jm = j - ln.b;
      const double* rp = (jp >= 0 && jp < N) ? fv.data() + static_cast<std::size_t>(jp) * N : nullptr;
      const double* rm = (jm >= 0 && jm < N) ? fv.data() + static_cast<std::size_t>(jm) * N : nullptr;
      double* pr = pair.data() + static_cast<std::size_t>(r) * N;
      for (int i = 0; i < N; ++i) {
        double p = 0.0;
        if (rp && i + ln.a >= 0 && i + ln.a < N) p += rp[i + ln.a];
        if (rm && i - ln.a >= 0 && i - ln.a < N) p += rm[i - ln.a];
        pr[i] = p;
        if (p > threshold) {
          i_lo = std::min(i_lo, i);
          i_hi = std::max(i_hi, i);
          r_lo = std::min(r_lo, r);
          r_hi = r;
        }
      }
    }
    if (r_hi < 0) continue;
    for (int r = r_lo; r <= r_hi; ++r)
      std::fill(kline.begin() + r * N + i_lo, kline.begin() + r * N + i_hi + 1, 0.0);
    const Tap* t = taps.data() + ln.begin;
    const Tap* t_end = taps.data() + ln.end;
    t = std::lower_bound(t, t_end, -(j0 + r_hi), [](const Tap& x, int oy) { return x.oy < oy; });
    for (; t != t_end && t->oy <= N - 1 - (j0 + r_lo); ++t) {
      const int a = std::max(i_lo, -t->ox);
      const int b = std::min(i_hi, N - 1 - t->ox);
      if (a > b) continue;
      const double c = t->c;
      const int ra = std::max(r_lo, -t->oy - j0);
      const int rb = std::min(r_hi, N - 1 - t->oy - j0);
      for (int r = ra; r <= rb; ++r) {
        const double* src = fv.data() + static_cast<std::ptrdiff_t>(j0 + r + t->oy) * N + t->ox;
        double* kl = kline.data() + static_cast<std::size_t>(r) * N;
        for (int i = a; i <= b; ++i) kl[i] += c * src[i];
      }
    }
    for (int r = r_lo; r <= r_hi; ++r) {
      const double* pr = pair.data() + static_cast<std::size_t>(r) * N;
      const double* kl = kline.data() + static_cast<std::size_t>(r) * N;
      double* gr = gain + static_cast<std::size_t>(r) * N;
      for (int i = i_lo; i <= i_hi; ++i) gr[i] += pr[i] * kl[i];
    }
  }
  for (std::size_t n = 0; n < pair.size(); ++n) gain[n] *= hd;
}

CollisionOperator::CollisionOperator(const Grid& grid, const CollisionParams& params, const SplitConfig& cfg,
                                     const CollisionQuad& quad)
    : impl_(std::make_unique<Impl>()) {
  grid.validate();
  params.validate();
  cfg.validate(grid);
  quad.validate();
  if (grid.d != params.d) throw std::invalid_argument("CollisionOperator: grid and kernel dimensions differ");
  impl_->grid = grid;
  impl_->params = params;
  impl_->cfg = cfg;
  impl_->quad = quad;
  if (grid.d == 2) {
    impl_->build();
  } else {
    impl_->cb = calibrated_cb(params);
  }
}

CollisionOperator::~CollisionOperator() = default;
CollisionOperator::CollisionOperator(CollisionOperator&&) noexcept = default;
CollisionOperator& CollisionOperator::operator=(CollisionOperator&&) noexcept = default;

const Grid& CollisionOperator::grid() const { return impl_->grid; }
double CollisionOperator::cb() const { return impl_->cb; }

void CollisionOperator::apply(const Distribution& f, std::vector<double>& out) const {
  const Impl& m = *impl_;
  if (!(f.grid == m.grid)) throw std::invalid_argument("CollisionOperator: distribution grid mismatch");
  const Grid& g = m.grid;
  out.assign(g.size(), 0.0);
  const long total = static_cast<long>(g.size());

  if (g.d != 2 || m.cfg.q2_mode == Q2Mode::Direct) {
    std::vector<double> x(g.d);
#pragma omp parallel for schedule(static) firstprivate(x)
    for (long n = 0; n < total; ++n) {
      g.coords(static_cast<std::size_t>(n), x);
      SplitConfig plain = m.cfg;
      plain.weight = Weight::constant();
      out[n] = q1(f, x, plain, m.params, m.quad) + q2(f, x, plain, m.params, m.quad);
    }
    return;
  }

  const int N = g.N;
  const double fmax = f.max_value();
  const int W = m.width();
  constexpr int block = 8;
  const int nblocks = (N + block - 1) / block;
#pragma omp parallel for schedule(dynamic)
  for (int bj = 0; bj < nblocks; ++bj) {
    const int j0 = bj * block, j1 = std::min(N, j0 + block);
    m.gain_rows(f.values, j0, j1, fmax, out.data() + static_cast<std::size_t>(j0) * N);
    for (int j = j0; j < j1; ++j) {
      double* row = out.data() + static_cast<std::size_t>(j) * N;
      for (int i = 0; i < N; ++i) {
        double corr = 0.0;
        for (int uj = 0; uj < N; ++uj) {
          const double* krow = m.corr_kernel.data() + static_cast<std::size_t>(uj - j + N - 1) * W + (N - 1 - i);
          const double* frow = f.values.data() + static_cast<std::size_t>(uj) * N;
          for (int ui = 0; ui < N; ++ui) corr += krow[ui] * frow[ui];
        }
        row[i] += f.values[i + static_cast<std::size_t>(j) * N] * corr;
      }
    }
  }
}

std::vector<double> CollisionOperator::apply(const Distribution& f) const {
  std::vector<double> out;
  apply(f, out);
  return out;
}

std::vector<double> CollisionOperator::loss_rate(const Distribution& f) const {
  const Impl& m = *impl_;
  if (!(f.grid == m.grid)) throw std::invalid_argument("CollisionOperator: distribution grid mismatch");
  const Grid& g = m.grid;
  std::vector<double> out(g.size(), 0.0);
  if (g.d != 2) throw std::invalid_argument("CollisionOperator::loss_rate supports d = 2");
  const int N = g.N;
  const int W = m.width();
  const long total = static_cast<long>(g.size());
#pragma omp parallel for schedule(static)
  for (long n = 0; n < total; ++n) {
    const int i = static_cast<int>(n % N), j = static_cast<int>(n / N);
    double acc = 0.0;
    for (int uj = 0; uj < N; ++uj) {
      const double* krow = m.loss_kernel.data() + static_cast<std::size_t>(uj - j + N - 1) * W + (N - 1 - i);
      const double* frow = f.values.data() + static_cast<std::size_t>(uj) * N;
      for (int ui = 0; ui < N; ++ui) acc += krow[ui] * frow[ui];
    }
    out[n] = acc;
  }
  return out;
}

}  // namespace boltz
