#include "kalg/kernel.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace kalg {

double block_op_norm(const double* blk, int d) {
  double norm = 0.0;
  for (int a = 0; a < d; ++a) {
    double row = 0.0;
    for (int b = 0; b < d; ++b) row += std::abs(blk[a * d + b]);
    norm = std::max(norm, row);
  }
  return norm;
}

Majorant tightest_majorant(const Kernel& k) {
  const std::int64_t n = k.grid.npoints();
  const std::int64_t nw = k.nwin();
  Majorant m;
  m.beta.assign(static_cast<std::size_t>(nw), 0.0);
  for (std::int64_t i = 0; i < n; ++i)
    for (std::int64_t w = 0; w < nw; ++w)
      m.beta[static_cast<std::size_t>(w)] =
          std::max(m.beta[static_cast<std::size_t>(w)],
                   block_op_norm(k.block(i, w), k.grid.d));
  m.l1 = 0.0;
  for (double b : m.beta) m.l1 += b * k.grid.w_quad;
  return m;
}

Kernel make_kernel(const GridSpec& grid, int w_half,
                   std::vector<double> samples) {
  if (w_half < 0) throw std::invalid_argument("make_kernel: w_half < 0");
  Kernel k;
  k.grid = grid;
  k.w_half = w_half;
  const std::int64_t expected =
      grid.npoints() * k.nwin() * grid.d * grid.d;
  if (static_cast<std::int64_t>(samples.size()) != expected)
    throw std::invalid_argument(
        "make_kernel: samples size " + std::to_string(samples.size()) +
        " does not match grid/window (expected " + std::to_string(expected) +
        ")");
  k.samples = std::move(samples);
  k.beta = tightest_majorant(k);
  return k;
}

namespace {

// Admissible x-range per axis when the modulus is restricted to functions
// supported in [-alpha, alpha]^c: rows with |x_i| <= alpha + w_half*h.
bool in_support_range(const Kernel& k, std::span<const int> mi, double alpha) {
  const double margin = alpha + k.w_half * k.grid.h;
  for (int a = 0; a < k.grid.c; ++a)
    if (std::abs(k.grid.point(mi[a])) > margin) return false;
  return true;
}

}  // namespace

ModulusReport continuity_modulus(const Kernel& k,
                                 std::span<const LatticeShift> deltas,
                                 std::optional<double> support_box) {
  const std::int64_t n = k.grid.npoints();
  const std::int64_t nw = k.nwin();
  const int d = k.grid.d;

  ModulusReport rep;
  rep.support_box = support_box;
  std::array<int, kMaxDim> mi{}, src{};
  std::vector<double> diff(static_cast<std::size_t>(d) * d);
  for (const LatticeShift& delta : deltas) {
    double omega = 0.0;
    for (std::int64_t i = 0; i < n; ++i) {
      k.grid.unrank(i, mi);
      bool ok = true;
      for (int a = 0; a < k.grid.c; ++a) {
        src[a] = mi[a] - delta.s[a];
        if (src[a] < 0 || src[a] >= k.grid.N) ok = false;
      }
      if (!ok) continue;
      if (support_box && !in_support_range(k, mi, *support_box)) continue;
      const std::int64_t j =
          k.grid.rank({src.data(), static_cast<std::size_t>(k.grid.c)});
      double dist = 0.0;
      for (std::int64_t w = 0; w < nw; ++w) {
        const double* pa = k.block(j, w);
        const double* pb = k.block(i, w);
        for (int e = 0; e < d * d; ++e) diff[static_cast<std::size_t>(e)] = pa[e] - pb[e];
        dist += block_op_norm(diff.data(), d) * k.grid.w_quad;
      }
      omega = std::max(omega, dist);
    }
    rep.deltas.push_back(delta);
    rep.omega.push_back(omega);
  }
  return rep;
}

Kernel mollify(const Kernel& k, int r) {
  if (r < 1) throw std::invalid_argument("mollify: radius must be positive");
  const std::int64_t n = k.grid.npoints();
  const std::int64_t nw = k.nwin();
  const int d = k.grid.d;
  const int c = k.grid.c;

  // Enumerate lattice ball offsets once: Euclidean |j - i| <= r in steps.
  std::vector<std::array<int, kMaxDim>> ball;
  if (c == 1) {
    for (int o = -r; o <= r; ++o) ball.push_back({o, 0});
  } else {
    for (int o0 = -r; o0 <= r; ++o0)
      for (int o1 = -r; o1 <= r; ++o1)
        if (o0 * o0 + o1 * o1 <= r * r) ball.push_back({o0, o1});
  }

  Kernel out;
  out.grid = k.grid;
  out.w_half = k.w_half;
  out.samples.assign(k.samples.size(), 0.0);

  std::array<int, kMaxDim> mi{}, src{};
  for (std::int64_t i = 0; i < n; ++i) {
    k.grid.unrank(i, mi);
    int count = 0;
    for (const auto& off : ball) {
      bool inside = true;
      for (int a = 0; a < c; ++a) {
        src[a] = mi[a] + off[a];
        if (src[a] < 0 || src[a] >= k.grid.N) inside = false;
      }
      if (!inside) continue;
      ++count;
      const std::int64_t j =
          k.grid.rank({src.data(), static_cast<std::size_t>(c)});
      const double* in = k.block(j, 0);
      double* acc = out.block(i, 0);
      for (std::int64_t e = 0; e < nw * d * d; ++e) acc[e] += in[e];
    }
    double* acc = out.block(i, 0);
    for (std::int64_t e = 0; e < nw * d * d; ++e) acc[e] /= count;
  }
  out.beta = tightest_majorant(out);
  return out;
}

Kernel shift_conjugate(const Kernel& k, const LatticeShift& s) {
  const std::int64_t n = k.grid.npoints();
  const std::int64_t nw = k.nwin();
  const int dd = k.grid.d * k.grid.d;

  Kernel out;
  out.grid = k.grid;
  out.w_half = k.w_half;
  out.samples.assign(k.samples.size(), 0.0);

  const std::vector<std::int64_t> map = shift_indices(k.grid, s);
  for (std::int64_t i = 0; i < n; ++i) {
    const std::int64_t j = map[static_cast<std::size_t>(i)];
    if (j < 0) continue;
    const double* in = k.block(j, 0);
    double* dst = out.block(i, 0);
    for (std::int64_t e = 0; e < nw * dd; ++e) dst[e] = in[e];
  }
  out.beta = tightest_majorant(out);
  return out;
}

TruncationResult truncate_band(const Kernel& k, double delta) {
  if (delta < 0.0) throw std::invalid_argument("truncate_band: delta < 0");
  const std::int64_t n = k.grid.npoints();
  const std::int64_t nw = k.nwin();
  const int dd = k.grid.d * k.grid.d;

  const Majorant beta = k.beta ? *k.beta : tightest_majorant(k);

  TruncationResult res;
  res.kernel.grid = k.grid;
  res.kernel.w_half = k.w_half;
  res.kernel.samples = k.samples;

  Majorant kept;
  kept.beta.assign(static_cast<std::size_t>(nw), 0.0);

  std::array<int, kMaxDim> off{};
  for (std::int64_t w = 0; w < nw; ++w) {
    k.wunrank(w, off);
    if (k.offset_length({off.data(), static_cast<std::size_t>(k.grid.c)}) >
        delta) {
      res.tail += beta.beta[static_cast<std::size_t>(w)] * k.grid.w_quad;
      for (std::int64_t i = 0; i < n; ++i) {
        double* blk = res.kernel.block(i, w);
        for (int e = 0; e < dd; ++e) blk[e] = 0.0;
      }
    } else {
      kept.beta[static_cast<std::size_t>(w)] =
          beta.beta[static_cast<std::size_t>(w)];
    }
  }
  for (double b : kept.beta) kept.l1 += b * k.grid.w_quad;
  res.kernel.beta = std::move(kept);
  return res;
}

}  // namespace kalg
