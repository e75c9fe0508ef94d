#include "kalg/algebra.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>

namespace kalg {

namespace {

double max_block_norm(const std::vector<double>& coeffs, std::int64_t n,
                      int d) {
  double best = 0.0;
  for (std::int64_t i = 0; i < n; ++i)
    best = std::max(best, block_op_norm(coeffs.data() + i * d * d, d));
  return best;
}

// d x d product acc += a * b
void block_mul_add(double* acc, const double* a, const double* b, int d,
                   double scale = 1.0) {
  for (int r = 0; r < d; ++r)
    for (int col = 0; col < d; ++col) {
      double s = 0.0;
      for (int m = 0; m < d; ++m) s += a[r * d + m] * b[m * d + col];
      acc[r * d + col] += scale * s;
    }
}

int max_shift_extent(const DiffOp& D) {
  int m = 0;
  for (const auto& t : D.terms)
    for (int a = 0; a < D.grid.c; ++a) m = std::max(m, std::abs(t.shift.s[a]));
  return m;
}

}  // namespace

DiffOp make_diffop(const GridSpec& grid, std::vector<DiffOpTerm> terms) {
  const std::int64_t n = grid.npoints();
  const std::size_t expected =
      static_cast<std::size_t>(n) * grid.d * grid.d;
  for (std::size_t a = 0; a < terms.size(); ++a) {
    if (terms[a].coeffs.size() != expected)
      throw std::invalid_argument("make_diffop: coefficient array size mismatch");
    for (std::size_t b = a + 1; b < terms.size(); ++b)
      if (terms[a].shift == terms[b].shift)
        throw std::invalid_argument("make_diffop: duplicate shift");
  }
  DiffOp D;
  D.grid = grid;
  D.terms = std::move(terms);
  D.c_norm = 0.0;
  for (const auto& t : D.terms) D.c_norm += max_block_norm(t.coeffs, n, grid.d);
  return D;
}

DiffOp identity_diffop(const GridSpec& grid) {
  const std::int64_t n = grid.npoints();
  const int d = grid.d;
  DiffOpTerm t;
  t.shift = LatticeShift{};
  t.coeffs.assign(static_cast<std::size_t>(n) * d * d, 0.0);
  for (std::int64_t i = 0; i < n; ++i)
    for (int a = 0; a < d; ++a) t.coeffs[(i * d + a) * d + a] = 1.0;
  return make_diffop(grid, {std::move(t)});
}

DiscreteFunction apply_diffop(const DiffOp& D, const DiscreteFunction& u) {
  if (!D.grid.same_lattice(u.grid))
    throw std::invalid_argument("apply_diffop: grid mismatch");
  const std::int64_t n = D.grid.npoints();
  const int d = D.grid.d;

  DiscreteFunction out;
  out.grid = D.grid;
  out.values.assign(static_cast<std::size_t>(n) * d, 0.0);

  for (const auto& t : D.terms) {
    const std::vector<std::int64_t> map = shift_indices(D.grid, t.shift);
    for (std::int64_t i = 0; i < n; ++i) {
      const std::int64_t j = map[static_cast<std::size_t>(i)];
      if (j < 0) continue;
      const double* blk = t.coeffs.data() + i * d * d;
      const double* uj = u.values.data() + j * d;
      double* oi = out.values.data() + i * d;
      for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) oi[a] += blk[a * d + b] * uj[b];
    }
  }
  return out;
}

DenseOperator materialize_diffop(const DiffOp& D, std::int64_t cap) {
  const std::int64_t n = D.grid.npoints();
  const std::int64_t dim = n * D.grid.d;
  if (dim > cap)
    throw std::invalid_argument("materialize_diffop: N^c*d = " +
                                std::to_string(dim) +
                                " exceeds the dense-oracle cap " +
                                std::to_string(cap));
  const int d = D.grid.d;

  DenseOperator dense;
  dense.grid = D.grid;
  dense.entries = Eigen::MatrixXd::Zero(dim, dim);

  for (const auto& t : D.terms) {
    const std::vector<std::int64_t> map = shift_indices(D.grid, t.shift);
    for (std::int64_t i = 0; i < n; ++i) {
      const std::int64_t j = map[static_cast<std::size_t>(i)];
      if (j < 0) continue;
      const double* blk = t.coeffs.data() + i * d * d;
      for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b)
          dense.entries(i * d + a, j * d + b) += blk[a * d + b];
    }
  }
  return dense;
}

Kernel compose_nn(const Kernel& k1, const Kernel& k2, double* clipped) {
  if (!k1.grid.same_lattice(k2.grid))
    throw std::invalid_argument("compose_nn: grid mismatch");
  const GridSpec& g = k1.grid;
  const std::int64_t n = g.npoints();
  const int d = g.d;
  const int c = g.c;

  Kernel out;
  out.grid = g;
  out.w_half = std::min(k1.w_half + k2.w_half, g.N - 1);
  out.samples.assign(
      static_cast<std::size_t>(n * out.nwin()) * d * d, 0.0);

  const std::int64_t nw1 = k1.nwin();
  const std::int64_t nw2 = k2.nwin();
  std::array<int, kMaxDim> mi{}, v{}, u{}, w{}, src{};

  for (std::int64_t i = 0; i < n; ++i) {
    g.unrank(i, mi);
    for (std::int64_t vr = 0; vr < nw1; ++vr) {
      k1.wunrank(vr, v);
      bool inside = true;
      for (int a = 0; a < c; ++a) {
        src[a] = mi[a] - v[a];
        if (src[a] < 0 || src[a] >= g.N) inside = false;
      }
      if (!inside) continue;
      const double* b1 = k1.block(i, vr);
      const std::int64_t j =
          g.rank({src.data(), static_cast<std::size_t>(c)});
      for (std::int64_t ur = 0; ur < nw2; ++ur) {
        k2.wunrank(ur, u);
        bool fits = true;
        for (int a = 0; a < c; ++a) {
          w[a] = v[a] + u[a];
          if (std::abs(w[a]) > out.w_half) fits = false;
        }
        if (!fits) continue;  // vacuous offset: couples no pair of box points
        const std::int64_t wr =
            out.wrank({w.data(), static_cast<std::size_t>(c)});
        block_mul_add(out.block(i, wr), b1, k2.block(j, ur), d, g.w_quad);
      }
    }
  }

  // Majorant: offset convolution of the input majorants (Young's bound).
  const Majorant m1 = k1.beta ? *k1.beta : tightest_majorant(k1);
  const Majorant m2 = k2.beta ? *k2.beta : tightest_majorant(k2);
  Majorant mout;
  mout.beta.assign(static_cast<std::size_t>(out.nwin()), 0.0);
  double lost = 0.0;
  for (std::int64_t vr = 0; vr < nw1; ++vr) {
    k1.wunrank(vr, v);
    for (std::int64_t ur = 0; ur < nw2; ++ur) {
      k2.wunrank(ur, u);
      bool fits = true;
      for (int a = 0; a < c; ++a) {
        w[a] = v[a] + u[a];
        if (std::abs(w[a]) > out.w_half) fits = false;
      }
      const double mass = m1.beta[static_cast<std::size_t>(vr)] *
                          m2.beta[static_cast<std::size_t>(ur)] * g.w_quad;
      if (fits)
        mout.beta[static_cast<std::size_t>(
            out.wrank({w.data(), static_cast<std::size_t>(c)}))] += mass;
      else
        lost += mass * g.w_quad;
    }
  }
  for (double b : mout.beta) mout.l1 += b * g.w_quad;
  out.beta = std::move(mout);
  if (clipped) *clipped = lost;
  return out;
}

Kernel compose_dn(const DiffOp& D, const Kernel& k, double* clipped) {
  if (!D.grid.same_lattice(k.grid))
    throw std::invalid_argument("compose_dn: grid mismatch");
  const GridSpec& g = k.grid;
  const std::int64_t n = g.npoints();
  const int d = g.d;
  const int c = g.c;

  Kernel out;
  out.grid = g;
  out.w_half = std::min(k.w_half + max_shift_extent(D), g.N - 1);
  out.samples.assign(
      static_cast<std::size_t>(n * out.nwin()) * d * d, 0.0);

  const std::int64_t nwk = k.nwin();
  std::array<int, kMaxDim> mi{}, u{}, w{}, src{};

  for (const auto& t : D.terms) {
    const std::vector<std::int64_t> map = shift_indices(g, t.shift);
    for (std::int64_t i = 0; i < n; ++i) {
      const std::int64_t j = map[static_cast<std::size_t>(i)];
      if (j < 0) continue;
      const double* dt = t.coeffs.data() + i * d * d;
      for (std::int64_t ur = 0; ur < nwk; ++ur) {
        k.wunrank(ur, u);
        bool fits = true;
        for (int a = 0; a < c; ++a) {
          w[a] = u[a] + t.shift.s[a];
          if (std::abs(w[a]) > out.w_half) fits = false;
        }
        if (!fits) continue;
        const std::int64_t wr =
            out.wrank({w.data(), static_cast<std::size_t>(c)});
        block_mul_add(out.block(i, wr), dt, k.block(j, ur), d);
      }
    }
  }

  // beta1[w] = sum_t max_x ||d_t(x)|| beta[w - s_t]
  const Majorant mk = k.beta ? *k.beta : tightest_majorant(k);
  Majorant mout;
  mout.beta.assign(static_cast<std::size_t>(out.nwin()), 0.0);
  double lost = 0.0;
  for (const auto& t : D.terms) {
    const double ct = max_block_norm(t.coeffs, n, d);
    for (std::int64_t ur = 0; ur < nwk; ++ur) {
      k.wunrank(ur, u);
      bool fits = true;
      for (int a = 0; a < c; ++a) {
        w[a] = u[a] + t.shift.s[a];
        if (std::abs(w[a]) > out.w_half) fits = false;
      }
      const double mass = ct * mk.beta[static_cast<std::size_t>(ur)];
      if (fits)
        mout.beta[static_cast<std::size_t>(
            out.wrank({w.data(), static_cast<std::size_t>(c)}))] += mass;
      else
        lost += mass * g.w_quad;
    }
  }
  for (double b : mout.beta) mout.l1 += b * g.w_quad;
  out.beta = std::move(mout);
  if (clipped) *clipped = lost;
  return out;
}

Kernel compose_nd(const Kernel& k, const DiffOp& D, double* clipped) {
  if (!D.grid.same_lattice(k.grid))
    throw std::invalid_argument("compose_nd: grid mismatch");
  const GridSpec& g = k.grid;
  const std::int64_t n = g.npoints();
  const int d = g.d;
  const int c = g.c;

  Kernel out;
  out.grid = g;
  out.w_half = std::min(k.w_half + max_shift_extent(D), g.N - 1);
  out.samples.assign(
      static_cast<std::size_t>(n * out.nwin()) * d * d, 0.0);

  const std::int64_t nwk = k.nwin();
  std::array<int, kMaxDim> mi{}, u{}, w{}, mid{};

  for (const auto& t : D.terms) {
    for (std::int64_t i = 0; i < n; ++i) {
      g.unrank(i, mi);
      for (std::int64_t ur = 0; ur < nwk; ++ur) {
        k.wunrank(ur, u);
        // total offset w = u + s_t; coefficient sits at i - u
        bool ok = true;
        for (int a = 0; a < c; ++a) {
          w[a] = u[a] + t.shift.s[a];
          mid[a] = mi[a] - u[a];
          if (std::abs(w[a]) > out.w_half) ok = false;
          if (mid[a] < 0 || mid[a] >= g.N) ok = false;
        }
        if (!ok) continue;
        const std::int64_t l =
            g.rank({mid.data(), static_cast<std::size_t>(c)});
        const std::int64_t wr =
            out.wrank({w.data(), static_cast<std::size_t>(c)});
        block_mul_add(out.block(i, wr), k.block(i, ur),
                      t.coeffs.data() + l * d * d, d);
      }
    }
  }

  const Majorant mk = k.beta ? *k.beta : tightest_majorant(k);
  Majorant mout;
  mout.beta.assign(static_cast<std::size_t>(out.nwin()), 0.0);
  double lost = 0.0;
  for (const auto& t : D.terms) {
    const double ct = max_block_norm(t.coeffs, n, d);
    for (std::int64_t ur = 0; ur < nwk; ++ur) {
      k.wunrank(ur, u);
      bool fits = true;
      for (int a = 0; a < c; ++a) {
        w[a] = u[a] + t.shift.s[a];
        if (std::abs(w[a]) > out.w_half) fits = false;
      }
      const double mass = ct * mk.beta[static_cast<std::size_t>(ur)];
      if (fits)
        mout.beta[static_cast<std::size_t>(
            out.wrank({w.data(), static_cast<std::size_t>(c)}))] += mass;
      else
        lost += mass * g.w_quad;
    }
  }
  for (double b : mout.beta) mout.l1 += b * g.w_quad;
  out.beta = std::move(mout);
  if (clipped) *clipped = lost;
  return out;
}

DiffOp compose_dd(const DiffOp& D1, const DiffOp& D2, double* clipped) {
  if (!D1.grid.same_lattice(D2.grid))
    throw std::invalid_argument("compose_dd: grid mismatch");
  const GridSpec& g = D1.grid;
  const std::int64_t n = g.npoints();
  const int d = g.d;

  // Merge products over equal total shifts.
  std::map<std::array<int, kMaxDim>, std::vector<double>> merged;
  double lost = 0.0;
  for (const auto& t1 : D1.terms) {
    const std::vector<std::int64_t> map = shift_indices(g, t1.shift);
    for (const auto& t2 : D2.terms) {
      std::array<int, kMaxDim> total{};
      bool vacuous = false;
      for (int a = 0; a < g.c; ++a) {
        total[a] = t1.shift.s[a] + t2.shift.s[a];
        if (std::abs(total[a]) >= g.N) vacuous = true;
      }
      if (vacuous) {
        // The combined shift moves everything off the box.
        lost += max_block_norm(t1.coeffs, n, d) *
                max_block_norm(t2.coeffs, n, d);
        continue;
      }
      auto& acc = merged[total];
      if (acc.empty()) acc.assign(static_cast<std::size_t>(n) * d * d, 0.0);
      for (std::int64_t i = 0; i < n; ++i) {
        const std::int64_t j = map[static_cast<std::size_t>(i)];
        if (j < 0) continue;
        block_mul_add(acc.data() + i * d * d, t1.coeffs.data() + i * d * d,
                      t2.coeffs.data() + j * d * d, d);
      }
    }
  }

  std::vector<DiffOpTerm> terms;
  terms.reserve(merged.size());
  for (auto& [shift, coeffs] : merged) {
    DiffOpTerm t;
    t.shift = LatticeShift{shift[0], shift[1]};
    t.coeffs = std::move(coeffs);
    terms.push_back(std::move(t));
  }
  if (clipped) *clipped = lost;
  return make_diffop(g, std::move(terms));
}

}  // namespace kalg
