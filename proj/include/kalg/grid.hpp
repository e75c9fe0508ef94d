#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace kalg {

/// Highest supported spatial dimension.
inline constexpr int kMaxDim = 2;

/// Default cap on the total lattice size N^c (dense-oracle budget).
inline constexpr std::int64_t kDefaultPointCap = 4096;

/// Integer lattice shift, s[axis] steps of h each.
struct LatticeShift {
  std::array<int, kMaxDim> s{0, 0};

  LatticeShift() = default;
  explicit LatticeShift(int s0) : s{s0, 0} {}
  LatticeShift(int s0, int s1) : s{s0, s1} {}

  LatticeShift negated() const { return LatticeShift{-s[0], -s[1]}; }
  bool operator==(const LatticeShift&) const = default;
};

/// Uniform midpoint lattice on the box [-A,A]^c with values in R^d.
///
/// Lattice points per axis: x_i = -A + (i + 1/2) h, i = 0..N-1, h = 2A/N.
/// Integrals are midpoint sums with weight w_quad = h^c.
struct GridSpec {
  int c = 1;        ///< spatial dimension (1 or 2)
  double A = 1.0;   ///< box half-width
  int N = 2;        ///< points per axis
  int d = 1;        ///< dimension of the value space
  double h = 1.0;   ///< lattice step, 2A/N
  double w_quad = 1.0;  ///< quadrature weight, h^c

  /// Total number of lattice points N^c.
  std::int64_t npoints() const {
    std::int64_t n = 1;
    for (int a = 0; a < c; ++a) n *= N;
    return n;
  }

  /// Coordinate of index i along one axis.
  double point(int i) const { return -A + (i + 0.5) * h; }

  /// Row-major rank of a multi-index (first axis slowest).
  std::int64_t rank(std::span<const int> multi) const {
    std::int64_t r = 0;
    for (int a = 0; a < c; ++a) r = r * N + multi[a];
    return r;
  }

  /// Inverse of rank().
  void unrank(std::int64_t idx, std::span<int> multi) const {
    for (int a = c - 1; a >= 0; --a) {
      multi[a] = static_cast<int>(idx % N);
      idx /= N;
    }
  }

  bool same_lattice(const GridSpec& o) const {
    return c == o.c && A == o.A && N == o.N && d == o.d;
  }

  bool operator==(const GridSpec&) const = default;
};

/// Validates parameters and derives h, w_quad.
/// Rejects non-positive parameters and N^c beyond `cap`.
GridSpec make_grid(int c, double A, int N, int d,
                   std::int64_t cap = kDefaultPointCap);

/// Index map of the discrete shift S_{s·h} with zero extension outside the
/// box: entry i holds the source index i-s, or -1 where the output is zero.
std::vector<std::int64_t> shift_indices(const GridSpec& grid,
                                        const LatticeShift& s);

/// Converts a physical displacement to a lattice shift; throws if some
/// component is not an integer multiple of h (relative tolerance 1e-9).
LatticeShift shift_from_physical(const GridSpec& grid,
                                 std::span<const double> displacement);

}  // namespace kalg
