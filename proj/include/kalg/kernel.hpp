#pragma once

#include <optional>
#include <span>
#include <vector>

#include "kalg/grid.hpp"

namespace kalg {

/// Summable offset profile dominating a kernel: ||n[i][w]|| <= beta[w].
/// l1 is the quadrature-weighted sum  sum_w beta[w] * h^c.
struct Majorant {
  std::vector<double> beta;  // indexed by window rank
  double l1 = 0.0;
};

/// Continuity modulus of the fiber map x -> n(x, .) at lattice displacements:
/// omega[k] = max over admissible x of the weighted L1 distance between the
/// offset profiles at x - delta_k and x.
struct ModulusReport {
  std::vector<LatticeShift> deltas;
  std::vector<double> omega;
  std::optional<double> support_box;  // half-width alpha, when restricted
};

/// Banded kernel in fiber form: samples n[i][w] are d x d matrices, i over
/// lattice points and w over the offset window {|w_axis| <= w_half}.  Offset
/// w couples output point x to input point x - w*h; samples outside the
/// window are zero.  Instances are immutable after construction.
struct Kernel {
  GridSpec grid;
  int w_half = 0;
  std::vector<double> samples;  // npoints * nwin * d*d, x-major then w
  std::optional<Majorant> beta;

  int wspan() const { return 2 * w_half + 1; }

  std::int64_t nwin() const {
    std::int64_t n = 1;
    for (int a = 0; a < grid.c; ++a) n *= wspan();
    return n;
  }

  /// Rank of an offset vector with components in [-w_half, w_half].
  std::int64_t wrank(std::span<const int> off) const {
    std::int64_t r = 0;
    for (int a = 0; a < grid.c; ++a) r = r * wspan() + (off[a] + w_half);
    return r;
  }

  void wunrank(std::int64_t wr, std::span<int> off) const {
    for (int a = grid.c - 1; a >= 0; --a) {
      off[a] = static_cast<int>(wr % wspan()) - w_half;
      wr /= wspan();
    }
  }

  const double* block(std::int64_t i, std::int64_t wr) const {
    return samples.data() + (i * nwin() + wr) * grid.d * grid.d;
  }
  double* block(std::int64_t i, std::int64_t wr) {
    return samples.data() + (i * nwin() + wr) * grid.d * grid.d;
  }

  /// Physical length of an offset in the band metric: max_axis |w_a| * h.
  double offset_length(std::span<const int> off) const {
    int m = 0;
    for (int a = 0; a < grid.c; ++a) m = std::max(m, std::abs(off[a]));
    return m * grid.h;
  }
};

/// linf-induced norm (max absolute row sum) of a d x d block.
double block_op_norm(const double* blk, int d);

/// Pointwise-minimal admissible majorant, beta[w] = max_i ||n[i][w]||.
Majorant tightest_majorant(const Kernel& k);

/// Validates dimensions and attaches the tightest majorant.
Kernel make_kernel(const GridSpec& grid, int w_half,
                   std::vector<double> samples);

/// Modulus omega[delta] = max_i sum_w ||n[i-delta][w] - n[i][w]|| * h^c over
/// x-indices i with i-delta in the box; when support_box = alpha is given,
/// i additionally ranges over |x_i| <= alpha + w_half*h per axis.
ModulusReport continuity_modulus(const Kernel& k,
                                 std::span<const LatticeShift> deltas,
                                 std::optional<double> support_box = {});

/// Ball average of the fiber map: n_r[i][w] = mean of n[j][w] over lattice j
/// with |x_j - x_i| <= r*h (Euclidean ball, intersected with the box).
Kernel mollify(const Kernel& k, int r);

/// Kernel of S_h N S_{-h}: n'[i][w] = n[i-s][w], zero where i-s leaves the box.
Kernel shift_conjugate(const Kernel& k, const LatticeShift& s);

struct TruncationResult {
  Kernel kernel;
  double tail = 0.0;  // sum of beta over the removed offsets, times h^c
};

/// Zeroes offsets with max_axis |w_a|*h > delta.  The discarded operator norm
/// is bounded by `tail` in every l_p.
TruncationResult truncate_band(const Kernel& k, double delta);

}  // namespace kalg
