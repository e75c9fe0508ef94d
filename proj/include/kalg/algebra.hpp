#pragma once

#include "kalg/operator.hpp"

namespace kalg {

/// One term d(x) S_s of a difference operator: coefficient samples over the
/// lattice (d x d blocks, point-major) and an integer lattice shift.
struct DiffOpTerm {
  LatticeShift shift;
  std::vector<double> coeffs;  // npoints * d*d
};

/// Finite difference operator  (Du)(x) = sum_t d_t(x) u(x - s_t h)  with
/// pairwise distinct shifts.  c_norm = sum_t max_x ||d_t(x)|| bounds the
/// operator norm on every L_p.
struct DiffOp {
  GridSpec grid;
  std::vector<DiffOpTerm> terms;
  double c_norm = 0.0;
};

/// Validates shapes and distinct shifts; computes c_norm.
DiffOp make_diffop(const GridSpec& grid, std::vector<DiffOpTerm> terms);

/// The identity as a single zero-shift term.
DiffOp identity_diffop(const GridSpec& grid);

/// out[i] = sum_t d_t[i] u[i - s_t], zero extension outside the box.
DiscreteFunction apply_diffop(const DiffOp& D, const DiscreteFunction& u);

/// Dense matrix with block (i, i - s_t) = d_t[i].  No quadrature weight:
/// a difference operator is not an integral operator.
DenseOperator materialize_diffop(const DiffOp& D,
                                 std::int64_t cap = kDefaultPointCap);

// Compositions.  Each satisfies the dense-oracle identity
//   materialize(compose_xy(a, b)) == materialize(a) * materialize(b)
// to float tolerance; that identity is the defining property of this module.
// Output windows clip at N-1 per axis; offsets beyond that never couple two
// box points, and the majorant mass landing there is reported through
// `clipped` when non-null.

/// (k1 o k2)[i][w] = sum_v k1[i][v] k2[i-v][w-v] h^c  (i-v inside the box).
/// Attached majorant is the offset convolution of the input majorants.
Kernel compose_nn(const Kernel& k1, const Kernel& k2,
                  double* clipped = nullptr);

/// (D o k)[i][w] = sum_t d_t[i] k[i-s_t][w-s_t]; majorant
/// beta1[w] = sum_t max_x ||d_t(x)|| beta[w-s_t].
Kernel compose_dn(const DiffOp& D, const Kernel& k, double* clipped = nullptr);

/// (k o D)[i][w] = sum_t k[i][w-s_t] d_t[i-w+s_t]  (coefficient index inside
/// the box); same majorant formula as compose_dn.
Kernel compose_nd(const Kernel& k, const DiffOp& D, double* clipped = nullptr);

/// Terms (d1_a(x) d2_b(x - s_a), s_a + s_b), merged over equal total shifts.
/// Shifts with |s| >= N act as zero on the box and are dropped; their c_norm
/// mass is reported through `clipped` when non-null.
DiffOp compose_dd(const DiffOp& D1, const DiffOp& D2,
                  double* clipped = nullptr);

}  // namespace kalg
