#pragma once

#include <functional>
#include <stdexcept>

#include "kalg/algebra.hpp"

namespace kalg {

/// Numerical failure of an inversion (singularity, dominance violation,
/// series cap, symbol root).  Distinct from precondition/usage errors.
struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Raised when a caller-supplied cancellation hook stops a series inversion.
struct CancelledError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class InverseMethod { neumann, dense, fourier };

/// Result of inverting 1+N as 1+M: the extracted kernel of M together with
/// the residual norms of (I+mat(N))(I+mat(M))-I (and the left-sided product)
/// for p in {1,2,inf}.
struct InverseResult {
  Kernel m;
  InverseMethod method = InverseMethod::dense;
  std::array<double, 3> residual_right{};  // p = 1, 2, inf
  std::array<double, 3> residual_left{};
  double tail_report = 0.0;  // majorant mass lost to window clipping
  int iterations = 0;        // Neumann terms used
  double condition = 0.0;    // 1-norm condition estimate (dense method)
  std::optional<ModulusReport> modulus;  // continuity modulus of m
};

/// Both residual triples, re-deriving the dense matrices from the kernels.
void inverse_residuals(const Kernel& n, const Kernel& m,
                       std::array<double, 3>& right,
                       std::array<double, 3>& left);

/// Geometric series  m = sum_{j>=1} (-1)^j k^(o j), truncated once the tail
/// bound (beta.l1)^(J+1)/(1-beta.l1) drops below tol.  Requires beta.l1 < 1.
/// The accumulated majorant satisfies beta_m.l1 <= beta.l1/(1-beta.l1).
/// `keep_going`, when supplied, is polled between terms; returning false
/// abandons the computation with CancelledError.
InverseResult invert_neumann(const Kernel& k, double tol, int k_max,
                             const std::function<bool()>& keep_going = {});

/// Factorizes I + mat(k), extracts m[i][w] = block(i,i-w)/h^c over the full
/// representable window, and attaches the tightest majorant plus the
/// continuity modulus of m.  No smallness assumption; fails with SolverError
/// when the 1-norm condition estimate exceeds `cond_threshold`.
InverseResult invert_dense(const Kernel& k, double cond_threshold = 1e12);

/// Independent oracle for pure-convolution kernels on the periodic closure
/// of the lattice: forms the discrete symbol n_hat(xi_k) (h^c weight
/// included), inverts I + n_hat per frequency, and transforms -n_hat(I +
/// n_hat)^{-1} back to an x-constant kernel with window N/2.  Fails when the
/// symbol determinant vanishes at some frequency.  `profile` holds the d x d
/// offset blocks over the window {|w_axis| <= w_half}.
Kernel fourier_oracle_invert(const std::vector<double>& profile, int w_half,
                             const GridSpec& grid);

struct DiffOpInverseStats {
  double q = 0.0;        // off-term dominance ||D0^{-1}(D - D0)||
  int terms = 0;         // geometric terms used
  double tail = 0.0;     // geometric tail bound at exit
  double residual_right_inf = 0.0;  // ||mat(D) mat(Dinv) - I||_inf
  double residual_left_inf = 0.0;
};

/// Inverts D = D0(I + R) by the geometric series in R = D0^{-1}(D - D0),
/// requiring an invertible zero-shift coefficient and dominance q < 1.
DiffOp invert_diffop(const DiffOp& D, double tol, int k_max,
                     DiffOpInverseStats* stats = nullptr,
                     const std::function<bool()>& keep_going = {});

/// Structured inverse of a difference-integral operator:
/// (D+N)^{-1} = (1 + D^{-1}N)^{-1} D^{-1} = A' + M with A' = D^{-1} and
/// M = K' A' where 1 + K' inverts 1 + D^{-1}N.
struct DiffIntInverse {
  DiffOp a;
  Kernel m;
  std::array<double, 3> residual_right{};  // vs mat(D) + mat(N), p = 1,2,inf
  std::array<double, 3> residual_left{};
};

DiffIntInverse invert_diffint(const DiffOp& D, const Kernel& k, double tol,
                              int k_max = 2000);

}  // namespace kalg
