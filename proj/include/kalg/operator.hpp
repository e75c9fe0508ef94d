#pragma once

#include <Eigen/Dense>

#include "kalg/kernel.hpp"

namespace kalg {

enum class Lp { one, two, inf };

/// Function on the lattice with values in R^d, stored point-major.
struct DiscreteFunction {
  GridSpec grid;
  std::vector<double> values;  // npoints * d
};

/// Explicit matrix of an operator on the discrete L_p space; block (i,j) is
/// the d x d matrix coupling u[j] to output[i].  Ground-truth oracle object.
struct DenseOperator {
  GridSpec grid;
  Eigen::MatrixXd entries;  // (npoints*d) x (npoints*d)
};

/// out[i] = sum_w n[i][w] u[i-w] h^c, zero extension outside the box.
DiscreteFunction apply(const Kernel& k, const DiscreteFunction& u);

/// Dense matrix with block (i, i-w) = n[i][w] * h^c.
DenseOperator materialize(const Kernel& k,
                          std::int64_t cap = kDefaultPointCap);

/// The L1 norm of the attached majorant; bounds ||materialize(k)||_p for
/// p in {1, inf} (and, for d = 1, p = 2 by interpolation).
double op_norm_bound(const Kernel& k);

struct PowerIterOptions {
  double tol = 1e-10;
  int max_iters = 100000;
};

/// Operator norm on the quadrature-weighted discrete L_p space (uniform
/// weights cancel, so no weight factors appear):
///   p = inf : max absolute scalar row sum (exact induced norm);
///   p = 1   : max over block columns of sum_i ||block(i,j)||  (exact for
///             d = 1, an upper bound of the mixed induced norm for d > 1);
///   p = 2   : largest singular value by power iteration on A^T A.
double op_norm(const DenseOperator& dense, Lp p, PowerIterOptions opts = {});

/// Quadrature-weighted norm: (sum_i |u[i]|^p h^c)^(1/p) for p < inf,
/// max_i |u[i]| for p = inf, with |.| the max-component norm on R^d.
double lp_norm(const DiscreteFunction& u, Lp p);

/// Identity on the discrete space (unit blocks on the diagonal, no weight).
DenseOperator identity_operator(const GridSpec& grid);

}  // namespace kalg
