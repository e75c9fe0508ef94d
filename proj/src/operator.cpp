#include "kalg/operator.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace kalg {

DiscreteFunction apply(const Kernel& k, const DiscreteFunction& u) {
  if (!k.grid.same_lattice(u.grid))
    throw std::invalid_argument("apply: grid mismatch");
  const std::int64_t n = k.grid.npoints();
  const std::int64_t nw = k.nwin();
  const int d = k.grid.d;

  DiscreteFunction out;
  out.grid = k.grid;
  out.values.assign(static_cast<std::size_t>(n) * d, 0.0);

  std::array<int, kMaxDim> mi{}, off{}, src{};
  for (std::int64_t i = 0; i < n; ++i) {
    k.grid.unrank(i, mi);
    double* oi = out.values.data() + i * d;
    for (std::int64_t w = 0; w < nw; ++w) {
      k.wunrank(w, off);
      bool inside = true;
      for (int a = 0; a < k.grid.c; ++a) {
        src[a] = mi[a] - off[a];
        if (src[a] < 0 || src[a] >= k.grid.N) inside = false;
      }
      if (!inside) continue;
      const std::int64_t j =
          k.grid.rank({src.data(), static_cast<std::size_t>(k.grid.c)});
      const double* blk = k.block(i, w);
      const double* uj = u.values.data() + j * d;
      for (int a = 0; a < d; ++a) {
        double acc = 0.0;
        for (int b = 0; b < d; ++b) acc += blk[a * d + b] * uj[b];
        oi[a] += acc * k.grid.w_quad;
      }
    }
  }
  return out;
}

DenseOperator materialize(const Kernel& k, std::int64_t cap) {
  const std::int64_t n = k.grid.npoints();
  const std::int64_t dim = n * k.grid.d;
  if (n * k.grid.d > cap)
    throw std::invalid_argument("materialize: N^c*d = " + std::to_string(dim) +
                                " exceeds the dense-oracle cap " +
                                std::to_string(cap));
  const std::int64_t nw = k.nwin();
  const int d = k.grid.d;

  DenseOperator dense;
  dense.grid = k.grid;
  dense.entries = Eigen::MatrixXd::Zero(dim, dim);

  std::array<int, kMaxDim> mi{}, off{}, src{};
  for (std::int64_t i = 0; i < n; ++i) {
    k.grid.unrank(i, mi);
    for (std::int64_t w = 0; w < nw; ++w) {
      k.wunrank(w, off);
      bool inside = true;
      for (int a = 0; a < k.grid.c; ++a) {
        src[a] = mi[a] - off[a];
        if (src[a] < 0 || src[a] >= k.grid.N) inside = false;
      }
      if (!inside) continue;
      const std::int64_t j =
          k.grid.rank({src.data(), static_cast<std::size_t>(k.grid.c)});
      const double* blk = k.block(i, w);
      for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b)
          dense.entries(i * d + a, j * d + b) = blk[a * d + b] * k.grid.w_quad;
    }
  }
  return dense;
}

double op_norm_bound(const Kernel& k) {
  if (!k.beta) throw std::invalid_argument("op_norm_bound: no majorant attached");
  return k.beta->l1;
}

namespace {

double power_iteration_sigma_max(const Eigen::MatrixXd& A,
                                 const PowerIterOptions& opts) {
  const Eigen::Index n = A.cols();
  if (n == 0) return 0.0;

  // Deterministic start with mild structure to avoid orthogonal stalls.
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i)
    v(i) = 1.0 + 1e-3 * static_cast<double>(i % 7);
  v.normalize();

  double sigma = 0.0;
  for (int it = 0; it < opts.max_iters; ++it) {
    Eigen::VectorXd w = A.transpose() * (A * v);
    const double norm = w.norm();
    if (norm == 0.0) return 0.0;  // v in the null space: matrix is zero there
    const double next = std::sqrt(norm);
    v = w / norm;
    if (std::abs(next - sigma) <= opts.tol * std::max(1.0, next)) return next;
    sigma = next;
  }
  throw std::runtime_error(
      "op_norm: power iteration did not converge within max_iters");
}

}  // namespace

double op_norm(const DenseOperator& dense, Lp p, PowerIterOptions opts) {
  const Eigen::MatrixXd& A = dense.entries;
  const int d = dense.grid.d;
  const std::int64_t n = dense.grid.npoints();

  switch (p) {
    case Lp::inf: {
      double best = 0.0;
      for (Eigen::Index i = 0; i < A.rows(); ++i)
        best = std::max(best, A.row(i).cwiseAbs().sum());
      return best;
    }
    case Lp::one: {
      double best = 0.0;
      std::vector<double> blk(static_cast<std::size_t>(d) * d);
      for (std::int64_t j = 0; j < n; ++j) {
        double col = 0.0;
        for (std::int64_t i = 0; i < n; ++i) {
          for (int a = 0; a < d; ++a)
            for (int b = 0; b < d; ++b)
              blk[static_cast<std::size_t>(a) * d + b] =
                  A(i * d + a, j * d + b);
          col += block_op_norm(blk.data(), d);
        }
        best = std::max(best, col);
      }
      return best;
    }
    case Lp::two:
      return power_iteration_sigma_max(A, opts);
  }
  return 0.0;
}

double lp_norm(const DiscreteFunction& u, Lp p) {
  const std::int64_t n = u.grid.npoints();
  const int d = u.grid.d;
  if (p == Lp::inf) {
    double best = 0.0;
    for (std::int64_t i = 0; i < n * d; ++i)
      best = std::max(best, std::abs(u.values[static_cast<std::size_t>(i)]));
    return best;
  }
  double acc = 0.0;
  for (std::int64_t i = 0; i < n; ++i) {
    double pt = 0.0;
    for (int a = 0; a < d; ++a)
      pt = std::max(pt, std::abs(u.values[static_cast<std::size_t>(i * d + a)]));
    acc += (p == Lp::one ? pt : pt * pt) * u.grid.w_quad;
  }
  return p == Lp::one ? acc : std::sqrt(acc);
}

DenseOperator identity_operator(const GridSpec& grid) {
  DenseOperator id;
  id.grid = grid;
  const std::int64_t dim = grid.npoints() * grid.d;
  id.entries = Eigen::MatrixXd::Identity(dim, dim);
  return id;
}

}  // namespace kalg
