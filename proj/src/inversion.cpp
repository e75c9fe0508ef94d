#include "kalg/inversion.hpp"

#include <cmath>
#include <complex>
#include <map>
#include <string>

namespace kalg {

namespace {

std::array<double, 3> residual_norms(const GridSpec& grid,
                                     const Eigen::MatrixXd& R) {
  DenseOperator dense{grid, R};
  return {op_norm(dense, Lp::one), op_norm(dense, Lp::two),
          op_norm(dense, Lp::inf)};
}

double scalar_norm1(const Eigen::MatrixXd& A) {
  double best = 0.0;
  for (Eigen::Index j = 0; j < A.cols(); ++j)
    best = std::max(best, A.col(j).cwiseAbs().sum());
  return best;
}

// out += sign * t, aligning offset windows (out window must contain t's).
void accumulate_kernel(Kernel& out, const Kernel& t, double sign) {
  const int c = out.grid.c;
  const std::int64_t n = out.grid.npoints();
  const int dd = out.grid.d * out.grid.d;
  std::array<int, kMaxDim> off{};
  for (std::int64_t w = 0; w < t.nwin(); ++w) {
    t.wunrank(w, off);
    const std::int64_t wr =
        out.wrank({off.data(), static_cast<std::size_t>(c)});
    for (std::int64_t i = 0; i < n; ++i) {
      const double* src = t.block(i, w);
      double* dst = out.block(i, wr);
      for (int e = 0; e < dd; ++e) dst[e] += sign * src[e];
    }
    out.beta->beta[static_cast<std::size_t>(wr)] +=
        t.beta->beta[static_cast<std::size_t>(w)];
  }
}

Kernel widen_kernel(const Kernel& k, int w_half) {
  if (w_half == k.w_half) return k;
  Kernel out;
  out.grid = k.grid;
  out.w_half = w_half;
  out.samples.assign(
      static_cast<std::size_t>(out.grid.npoints() * out.nwin()) *
          out.grid.d * out.grid.d,
      0.0);
  out.beta = Majorant{};
  out.beta->beta.assign(static_cast<std::size_t>(out.nwin()), 0.0);
  accumulate_kernel(out, k, 1.0);
  out.beta->l1 = k.beta ? k.beta->l1 : 0.0;
  return out;
}

}  // namespace

void inverse_residuals(const Kernel& n, const Kernel& m,
                       std::array<double, 3>& right,
                       std::array<double, 3>& left) {
  const Eigen::MatrixXd A =
      Eigen::MatrixXd(materialize(n).entries) +
      Eigen::MatrixXd::Identity(n.grid.npoints() * n.grid.d,
                                n.grid.npoints() * n.grid.d);
  const Eigen::MatrixXd B =
      Eigen::MatrixXd(materialize(m).entries) +
      Eigen::MatrixXd::Identity(m.grid.npoints() * m.grid.d,
                                m.grid.npoints() * m.grid.d);
  const Eigen::MatrixXd I =
      Eigen::MatrixXd::Identity(A.rows(), A.cols());
  right = residual_norms(n.grid, A * B - I);
  left = residual_norms(n.grid, B * A - I);
}

InverseResult invert_neumann(const Kernel& k, double tol, int k_max,
                             const std::function<bool()>& keep_going) {
  const Majorant beta = k.beta ? *k.beta : tightest_majorant(k);
  const double q = beta.l1;
  if (!(q < 1.0))
    throw SolverError("invert_neumann: Neumann requires ||beta||_1 < 1, got " +
                      std::to_string(q));

  InverseResult res;
  res.method = InverseMethod::neumann;

  // Running term k^(o j) and the alternating sum, windows growing as they go.
  Kernel term = k;
  if (!term.beta) term.beta = beta;
  Kernel acc = widen_kernel(term, term.w_half);
  // acc = -term at j = 1
  for (double& v : acc.samples) v = -v;
  int j = 1;
  double tail = q * q / (1.0 - q);

  while (tail >= tol) {
    if (j >= k_max)
      throw SolverError(
          "invert_neumann: k_max = " + std::to_string(k_max) +
          " reached with tail bound " + std::to_string(tail) + " >= tol");
    if (keep_going && !keep_going())
      throw CancelledError("invert_neumann: cancelled between terms");
    double clip = 0.0;
    term = compose_nn(term, k, &clip);
    res.tail_report += clip;
    ++j;
    if (term.w_half > acc.w_half) acc = widen_kernel(acc, term.w_half);
    accumulate_kernel(acc, term, (j % 2 == 0) ? 1.0 : -1.0);
    tail = std::pow(q, j + 1) / (1.0 - q);
  }

  acc.beta->l1 = 0.0;
  for (double b : acc.beta->beta) acc.beta->l1 += b * k.grid.w_quad;
  res.iterations = j;
  res.m = std::move(acc);
  inverse_residuals(k, res.m, res.residual_right, res.residual_left);
  return res;
}

InverseResult invert_dense(const Kernel& k, double cond_threshold) {
  const GridSpec& g = k.grid;
  const std::int64_t dim = g.npoints() * g.d;

  Eigen::MatrixXd A = materialize(k).entries;
  A += Eigen::MatrixXd::Identity(dim, dim);

  Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
  Eigen::MatrixXd inv = lu.solve(Eigen::MatrixXd::Identity(dim, dim));

  if (!inv.allFinite())
    throw SolverError(
        "invert_dense: factorization produced non-finite entries; 1+N is "
        "singular at this resolution");
  const double cond = scalar_norm1(A) * scalar_norm1(inv);
  if (!(cond < cond_threshold))
    throw SolverError(
        "invert_dense: condition estimate " + std::to_string(cond) +
        " exceeds threshold; 1+N not invertible at this resolution");

  InverseResult res;
  res.method = InverseMethod::dense;
  res.condition = cond;

  // M = inv - I, kernel extraction over the full representable window.
  Kernel m;
  m.grid = g;
  m.w_half = g.N - 1;
  m.samples.assign(
      static_cast<std::size_t>(g.npoints() * m.nwin()) * g.d * g.d, 0.0);
  const std::int64_t n = g.npoints();
  std::array<int, kMaxDim> mi{}, mj{}, off{};
  for (std::int64_t i = 0; i < n; ++i) {
    g.unrank(i, mi);
    for (std::int64_t jj = 0; jj < n; ++jj) {
      g.unrank(jj, mj);
      for (int a = 0; a < g.c; ++a) off[a] = mi[a] - mj[a];
      const std::int64_t wr =
          m.wrank({off.data(), static_cast<std::size_t>(g.c)});
      double* blk = m.block(i, wr);
      for (int a = 0; a < g.d; ++a)
        for (int b = 0; b < g.d; ++b) {
          double v = inv(i * g.d + a, jj * g.d + b);
          if (i == jj && a == b) v -= 1.0;
          blk[a * g.d + b] = v / g.w_quad;
        }
    }
  }
  m.beta = tightest_majorant(m);

  std::vector<LatticeShift> deltas;
  for (int step : {1, 2, 4, 8})
    if (step < g.N) deltas.push_back(LatticeShift{step});
  res.modulus = continuity_modulus(m, deltas);

  res.m = std::move(m);
  inverse_residuals(k, res.m, res.residual_right, res.residual_left);
  return res;
}

Kernel fourier_oracle_invert(const std::vector<double>& profile, int w_half,
                             const GridSpec& grid) {
  const int c = grid.c;
  const int d = grid.d;
  const int N = grid.N;
  if (w_half < 0 || w_half > N)
    throw std::invalid_argument("fourier_oracle_invert: bad window");

  // Reuse Kernel's window indexing for the profile.
  Kernel probe;
  probe.grid = grid;
  probe.w_half = w_half;
  const std::int64_t nwin = probe.nwin();
  if (static_cast<std::int64_t>(profile.size()) != nwin * d * d)
    throw std::invalid_argument(
        "fourier_oracle_invert: profile size does not match window");

  const std::int64_t nfreq = grid.npoints();
  using CMat = Eigen::MatrixXcd;
  std::vector<CMat> mhat(static_cast<std::size_t>(nfreq));

  std::array<int, kMaxDim> kk{}, off{};
  const double two_pi = 2.0 * std::acos(-1.0);
  for (std::int64_t f = 0; f < nfreq; ++f) {
    grid.unrank(f, kk);
    CMat nhat = CMat::Zero(d, d);
    for (std::int64_t w = 0; w < nwin; ++w) {
      probe.wunrank(w, off);
      double phase = 0.0;
      for (int a = 0; a < c; ++a)
        phase += static_cast<double>(kk[a]) * off[a] / N;
      const std::complex<double> e =
          std::exp(std::complex<double>(0.0, -two_pi * phase));
      const double* blk = profile.data() + w * d * d;
      for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) nhat(a, b) += blk[a * d + b] * e;
    }
    nhat *= grid.w_quad;
    CMat S = CMat::Identity(d, d) + nhat;
    const Eigen::JacobiSVD<CMat> svd(S, Eigen::ComputeThinU |
                                            Eigen::ComputeThinV);
    if (svd.singularValues()(d - 1) < 1e-12)
      throw SolverError(
          "fourier_oracle_invert: symbol 1+n_hat vanishes at frequency " +
          std::to_string(f) + "; operator not invertible");
    mhat[static_cast<std::size_t>(f)] =
        -nhat * svd.solve(CMat::Identity(d, d));
  }

  Kernel out;
  out.grid = grid;
  out.w_half = N / 2;
  out.samples.assign(
      static_cast<std::size_t>(grid.npoints() * out.nwin()) * d * d, 0.0);

  const std::int64_t nwout = out.nwin();
  std::vector<double> row(static_cast<std::size_t>(nwout) * d * d, 0.0);
  for (std::int64_t w = 0; w < nwout; ++w) {
    out.wunrank(w, off);
    CMat acc = CMat::Zero(d, d);
    for (std::int64_t f = 0; f < nfreq; ++f) {
      grid.unrank(f, kk);
      double phase = 0.0;
      for (int a = 0; a < c; ++a)
        phase += static_cast<double>(kk[a]) * off[a] / N;
      acc += mhat[static_cast<std::size_t>(f)] *
             std::exp(std::complex<double>(0.0, two_pi * phase));
    }
    acc /= static_cast<double>(nfreq) * grid.w_quad;
    double* blk = row.data() + w * d * d;
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b) blk[a * d + b] = acc(a, b).real();
  }
  for (std::int64_t i = 0; i < grid.npoints(); ++i)
    std::copy(row.begin(), row.end(),
              out.samples.begin() +
                  static_cast<std::size_t>(i * nwout) * d * d);
  out.beta = tightest_majorant(out);
  return out;
}

namespace {

DiffOp diffop_scale(const DiffOp& D, double s) {
  DiffOp out = D;
  for (auto& t : out.terms)
    for (double& v : t.coeffs) v *= s;
  out.c_norm = std::abs(s) * D.c_norm;
  return out;
}

DiffOp diffop_add(const DiffOp& a, const DiffOp& b) {
  std::map<std::array<int, kMaxDim>, std::vector<double>> merged;
  auto fold = [&](const DiffOp& D) {
    for (const auto& t : D.terms) {
      std::array<int, kMaxDim> key = t.shift.s;
      auto& acc = merged[key];
      if (acc.empty()) acc = t.coeffs;
      else
        for (std::size_t e = 0; e < acc.size(); ++e) acc[e] += t.coeffs[e];
    }
  };
  fold(a);
  fold(b);
  std::vector<DiffOpTerm> terms;
  for (auto& [shift, coeffs] : merged)
    terms.push_back({LatticeShift{shift[0], shift[1]}, std::move(coeffs)});
  return make_diffop(a.grid, std::move(terms));
}

}  // namespace

DiffOp invert_diffop(const DiffOp& D, double tol, int k_max,
                     DiffOpInverseStats* stats,
                     const std::function<bool()>& keep_going) {
  const GridSpec& g = D.grid;
  const std::int64_t n = g.npoints();
  const int d = g.d;

  const DiffOpTerm* zero_term = nullptr;
  for (const auto& t : D.terms)
    if (t.shift == LatticeShift{}) zero_term = &t;
  if (!zero_term)
    throw SolverError("invert_diffop: no zero-shift term");

  // Pointwise inverse of the zero-shift coefficient.
  DiffOpTerm inv0;
  inv0.shift = LatticeShift{};
  inv0.coeffs.assign(static_cast<std::size_t>(n) * d * d, 0.0);
  for (std::int64_t i = 0; i < n; ++i) {
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                   Eigen::RowMajor>>
        blk(zero_term->coeffs.data() + i * d * d, d, d);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(blk);
    if (!lu.isInvertible())
      throw SolverError(
          "invert_diffop: zero-shift coefficient singular at lattice index " +
          std::to_string(i));
    Eigen::MatrixXd bi = lu.inverse();
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b) inv0.coeffs[(i * d + a) * d + b] = bi(a, b);
  }
  DiffOp D0inv = make_diffop(g, {inv0});

  // R = D0^{-1}(D - D0); dominance q = ||R|| must stay below 1.
  std::vector<DiffOpTerm> off_terms;
  for (const auto& t : D.terms)
    if (!(t.shift == LatticeShift{})) off_terms.push_back(t);
  DiffOp R = compose_dd(D0inv, make_diffop(g, std::move(off_terms)));
  const double q = R.c_norm;
  if (!(q < 1.0))
    throw SolverError(
        "invert_diffop: zero-shift dominance fails, q = " + std::to_string(q));

  DiffOp series = identity_diffop(g);
  DiffOp power = identity_diffop(g);
  const DiffOp negR = diffop_scale(R, -1.0);
  int j = 0;
  double tail = (q == 0.0) ? 0.0 : q / (1.0 - q);
  while (tail >= tol) {
    if (j >= k_max)
      throw SolverError("invert_diffop: k_max reached with tail " +
                        std::to_string(tail) + " >= tol");
    if (keep_going && !keep_going())
      throw CancelledError("invert_diffop: cancelled between terms");
    power = compose_dd(power, negR);
    series = diffop_add(series, power);
    ++j;
    tail = std::pow(q, j + 1) / (1.0 - q);
  }

  DiffOp inv = compose_dd(series, D0inv);

  if (stats) {
    stats->q = q;
    stats->terms = j;
    stats->tail = tail;
    const Eigen::MatrixXd MD = materialize_diffop(D).entries;
    const Eigen::MatrixXd MI = materialize_diffop(inv).entries;
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(MD.rows(), MD.cols());
    stats->residual_right_inf =
        op_norm(DenseOperator{g, MD * MI - I}, Lp::inf);
    stats->residual_left_inf =
        op_norm(DenseOperator{g, MI * MD - I}, Lp::inf);
  }
  return inv;
}

DiffIntInverse invert_diffint(const DiffOp& D, const Kernel& k, double tol,
                              int k_max) {
  if (!D.grid.same_lattice(k.grid))
    throw std::invalid_argument("invert_diffint: grid mismatch");

  DiffOpInverseStats stats;
  DiffOp a = invert_diffop(D, tol, k_max, &stats);
  Kernel K = compose_dn(a, k);
  InverseResult inner = invert_dense(K);
  Kernel m = compose_nd(inner.m, a);

  DiffIntInverse out;
  const GridSpec& g = k.grid;
  const Eigen::MatrixXd T =
      materialize_diffop(D).entries + materialize(k).entries;
  const Eigen::MatrixXd S =
      materialize_diffop(a).entries + materialize(m).entries;
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(T.rows(), T.cols());
  out.residual_right = residual_norms(g, T * S - I);
  out.residual_left = residual_norms(g, S * T - I);
  out.a = std::move(a);
  out.m = std::move(m);
  return out;
}

}  // namespace kalg
