#include "kalg/verify.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace kalg {

CheckEntry check_domination(const Kernel& k, const Majorant& beta_claimed) {
  if (static_cast<std::int64_t>(beta_claimed.beta.size()) != k.nwin())
    throw std::invalid_argument("check_domination: window mismatch");
  const std::int64_t n = k.grid.npoints();
  const std::int64_t nw = k.nwin();
  double worst = -std::numeric_limits<double>::infinity();
  for (std::int64_t i = 0; i < n; ++i)
    for (std::int64_t w = 0; w < nw; ++w)
      worst = std::max(worst,
                       block_op_norm(k.block(i, w), k.grid.d) -
                           beta_claimed.beta[static_cast<std::size_t>(w)]);
  return make_check("domination", 0.0, worst);
}

double residual(const Kernel& nK, const Kernel& mK, Lp p) {
  if (!nK.grid.same_lattice(mK.grid))
    throw std::invalid_argument("residual: grid mismatch");
  const std::int64_t dim = nK.grid.npoints() * nK.grid.d;
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(dim, dim);
  const Eigen::MatrixXd A = I + materialize(nK).entries;
  const Eigen::MatrixXd B = I + materialize(mK).entries;
  return op_norm(DenseOperator{nK.grid, A * B - I}, p);
}

Certificate p_independence_report(const Kernel& nK, const Kernel& mK,
                                  double tol) {
  Certificate cert;
  cert.subject = "p-independence";
  cert.environment = nK.grid;
  cert.tolerances.emplace_back("residual", tol);
  const Lp ps[3] = {Lp::one, Lp::two, Lp::inf};
  const char* names[3] = {"residual_l1", "residual_l2", "residual_linf"};
  for (int i = 0; i < 3; ++i) {
    const double r = residual(nK, mK, ps[i]);
    cert.checks.push_back(make_check(names[i], tol, r));
    cert.residual_rows.push_back({i == 0 ? 1.0 : (i == 1 ? 2.0 : 0.0), r, r});
  }
  double worst = 0.0;
  for (const auto& c : cert.checks) worst = std::max(worst, c.measured_value);
  cert.checks.push_back(make_check("p_independence", tol, worst));
  return cert;
}

std::array<CheckEntry, 2> truncation_certificate(const Kernel& k,
                                                 double delta) {
  TruncationResult tr = truncate_band(k, delta);
  const Eigen::MatrixXd D =
      materialize(k).entries - materialize(tr.kernel).entries;
  const double tol = 1e-13 * std::max(1.0, tr.tail);
  const double m1 = op_norm(DenseOperator{k.grid, D}, Lp::one);
  const double minf = op_norm(DenseOperator{k.grid, D}, Lp::inf);
  return {make_check("truncation_tail_l1", tr.tail, m1, tol),
          make_check("truncation_tail_linf", tr.tail, minf, tol)};
}

BlockDecayReport block_singular_values(const Kernel& k,
                                       std::span<const int> cell_k,
                                       std::span<const int> cell_m,
                                       std::span<const int> ranks) {
  const GridSpec& g = k.grid;
  if (static_cast<int>(cell_k.size()) != g.c ||
      static_cast<int>(cell_m.size()) != g.c)
    throw std::invalid_argument("block_singular_values: cell dimension");

  // Lattice indices per axis whose coordinate lies in cell + (0, 1].
  auto axis_indices = [&](int cell) {
    std::vector<int> idx;
    for (int i = 0; i < g.N; ++i) {
      const double x = g.point(i);
      if (x > cell && x <= cell + 1.0) idx.push_back(i);
    }
    return idx;
  };
  auto cell_points = [&](std::span<const int> cell) {
    std::vector<std::int64_t> pts;
    if (g.c == 1) {
      for (int i : axis_indices(cell[0])) pts.push_back(i);
    } else {
      const std::vector<int> i0 = axis_indices(cell[0]);
      const std::vector<int> i1 = axis_indices(cell[1]);
      for (int a : i0)
        for (int b : i1) {
          const std::array<int, kMaxDim> mi{a, b};
          pts.push_back(g.rank({mi.data(), static_cast<std::size_t>(g.c)}));
        }
    }
    return pts;
  };

  const std::vector<std::int64_t> cols = cell_points(cell_k);
  const std::vector<std::int64_t> rows = cell_points(cell_m);
  if (rows.size() < 8 || cols.size() < 8)
    throw std::invalid_argument(
        "block_singular_values: degenerate cell (needs >= 8 lattice points; "
        "refine the grid or move the cell inside the box)");

  const Eigen::MatrixXd full = materialize(k).entries;
  const int d = g.d;
  Eigen::MatrixXd block(rows.size() * d, cols.size() * d);
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t cc = 0; cc < cols.size(); ++cc)
      block.block(r * d, cc * d, d, d) =
          full.block(rows[r] * d, cols[cc] * d, d, d);

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(block);
  BlockDecayReport rep;
  for (int a = 0; a < g.c; ++a) {
    rep.cell_k[a] = cell_k[a];
    rep.cell_m[a] = cell_m[a];
  }
  rep.singular_values.assign(svd.singularValues().data(),
                             svd.singularValues().data() +
                                 svd.singularValues().size());
  const double s1 = rep.singular_values.empty() ? 0.0 : rep.singular_values[0];
  for (int r : ranks) {
    double ratio = 0.0;
    if (s1 > 0.0 && r >= 1 &&
        r <= static_cast<int>(rep.singular_values.size()))
      ratio = rep.singular_values[static_cast<std::size_t>(r - 1)] / s1;
    rep.decay_ratios.emplace_back(r, ratio);
  }
  return rep;
}

Certificate certify_inverse(const Kernel& nK, const InverseResult& result,
                            const CertifyOptions& opts, std::string subject) {
  const Kernel& m = result.m;
  Certificate cert;
  cert.subject = subject.empty() ? "inverse" : std::move(subject);
  cert.environment = nK.grid;
  cert.tolerances = {
      {"residual", opts.tol_residual},
      {"modulus_ratio", opts.modulus_ratio},
      {"modulus_offset", opts.modulus_offset},
      {"decay_threshold", opts.decay_threshold},
      {"decay_bound", opts.decay_bound},
  };

  // Two-sided residuals, recomputed from the kernels.
  std::array<double, 3> right{}, left{};
  inverse_residuals(nK, m, right, left);
  const char* rn[3] = {"residual_right_l1", "residual_right_l2",
                       "residual_right_linf"};
  const char* ln[3] = {"residual_left_l1", "residual_left_l2",
                       "residual_left_linf"};
  double worst = 0.0;
  for (int i = 0; i < 3; ++i) {
    cert.checks.push_back(make_check(rn[i], opts.tol_residual, right[i]));
    cert.checks.push_back(make_check(ln[i], opts.tol_residual, left[i]));
    worst = std::max({worst, right[i], left[i]});
    cert.residual_rows.push_back(
        {i == 0 ? 1.0 : (i == 1 ? 2.0 : 0.0), right[i], left[i]});
  }
  cert.checks.push_back(make_check("p_independence", opts.tol_residual, worst));

  const Majorant beta_m = m.beta ? *m.beta : tightest_majorant(m);
  cert.checks.push_back(check_domination(m, beta_m));

  // Offset-decay profile of beta_m by band distance L*h, plus the crossing
  // point below decay_threshold.
  {
    std::array<int, kMaxDim> off{};
    std::vector<double> by_length(static_cast<std::size_t>(m.w_half) + 1, 0.0);
    for (std::int64_t w = 0; w < m.nwin(); ++w) {
      m.wunrank(w, off);
      int L = 0;
      for (int a = 0; a < m.grid.c; ++a) L = std::max(L, std::abs(off[a]));
      by_length[static_cast<std::size_t>(L)] =
          std::max(by_length[static_cast<std::size_t>(L)],
                   beta_m.beta[static_cast<std::size_t>(w)]);
    }
    for (std::size_t L = 0; L < by_length.size(); ++L)
      cert.beta_decay.emplace_back(static_cast<double>(L) * m.grid.h,
                                   by_length[L]);
    double crossing = std::numeric_limits<double>::max();
    for (std::size_t L = by_length.size(); L-- > 0;) {
      if (by_length[L] > opts.decay_threshold) break;
      crossing = static_cast<double>(L) * m.grid.h;
    }
    cert.checks.push_back(
        make_check("beta_decay_crossing", opts.decay_bound, crossing));
  }

  // Continuity modulus of m against that of n at delta in {h,2h,4h,8h}.
  {
    std::vector<LatticeShift> deltas;
    for (int step : {1, 2, 4, 8})
      if (step < nK.grid.N) deltas.push_back(LatticeShift{step});
    const ModulusReport rm = continuity_modulus(m, deltas);
    const ModulusReport rn_mod = continuity_modulus(nK, deltas);
    for (std::size_t i = 0; i < deltas.size(); ++i) {
      cert.omega_m.emplace_back(deltas[i].s[0] * nK.grid.h, rm.omega[i]);
      cert.omega_n.emplace_back(deltas[i].s[0] * nK.grid.h, rn_mod.omega[i]);
    }
    cert.checks.push_back(make_check(
        "modulus_ratio",
        opts.modulus_ratio * rn_mod.omega[0] + opts.modulus_offset,
        rm.omega[0]));
  }

  return cert;
}

}  // namespace kalg
