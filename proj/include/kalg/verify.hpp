#pragma once

#include <string>

#include "kalg/inversion.hpp"

namespace kalg {

/// One machine-checkable assertion: pass iff
/// measured_value <= claimed_bound + tolerance.
struct CheckEntry {
  std::string name;
  double claimed_bound = 0.0;
  double measured_value = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

inline CheckEntry make_check(std::string name, double claimed, double measured,
                             double tolerance = 0.0) {
  CheckEntry e{std::move(name), claimed, measured, tolerance, false};
  e.pass = measured <= claimed + tolerance;
  return e;
}

/// Machine-checkable report over a concrete kernel pair: check list,
/// tolerances used, grid environment, and the report curves behind the
/// checks (modulus curves, offset-decay profile, residuals per p).
struct Certificate {
  std::string subject;
  GridSpec environment;
  std::vector<std::pair<std::string, double>> tolerances;
  std::vector<CheckEntry> checks;

  // Report curves (empty when not applicable).
  std::vector<std::pair<double, double>> omega_n;      // delta -> omega
  std::vector<std::pair<double, double>> omega_m;      // delta -> omega
  std::vector<std::pair<double, double>> beta_decay;   // |w*h| -> max beta_m
  std::vector<std::array<double, 3>> residual_rows;    // {p, right, left}

  bool passed() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
};

/// pass iff ||n[i][w]|| <= beta_claimed[w] everywhere; the measured value is
/// the worst violation max_{i,w} (||n[i][w]|| - beta_claimed[w]).
CheckEntry check_domination(const Kernel& k, const Majorant& beta_claimed);

/// ||(I + mat(nK))(I + mat(mK)) - I||_p, matrices re-materialized on every
/// call (no caching effects).
double residual(const Kernel& nK, const Kernel& mK, Lp p);

/// Residuals of one kernel pair in all three norms against one tolerance;
/// passes only when the same mK works for every p.
Certificate p_independence_report(const Kernel& nK, const Kernel& mK,
                                  double tol);

/// Measures ||mat(k) - mat(k_delta)||_p for p in {1, inf} and certifies both
/// against the majorant tail from truncate_band.  The certificate tolerance
/// absorbs ulp-level reordering effects in the two sums (1e-13 relative).
std::array<CheckEntry, 2> truncation_certificate(const Kernel& k,
                                                 double delta);

/// Singular values of the sub-block of mat(N) coupling the unit cell
/// cell_k + (0,1]^c to cell_m + (0,1]^c, with decay ratios sigma_r/sigma_1.
struct BlockDecayReport {
  std::array<int, kMaxDim> cell_k{};
  std::array<int, kMaxDim> cell_m{};
  std::vector<double> singular_values;              // descending
  std::vector<std::pair<int, double>> decay_ratios; // rank -> sigma_r/sigma_1
};

BlockDecayReport block_singular_values(const Kernel& k,
                                       std::span<const int> cell_k,
                                       std::span<const int> cell_m,
                                       std::span<const int> ranks);

struct CertifyOptions {
  double tol_residual = 1e-8;
  double modulus_ratio = 10.0;    // omega_m(h) <= ratio * omega_n(h) + offset
  double modulus_offset = 1e-8;
  double decay_threshold = 1e-8;  // level the decay crossing is measured at
  double decay_bound = std::numeric_limits<double>::max();  // report-only
};

/// Bundles the closure properties of an inversion result into one
/// certificate: two-sided residuals for p in {1,2,inf}, domination of m by
/// its majorant, the offset-decay crossing of beta_m, and the modulus curve
/// omega_m versus omega_n at delta in {h,2h,4h,8h}.
Certificate certify_inverse(const Kernel& nK, const InverseResult& result,
                            const CertifyOptions& opts = {},
                            std::string subject = {});

}  // namespace kalg
