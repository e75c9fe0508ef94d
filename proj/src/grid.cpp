#include "kalg/grid.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace kalg {

GridSpec make_grid(int c, double A, int N, int d, std::int64_t cap) {
  if (c < 1 || c > kMaxDim)
    throw std::invalid_argument("make_grid: c must be 1 or " +
                                std::to_string(kMaxDim));
  if (!(A > 0.0)) throw std::invalid_argument("make_grid: A must be positive");
  if (N < 2) throw std::invalid_argument("make_grid: N must be at least 2");
  if (d < 1) throw std::invalid_argument("make_grid: d must be positive");

  std::int64_t total = 1;
  for (int a = 0; a < c; ++a) total *= N;
  if (total > cap)
    throw std::invalid_argument("make_grid: N^c = " + std::to_string(total) +
                                " exceeds the dense-oracle cap " +
                                std::to_string(cap));

  GridSpec g;
  g.c = c;
  g.A = A;
  g.N = N;
  g.d = d;
  g.h = 2.0 * A / N;
  g.w_quad = 1.0;
  for (int a = 0; a < c; ++a) g.w_quad *= g.h;
  return g;
}

std::vector<std::int64_t> shift_indices(const GridSpec& grid,
                                        const LatticeShift& s) {
  for (int a = 0; a < grid.c; ++a)
    if (std::abs(s.s[a]) > grid.N)
      throw std::invalid_argument("shift_indices: |s| exceeds N");

  const std::int64_t n = grid.npoints();
  std::vector<std::int64_t> map(static_cast<std::size_t>(n));
  std::array<int, kMaxDim> mi{};
  for (std::int64_t i = 0; i < n; ++i) {
    grid.unrank(i, mi);
    bool inside = true;
    std::array<int, kMaxDim> src = mi;
    for (int a = 0; a < grid.c; ++a) {
      src[a] -= s.s[a];
      if (src[a] < 0 || src[a] >= grid.N) {
        inside = false;
        break;
      }
    }
    map[static_cast<std::size_t>(i)] =
        inside ? grid.rank({src.data(), static_cast<std::size_t>(grid.c)})
               : -1;
  }
  return map;
}

LatticeShift shift_from_physical(const GridSpec& grid,
                                 std::span<const double> displacement) {
  if (static_cast<int>(displacement.size()) != grid.c)
    throw std::invalid_argument("shift_from_physical: dimension mismatch");
  LatticeShift out;
  for (int a = 0; a < grid.c; ++a) {
    const double q = displacement[a] / grid.h;
    const double r = std::round(q);
    if (std::abs(q - r) > 1e-9 * std::max(1.0, std::abs(q)))
      throw std::invalid_argument(
          "shift_from_physical: displacement is not a lattice multiple of h");
    out.s[a] = static_cast<int>(r);
  }
  return out;
}

}  // namespace kalg
