#include "cusplab/holder.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cusplab {

double holder_seminorm(const Field& f, const Grid1D& grid, double alpha,
                       std::size_t max_nodes, std::ptrdiff_t must_include,
                       double exclude_lo, double exclude_hi) {
  const std::size_t n = f.size();
  if (n != static_cast<std::size_t>(grid.n))
    throw std::invalid_argument("holder_seminorm: field/grid size mismatch");
  if (!(alpha > 0.0) || alpha > 1.0)
    throw std::invalid_argument("holder_seminorm: alpha must be in (0, 1]");
  if (max_nodes < 2) throw std::invalid_argument("holder_seminorm: max_nodes");

  const bool has_hole = exclude_lo < exclude_hi;
  auto excluded = [&](std::size_t i) {
    if (!has_hole) return false;
    const double x = grid.x(i);
    return x > exclude_lo && x < exclude_hi;
  };

  const std::size_t stride = (n + max_nodes - 1) / max_nodes;
  std::vector<std::size_t> idx;
  idx.reserve(n / stride + 2);
  for (std::size_t i = 0; i < n; i += stride)
    if (!excluded(i)) idx.push_back(i);
  if (!excluded(n - 1) && (idx.empty() || idx.back() != n - 1))
    idx.push_back(n - 1);
  if (must_include >= 0 && static_cast<std::size_t>(must_include) < n &&
      !excluded(static_cast<std::size_t>(must_include))) {
    idx.push_back(static_cast<std::size_t>(must_include));
  }
  if (idx.size() < 2) return 0.0;

  // Most pair distances are multiples of stride*dx; precompute that power
  // table and fall back to pow() for the remainder.
  std::vector<double> powtab(n / stride + 2, 0.0);
  for (std::size_t k = 1; k < powtab.size(); ++k)
    powtab[k] = std::pow(static_cast<double>(k * stride) * grid.dx, alpha);

  double sup = 0.0;
  for (std::size_t a = 0; a < idx.size(); ++a) {
    for (std::size_t b = a + 1; b < idx.size(); ++b) {
      const std::size_t i = idx[a], j = idx[b];
      const std::size_t d = (i > j) ? i - j : j - i;
      if (d == 0) continue;
      double denom;
      if (d % stride == 0 && idx[a] % stride == 0 && idx[b] % stride == 0 &&
          d / stride < powtab.size()) {
        denom = powtab[d / stride];
      } else {
        denom = std::pow(static_cast<double>(d) * grid.dx, alpha);
      }
      sup = std::max(sup, std::abs(f[i] - f[j]) / denom);
    }
  }
  return sup;
}

double expected_rate_exponent(double alpha) {
  return -(5.0 * alpha - 3.0) / 2.0;
}

LineFit fit_blowup_rate(const std::vector<SeminormPoint>& pts, double T_star) {
  std::vector<double> lx, ly;
  for (const SeminormPoint& p : pts) {
    const double rem = T_star - p.t;
    if (!(rem > 0.0) || !(p.value > 0.0)) continue;
    lx.push_back(std::log(rem));
    ly.push_back(std::log(p.value));
  }
  if (lx.size() < 6)
    throw std::runtime_error("fit_blowup_rate: need at least 6 samples with "
                             "t < T_star and positive value");
  const auto [lo, hi] = std::minmax_element(lx.begin(), lx.end());
  if (*hi - *lo < std::log(4.0))
    throw std::runtime_error(
        "fit_blowup_rate: samples span less than a factor 4 in T_star - t");
  return fit_line(lx, ly);
}

}  // namespace cusplab
