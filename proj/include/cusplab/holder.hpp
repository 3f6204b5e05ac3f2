#pragma once
// Hölder seminorms of grid functions and power-law fits of their growth
// toward the blow-up time.

#include <cstddef>
#include <vector>

#include "cusplab/grid.hpp"
#include "cusplab/kernels.hpp"

namespace cusplab {

// Discrete C^{0,alpha} seminorm sup |f(x_i) - f(x_j)| / |x_i - x_j|^alpha.
// Pairs are taken over an index subsample of at most max_nodes nodes (plus
// must_include, when >= 0, so the steepest point is never skipped), which
// bounds the true seminorm from below.  Nodes with x in the open interval
// (exclude_lo, exclude_hi) are dropped; the default interval is empty.
double holder_seminorm(const Field& f, const Grid1D& grid, double alpha,
                       std::size_t max_nodes = 2000,
                       std::ptrdiff_t must_include = -1,
                       double exclude_lo = 1.0, double exclude_hi = -1.0);

struct SeminormPoint {
  double t = 0.0;
  double value = 0.0;
};

// Least-squares fit of log(value) against log(T_star - t).  For a gradient
// blow-up with a C^{3/5} self-similar profile the expected slope of the
// C^{0,alpha} seminorm is -(5*alpha - 3)/2.  Requires at least 6 samples
// whose T_star - t values span a factor >= 4; throws otherwise.
LineFit fit_blowup_rate(const std::vector<SeminormPoint>& pts, double T_star);

double expected_rate_exponent(double alpha);  // -(5*alpha - 3)/2

}  // namespace cusplab
