#pragma once
// Uniform 1-D grid.

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace cusplab {

struct Grid1D {
  double x_min = 0.0;
  double x_max = 0.0;
  std::ptrdiff_t n = 0;  // node count
  double dx = 0.0;

  Grid1D() = default;
  Grid1D(double xmin, double xmax, std::ptrdiff_t nodes)
      : x_min(xmin), x_max(xmax), n(nodes) {
    if (n < 16) throw std::invalid_argument("Grid1D: need n >= 16");
    if (!(x_min < 0.0 && 0.0 < x_max))
      throw std::invalid_argument("Grid1D: need x_min < 0 < x_max");
    dx = (x_max - x_min) / static_cast<double>(n - 1);
  }

  double x(std::ptrdiff_t i) const {
    return x_min + dx * static_cast<double>(i);
  }

  std::vector<double> nodes() const {
    std::vector<double> xs(static_cast<std::size_t>(n));
    for (std::ptrdiff_t i = 0; i < n; ++i)
      xs[static_cast<std::size_t>(i)] = x(i);
    return xs;
  }

  // Index of the node nearest to x0 (clamped to range).
  std::ptrdiff_t nearest(double x0) const {
    double fi = (x0 - x_min) / dx;
    std::ptrdiff_t i = static_cast<std::ptrdiff_t>(fi + 0.5);
    if (i < 0) i = 0;
    if (i > n - 1) i = n - 1;
    return i;
  }
};

}  // namespace cusplab
