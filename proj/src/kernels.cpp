#include "cusplab/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "cusplab/par.hpp"

namespace cusplab {

std::vector<double> fd_weights(double x0, const std::vector<double>& xs,
                               int m) {
  // Fornberg's algorithm (SIAM Rev. 40 (1998) 685): weights for the m-th
  // derivative at x0 from samples at xs, exact for degree < xs.size().
  const int nn = static_cast<int>(xs.size());
  if (nn < m + 1) throw std::invalid_argument("fd_weights: too few nodes");
  // delta[j][k]: weight of node j for k-th derivative, built incrementally.
  std::vector<std::vector<double>> delta(
      static_cast<std::size_t>(nn), std::vector<double>(static_cast<std::size_t>(m + 1), 0.0));
  delta[0][0] = 1.0;
  double c1 = 1.0;
  double c4 = xs[0] - x0;
  for (int i = 1; i < nn; ++i) {
    const int mn = std::min(i, m);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = xs[static_cast<std::size_t>(i)] - x0;
    for (int j = 0; j < i; ++j) {
      const double c3 = xs[static_cast<std::size_t>(i)] - xs[static_cast<std::size_t>(j)];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k)
          delta[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] =
              c1 *
              (k * delta[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(k - 1)] -
               c5 * delta[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(k)]) /
              c2;
        delta[static_cast<std::size_t>(i)][0] =
            -c1 * c5 * delta[static_cast<std::size_t>(i - 1)][0] / c2;
      }
      for (int k = mn; k >= 1; --k)
        delta[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)] =
            (c4 * delta[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)] -
             k * delta[static_cast<std::size_t>(j)][static_cast<std::size_t>(k - 1)]) /
            c3;
      delta[static_cast<std::size_t>(j)][0] =
          c4 * delta[static_cast<std::size_t>(j)][0] / c3;
    }
    c1 = c2;
  }
  std::vector<double> w(static_cast<std::size_t>(nn));
  for (int j = 0; j < nn; ++j)
    w[static_cast<std::size_t>(j)] = delta[static_cast<std::size_t>(j)][static_cast<std::size_t>(m)];
  return w;
}

namespace {

// One-sided edge weights for derivative m at node `at` (0-based from the
// boundary), using `pts` boundary nodes with spacing dx.
std::vector<double> edge_weights(int m, int pts, int at, double dx) {
  std::vector<double> xs(static_cast<std::size_t>(pts));
  for (int j = 0; j < pts; ++j)
    xs[static_cast<std::size_t>(j)] = dx * static_cast<double>(j);
  return fd_weights(dx * static_cast<double>(at), xs, m);
}

// Apply edge stencils: rows 0,1 use left one-sided weights, rows n-2,n-1
// the mirrored right ones.
void apply_edges(const Field& f, Field& out, int m, int pts, double dx) {
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(f.size());
  for (int at = 0; at < 2; ++at) {
    const auto w = edge_weights(m, pts, at, dx);
    double accl = 0.0, accr = 0.0;
    for (int j = 0; j < pts; ++j) {
      accl += w[static_cast<std::size_t>(j)] * f[static_cast<std::size_t>(j)];
      // Mirror: node (n-1-j), derivative picks up (-1)^m.
      accr += w[static_cast<std::size_t>(j)] * f[static_cast<std::size_t>(n - 1 - j)];
    }
    out[static_cast<std::size_t>(at)] = accl;
    const double sgn = (m % 2 == 0) ? 1.0 : -1.0;
    out[static_cast<std::size_t>(n - 1 - at)] = sgn * accr;
  }
}

}  // namespace

Field deriv1(const Field& f, double dx, bool parallel) {
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(f.size());
  if (n < 6) throw std::invalid_argument("deriv1: need at least 6 nodes");
  Field out(f.size());
  const double c = 1.0 / (12.0 * dx);
  auto body = [&](std::ptrdiff_t i) {
    const std::size_t k = static_cast<std::size_t>(i + 2);
    out[k] = c * (f[k - 2] - 8.0 * f[k - 1] + 8.0 * f[k + 1] - f[k + 2]);
  };
  if (parallel) {
    par::parallel_for(n - 4, body);
  } else {
    par::serial_for(n - 4, body);
  }
  apply_edges(f, out, 1, 5, dx);
  return out;
}

Field deriv2(const Field& f, double dx, bool parallel) {
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(f.size());
  if (n < 6) throw std::invalid_argument("deriv2: need at least 6 nodes");
  Field out(f.size());
  const double c = 1.0 / (12.0 * dx * dx);
  auto body = [&](std::ptrdiff_t i) {
    const std::size_t k = static_cast<std::size_t>(i + 2);
    out[k] = c * (-f[k - 2] + 16.0 * f[k - 1] - 30.0 * f[k] +
                  16.0 * f[k + 1] - f[k + 2]);
  };
  if (parallel) {
    par::parallel_for(n - 4, body);
  } else {
    par::serial_for(n - 4, body);
  }
  apply_edges(f, out, 2, 6, dx);
  return out;
}

Field deriv3(const Field& f, double dx, bool parallel) {
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(f.size());
  if (n < 6) throw std::invalid_argument("deriv3: need at least 6 nodes");
  Field out(f.size());
  const double c = 1.0 / (2.0 * dx * dx * dx);
  auto body = [&](std::ptrdiff_t i) {
    const std::size_t k = static_cast<std::size_t>(i + 2);
    out[k] = c * (-f[k - 2] + 2.0 * f[k - 1] - 2.0 * f[k + 1] + f[k + 2]);
  };
  if (parallel) {
    par::parallel_for(n - 4, body);
  } else {
    par::serial_for(n - 4, body);
  }
  apply_edges(f, out, 3, 5, dx);
  return out;
}

Field deriv4(const Field& f, double dx, bool parallel) {
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(f.size());
  if (n < 6) throw std::invalid_argument("deriv4: need at least 6 nodes");
  Field out(f.size());
  const double c = 1.0 / (dx * dx * dx * dx);
  auto body = [&](std::ptrdiff_t i) {
    const std::size_t k = static_cast<std::size_t>(i + 2);
    out[k] = c * (f[k - 2] - 4.0 * f[k - 1] + 6.0 * f[k] - 4.0 * f[k + 1] +
                  f[k + 2]);
  };
  if (parallel) {
    par::parallel_for(n - 4, body);
  } else {
    par::serial_for(n - 4, body);
  }
  apply_edges(f, out, 4, 6, dx);
  return out;
}

Field deriv1_o6(const Field& f, double dx, bool parallel) {
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(f.size());
  if (n < 7) throw std::invalid_argument("deriv1_o6: need at least 7 nodes");
  Field out(f.size());
  const double c = 1.0 / (60.0 * dx);
  auto body = [&](std::ptrdiff_t i) {
    const std::size_t k = static_cast<std::size_t>(i + 3);
    out[k] = c * (-f[k - 3] + 9.0 * f[k - 2] - 45.0 * f[k - 1] +
                  45.0 * f[k + 1] - 9.0 * f[k + 2] + f[k + 3]);
  };
  if (parallel) {
    par::parallel_for(n - 6, body);
  } else {
    par::serial_for(n - 6, body);
  }
  // Rows 0..2 and n-3..n-1: reuse the 5-point one-sided stencils.
  for (int at = 0; at < 3; ++at) {
    const auto w = edge_weights(1, 6, at, dx);
    double accl = 0.0, accr = 0.0;
    for (int j = 0; j < 6; ++j) {
      accl += w[static_cast<std::size_t>(j)] * f[static_cast<std::size_t>(j)];
      accr += w[static_cast<std::size_t>(j)] * f[static_cast<std::size_t>(n - 1 - j)];
    }
    out[static_cast<std::size_t>(at)] = accl;
    out[static_cast<std::size_t>(n - 1 - at)] = -accr;
  }
  return out;
}

double deriv_at(const Field& f, const Grid1D& grid, double x0, int m,
                int npts) {
  const std::ptrdiff_t n = grid.n;
  if (static_cast<std::ptrdiff_t>(f.size()) != n)
    throw std::invalid_argument("deriv_at: field/grid size mismatch");
  if (npts < m + 1 || npts > static_cast<int>(n))
    throw std::invalid_argument("deriv_at: bad stencil width");
  // Window of npts nodes centred (as well as possible) on x0.
  std::ptrdiff_t lo = grid.nearest(x0) - npts / 2;
  if (lo < 0) lo = 0;
  if (lo > n - npts) lo = n - npts;
  std::vector<double> xs(static_cast<std::size_t>(npts));
  for (int j = 0; j < npts; ++j)
    xs[static_cast<std::size_t>(j)] = grid.x(lo + j);
  const auto w = fd_weights(x0, xs, m);
  double acc = 0.0;
  for (int j = 0; j < npts; ++j)
    acc += w[static_cast<std::size_t>(j)] *
           f[static_cast<std::size_t>(lo + j)];
  return acc;
}

double trapz(const Field& f, double dx, bool parallel) {
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(f.size());
  if (n < 2) return 0.0;
  auto block = [&](std::ptrdiff_t lo, std::ptrdiff_t hi) {
    double s = 0.0;
    for (std::ptrdiff_t i = lo; i < hi; ++i)
      s += 0.5 * (f[static_cast<std::size_t>(i)] + f[static_cast<std::size_t>(i + 1)]);
    return s;
  };
  const double s = par::blocked_reduce<double>(
      n - 1, 0.0, block, [](double a, double b) { return a + b; }, parallel);
  return s * dx;
}

Field cumtrapz(const Field& f, double dx) {
  Field out(f.size(), 0.0);
  for (std::size_t i = 1; i < f.size(); ++i)
    out[i] = out[i - 1] + 0.5 * dx * (f[i - 1] + f[i]);
  return out;
}

namespace {

double adaptive_simpson_rec(const std::function<double(double)>& f, double a,
                            double b, double fa, double fm, double fb,
                            double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
    return left + right + delta / 15.0;
  return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol,
                              depth - 1) +
         adaptive_simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol,
                              depth - 1);
}

}  // namespace

double integrate_adaptive(const std::function<double(double)>& f, double a,
                          double b, double tol) {
  if (a == b) return 0.0;
  const double m = 0.5 * (a + b);
  const double fa = f(a), fm = f(m), fb = f(b);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, tol, 48);
}

Field solve_tridiag(const Field& lower, const Field& diag, const Field& upper,
                    const Field& rhs) {
  const std::size_t n = diag.size();
  if (lower.size() != n || upper.size() != n || rhs.size() != n)
    throw std::invalid_argument("solve_tridiag: size mismatch");
  Field cp(n), dp(n), x(n);
  double piv = diag[0];
  if (piv == 0.0) throw std::runtime_error("solve_tridiag: zero pivot");
  cp[0] = upper[0] / piv;
  dp[0] = rhs[0] / piv;
  for (std::size_t i = 1; i < n; ++i) {
    piv = diag[i] - lower[i] * cp[i - 1];
    if (piv == 0.0) throw std::runtime_error("solve_tridiag: zero pivot");
    cp[i] = upper[i] / piv;
    dp[i] = (rhs[i] - lower[i] * dp[i - 1]) / piv;
  }
  x[n - 1] = dp[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) x[i] = dp[i] - cp[i] * x[i + 1];
  return x;
}

double max_abs(const Field& f, bool parallel) {
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(f.size());
  auto block = [&](std::ptrdiff_t lo, std::ptrdiff_t hi) {
    double m = 0.0;
    for (std::ptrdiff_t i = lo; i < hi; ++i)
      m = std::max(m, std::abs(f[static_cast<std::size_t>(i)]));
    return m;
  };
  return par::blocked_reduce<double>(
      n, 0.0, block, [](double a, double b) { return std::max(a, b); },
      parallel);
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("fit_line: need >= 2 matched points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dxi = x[i] - mx;
    sxx += dxi * dxi;
    sxy += dxi * (y[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("fit_line: degenerate abscissae");
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  return fit;
}

}  // namespace cusplab
