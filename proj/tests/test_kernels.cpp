#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "cusplab/grid.hpp"
#include "cusplab/kernels.hpp"

using namespace cusplab;

namespace {

Field sample(const Grid1D& g, double (*f)(double)) {
  Field out(static_cast<std::size_t>(g.n));
  for (std::ptrdiff_t i = 0; i < g.n; ++i)
    out[static_cast<std::size_t>(i)] = f(g.x(i));
  return out;
}

// Max error over interior nodes only (edge stencils have their own order).
double interior_err(const Field& got, const Grid1D& g, double (*df)(double),
                    std::ptrdiff_t skip) {
  double e = 0.0;
  for (std::ptrdiff_t i = skip; i < g.n - skip; ++i)
    e = std::max(e, std::abs(got[static_cast<std::size_t>(i)] - df(g.x(i))));
  return e;
}

double f_sin2(double x) { return std::sin(2.0 * x); }
double d1_sin2(double x) { return 2.0 * std::cos(2.0 * x); }
double d2_sin2(double x) { return -4.0 * std::sin(2.0 * x); }
double d3_sin2(double x) { return -8.0 * std::cos(2.0 * x); }
double d4_sin2(double x) { return 16.0 * std::sin(2.0 * x); }

}  // namespace

TEST_CASE("fd_weights reproduces the classical central stencils") {
  const std::vector<double> xs{-2.0, -1.0, 0.0, 1.0, 2.0};
  const std::vector<double> w1 = fd_weights(0.0, xs, 1);
  const double e1[] = {1.0 / 12, -8.0 / 12, 0.0, 8.0 / 12, -1.0 / 12};
  for (int i = 0; i < 5; ++i) CHECK(w1[i] == doctest::Approx(e1[i]).epsilon(1e-13));

  const std::vector<double> w2 = fd_weights(0.0, xs, 2);
  const double e2[] = {-1.0 / 12, 16.0 / 12, -30.0 / 12, 16.0 / 12, -1.0 / 12};
  for (int i = 0; i < 5; ++i) CHECK(w2[i] == doctest::Approx(e2[i]).epsilon(1e-13));

  // Interpolation weights at a node are a Kronecker delta.
  const std::vector<double> w0 = fd_weights(1.0, xs, 0);
  CHECK(std::abs(w0[3] - 1.0) <= 1e-14);
  CHECK(std::abs(w0[0]) + std::abs(w0[1]) + std::abs(w0[2]) + std::abs(w0[4]) <=
        1e-13);
}

TEST_CASE("derivative kernels converge at their design orders") {
  const Grid1D g1(-1.0, 1.0, 129), g2(-1.0, 1.0, 257);
  const Field f1 = sample(g1, f_sin2), f2 = sample(g2, f_sin2);

  struct Case {
    Field (*op)(const Field&, double, bool);
    double (*dref)(double);
    double lo, hi;  // admissible error-ratio band for dx -> dx/2
    double tol;     // absolute error bound at n = 129 (truncation formula x2)
  };
  // Truncation errors on sin(2x) at dx = 1/64: order-4 first/second
  // derivatives ~1e-7/1e-6, order-2 third dx^2/4 f^(5) = 2.0e-3 and fourth
  // dx^2/6 f^(6) = 2.6e-3, order-6 first ~1e-11.
  const Case cases[] = {
      {deriv1, d1_sin2, 12.0, 22.0, 1e-6},    // order 4
      {deriv2, d2_sin2, 12.0, 22.0, 1e-5},    // order 4
      {deriv3, d3_sin2, 3.2, 4.9, 5e-3},      // order 2
      {deriv4, d4_sin2, 3.2, 4.9, 6e-3},      // order 2
      {deriv1_o6, d1_sin2, 40.0, 90.0, 1e-9}  // order 6
  };
  for (const Case& c : cases) {
    const double e1 = interior_err(c.op(f1, g1.dx, true), g1, c.dref, 8);
    const double e2 = interior_err(c.op(f2, g2.dx, true), g2, c.dref, 8);
    CHECK(e1 < c.tol);
    const double ratio = e1 / e2;
    CHECK(ratio >= c.lo);
    CHECK(ratio <= c.hi);
  }
}

TEST_CASE("deriv_at interpolates and differentiates off-node") {
  const Grid1D g(-1.0, 1.0, 129);
  // Cubic: npts=4 interpolation and all stencil derivatives are exact.
  Field cub(static_cast<std::size_t>(g.n));
  for (std::ptrdiff_t i = 0; i < g.n; ++i) {
    const double x = g.x(i);
    cub[static_cast<std::size_t>(i)] = x * x * x - 0.3 * x + 0.1;
  }
  const double x0 = 0.337;  // not a node
  CHECK(std::abs(deriv_at(cub, g, x0, 0, 4) -
                 (x0 * x0 * x0 - 0.3 * x0 + 0.1)) <= 1e-13);
  CHECK(std::abs(deriv_at(cub, g, x0, 1, 6) - (3.0 * x0 * x0 - 0.3)) <= 1e-10);
  CHECK(std::abs(deriv_at(cub, g, x0, 2, 8) - 6.0 * x0) <= 1e-8);
  CHECK(std::abs(deriv_at(cub, g, x0, 3, 8) - 6.0) <= 1e-6);

  // Smooth non-polynomial: wide stencils are very accurate.
  const Field fs = sample(g, f_sin2);
  CHECK(std::abs(deriv_at(fs, g, 0.3, 1, 8) - d1_sin2(0.3)) <= 1e-9);
  CHECK(std::abs(deriv_at(fs, g, 0.0, 2, 10) - d2_sin2(0.0)) <= 1e-8);

  // Window clamps at the boundary instead of reading out of range.
  CHECK(std::abs(deriv_at(fs, g, g.x_max, 1, 8) - d1_sin2(g.x_max)) <= 1e-6);
}

TEST_CASE("trapz and cumtrapz") {
  const Grid1D g(-20.0, 20.0, 4001);
  Field s4(static_cast<std::size_t>(g.n));
  for (std::ptrdiff_t i = 0; i < g.n; ++i) {
    const double c = std::cosh(g.x(i));
    s4[static_cast<std::size_t>(i)] = 1.0 / (c * c * c * c);
  }
  // Smooth, exponentially decaying integrand: trapezoid is extremely
  // accurate; the exact value is 4/3.
  CHECK(std::abs(trapz(s4, g.dx, true) - 4.0 / 3.0) <= 1e-12);

  const Grid1D gc(-2.0, 2.0, 4001);
  const Field fc = sample(gc, [](double x) { return std::cos(x); });
  const Field F = cumtrapz(fc, gc.dx);
  CHECK(F[0] == 0.0);
  double worst = 0.0;
  for (std::ptrdiff_t i = 0; i < gc.n; ++i)
    worst = std::max(worst, std::abs(F[static_cast<std::size_t>(i)] -
                                     (std::sin(gc.x(i)) - std::sin(-2.0))));
  CHECK(worst <= 1e-6);
}

TEST_CASE("adaptive quadrature hits tight tolerances") {
  const double a = integrate_adaptive(
      [](double x) { return std::sin(x); }, 0.0, 3.141592653589793);
  CHECK(std::abs(a - 2.0) <= 1e-10);
  const double b = integrate_adaptive(
      [](double x) { return 1.0 / (1.0 + x * x); }, 0.0, 1.0);
  CHECK(std::abs(b - std::atan(1.0)) <= 1e-10);
}

TEST_CASE("tridiagonal solver") {
  const std::size_t n = 6;
  Field lower(n, -1.0), diag(n, 2.5), upper(n, -1.0), xs(n), rhs(n);
  for (std::size_t i = 0; i < n; ++i) xs[i] = static_cast<double>(i + 1);
  for (std::size_t i = 0; i < n; ++i) {
    rhs[i] = diag[i] * xs[i];
    if (i > 0) rhs[i] += lower[i] * xs[i - 1];
    if (i + 1 < n) rhs[i] += upper[i] * xs[i + 1];
  }
  const Field got = solve_tridiag(lower, diag, upper, rhs);
  for (std::size_t i = 0; i < n; ++i)
    CHECK(std::abs(got[i] - xs[i]) <= 1e-12);
}

TEST_CASE("fit_line recovers exact affine data") {
  const std::vector<double> x{0.0, 1.0, 2.0, 3.0, 4.5};
  std::vector<double> y;
  for (double xi : x) y.push_back(3.0 + 2.0 * xi);
  const LineFit lf = fit_line(x, y);
  CHECK(std::abs(lf.intercept - 3.0) <= 1e-12);
  CHECK(std::abs(lf.slope - 2.0) <= 1e-12);
}

TEST_CASE("max_abs finds negative extrema") {
  Field f{0.1, -2.5, 1.0, 0.0};
  f.resize(64, 0.25);
  CHECK(max_abs(f, true) == 2.5);
}

TEST_CASE("serial and parallel paths are bitwise identical") {
  // A ragged size (not a multiple of the reduction block) on purpose.
  const std::ptrdiff_t n = 10007;
  const Grid1D g(-3.0, 3.0, n);
  Field f(static_cast<std::size_t>(n));
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const double x = g.x(i);
    f[static_cast<std::size_t>(i)] =
        std::sin(13.7 * x) * std::exp(-0.3 * x * x) + 0.01 * x;
  }
  const auto same = [](const Field& a, const Field& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
      if (a[i] != b[i]) return false;
    return true;
  };
  CHECK(same(deriv1(f, g.dx, false), deriv1(f, g.dx, true)));
  CHECK(same(deriv2(f, g.dx, false), deriv2(f, g.dx, true)));
  CHECK(same(deriv3(f, g.dx, false), deriv3(f, g.dx, true)));
  CHECK(same(deriv4(f, g.dx, false), deriv4(f, g.dx, true)));
  CHECK(same(deriv1_o6(f, g.dx, false), deriv1_o6(f, g.dx, true)));
  CHECK(trapz(f, g.dx, false) == trapz(f, g.dx, true));
  CHECK(max_abs(f, false) == max_abs(f, true));
}
