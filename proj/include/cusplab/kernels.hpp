#pragma once
// Finite-difference derivative kernels, quadrature, and small linear-algebra
// helpers shared by the PDE and verification layers.
//
// Interior stencils are hardcoded (order 4 for d1/d2, order 2 for d3/d4);
// one-sided edge stencils of matching order are generated at runtime with
// the Fornberg weight algorithm.  Every kernel has serial and OpenMP paths
// that produce bitwise-identical results (see par.hpp).

#include <cstddef>
#include <functional>
#include <vector>

#include "cusplab/grid.hpp"

namespace cusplab {

using Field = std::vector<double>;

// Fornberg finite-difference weights: weights w_j such that
// f^(m)(x0) ≈ Σ_j w_j f(xs[j]).  Exact for polynomials up to degree
// len(xs)-1.
std::vector<double> fd_weights(double x0, const std::vector<double>& xs,
                               int m);

// Derivatives of a nodal field on a uniform grid.  `parallel` selects the
// OpenMP path; results are bitwise identical either way.
Field deriv1(const Field& f, double dx, bool parallel = true);  // order 4
Field deriv2(const Field& f, double dx, bool parallel = true);  // order 4
Field deriv3(const Field& f, double dx, bool parallel = true);  // order 2
Field deriv4(const Field& f, double dx, bool parallel = true);  // order 2

// 6th-order first derivative (interior; edge rows fall back to the same
// one-sided stencils as deriv1).  Used for stencil-pair error estimates.
Field deriv1_o6(const Field& f, double dx, bool parallel = true);

// m-th derivative (m=0 is interpolation) of a nodal field at an arbitrary
// point x0, using the npts grid nodes nearest to x0 (Fornberg weights).
// npts=4, m=0 is cubic Lagrange interpolation.
double deriv_at(const Field& f, const Grid1D& grid, double x0, int m,
                int npts);

// Trapezoid rule over the whole grid.
double trapz(const Field& f, double dx, bool parallel = true);

// Cumulative trapezoid integral from the left boundary; out[0] = 0.
// Inherently serial (prefix scan); kept single-path.
Field cumtrapz(const Field& f, double dx);

// Adaptive Simpson quadrature of a callable on [a, b] to tolerance tol.
double integrate_adaptive(const std::function<double(double)>& f, double a,
                          double b, double tol = 1e-12);

// Thomas algorithm for a tridiagonal system (diagonals lower/diag/upper;
// lower[0] and upper[n-1] unused).  Overwrites nothing; returns solution.
Field solve_tridiag(const Field& lower, const Field& diag, const Field& upper,
                    const Field& rhs);

// Max-norm and max of |f| restricted to an index range [lo, hi).
double max_abs(const Field& f, bool parallel = true);

// Linear least-squares fit y ≈ a + b x; returns {a, b}.
struct LineFit {
  double intercept = 0.0;
  double slope = 0.0;
};
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace cusplab
