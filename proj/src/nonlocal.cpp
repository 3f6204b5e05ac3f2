#include "cusplab/nonlocal.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "cusplab/par.hpp"

namespace cusplab {

namespace {

void check_sizes(const Field& f, const Grid1D& grid, const char* who) {
  if (static_cast<std::ptrdiff_t>(f.size()) != grid.n)
    throw std::invalid_argument(std::string(who) + ": field/grid size mismatch");
}

// Apply the Neumann flux-form I_h matrix to q (for residual checks).
Field apply_Ih(const Field& h, const Field& q, double dx) {
  const std::size_t n = h.size();
  Field out(n);
  const double idx2 = 1.0 / (dx * dx);
  auto hhalf3 = [&](std::size_t i) {
    const double hh = 0.5 * (h[i] + h[i + 1]);
    return hh * hh * hh;
  };
  for (std::size_t i = 0; i < n; ++i) {
    double fr = (i + 1 < n) ? hhalf3(i) * (q[i + 1] - q[i]) : 0.0;
    double fl = (i > 0) ? hhalf3(i - 1) * (q[i] - q[i - 1]) : 0.0;
    // Half-width boundary cells with a mirror ghost (q[-1] = q[1]) double
    // the one-sided flux; this keeps constants exact and the scheme
    // second-order up to the ends.
    if (i == 0) fr *= 2.0;
    if (i + 1 == n) fl *= 2.0;
    out[i] = h[i] * q[i] - (fr - fl) * idx2;
  }
  return out;
}

}  // namespace

Field compute_G(const Field& h, const Field& u, const Grid1D& grid,
                bool parallel) {
  check_sizes(h, grid, "compute_G");
  check_sizes(u, grid, "compute_G");
  for (double hv : h)
    if (!(hv > 0.0)) throw std::domain_error("compute_G: h must be positive");
  const Field ux = deriv1(u, grid.dx, parallel);
  const Field hx = deriv1(h, grid.dx, parallel);
  Field integrand(h.size());
  auto body = [&](std::ptrdiff_t i) {
    const std::size_t k = static_cast<std::size_t>(i);
    integrand[k] = ux[k] * ux[k] - hx[k] * hx[k] / (4.0 * h[k]);
  };
  if (parallel) {
    par::parallel_for(grid.n, body);
  } else {
    par::serial_for(grid.n, body);
  }
  return cumtrapz(integrand, grid.dx);
}

Field invert_Ih(const Field& h, const Field& rhs, const Grid1D& grid) {
  check_sizes(h, grid, "invert_Ih");
  check_sizes(rhs, grid, "invert_Ih");
  const std::size_t n = h.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (!(h[i] > 0.0)) throw std::domain_error("invert_Ih: h must be positive");
    if (!std::isfinite(rhs[i]) || !std::isfinite(h[i]))
      throw std::domain_error("invert_Ih: non-finite input");
  }
  const double idx2 = 1.0 / (grid.dx * grid.dx);
  Field lower(n, 0.0), diag(n, 0.0), upper(n, 0.0), b(n);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double hh = 0.5 * (h[i] + h[i + 1]);
    const double hf = hh * hh * hh * idx2;
    diag[i] += hf;
    diag[i + 1] += hf;
    upper[i] -= hf;
    lower[i + 1] -= hf;
  }
  // Half-width boundary cells (mirror ghost): double the one-sided flux.
  // The matrix loses symmetry at the two corner rows but stays strictly
  // diagonally dominant.
  {
    const double hh0 = 0.5 * (h[0] + h[1]);
    const double hf0 = hh0 * hh0 * hh0 * idx2;
    diag[0] += hf0;
    upper[0] -= hf0;
    const double hh1 = 0.5 * (h[n - 2] + h[n - 1]);
    const double hf1 = hh1 * hh1 * hh1 * idx2;
    diag[n - 1] += hf1;
    lower[n - 1] -= hf1;
  }
  for (std::size_t i = 0; i < n; ++i) {
    diag[i] += h[i];
    b[i] = h[i] * rhs[i];
  }
  Field q = solve_tridiag(lower, diag, upper, b);

  // Residual check with up to two rounds of iterative refinement.  The
  // attainable residual in double precision is bounded below by
  // eps_mach * (||A|| ||q|| + ||b||): even an exactly-solved q, stored in
  // doubles, leaves a residual of that size, and on fine grids
  // ||A|| ~ h^3/dx^2 makes a fixed relative threshold unreachable.  Accept
  // the solve when it lands within a modest factor of that floor (backward
  // stability), keeping the stricter 1e-10 relative criterion whenever the
  // floor is smaller.
  double bnorm = max_abs(b);
  if (bnorm == 0.0) bnorm = 1.0;
  double anorm = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    anorm = std::max(anorm, std::abs(lower[i]) + std::abs(diag[i]) +
                                std::abs(upper[i]));
  constexpr double kEpsMach = 2.220446049250313e-16;
  const auto tol = [&](const Field& qq) {
    return std::max(1e-10 * bnorm,
                    32.0 * kEpsMach * (anorm * max_abs(qq) + bnorm));
  };
  for (int pass = 0; pass < 2; ++pass) {
    const Field aq = apply_Ih(h, q, grid.dx);
    Field r(n);
    for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - aq[i];
    if (max_abs(r) <= tol(q)) return q;
    const Field dq = solve_tridiag(lower, diag, upper, r);
    for (std::size_t i = 0; i < n; ++i) q[i] += dq[i];
  }
  const Field aq = apply_Ih(h, q, grid.dx);
  Field r(n);
  for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - aq[i];
  if (max_abs(r) > tol(q))
    throw std::runtime_error(
        "invert_Ih: residual above the backward-stability tolerance after "
        "refinement");
  return q;
}

Field helmholtz_solve(const Field& rhs, const Grid1D& grid) {
  check_sizes(rhs, grid, "helmholtz_solve");
  const std::size_t n = rhs.size();
  for (double v : rhs)
    if (!std::isfinite(v))
      throw std::domain_error("helmholtz_solve: non-finite input");
  const double dx = grid.dx;
  const double idx2 = 1.0 / (dx * dx);
  Field lower(n, 0.0), diag(n, 0.0), upper(n, 0.0);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    diag[i] = 1.0 + 2.0 * idx2;
    lower[i] = -idx2;
    upper[i] = -idx2;
  }
  // Robin rows from ghost elimination: p_x = p at the left end, p_x = −p at
  // the right end (both select the decaying exponential).
  diag[0] = 1.0 + 2.0 * idx2 + 2.0 / dx;
  upper[0] = -2.0 * idx2;
  diag[n - 1] = 1.0 + 2.0 * idx2 + 2.0 / dx;
  lower[n - 1] = -2.0 * idx2;
  return solve_tridiag(lower, diag, upper, rhs);
}

Field green_kernel_column(const EllipticOperator& op, std::ptrdiff_t z_index) {
  const Grid1D& grid = op.grid;
  if (z_index < 0 || z_index >= grid.n)
    throw std::invalid_argument("green_kernel_column: z_index out of range");
  const std::size_t n = static_cast<std::size_t>(grid.n);
  Field delta(n, 0.0);
  delta[static_cast<std::size_t>(z_index)] = 1.0 / grid.dx;

  if (op.kind == EllipticKind::Helmholtz) return helmholtz_solve(delta, grid);

  const Field& h = op.h;
  check_sizes(h, grid, "green_kernel_column");
  for (double hv : h)
    if (!(hv > 0.0))
      throw std::domain_error("green_kernel_column: h must be positive");
  const double idx2 = 1.0 / (grid.dx * grid.dx);
  Field lower(n, 0.0), diag(n, 0.0), upper(n, 0.0), b(n, 0.0);
  auto h3 = [&](std::size_t i) { return h[i] * h[i] * h[i]; };
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double gl = 1.0 / (0.5 * (h[i - 1] + h[i]));
    const double gr = 1.0 / (0.5 * (h[i] + h[i + 1]));
    lower[i] = -gl * h3(i - 1) * idx2;
    upper[i] = -gr * h3(i + 1) * idx2;
    diag[i] = 1.0 + (gl + gr) * h3(i) * idx2;
    b[i] = delta[i];
  }
  // Dirichlet ends: the kernel decays exponentially, so K = 0 at the
  // truncated boundary.
  diag[0] = 1.0;
  diag[n - 1] = 1.0;
  b[0] = 0.0;
  b[n - 1] = 0.0;
  return solve_tridiag(lower, diag, upper, b);
}

double kernel_decay_rate(const Field& column, std::ptrdiff_t z_index,
                         const Grid1D& grid) {
  const std::ptrdiff_t n = grid.n;
  if (static_cast<std::ptrdiff_t>(column.size()) != n)
    throw std::invalid_argument("kernel_decay_rate: size mismatch");
  double kmax = 0.0;
  for (double k : column) kmax = std::max(kmax, std::abs(k));
  if (kmax == 0.0)
    throw std::invalid_argument("kernel_decay_rate: zero column");
  // Fit -log|K| against |x - x_z| over the middle decades
  // 3e-3 <= |K|/max|K| <= 1e-1.  Selecting by value rather than by node
  // count makes the exclusions scale with the decay length: the peak
  // region (where the kernel is not yet in its exponential regime) and
  // the boundary zone (where the pinned ends bend the tail) both fall
  // outside the window whenever the domain spans >~ 9.3 decay lengths.
  std::vector<double> xs, ys;
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const double k = std::abs(column[static_cast<std::size_t>(i)]);
    if (k < 3e-3 * kmax || k > 1e-1 * kmax) continue;
    xs.push_back(std::abs(grid.x(i) - grid.x(z_index)));
    ys.push_back(-std::log(k));
  }
  if (xs.size() < 8)
    throw std::invalid_argument(
        "kernel_decay_rate: middle-decade window too small");
  return fit_line(xs, ys).slope;
}

}  // namespace cusplab
