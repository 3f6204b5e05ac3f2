#pragma once
// Variable-coefficient 1-D elliptic solves: the momentum-averaging operator
// I_h(w) = hw − (h³w_x)_x, the Helmholtz operator 1−∂_x², the cumulative
// integral G, and Green-kernel decay diagnostics.

#include <cstddef>

#include "cusplab/grid.hpp"
#include "cusplab/kernels.hpp"

namespace cusplab {

enum class EllipticKind { Ih, Helmholtz };

struct EllipticOperator {
  EllipticKind kind = EllipticKind::Ih;
  Field h;  // coefficient field (used by kind Ih)
  Grid1D grid;
};

// G(x) = ∫_{x_min}^x (u_x² − h_x²/(4h)) dx′ by cumulative trapezoid;
// G(x_min) = 0.  Throws if h ≤ 0 anywhere.
Field compute_G(const Field& h, const Field& u, const Grid1D& grid,
                bool parallel = true);

// Solve hq − (h³q_x)_x = h·rhs with homogeneous Neumann ends (zero flux),
// second-order flux form; diagonally dominant tridiagonal (half-width
// boundary cells).  The solve is verified backward stable: its residual is
// kept within a small factor of the double-precision floor
// eps_mach·(‖A‖‖q‖+‖b‖), and within 1e-10·‖b‖ whenever that is attainable.
Field invert_Ih(const Field& h, const Field& rhs, const Grid1D& grid);

// Solve (1−∂_x²)p = rhs with Robin ends p_x = ±p (decaying like e^{∓x}).
Field helmholtz_solve(const Field& rhs, const Grid1D& grid);

// One column of the discrete resolvent: solve (1−L)K = δ_z/dx where
// L = ∂_x ∘ h^{−1} ∂_x ∘ h³ (kind Ih, Dirichlet ends) or L = ∂_x²
// (kind Helmholtz, Robin ends).
Field green_kernel_column(const EllipticOperator& op, std::ptrdiff_t z_index);

// Least-squares decay rate of −log|K| versus |x−x_z|, fitted over the
// middle decades 3e-3 <= |K|/max|K| <= 1e-1 so that both the peak region
// and the boundary-affected far tail stay out of the fit regardless of
// grid spacing.  Throws if the window holds fewer than 8 nodes.
double kernel_decay_rate(const Field& column, std::ptrdiff_t z_index,
                         const Grid1D& grid);

}  // namespace cusplab
