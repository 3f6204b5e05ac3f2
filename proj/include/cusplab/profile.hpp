#pragma once
// Self-similar blow-up profiles of Hunter–Saxton type.
//
// The profile W̄_β : ℝ → ℝ is the odd, monotone-decreasing solution of
//     (1 + ½W̄′)W̄′ + (W̄ + (5/2)y) W̄″ = 0,   W̄(0)=0, W̄′(0)=−2, W̄″(0)=0,
// growing sub-linearly (~ y^{3/5}) at infinity.  Away from the degenerate
// origin it satisfies the reduced second-order ODE
//     W̄″ = 2√β (2+W̄′)^{1/2} (−W̄′)^{7/2},
// which is what the solver integrates as a first-order system in (W̄, W̄′).
//
// For β=1 the solution has an exact closed-form parametrization by
// p = W̄′ ∈ (−2,0):
//     y(p) = (2+p)^{1/2} (2p²−2p+3) / (30 (−p)^{5/2}),
//     W̄(p) = −(2+p)^{1/2} (1−p) / (6 (−p)^{3/2}),
// exposed here as an independent oracle for tests and verification.

#include <array>
#include <cstddef>
#include <iosfwd>
#include <vector>

namespace cusplab {

struct ProfileTable {
  double beta = 1.0;
  std::vector<double> y_nodes;   // y >= 0, strictly increasing, y_nodes[0]=0
  std::vector<double> w_vals;    // W̄ at nodes
  std::vector<double> wp_vals;   // W̄′ at nodes
  std::vector<double> wpp_vals;  // W̄″ at nodes (analytic via reduced ODE)
  double y_switch = 0.0;         // table → far-field asymptotics switch
  // {5/(3(50β)^{1/5}), (50β)^{-1/5}, (2/5)(50β)^{-1/5}}: far-field constants
  // of −W̄/y^{3/5}, −W̄′·y^{2/5}, W̄″·y^{7/5}.
  std::array<double, 3> asym_coeffs{};
  double rel_tol = 0.0;
  double match_err = 0.0;  // max relative table/asymptotics gap at y_switch
};

struct ProfileEval {
  double w = 0.0;
  double wp = 0.0;
  double wpp = 0.0;
};

// Integrate the reduced ODE adaptively (embedded RK45) from a Taylor-series
// start at y0 = rel_tol^{1/3}·min(1, β^{-1/2}), storing nodes on a geometric
// grid (ratio ~1.05) up to y_max.
// pre: beta > 0, y_max >= 10, rel_tol in (1e-14, 1e-4).
ProfileTable solve_profile(double beta, double y_max, double rel_tol);

// Odd-symmetric evaluation; cubic Hermite interpolation on [0, y_switch],
// leading-order asymptotics beyond.  Total on all finite y.
ProfileEval profile_eval(const ProfileTable& table, double y);

// W̄_β(y) = λ W̄_1(y/λ), λ = β^{-1/2}; input must have beta == 1.
ProfileTable rescale_profile(const ProfileTable& table_unit, double beta);

// Sup over nodes of the residual of the full profile ODE, combined with the
// relative residual of the reduced first-order form (so single-node
// perturbations of W̄′ are always visible).
double profile_residual(const ProfileTable& table);

// Analytic derivatives of the reduced ODE, as functions of p = W̄′:
//   wpp  = 2√β (2+p)^{1/2}(−p)^{7/2}
//   wppp = 2β (−p)^6 (−8p − 14)                      (value 256β at p=−2)
//   wpppp= 4β^{3/2} (2+p)^{1/2}(−p)^{17/2}(56p+84)
double profile_wpp(double beta, double p);
double profile_wppp(double beta, double p);
double profile_wpppp(double beta, double p);

// Closed-form parametrization for β=1 (independent oracle): given
// p ∈ (−2,0), the corresponding point of the graph.
struct ProfilePoint {
  double y = 0.0;
  double w = 0.0;
  double wp = 0.0;
  double wpp = 0.0;
};
ProfilePoint profile_exact_unit(double p);

// CSV round-trip (columns y,W,Wp,Wpp; header records beta, rel_tol,
// y_switch, match_err).
void profile_export_csv(const ProfileTable& table, std::ostream& os);
ProfileTable profile_import_csv(std::istream& is);

}  // namespace cusplab
