#pragma once
// Physical-space solvers: initial-data construction and validation, energy,
// right-hand sides, RK4 stepping (optionally coupled to a small companion
// ODE system), and the adaptive run loop with blow-up-aware stopping.

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cusplab/grid.hpp"
#include "cusplab/kernels.hpp"
#include "cusplab/nonlocal.hpp"
#include "cusplab/profile.hpp"
#include "cusplab/report.hpp"

namespace cusplab {

enum class Model { rSV, rB };

std::string model_name(Model m);

struct SimConfig {
  Model model = Model::rSV;
  double eps = 0.3;     // amplitude/steepness parameter; start time is -eps
  double h_star = 4.0;  // far-field depth (rSV)
  double L = 4.0;       // half-domain: grid on [-L, L]
  std::ptrdiff_t n = 8192;
  double cfl = 0.4;
  double stop_growth_factor = 20.0;  // stop when max(-w_x) grows this much
  double dt_floor = 1e-10;
  double t_max = 2.0;
  double snapshot_cadence = 0.05;        // physical-time snapshot spacing
  double growth_milestone_ratio = 1.05;  // snapshot per this factor of growth
  // Weight constant for the weighted initial-slope condition; must lie in
  // (50^{-1/5}, 6/13).  Default: midpoint.
  double theta_cap = 0.5 * (0.45730505192732634 + 6.0 / 13.0);
  // Bootstrap monitor constant M = 2^80.  The curvature bound needs
  // M^{1/8} >= 256 (the profile has |Wbar''| -> 256|y| at the origin) and
  // its tightened closure needs M^{1/8} >= 512; 2^80 gives M^{1/8} = 1024.
  double m_const = 1208925819614629174706176.0;
  double beta = 1.0;
  double energy_drift_tol = 1e-3;  // instability abort threshold (smooth phase)
};

struct PhysState {
  Model model = Model::rSV;
  Grid1D grid;
  double t = 0.0;
  double eps = 0.3;
  double h_star = 4.0;
  Field w, z;  // Riemann invariants (rSV)
  Field v;     // velocity (rB)
};

// Nonlocal terms entering the right-hand sides.
struct Nonlocals {
  Field G, q;  // rSV
  Field p;     // rB
};

struct Tendency {
  Field dw, dz;  // rSV
  Field dv;      // rB
  Nonlocals nl;
};

struct PositivityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NanError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// View of one RK stage handed to the companion ODE: the stage fields plus
// the nonlocal terms already computed for that stage.
struct StageView {
  const PhysState& state;
  const Nonlocals& nl;
};

// A small ODE system dy/dt = rhs(stage, y, t) integrated jointly with the
// PDE inside each RK4 stage (same stage abscissae, so the pair remains a
// classical 4th-order method for the coupled system).
struct CompanionOde {
  std::vector<double> y;
  std::function<std::vector<double>(const StageView&, const std::vector<double>&,
                                    double)>
      rhs;
  // Called on each accepted state; a non-empty string stops the run with
  // that reason.
  std::function<std::string(const PhysState&, const std::vector<double>&)>
      stop_check;
  // Extra step-size cap (<= 0 means no cap).
  std::function<double(const PhysState&, const std::vector<double>&)> dt_cap;
  // Optional: return true to request a snapshot of the accepted state.
  std::function<bool(const PhysState&, const std::vector<double>&)>
      snapshot_due;
};

struct Snapshot {
  double t = 0.0;
  Field w, z;  // rSV copies (empty for rB)
  Field v;     // rB copy (empty for rSV)
  double energy = 0.0;
  double min_wx = 0.0;  // min d/dx of w (rSV) or v (rB)
  double argmin_x = 0.0;
  double max_abs_zx = 0.0;              // 0 for rB
  double norm_G = 0.0, norm_q = 0.0;    // rB: ||p_x||_inf and ||p||_inf
  std::vector<double> companion;        // companion values, if any
};

// One scalar record per accepted step.
struct SeriesPoint {
  double t = 0.0;
  double energy = 0.0;
  double min_wx = 0.0;
  double argmin_x = 0.0;
  double max_abs_zx = 0.0;
  double norm_G = 0.0;
  double norm_q = 0.0;
  double dt = 0.0;
};

struct Trajectory {
  SimConfig cfg;
  std::vector<Snapshot> snaps;
  std::vector<SeriesPoint> series;
  std::vector<std::vector<double>> companion_series;  // aligned with series
  std::string stop_reason;
  std::string stop_detail;
  PhysState final_state;
  double initial_energy = 0.0;
  double initial_max_neg_slope = 0.0;  // max(-w_x) or max(-v_x) at t = -eps
};

// Exact algebraic conversions h,u <-> w,z (w = u + 2*sqrt(h), z = u - 2*sqrt(h)).
void riemann_convert(const Field& h, const Field& u, Field& w, Field& z);
void riemann_invert(const Field& w, const Field& z, Field& h, Field& u);

// Cutoff used by make_initial_data: even, C^4, == 1 on |x| <= 1, == 0 on
// |x| >= 2, 9th-order smoothstep transition.
double cutoff_chi(double x);

// Perturbed rest state: for rSV, w0 = 2*sqrt(h_star) + eps^{3/2} chi(x)
// Wbar(x/eps^{5/2}), z0 = -2*sqrt(h_star); for rB, v0 equals the same
// perturbation.  Start time t = -eps.  Requires a beta = 1 profile table and
// dx <= eps^{5/2}/32.
PhysState make_initial_data(const SimConfig& cfg, const ProfileTable& profile);

// Report-only numerical audit of every initial-data condition for the
// state's model (derivative equalities at x = 0, sup-norm and L^2 bounds,
// weighted slope tube, decay limits, energy bound).  Finite-difference
// equality checks carry two-stencil error bars; see each item's note.
VerifyReport validate_initial_data(const PhysState& state,
                                   const ProfileTable& profile,
                                   double theta_cap);

// Energy functional: rSV integral of h u^2/2 + (h - h_star)^2/2
// + h^3 (u_x^2 + h_x^2 / h)/2; rB integral of v^2 + v_x^2.
double energy(const PhysState& state);

Nonlocals compute_nonlocals(const PhysState& state);
Tendency rhs_rsv(const PhysState& state);
Tendency rhs_rb(const PhysState& state);
Tendency compute_tend(const PhysState& state);

// Classical RK4 step; throws PositivityError / NanError when a stage leaves
// the admissible set. step_joint also advances the companion values.
PhysState step(const PhysState& state, double dt);
PhysState step_joint(const PhysState& state, double dt, CompanionOde* comp);

Snapshot take_snapshot(const PhysState& state, const Nonlocals& nl,
                       const CompanionOde* comp);

// Integrate from t = -eps with dt = cfl * min(dx / max|speed|,
// 0.5 / max|w_x|), subject to any companion dt cap.  Stop reasons:
// "growth_target", "t_max", "dt_floor", "energy_drift", "h_positivity",
// "nan", or a companion-supplied reason.
Trajectory run(const SimConfig& cfg, const ProfileTable& profile,
               CompanionOde* companion = nullptr);

}  // namespace cusplab
