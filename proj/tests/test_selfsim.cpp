#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "cusplab/grid.hpp"
#include "cusplab/pde.hpp"
#include "cusplab/profile.hpp"
#include "cusplab/selfsim.hpp"

using namespace cusplab;

namespace {

const ProfileTable& table() {
  static const ProfileTable t = solve_profile(1.0, 1.0e4, 1e-10);
  return t;
}

// First integral of the stationary equation: I(y) = (1/2) int_0^y (Wbar')^2,
// in the closed form I = (1/2)(-3 W + (5y + 2W) W').
double first_integral(double y) {
  const ProfileEval e = profile_eval(table(), y);
  return 0.5 * (-3.0 * e.w + (5.0 * y + 2.0 * e.w) * e.wp);
}

// Snapshot holding the exact stationary profile with modulation values that
// freeze the self-similar flow; the discrete residual then measures only the
// midpoint s-differencing error of the exponential prefactors.
RescaledSnapshot stationary_snapshot(Model m, double s) {
  RescaledSnapshot rs;
  rs.model = m;
  rs.s = s;
  rs.t = 0.0;
  rs.y = selfsim_ygrid();
  const std::size_t n = rs.y.size();
  rs.W.resize(n);
  rs.Wy.resize(n);
  rs.Wyy.resize(n);
  rs.Wyyy.resize(n);
  rs.Wyyyy.assign(n, 0.0);
  rs.Wy_alt.resize(n);
  rs.Z.assign(n, 0.0);
  rs.Zy.assign(n, 0.0);
  rs.Q.assign(n, 0.0);
  rs.Qy.assign(n, 0.0);
  rs.Gt.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double y = rs.y[i];
    const ProfileEval e = profile_eval(table(), y);
    rs.W[i] = e.w;
    rs.Wy[i] = e.wp;
    rs.Wy_alt[i] = e.wp;
    rs.Wyy[i] = e.wpp;
    rs.Wyyy[i] = profile_wppp(1.0, e.wp);
    const double I = first_integral(y);
    if (m == Model::rSV)
      rs.Gt[i] = 0.375 * std::exp(-0.5 * s) * I;
    else
      rs.Qy[i] = -std::exp(-3.0 * s) * I;
  }
  rs.y_window = 1.0e4;
  if (m == Model::rSV) {
    rs.kappa = 4.0;
    rs.dxi = 4.0;  // cancels kappa in the transport term
  } else {
    rs.kappa = 0.0;
    rs.dxi = 0.0;
  }
  rs.dtau = 0.0;
  rs.dkappa = 0.0;
  rs.w0_wide = 0.0;
  rs.wy0_wide = -2.0;
  rs.wyy0_wide = 0.0;
  rs.wyyy0_wide = 256.0;
  return rs;
}

}  // namespace

TEST_CASE("rescaling grid shape") {
  const std::vector<double> y = selfsim_ygrid();
  REQUIRE(y.size() >= 400);
  CHECK(y.size() % 2 == 1);
  // Symmetric, sorted, contains 0, uniform core of step 0.025, tail to 1e4.
  const std::size_t mid = y.size() / 2;
  CHECK(y[mid] == 0.0);
  for (std::size_t i = 0; i < y.size(); ++i)
    CHECK(y[i] == -y[y.size() - 1 - i]);
  for (std::size_t i = 1; i < y.size(); ++i) CHECK(y[i] > y[i - 1]);
  for (std::size_t i = mid; i + 1 < y.size() && y[i + 1] <= 2.0; ++i)
    CHECK(y[i + 1] - y[i] == doctest::Approx(0.025).epsilon(1e-12));
  CHECK(y.back() >= 1.0e4);
  CHECK(y.back() <= 1.1e4);
}

TEST_CASE("rescaling a cubic field is exact") {
  // v = kappa + b (x - xi) + c (x - xi)^3 with b = -2/T, c = 256/(6 T^6)
  // rescales to exactly W = -2y + (256/6) y^3; interpolation and every
  // finite-difference stencil in the pipeline are exact on cubics.
  const double T = 0.04, t = 0.25, tau = t + T, kappa = 0.7, xi = 0.1;
  const double b = -2.0 / T, c = 256.0 / (6.0 * std::pow(T, 6.0));
  const Grid1D g(-1.0, 1.0, 32769);
  PhysState st;
  st.model = Model::rB;
  st.grid = g;
  st.t = t;
  st.v.resize(static_cast<std::size_t>(g.n));
  for (std::ptrdiff_t i = 0; i < g.n; ++i) {
    const double d = g.x(i) - xi;
    st.v[static_cast<std::size_t>(i)] = kappa + b * d + c * d * d * d;
  }
  const Nonlocals nl = compute_nonlocals(st);
  const RescaledSnapshot rs = rescale_snapshot(st, nl, tau, kappa, xi);

  CHECK(rs.model == Model::rB);
  CHECK(rs.s == doctest::Approx(-std::log(T)).epsilon(1e-14));
  CHECK(rs.y_window == doctest::Approx(2811.4).epsilon(2e-3));

  for (std::size_t i = 0; i < rs.y.size(); ++i) {
    const double y = rs.y[i];
    if (std::abs(y) > 2000.0) continue;
    REQUIRE(std::isfinite(rs.W[i]));
    const double w_ex = -2.0 * y + (256.0 / 6.0) * y * y * y;
    const double wy_ex = -2.0 + 128.0 * y * y;
    const double wyy_ex = 256.0 * y;
    CHECK(std::abs(rs.W[i] - w_ex) <= 1e-9 * std::max(1.0, std::abs(w_ex)));
    CHECK(std::abs(rs.Wy[i] - wy_ex) <= 1e-9 * std::max(1.0, std::abs(wy_ex)));
    CHECK(std::abs(rs.Wyy[i] - wyy_ex) <=
          1e-6 * std::max(1.0, std::abs(wyy_ex)));
    CHECK(std::abs(rs.Wyyy[i] - 256.0) <= 0.1);
    if (std::abs(y) <= 10.0) CHECK(std::abs(rs.Wyyyy[i]) <= 1e-6);
  }
  // Outside the domain the grid entries are flagged non-finite.
  CHECK(!std::isfinite(rs.W.front()));
  CHECK(!std::isfinite(rs.W.back()));

  CHECK(std::abs(rs.w0_wide) <= 1e-9);
  CHECK(std::abs(rs.wy0_wide + 2.0) <= 1e-8);
  CHECK(std::abs(rs.wyy0_wide) <= 1e-5);
  CHECK(std::abs(rs.wyyy0_wide - 256.0) <= 1e-2);
  CHECK(rs.wy0_unc <= 1e-8);
}

TEST_CASE("rescaling the two-wave system keeps the z-slope scale") {
  // Same cubic (clamped far from the tracking point so depth positivity
  // holds) in w, linear z: Z_y is the constant T^{5/2} z_x.
  const double T = 0.04, t = 0.25, tau = t + T, kappa = 0.7, xi = 0.1;
  const double b = -2.0 / T, c = 256.0 / (6.0 * std::pow(T, 6.0));
  const double r = 2.0 * std::pow(T, 2.5);  // clamp radius: |y| <= 2 exact
  const Grid1D g(-1.0, 1.0, 131073);
  PhysState st;
  st.model = Model::rSV;
  st.grid = g;
  st.t = t;
  const std::size_t n = static_cast<std::size_t>(g.n);
  st.w.resize(n);
  st.z.resize(n);
  for (std::ptrdiff_t i = 0; i < g.n; ++i) {
    const double d = g.x(i) - xi;
    const double dc = std::min(r, std::max(-r, d));
    st.w[static_cast<std::size_t>(i)] = kappa + b * dc + c * dc * dc * dc;
    st.z[static_cast<std::size_t>(i)] = -4.0 + 0.1 * d;
  }
  const Nonlocals nl = compute_nonlocals(st);
  const RescaledSnapshot rs = rescale_snapshot(st, nl, tau, kappa, xi);

  const double zy_ex = 0.1 * std::pow(T, 2.5);
  for (std::size_t i = 0; i < rs.y.size(); ++i) {
    const double y = rs.y[i];
    if (!std::isfinite(rs.W[i])) continue;
    CHECK(std::abs(rs.Zy[i] - zy_ex) <= 1e-6 * zy_ex);
    if (std::abs(y) > 1.6) continue;  // stay clear of the clamp seam
    const double w_ex = -2.0 * y + (256.0 / 6.0) * y * y * y;
    const double wy_ex = -2.0 + 128.0 * y * y;
    const double wyy_ex = 256.0 * y;
    CHECK(std::abs(rs.W[i] - w_ex) <= 1e-9 * std::max(1.0, std::abs(w_ex)));
    CHECK(std::abs(rs.Wy[i] - wy_ex) <= 1e-8 * std::max(1.0, std::abs(wy_ex)));
    CHECK(std::abs(rs.Wyy[i] - wyy_ex) <=
          1e-4 * std::max(1.0, std::abs(wyy_ex)));
    CHECK(std::abs(rs.Wyyy[i] - 256.0) <= 0.1);
    CHECK(std::abs(rs.Wyyyy[i]) <= 1e-3);
  }
  CHECK(std::abs(rs.wy0_wide + 2.0) <= 1e-8);
}

TEST_CASE("modulation rates vanish on rest states") {
  const Grid1D g(-4.0, 4.0, 512);
  const std::size_t n = static_cast<std::size_t>(g.n);
  PhysState s;
  s.model = Model::rSV;
  s.grid = g;
  s.t = -0.3;
  s.w.assign(n, 4.0);
  s.z.assign(n, -4.0);
  const Nonlocals nl = compute_nonlocals(s);
  const ModulationRates mr = modulation_rates(s, nl, 0.0, 4.0, 0.0);
  CHECK(std::abs(mr.dtau) <= 1e-12);
  CHECK(std::abs(mr.dkappa) <= 1e-12);
  // xi advects at z/3 + kappa = -4/3 + 4 = 8/3 (degenerate-point guard
  // freezes the third-derivative correction on flat data).
  CHECK(mr.dxi == doctest::Approx(8.0 / 3.0).epsilon(1e-12));

  PhysState r;
  r.model = Model::rB;
  r.grid = g;
  r.t = -0.3;
  r.v.assign(n, 0.0);
  const Nonlocals nlr = compute_nonlocals(r);
  const ModulationRates mb = modulation_rates(r, nlr, 0.0, 0.0, 0.0);
  CHECK(std::abs(mb.dtau) <= 1e-13);
  CHECK(std::abs(mb.dkappa) <= 1e-13);
  CHECK(std::abs(mb.dxi) <= 1e-13);
}

TEST_CASE("modulation companion wiring") {
  SimConfig cfg;
  cfg.model = Model::rSV;
  cfg.eps = 0.3;
  const CompanionOde comp = make_modulation_companion(cfg, 4.0);
  REQUIRE(comp.y.size() == 3);
  CHECK(comp.y[0] == 0.0);
  CHECK(comp.y[1] == 4.0);
  CHECK(comp.y[2] == 0.0);
  REQUIRE(comp.dt_cap);
  REQUIRE(comp.stop_check);
  const Grid1D g(-4.0, 4.0, 512);
  PhysState s;
  s.model = Model::rSV;
  s.grid = g;
  s.t = -0.3;
  s.w.assign(512, 4.0);
  s.z.assign(512, -4.0);
  CHECK(comp.dt_cap(s, comp.y) == doctest::Approx(0.075).epsilon(1e-12));
  // Normalization drift is reported through the snapshots, never a stop:
  // flat (unnormalized) data does not end the run.
  CHECK(comp.stop_check(s, comp.y).empty());
  // The companion's own singularity does: tau - t down to a few CFL steps.
  s.t = -1e-6;
  CHECK(comp.stop_check(s, comp.y) == "tau_reached");
}

TEST_CASE("blow-up time and location from exact gradient growth") {
  Trajectory traj;
  traj.initial_max_neg_slope = 1.0;
  for (int i = 0; i < 360; ++i) {
    SeriesPoint p;
    p.t = 0.40 + 2.5e-4 * i;
    p.min_wx = -1.0 / (0.5 - p.t);
    p.argmin_x = 0.3 + 0.2 * (0.5 - p.t);
    traj.series.push_back(p);
  }
  const BlowupEstimate est = estimate_blowup(traj);
  CHECK(est.n_used == 360);
  CHECK(std::abs(est.T_star - 0.5) <= 1e-8);
  CHECK(std::abs(est.x_star - 0.3) <= 1e-6);
  CHECK(est.m_slope == doctest::Approx(-1.0).epsilon(1e-9));

  // Too little growth: nothing qualifies.
  Trajectory weak;
  weak.initial_max_neg_slope = 1.0;
  for (int i = 0; i < 50; ++i) {
    SeriesPoint p;
    p.t = 0.01 * i;
    p.min_wx = -2.0;
    weak.series.push_back(p);
  }
  CHECK_THROWS_AS(estimate_blowup(weak), std::runtime_error);

  // Qualifying but non-shrinking slope: the inverse is not decreasing.
  Trajectory flat = weak;
  for (SeriesPoint& p : flat.series) p.min_wx = -8.0;
  CHECK_THROWS_AS(estimate_blowup(flat), std::runtime_error);
}

TEST_CASE("discrete residual on the exact stationary profile") {
  // With the modulation frozen, the residual of the principal equation
  // reduces to I(y) * (cosh(e_rate * ds/2) - 1) from midpoint-averaging the
  // exponential prefactor of the nonlocal term; the slope equation is the
  // profile equation itself plus the truncated-asymptotics tail error.
  const RescaledSnapshot a = stationary_snapshot(Model::rSV, 2.0);
  const RescaledSnapshot b = stationary_snapshot(Model::rSV, 2.08);
  const ResidualStats st = residual_check(a, b);
  CHECK(st.s_mid == doctest::Approx(2.04).epsilon(1e-14));
  CHECK(st.sup >= 1e-4);  // the prefactor curvature is genuinely there
  CHECK(st.sup <= 1e-3);
  CHECK(st.sup_wy <= 1e-4);
  CHECK(st.l2 > 0.0);

  const RescaledSnapshot ra = stationary_snapshot(Model::rB, 2.0);
  const RescaledSnapshot rb = stationary_snapshot(Model::rB, 2.08);
  const ResidualStats s1 = residual_check(ra, rb);
  CHECK(s1.sup >= 0.012);
  CHECK(s1.sup <= 0.020);
  CHECK(s1.sup_wy <= 1e-4);
  // Used nodes: every grid point within the common window.
  std::size_t expect = 0;
  for (double y : selfsim_ygrid())
    if (std::abs(y) <= 1.0e4) ++expect;
  CHECK(s1.n_used == expect);

  // Halving ds quarters the prefactor error (cosh is quadratic at 0).
  const RescaledSnapshot rc = stationary_snapshot(Model::rB, 2.04);
  const ResidualStats s2 = residual_check(ra, rc);
  const double ratio = s1.sup / s2.sup;
  CHECK(ratio >= 3.8);
  CHECK(ratio <= 4.2);

  CHECK_THROWS_AS(residual_check(ra, a), std::invalid_argument);
  CHECK_THROWS_AS(residual_check(b, a), std::invalid_argument);
}

TEST_CASE("profile distance vanishes on the exact profile") {
  const RescaledSnapshot a = stationary_snapshot(Model::rSV, 2.0);
  const ProfileDistance d = profile_distance(a, table());
  CHECK(d.sup_weighted <= 1e-12);
  CHECK(std::abs(d.w0) <= 1e-12);
  CHECK(std::abs(d.wy0_plus2) <= 1e-12);
  CHECK(std::abs(d.wyy0) <= 1e-12);
}

TEST_CASE("end-to-end rescaled run tracks the blow-up normalization") {
  SimConfig cfg;
  cfg.model = Model::rB;
  cfg.eps = 0.45;
  cfg.L = 4.0;
  cfg.n = 4096;
  cfg.stop_growth_factor = 1.8;
  const SelfSimResult res = run_selfsim(cfg, table());
  CHECK(res.traj.stop_reason == "growth_target");
  REQUIRE(!res.rescaled.empty());
  for (std::size_t i = 1; i < res.rescaled.size(); ++i)
    CHECK(res.rescaled[i].s > res.rescaled[i - 1].s);
  const RescaledSnapshot& last = res.rescaled.back();
  CHECK(std::abs(last.wy0_wide + 2.0) <= 0.15);
  // The trusted window is capped by the cutoff plateau |x| <= 1, so at the
  // 1.8x growth target (T <= eps/1.8) it must exceed (1.8/eps)^{5/2} ~ 32;
  // a value above ~100 would mean the cap leaked past the plateau.
  CHECK(last.y_window > 30.0);
  CHECK(last.y_window < 100.0);
  CHECK(std::abs(res.tau_final) <= 0.1);
  CHECK(res.t_final < res.tau_final);
  CHECK(res.traj.companion_series.size() == res.traj.series.size());
}
