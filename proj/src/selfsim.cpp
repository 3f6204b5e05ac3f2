#include "cusplab/selfsim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <stdexcept>
#include <string>

#include "cusplab/kernels.hpp"

namespace cusplab {

namespace {

double interp_at(const Field& f, const Grid1D& g, double x0) {
  return deriv_at(f, g, x0, 0, 4);
}

double max_transport_speed(const PhysState& s) {
  double m = 0.0;
  if (s.model == Model::rSV) {
    for (std::size_t i = 0; i < s.w.size(); ++i) {
      m = std::max(m, std::abs(s.w[i] + s.z[i] / 3.0));
      m = std::max(m, std::abs(s.z[i] + s.w[i] / 3.0));
    }
  } else {
    for (double vi : s.v) m = std::max(m, std::abs(vi));
  }
  return m;
}

}  // namespace

ModulationRates modulation_rates(const PhysState& s, const Nonlocals& nl,
                                 double tau, double kappa, double xi) {
  const double T = tau - s.t;
  if (!(T > 0.0)) throw std::domain_error("modulation_rates: tau <= t");
  const Grid1D& g = s.grid;
  const double guard = 1e-6 * std::pow(s.eps, -6.0);
  ModulationRates r;
  if (s.model == Model::rSV) {
    const Field zx = deriv1(s.z, g.dx);
    const Field zxx = deriv2(s.z, g.dx);
    const Field wxxx = deriv3(s.w, g.dx);
    const Field qx = deriv1(nl.q, g.dx);
    const Field qxx = deriv2(nl.q, g.dx);
    const double zx_xi = interp_at(zx, g, xi);
    const double zxx_xi = interp_at(zxx, g, xi);
    const double qx_xi = interp_at(qx, g, xi);
    const double qxx_xi = interp_at(qxx, g, xi);
    const double z_xi = interp_at(s.z, g, xi);
    const double G_xi = interp_at(nl.G, g, xi);
    const double q_xi = interp_at(nl.q, g, xi);
    const double w3_xi = interp_at(wxxx, g, xi);
    r.dtau = 0.25 * T * T * zx_xi * zx_xi - (4.0 / 3.0) * T * zx_xi -
             (4.0 / 3.0) * T * T * qx_xi;
    const double b = zx_xi * zxx_xi - (8.0 / 3.0) * qxx_xi -
                     (8.0 / 3.0) * zxx_xi / T;
    const double b_term = (std::abs(w3_xi) > guard) ? b / w3_xi : 0.0;
    r.dkappa = 2.0 * b_term / T + (8.0 / 3.0) * (G_xi - q_xi);
    r.dxi = -b_term + z_xi / 3.0 + kappa;
  } else {
    const Field px = deriv1(nl.p, g.dx);
    const Field vxxx = deriv3(s.v, g.dx);
    const double p_xi = interp_at(nl.p, g, xi);
    const double px_xi = interp_at(px, g, xi);
    const double v3_xi = interp_at(vxxx, g, xi);
    r.dtau = -0.5 * T * T * p_xi;
    const double b_term = (std::abs(v3_xi) > guard) ? px_xi / v3_xi : 0.0;
    r.dkappa = -2.0 * b_term / T - px_xi;
    r.dxi = b_term + kappa;
  }
  return r;
}

CompanionOde make_modulation_companion(const SimConfig& cfg, double kappa0) {
  CompanionOde comp;
  comp.y = {0.0, kappa0, 0.0};

  comp.rhs = [](const StageView& sv, const std::vector<double>& y,
                double /*t*/) {
    const ModulationRates r =
        modulation_rates(sv.state, sv.nl, y[0], y[1], y[2]);
    return std::vector<double>{r.dtau, r.dkappa, r.dxi};
  };

  comp.dt_cap = [](const PhysState& s, const std::vector<double>& y) {
    const double T = y[0] - s.t;
    return (T > 0.0) ? 0.25 * T : -1.0;
  };

  const double cfl = cfg.cfl;
  comp.stop_check = [cfl](const PhysState& s,
                          const std::vector<double>& y) -> std::string {
    // Only the companion's own singularity ends the run here: tau - t
    // shrinking to a few CFL steps.  Drift of the normalization
    // constraints is NOT a stop -- it degrades only the rescaled view,
    // the residuals are recorded in every snapshot (w0/wy0/wyy0), and
    // consumers gate on them per snapshot; the physical run stays
    // governed by the standard stop set (growth target, energy drift,
    // dt floor, t_max).
    const double T = y[0] - s.t;
    const double speed = std::max(max_transport_speed(s), 1e-300);
    const double dt_cfl = cfl * s.grid.dx / speed;
    if (T <= 5.0 * dt_cfl) return "tau_reached";
    return "";
  };

  // Snapshot every 0.08 in s = -log(tau - t), starting from s(t = -eps).
  auto last_s = std::make_shared<double>(-std::log(cfg.eps));
  comp.snapshot_due = [last_s](const PhysState& s,
                               const std::vector<double>& y) {
    const double T = y[0] - s.t;
    if (!(T > 0.0)) return false;
    const double sv = -std::log(T);
    if (sv >= *last_s + 0.08) {
      *last_s = sv;
      return true;
    }
    return false;
  };
  return comp;
}

std::vector<double> selfsim_ygrid() {
  std::vector<double> pos;
  for (int i = 1; i <= 80; ++i) pos.push_back(0.025 * i);
  double y = 2.0;
  while (y < 1e4) {
    y *= 1.06;
    pos.push_back(y);
  }
  std::vector<double> grid;
  grid.reserve(2 * pos.size() + 1);
  for (std::size_t i = pos.size(); i-- > 0;) grid.push_back(-pos[i]);
  grid.push_back(0.0);
  for (double p : pos) grid.push_back(p);
  return grid;
}

RescaledSnapshot rescale_snapshot(const PhysState& s, const Nonlocals& nl,
                                  double tau, double kappa, double xi) {
  const double T = tau - s.t;
  if (!(T > 0.0)) throw std::domain_error("rescale_snapshot: tau <= t");
  const Grid1D& g = s.grid;

  RescaledSnapshot rs;
  rs.model = s.model;
  rs.t = s.t;
  rs.tau = tau;
  rs.kappa = kappa;
  rs.xi = xi;
  rs.s = -std::log(T);
  const ModulationRates mr = modulation_rates(s, nl, tau, kappa, xi);
  rs.dtau = mr.dtau;
  rs.dkappa = mr.dkappa;
  rs.dxi = mr.dxi;
  rs.y = selfsim_ygrid();

  const double t52 = std::pow(T, 2.5);
  const double e3s2 = std::pow(T, -1.5);
  const double margin = 6.0 * g.dx;
  // Trusted window: inside the cutoff plateau |x| <= 1 and the grid margin.
  const double reach_r = std::min(1.0 - xi, g.x_max - margin - xi);
  const double reach_l = std::min(1.0 + xi, xi - (g.x_min + margin));
  rs.y_window = std::max(0.0, std::min(reach_r, reach_l)) / t52;
  rs.dy = g.dx / t52;

  const Field& f = (s.model == Model::rSV) ? s.w : s.v;
  const Field fx = deriv1(f, g.dx);
  const Field fx6 = deriv1_o6(f, g.dx);
  const Field fxx = deriv2(f, g.dx);
  const Field fxxx = deriv3(f, g.dx);
  const Field fxxxx = deriv4(f, g.dx);
  Field zx, qx;
  const Field* nlq = nullptr;
  if (s.model == Model::rSV) {
    zx = deriv1(s.z, g.dx);
    qx = deriv1(nl.q, g.dx);
    nlq = &nl.q;
  } else {
    qx = deriv1(nl.p, g.dx);
    nlq = &nl.p;
  }

  const std::size_t m = rs.y.size();
  const double nan = std::numeric_limits<double>::quiet_NaN();
  rs.W.assign(m, nan);
  rs.Wy.assign(m, nan);
  rs.Wy_alt.assign(m, nan);
  rs.Wyy.assign(m, nan);
  rs.Wyyy.assign(m, nan);
  rs.Wyyyy.assign(m, nan);
  rs.Q.assign(m, nan);
  rs.Qy.assign(m, nan);
  if (s.model == Model::rSV) {
    rs.Z.assign(m, nan);
    rs.Zy.assign(m, nan);
    rs.Gt.assign(m, nan);
  }
  const double t72 = std::pow(T, 3.5);
  const double t6 = std::pow(T, 6.0);
  const double t172 = std::pow(T, 8.5);
  for (std::size_t j = 0; j < m; ++j) {
    const double x0 = xi + t52 * rs.y[j];
    if (x0 < g.x_min + margin || x0 > g.x_max - margin) continue;
    rs.W[j] = e3s2 * (interp_at(f, g, x0) - kappa);
    rs.Wy[j] = T * interp_at(fx, g, x0);
    rs.Wy_alt[j] = T * interp_at(fx6, g, x0);
    rs.Wyy[j] = t72 * interp_at(fxx, g, x0);
    rs.Wyyy[j] = t6 * interp_at(fxxx, g, x0);
    rs.Wyyyy[j] = t172 * interp_at(fxxxx, g, x0);
    rs.Q[j] = interp_at(*nlq, g, x0);
    rs.Qy[j] = t52 * interp_at(qx, g, x0);
    if (s.model == Model::rSV) {
      rs.Z[j] = interp_at(s.z, g, x0);
      rs.Zy[j] = t52 * interp_at(zx, g, x0);
      rs.Gt[j] = interp_at(nl.G, g, x0);
    }
  }

  // Wide-stencil point values at the tracking point (y = 0).  Each
  // uncertainty is the largest pairwise spread across a stencil family
  // whose footprints differ by >= 2x.  Two wide stencils of similar span
  // are not enough: once the cusp core falls under the grid they mollify
  // it the same way and agree on a wrong value, while a narrow member
  // still disagrees and keeps the reported uncertainty honest.
  const auto family_spread = [](double a, double b, double c) {
    return std::max({std::abs(a - b), std::abs(a - c), std::abs(b - c)});
  };
  rs.w0_wide = e3s2 * (deriv_at(f, g, xi, 0, 6) - kappa);
  const double d1n = deriv_at(f, g, xi, 1, 4);
  const double d1a = deriv_at(f, g, xi, 1, 8);
  const double d1b = deriv_at(f, g, xi, 1, 12);
  rs.wy0_wide = T * d1b;
  rs.wy0_unc = T * family_spread(d1n, d1a, d1b);
  const double d2n = deriv_at(f, g, xi, 2, 5);
  const double d2a = deriv_at(f, g, xi, 2, 8);
  const double d2b = deriv_at(f, g, xi, 2, 12);
  rs.wyy0_wide = t72 * d2b;
  rs.wyy0_unc = t72 * family_spread(d2n, d2a, d2b);
  const double d3n = deriv_at(f, g, xi, 3, 5);
  const double d3a = deriv_at(f, g, xi, 3, 8);
  const double d3b = deriv_at(f, g, xi, 3, 12);
  rs.wyyy0_wide = t6 * d3b;
  rs.wyyy0_unc = t6 * family_spread(d3n, d3a, d3b);
  return rs;
}

ProfileDistance profile_distance(const RescaledSnapshot& rs,
                                 const ProfileTable& profile) {
  ProfileDistance d;
  d.y_window = rs.y_window;
  for (std::size_t j = 0; j < rs.y.size(); ++j) {
    const double y = rs.y[j];
    if (std::abs(y) > rs.y_window || !std::isfinite(rs.Wy[j])) continue;
    const double dev = std::abs(rs.Wy[j] - profile_eval(profile, y).wp);
    d.sup_weighted =
        std::max(d.sup_weighted, (1.0 + std::pow(std::abs(y), 0.4)) * dev);
    if (y != 0.0) {
      d.sup_core_weight =
          std::max(d.sup_core_weight, (1.0 + y * y) / (y * y) * dev);
    }
  }
  d.w0 = rs.w0_wide;
  d.wy0_plus2 = rs.wy0_wide + 2.0;
  d.wyy0 = rs.wyy0_wide;
  return d;
}

ResidualStats residual_check(const RescaledSnapshot& a,
                             const RescaledSnapshot& b) {
  if (a.model != b.model || a.y.size() != b.y.size())
    throw std::invalid_argument("residual_check: incompatible snapshots");
  const double ds = b.s - a.s;
  if (!(ds > 0.0)) throw std::invalid_argument("residual_check: need b.s > a.s");

  ResidualStats st;
  st.ds = ds;
  st.s_mid = 0.5 * (a.s + b.s);
  st.y_window = std::min(a.y_window, b.y_window);

  const double dtau = 0.5 * (a.dtau + b.dtau);
  const double dkap = 0.5 * (a.dkappa + b.dkappa);
  const double dxi = 0.5 * (a.dxi + b.dxi);
  const double kap = 0.5 * (a.kappa + b.kappa);
  const double om = 1.0 - dtau;  // 1 - tau_dot at midpoint
  const double es2 = std::exp(0.5 * st.s_mid);
  const double e3s2 = std::exp(1.5 * st.s_mid);
  const double e52 = std::exp(2.5 * st.s_mid);
  const double e3s = std::exp(3.0 * st.s_mid);
  const double em2s = std::exp(-2.0 * st.s_mid);
  const bool rsv = a.model == Model::rSV;

  std::vector<double> ys, r1, r2;
  for (std::size_t j = 0; j < a.y.size(); ++j) {
    const double y = a.y[j];
    if (std::abs(y) > st.y_window) continue;
    if (!std::isfinite(a.W[j]) || !std::isfinite(b.W[j])) continue;
    const double wm = 0.5 * (a.W[j] + b.W[j]);
    const double wym = 0.5 * (a.Wy[j] + b.Wy[j]);
    const double wyym = 0.5 * (a.Wyy[j] + b.Wyy[j]);
    const double qm = 0.5 * (a.Q[j] + b.Q[j]);
    const double qym = 0.5 * (a.Qy[j] + b.Qy[j]);
    const double ws = (b.W[j] - a.W[j]) / ds;
    const double wys = (b.Wy[j] - a.Wy[j]) / ds;

    double uw, forcing, resid2;
    if (rsv) {
      const double zm = 0.5 * (a.Z[j] + b.Z[j]);
      const double zym = 0.5 * (a.Zy[j] + b.Zy[j]);
      const double gm = 0.5 * (a.Gt[j] + b.Gt[j]);
      // Inner sum first: Z/3 + kappa - xi_dot is O(y e^{-s}) by design.
      const double inner = zm / 3.0 + (kap - dxi);
      uw = 2.5 * y + wm / om + e3s2 * inner / om;
      // Forcing grouped as e^{s/2} ((8/3)(G - Q) - kappa_dot) / (1 - tau_dot);
      // kappa_dot contains (8/3)(G - Q)(xi), so the difference is small.
      forcing = es2 * ((8.0 / 3.0) * (gm - qm) - dkap) / om;
      resid2 = wys +
               (1.0 + wym / (2.0 * om) - (4.0 / 3.0) * e3s2 * zym / om) * wym +
               uw * wyym + (8.0 / 3.0) * es2 * qym / om -
               e3s * zym * zym / (2.0 * om);
    } else {
      const double inner = kap - dxi;
      uw = 2.5 * y + wm / om + e3s2 * inner / om;
      // e^{3s} P_y = e^{s/2} p_x; kappa_dot contains -p_x(xi).
      forcing = -es2 * (dkap + e52 * qym) / om;
      resid2 = wys + (1.0 + wym / (2.0 * om)) * wym + uw * wyym +
               em2s * qm / om;
    }
    const double resid1 = ws - 1.5 * wm + uw * wym - forcing;
    ys.push_back(y);
    r1.push_back(resid1);
    r2.push_back(resid2);
  }

  st.n_used = ys.size();
  double l2a = 0.0, l2b = 0.0;
  for (std::size_t j = 0; j < ys.size(); ++j) {
    st.sup = std::max(st.sup, std::abs(r1[j]));
    st.sup_wy = std::max(st.sup_wy, std::abs(r2[j]));
    if (j + 1 < ys.size()) {
      const double h = ys[j + 1] - ys[j];
      l2a += 0.5 * h * (r1[j] * r1[j] + r1[j + 1] * r1[j + 1]);
      l2b += 0.5 * h * (r2[j] * r2[j] + r2[j + 1] * r2[j + 1]);
    }
  }
  st.l2 = std::sqrt(l2a);
  st.l2_wy = std::sqrt(l2b);
  return st;
}

BlowupEstimate estimate_blowup(const Trajectory& traj, std::size_t k) {
  const double g0 = traj.initial_max_neg_slope;
  std::vector<double> t, m, xmin;
  for (const SeriesPoint& p : traj.series) {
    const double neg_slope = -p.min_wx;
    if (neg_slope >= 4.0 * g0) {
      t.push_back(p.t);
      m.push_back(1.0 / neg_slope);
      xmin.push_back(p.argmin_x);
    }
  }
  if (t.size() < 8)
    throw std::runtime_error(
        "estimate_blowup: fewer than 8 steps with slope growth >= 4x "
        "(recorded " +
        std::to_string(t.size()) + ")");
  if (t.size() > k) {
    t.erase(t.begin(), t.end() - static_cast<std::ptrdiff_t>(k));
    m.erase(m.begin(), m.end() - static_cast<std::ptrdiff_t>(k));
    xmin.erase(xmin.begin(), xmin.end() - static_cast<std::ptrdiff_t>(k));
  }
  for (std::size_t i = 1; i < m.size(); ++i) {
    if (m[i] > m[i - 1] * (1.0 + 1e-10))
      throw std::runtime_error(
          "estimate_blowup: 1/max(-slope) is not decreasing on the fit "
          "window");
  }
  const LineFit mf = fit_line(t, m);
  if (!(mf.slope < 0.0))
    throw std::runtime_error("estimate_blowup: non-negative slope fit");
  BlowupEstimate est;
  est.T_star = -mf.intercept / mf.slope;
  est.m_slope = mf.slope;
  est.n_used = t.size();
  const LineFit xf = fit_line(t, xmin);
  est.x_star = xf.intercept + xf.slope * est.T_star;
  return est;
}

SelfSimResult run_selfsim(const SimConfig& cfg, const ProfileTable& profile) {
  const double kappa0 =
      (cfg.model == Model::rSV) ? 2.0 * std::sqrt(cfg.h_star) : 0.0;
  CompanionOde comp = make_modulation_companion(cfg, kappa0);
  SelfSimResult out;
  out.traj = run(cfg, profile, &comp);
  const Grid1D grid(-cfg.L, cfg.L, cfg.n);
  for (const Snapshot& sn : out.traj.snaps) {
    if (sn.companion.size() < 3) continue;
    const double tau = sn.companion[0];
    if (!(tau - sn.t > 0.0)) continue;
    PhysState st;
    st.model = cfg.model;
    st.grid = grid;
    st.t = sn.t;
    st.eps = cfg.eps;
    st.h_star = cfg.h_star;
    st.w = sn.w;
    st.z = sn.z;
    st.v = sn.v;
    const Nonlocals nl = compute_nonlocals(st);
    out.rescaled.push_back(
        rescale_snapshot(st, nl, tau, sn.companion[1], sn.companion[2]));
  }
  out.t_final = out.traj.final_state.t;
  out.tau_final = comp.y.empty() ? 0.0 : comp.y[0];
  return out;
}

}  // namespace cusplab
