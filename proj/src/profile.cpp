#include "cusplab/profile.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace cusplab {

namespace {

// Far-field constants {c0, c1, c2} of −W̄/y^{3/5}, −W̄′ y^{2/5}, W̄″ y^{7/5}.
std::array<double, 3> asym_constants(double beta) {
  const double k = std::pow(50.0 * beta, -0.2);
  return {5.0 / 3.0 * k, k, 0.4 * k};
}

// Taylor expansion of (W̄, W̄′) about y=0 (odd series, terms through y^7).
void taylor_start(double beta, double y, double& w, double& p) {
  const double b2 = beta * beta, b3 = b2 * beta;
  const double y2 = y * y;
  w = y * (-2.0 +
           y2 * (128.0 * beta / 3.0 +
                 y2 * (-57344.0 / 15.0 * b2 +
                       y2 * (150470656.0 / 315.0 * b3))));
  p = -2.0 +
      y2 * (128.0 * beta +
            y2 * (-57344.0 / 3.0 * b2 + y2 * (150470656.0 / 45.0 * b3)));
}

struct State2 {
  double w, p;
};

State2 rhs(double beta, const State2& u) {
  return {u.p, profile_wpp(beta, u.p)};
}

}  // namespace

double profile_wpp(double beta, double p) {
  const double a = std::max(2.0 + p, 0.0);
  const double q = std::max(-p, 0.0);
  return 2.0 * std::sqrt(beta) * std::sqrt(a) * q * q * q * std::sqrt(q);
}

double profile_wppp(double beta, double p) {
  const double q = -p;
  const double q2 = q * q;
  return 2.0 * beta * q2 * q2 * q2 * (-8.0 * p - 14.0);
}

double profile_wpppp(double beta, double p) {
  const double a = std::max(2.0 + p, 0.0);
  const double q = std::max(-p, 0.0);
  const double q4 = q * q * q * q;
  return 4.0 * beta * std::sqrt(beta) * std::sqrt(a) * q4 * q4 * std::sqrt(q) *
         (56.0 * p + 84.0);
}

ProfilePoint profile_exact_unit(double p) {
  if (!(p > -2.0 && p < 0.0))
    throw std::invalid_argument("profile_exact_unit: need p in (-2, 0)");
  const double a = std::sqrt(2.0 + p);
  const double q = -p;
  const double sq = std::sqrt(q);
  ProfilePoint pt;
  pt.y = a * (2.0 * p * p - 2.0 * p + 3.0) / (30.0 * q * q * sq);
  pt.w = -a * (1.0 - p) / (6.0 * q * sq);
  pt.wp = p;
  pt.wpp = profile_wpp(1.0, p);
  return pt;
}

namespace {

// One embedded Dormand–Prince 5(4) step; returns 5th-order solution and the
// scaled error estimate.
State2 dp45_step(double beta, const State2& u, double h, double& err,
                 double rtol, double atol) {
  auto f = [&](const State2& v) { return rhs(beta, v); };
  const State2 k1 = f(u);
  const State2 u2{u.w + h * (0.2 * k1.w), u.p + h * (0.2 * k1.p)};
  const State2 k2 = f(u2);
  const State2 u3{u.w + h * (3.0 / 40.0 * k1.w + 9.0 / 40.0 * k2.w),
                  u.p + h * (3.0 / 40.0 * k1.p + 9.0 / 40.0 * k2.p)};
  const State2 k3 = f(u3);
  const State2 u4{
      u.w + h * (44.0 / 45.0 * k1.w - 56.0 / 15.0 * k2.w + 32.0 / 9.0 * k3.w),
      u.p + h * (44.0 / 45.0 * k1.p - 56.0 / 15.0 * k2.p + 32.0 / 9.0 * k3.p)};
  const State2 k4 = f(u4);
  const State2 u5{u.w + h * (19372.0 / 6561.0 * k1.w - 25360.0 / 2187.0 * k2.w +
                             64448.0 / 6561.0 * k3.w - 212.0 / 729.0 * k4.w),
                  u.p + h * (19372.0 / 6561.0 * k1.p - 25360.0 / 2187.0 * k2.p +
                             64448.0 / 6561.0 * k3.p - 212.0 / 729.0 * k4.p)};
  const State2 k5 = f(u5);
  const State2 u6{
      u.w + h * (9017.0 / 3168.0 * k1.w - 355.0 / 33.0 * k2.w +
                 46732.0 / 5247.0 * k3.w + 49.0 / 176.0 * k4.w -
                 5103.0 / 18656.0 * k5.w),
      u.p + h * (9017.0 / 3168.0 * k1.p - 355.0 / 33.0 * k2.p +
                 46732.0 / 5247.0 * k3.p + 49.0 / 176.0 * k4.p -
                 5103.0 / 18656.0 * k5.p)};
  const State2 k6 = f(u6);
  // 5th-order combination (also the FSAL node).
  const State2 u7{
      u.w + h * (35.0 / 384.0 * k1.w + 500.0 / 1113.0 * k3.w +
                 125.0 / 192.0 * k4.w - 2187.0 / 6784.0 * k5.w +
                 11.0 / 84.0 * k6.w),
      u.p + h * (35.0 / 384.0 * k1.p + 500.0 / 1113.0 * k3.p +
                 125.0 / 192.0 * k4.p - 2187.0 / 6784.0 * k5.p +
                 11.0 / 84.0 * k6.p)};
  const State2 k7 = f(u7);
  // 4th-order solution for the error estimate.
  const double w4 = u.w + h * (5179.0 / 57600.0 * k1.w +
                               7571.0 / 16695.0 * k3.w + 393.0 / 640.0 * k4.w -
                               92097.0 / 339200.0 * k5.w +
                               187.0 / 2100.0 * k6.w + 1.0 / 40.0 * k7.w);
  const double p4 = u.p + h * (5179.0 / 57600.0 * k1.p +
                               7571.0 / 16695.0 * k3.p + 393.0 / 640.0 * k4.p -
                               92097.0 / 339200.0 * k5.p +
                               187.0 / 2100.0 * k6.p + 1.0 / 40.0 * k7.p);
  const double ew = (u7.w - w4) / (atol + rtol * std::max(std::abs(u.w), std::abs(u7.w)));
  const double ep = (u7.p - p4) / (atol + rtol * std::max(std::abs(u.p), std::abs(u7.p)));
  err = std::sqrt(0.5 * (ew * ew + ep * ep));
  return u7;
}

// Integrate from (y, u) to y_target, adapting the step.
void integrate_to(double beta, double& y, State2& u, double y_target,
                  double& h, double rtol, double atol, double rel_tol) {
  while (y < y_target) {
    if (h > y_target - y) h = y_target - y;
    double err = 0.0;
    const State2 unew = dp45_step(beta, u, h, err, rtol, atol);
    if (err <= 1.0) {
      y += h;
      u = unew;
      if (u.p < -2.0 - rel_tol || u.p > rel_tol) {
        std::ostringstream msg;
        msg << "solve_profile: W' left [-2,0] by more than rel_tol at y=" << y
            << " (W'=" << u.p << ")";
        throw std::runtime_error(msg.str());
      }
      if (u.p > -1e-300) u.p = -1e-300;  // keep strictly negative
    }
    const double fac =
        std::clamp(0.9 * std::pow(std::max(err, 1e-12), -0.2), 0.2, 5.0);
    h *= fac;
    if (h < 1e-15 * std::max(y, 1.0)) {
      std::ostringstream msg;
      msg << "solve_profile: step size underflow at y=" << y
          << " (last scaled error " << err << ")";
      throw std::runtime_error(msg.str());
    }
  }
}

}  // namespace

ProfileTable solve_profile(double beta, double y_max, double rel_tol) {
  if (!(beta > 0.0)) throw std::invalid_argument("solve_profile: beta <= 0");
  if (!(y_max >= 10.0)) throw std::invalid_argument("solve_profile: y_max < 10");
  if (!(rel_tol > 1e-14 && rel_tol < 1e-4))
    throw std::invalid_argument("solve_profile: rel_tol out of (1e-14, 1e-4)");

  ProfileTable t;
  t.beta = beta;
  t.rel_tol = rel_tol;
  t.asym_coeffs = asym_constants(beta);

  const double y0 = std::cbrt(rel_tol) * std::min(1.0, 1.0 / std::sqrt(beta));
  const double ratio = 1.05;

  // Node 0 is the exact origin data.
  t.y_nodes.push_back(0.0);
  t.w_vals.push_back(0.0);
  t.wp_vals.push_back(-2.0);
  t.wpp_vals.push_back(0.0);

  double y = y0;
  State2 u;
  taylor_start(beta, y0, u.w, u.p);

  const double rtol = rel_tol * 1e-2;
  const double atol = rel_tol * 1e-2;
  double h = y0 * 0.1;

  double milestone = y0;
  while (true) {
    integrate_to(beta, y, u, milestone, h, rtol, atol, rel_tol);
    t.y_nodes.push_back(y);
    t.w_vals.push_back(u.w);
    t.wp_vals.push_back(u.p);
    t.wpp_vals.push_back(profile_wpp(beta, u.p));
    if (milestone >= y_max) break;
    milestone = std::min(milestone * ratio, y_max);
  }

  // y_switch: first node from which all three components stay within 1% of
  // the far-field forms through the end of the table.
  const auto& c = t.asym_coeffs;
  const std::size_t nn = t.y_nodes.size();
  std::vector<double> mism(nn, 1e300);
  for (std::size_t i = 1; i < nn; ++i) {
    const double yi = t.y_nodes[i];
    const double aw = -c[0] * std::pow(yi, 0.6);
    const double ap = -c[1] * std::pow(yi, -0.4);
    const double app = c[2] * std::pow(yi, -1.4);
    const double ew = std::abs(t.w_vals[i] - aw) / std::abs(aw);
    const double ep = std::abs(t.wp_vals[i] - ap) / std::abs(ap);
    const double epp = std::abs(t.wpp_vals[i] - app) / std::abs(app);
    mism[i] = std::max({ew, ep, epp});
  }
  std::size_t sw = nn - 1;
  for (std::size_t i = nn; i-- > 1;) {
    if (mism[i] > 0.01) break;
    sw = i;
  }
  t.y_switch = t.y_nodes[sw];
  t.match_err = mism[sw];
  return t;
}

ProfileEval profile_eval(const ProfileTable& t, double y) {
  const double s = y < 0.0 ? -1.0 : 1.0;
  const double ay = std::abs(y);
  ProfileEval out;
  if (ay == 0.0) {
    out.w = 0.0;
    out.wp = -2.0;
    out.wpp = 0.0;
    return out;
  }
  if (ay >= t.y_switch) {
    const auto& c = t.asym_coeffs;
    out.w = s * (-c[0] * std::pow(ay, 0.6));
    out.wp = -c[1] * std::pow(ay, -0.4);
    out.wpp = s * (c[2] * std::pow(ay, -1.4));
    return out;
  }
  // Locate the interval [y_k, y_{k+1}] containing ay.
  const auto it = std::upper_bound(t.y_nodes.begin(), t.y_nodes.end(), ay);
  std::size_t k = static_cast<std::size_t>(it - t.y_nodes.begin());
  if (k == 0) k = 1;
  if (k >= t.y_nodes.size()) k = t.y_nodes.size() - 1;
  const std::size_t k0 = k - 1, k1 = k;
  const double d = t.y_nodes[k1] - t.y_nodes[k0];
  const double tt = (ay - t.y_nodes[k0]) / d;
  const double t2 = tt * tt, t3 = t2 * tt;
  const double h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
  const double h10 = t3 - 2.0 * t2 + tt;
  const double h01 = -2.0 * t3 + 3.0 * t2;
  const double h11 = t3 - t2;
  const double w = h00 * t.w_vals[k0] + h10 * d * t.wp_vals[k0] +
                   h01 * t.w_vals[k1] + h11 * d * t.wp_vals[k1];
  double p = h00 * t.wp_vals[k0] + h10 * d * t.wpp_vals[k0] +
             h01 * t.wp_vals[k1] + h11 * d * t.wpp_vals[k1];
  p = std::clamp(p, -2.0, 0.0);
  out.w = s * w;
  out.wp = p;
  out.wpp = s * profile_wpp(t.beta, p);
  return out;
}

ProfileTable rescale_profile(const ProfileTable& unit, double beta) {
  if (unit.beta != 1.0)
    throw std::invalid_argument("rescale_profile: input must have beta == 1");
  if (!(beta > 0.0)) throw std::invalid_argument("rescale_profile: beta <= 0");
  const double lam = 1.0 / std::sqrt(beta);
  ProfileTable t;
  t.beta = beta;
  t.rel_tol = unit.rel_tol;
  t.match_err = unit.match_err;
  t.y_switch = lam * unit.y_switch;
  t.asym_coeffs = asym_constants(beta);
  const std::size_t nn = unit.y_nodes.size();
  t.y_nodes.resize(nn);
  t.w_vals.resize(nn);
  t.wp_vals.resize(nn);
  t.wpp_vals.resize(nn);
  for (std::size_t i = 0; i < nn; ++i) {
    t.y_nodes[i] = lam * unit.y_nodes[i];
    t.w_vals[i] = lam * unit.w_vals[i];
    t.wp_vals[i] = unit.wp_vals[i];
    t.wpp_vals[i] = unit.wpp_vals[i] / lam;
  }
  return t;
}

double profile_residual(const ProfileTable& t) {
  double res = 0.0;
  for (std::size_t i = 0; i < t.y_nodes.size(); ++i) {
    const double y = t.y_nodes[i];
    const double w = t.w_vals[i];
    const double p = t.wp_vals[i];
    const double pp = t.wpp_vals[i];
    const double full = std::abs((1.0 + 0.5 * p) * p + (w + 2.5 * y) * pp);
    const double reduced =
        std::abs(pp - profile_wpp(t.beta, p)) / (1.0 + std::abs(pp));
    res = std::max({res, full, reduced});
  }
  return res;
}

void profile_export_csv(const ProfileTable& t, std::ostream& os) {
  os.precision(17);
  os << "# beta=" << t.beta << " rel_tol=" << t.rel_tol
     << " y_switch=" << t.y_switch << " match_err=" << t.match_err << "\n";
  os << "y,W,Wp,Wpp\n";
  for (std::size_t i = 0; i < t.y_nodes.size(); ++i)
    os << t.y_nodes[i] << ',' << t.w_vals[i] << ',' << t.wp_vals[i] << ','
       << t.wpp_vals[i] << "\n";
}

ProfileTable profile_import_csv(std::istream& is) {
  ProfileTable t;
  std::string line;
  if (!std::getline(is, line) || line.rfind("# ", 0) != 0)
    throw std::runtime_error("profile_import_csv: missing header");
  {
    std::istringstream hs(line.substr(2));
    std::string kv;
    while (hs >> kv) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) continue;
      const std::string key = kv.substr(0, eq);
      const double val = std::stod(kv.substr(eq + 1));
      if (key == "beta") t.beta = val;
      if (key == "rel_tol") t.rel_tol = val;
      if (key == "y_switch") t.y_switch = val;
      if (key == "match_err") t.match_err = val;
    }
  }
  if (!std::getline(is, line) || line != "y,W,Wp,Wpp")
    throw std::runtime_error("profile_import_csv: missing column row");
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    double v[4];
    char comma;
    ls >> v[0] >> comma >> v[1] >> comma >> v[2] >> comma >> v[3];
    if (!ls) throw std::runtime_error("profile_import_csv: bad row: " + line);
    t.y_nodes.push_back(v[0]);
    t.w_vals.push_back(v[1]);
    t.wp_vals.push_back(v[2]);
    t.wpp_vals.push_back(v[3]);
  }
  t.asym_coeffs = asym_constants(t.beta);
  return t;
}

}  // namespace cusplab
