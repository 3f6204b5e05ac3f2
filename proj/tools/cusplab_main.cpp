// Command-line driver: profile computation, blow-up simulations, analysis
// of recorded runs, and the static inequality verification suite.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cusplab/holder.hpp"
#include "cusplab/io.hpp"
#include "cusplab/kernels.hpp"
#include "cusplab/par.hpp"
#include "cusplab/pde.hpp"
#include "cusplab/profile.hpp"
#include "cusplab/selfsim.hpp"
#include "cusplab/verify.hpp"

namespace fs = std::filesystem;
using namespace cusplab;

namespace {

std::string snap_name(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "snap_%03zu.csv", i);
  return buf;
}

ProfileTable profile_for_config(const SimConfig& cfg) {
  const double needed = 1.2 * cfg.L * std::pow(cfg.eps, -2.5);
  return solve_profile(1.0, std::max(1e4, needed), 1e-10);
}

struct Verdict {
  std::string name;
  bool pass = false;
  std::string detail;
};

void print_verdicts(const std::vector<Verdict>& vs) {
  for (const Verdict& v : vs)
    std::cout << (v.pass ? "  ok   " : "  FAIL ") << v.name << ": " << v.detail
              << '\n';
}

int cmd_profile(double beta, double ymax, double rtol, const std::string& out,
                bool check) {
  const ProfileTable table = solve_profile(beta, ymax, rtol);
  std::cout << "profile beta=" << beta << ": " << table.y_nodes.size()
            << " nodes, y_switch=" << table.y_switch
            << ", match_err=" << table.match_err
            << ", ode_residual=" << profile_residual(table)
            << ", third_deriv_at_0=" << profile_wppp(beta, -2.0) << '\n';
  if (!out.empty()) {
    std::ofstream os(out);
    if (!os) {
      std::cerr << "cannot write " << out << '\n';
      return 1;
    }
    profile_export_csv(table, os);
    std::cout << "wrote " << out << '\n';
  }
  if (check) {
    if (beta != 1.0) {
      std::cerr << "--check requires beta = 1 (the inequality suite is "
                   "normalized to the unit profile)\n";
      return 1;
    }
    const VerifyReport rep = check_profile_inequalities(table);
    std::cout << report_text(rep);
    return rep.all_pass() ? 0 : 1;
  }
  return 0;
}

int cmd_simulate(const SimConfig& cfg, const std::string& outdir, bool svg) {
  fs::create_directories(outdir);
  const ProfileTable profile = profile_for_config(cfg);

  const PhysState init = make_initial_data(cfg, profile);
  const VerifyReport init_rep =
      validate_initial_data(init, profile, cfg.theta_cap);

  SelfSimResult res = run_selfsim(cfg, profile);
  const Trajectory& traj = res.traj;

  const double growth =
      traj.series.empty()
          ? 1.0
          : -traj.series.back().min_wx / traj.initial_max_neg_slope;
  std::cout << "run stopped: " << traj.stop_reason << " (" << traj.stop_detail
            << ") at t=" << traj.final_state.t << ", slope growth "
            << growth << "x, " << traj.series.size() << " steps, "
            << traj.snaps.size() << " snapshots\n";
  std::cout << "modulation blow-up estimate tau_final=" << res.tau_final
            << '\n';
  try {
    const BlowupEstimate est = estimate_blowup(traj);
    std::cout << "slope-based estimate T*=" << est.T_star
              << ", x*=" << est.x_star << " (" << est.n_used << " samples)\n";
  } catch (const std::exception& e) {
    std::cout << "slope-based blow-up estimate unavailable: " << e.what()
              << '\n';
  }

  // Emit at most ~60 snapshot CSVs (plus always first and last).
  const std::size_t nsnap = traj.snaps.size();
  const std::size_t stride = std::max<std::size_t>(1, (nsnap + 59) / 60);
  std::vector<std::string> files(nsnap);
  const Grid1D grid(-cfg.L, cfg.L, cfg.n);
  for (std::size_t i = 0; i < nsnap; ++i) {
    if (i % stride != 0 && i + 1 != nsnap) continue;
    files[i] = snap_name(i);
    write_snapshot_csv(traj.snaps[i], grid, cfg.model,
                       (fs::path(outdir) / files[i]).string());
  }
  write_series_csv(traj, (fs::path(outdir) / "series.csv").string());
  if (!res.rescaled.empty()) {
    write_rescaled_csv(res.rescaled.back(),
                       (fs::path(outdir) / "rescaled_final.csv").string());
  }

  json manifest = manifest_from_run(cfg, traj, &res, files);
  manifest["files"].push_back("series.csv");
  if (!res.rescaled.empty()) manifest["files"].push_back("rescaled_final.csv");
  manifest["initial_data_report"] = report_json(init_rep);
  if (svg) {
    std::vector<double> ts, slopes;
    for (const SeriesPoint& p : traj.series) {
      ts.push_back(p.t);
      slopes.push_back(-p.min_wx);
    }
    write_svg_chart((fs::path(outdir) / "slope_growth.svg").string(),
                    "max(-slope) vs t", "t", ts, {{"max(-slope)", slopes}},
                    true);
    manifest["files"].push_back("slope_growth.svg");
  }
  write_json_file(manifest, (fs::path(outdir) / "manifest.json").string());
  std::cout << "wrote " << outdir << "/manifest.json and "
            << manifest["files"].size() << " data files\n";
  std::cout << "initial-data audit: "
            << (init_rep.all_pass() ? "all conditions hold"
                                    : "some conditions fail (see manifest)")
            << '\n';
  return 0;
}

int cmd_analyze(const std::string& manifest_path, bool svg) {
  const fs::path dir = fs::path(manifest_path).parent_path();
  json manifest = read_json_file(manifest_path);
  const SimConfig cfg = config_from_json(manifest.at("config"));
  const double g0 = manifest.at("initial").at("max_neg_slope").get<double>();
  const Grid1D grid(-cfg.L, cfg.L, cfg.n);
  const bool rsv = cfg.model == Model::rSV;

  // Rebuild the scalar series.
  const json& js = manifest.at("series");
  const std::vector<double> st = js.at("t").get<std::vector<double>>();
  const std::vector<double> smin = js.at("min_wx").get<std::vector<double>>();

  std::vector<Verdict> verdicts;
  double t_star = 0.0;
  bool have_tstar = false;
  {
    Trajectory lite;
    lite.initial_max_neg_slope = g0;
    for (std::size_t i = 0; i < st.size(); ++i) {
      SeriesPoint p;
      p.t = st[i];
      p.min_wx = smin[i];
      p.argmin_x = js.at("argmin_x")[i].get<double>();
      lite.series.push_back(p);
    }
    try {
      const BlowupEstimate est = estimate_blowup(lite);
      t_star = est.T_star;
      have_tstar = true;
      manifest["estimates"]["T_star_slope"] = est.T_star;
      manifest["estimates"]["x_star"] = est.x_star;
      std::cout << "blow-up fit: T*=" << est.T_star << ", x*=" << est.x_star
                << '\n';
    } catch (const std::exception& e) {
      verdicts.push_back({"blow-up detection", false,
                          std::string("no blow-up detected: ") + e.what()});
    }
  }

  // Load emitted snapshots and compute seminorm series.
  struct SnapData {
    double t = 0.0, min_wx = 0.0;
    Field f;
  };
  std::vector<SnapData> snaps;
  std::vector<std::size_t> snap_index;
  const json& js_snaps = manifest.at("snapshots");
  for (std::size_t i = 0; i < js_snaps.size(); ++i) {
    const std::string file = js_snaps[i].value("file", "");
    if (file.empty()) continue;
    const LoadedSnapshot ls = read_snapshot_csv((dir / file).string());
    SnapData sd;
    sd.t = js_snaps[i].at("t").get<double>();
    sd.min_wx = js_snaps[i].at("min_wx").get<double>();
    sd.f = rsv ? ls.w : ls.v;
    if (sd.f.size() != static_cast<std::size_t>(grid.n)) {
      std::cerr << "snapshot " << file << " does not match the config grid\n";
      return 1;
    }
    snaps.push_back(std::move(sd));
    snap_index.push_back(i);
  }
  std::cout << "loaded " << snaps.size() << " snapshots\n";

  const std::vector<double> alphas{0.6, 0.7, 0.8, 1.0};
  // seminorms[a][k]: alpha a, snapshot k.
  std::vector<std::vector<double>> seminorms(
      alphas.size(), std::vector<double>(snaps.size(), 0.0));
  std::vector<std::vector<double>> seminorms_excl = seminorms;
  double x_star = 0.0;
  if (manifest.contains("estimates") && manifest["estimates"].contains("x_star"))
    x_star = manifest["estimates"]["x_star"].get<double>();
  par::parallel_for(static_cast<std::ptrdiff_t>(snaps.size() * alphas.size()),
               [&](std::ptrdiff_t idx) {
                 const std::size_t k = idx / alphas.size();
                 const std::size_t a = idx % alphas.size();
                 const Field fx = deriv1(snaps[k].f, grid.dx, false);
                 std::ptrdiff_t arg = 0;
                 for (std::size_t i = 1; i < fx.size(); ++i)
                   if (fx[i] < fx[arg]) arg = static_cast<std::ptrdiff_t>(i);
                 seminorms[a][k] =
                     holder_seminorm(snaps[k].f, grid, alphas[a], 2000, arg);
                 seminorms_excl[a][k] = holder_seminorm(
                     snaps[k].f, grid, alphas[a], 2000, -1, x_star - 0.25,
                     x_star + 0.25);
               });

  // Rate fits over the growth window [4x, 20x].
  json fits = json::object();
  if (have_tstar) {
    auto fit_window = [&](const std::vector<double>& ts,
                          const std::vector<double>& vals,
                          const std::vector<double>& growth) -> LineFit {
      std::vector<SeminormPoint> pts;
      for (std::size_t i = 0; i < ts.size(); ++i) {
        if (growth[i] >= 4.0 * g0 && growth[i] <= 20.0 * g0)
          pts.push_back({ts[i], vals[i]});
      }
      return fit_blowup_rate(pts, t_star);
    };
    // ||w_x|| slope from the dense series.
    std::vector<double> neg;
    for (double v : smin) neg.push_back(-v);
    try {
      const LineFit lf = fit_window(st, neg, neg);
      fits["slope_sup"] = lf.slope;
      const bool ok = std::abs(lf.slope - (-1.0)) <= 0.15;
      verdicts.push_back({"max-slope rate", ok,
                          "fitted " + std::to_string(lf.slope) +
                              ", expected -1 +/- 0.15"});
    } catch (const std::exception& e) {
      verdicts.push_back({"max-slope rate", false, e.what()});
    }
    // Seminorm slopes from snapshots.
    std::vector<double> snap_growth;
    for (const SnapData& sd : snaps) snap_growth.push_back(-sd.min_wx);
    std::vector<double> snap_t;
    for (const SnapData& sd : snaps) snap_t.push_back(sd.t);
    for (std::size_t a = 0; a < alphas.size(); ++a) {
      const double expect = expected_rate_exponent(alphas[a]);
      const double tol = alphas[a] == 0.6 ? 0.1 : 0.15;
      const std::string name =
          "alpha=" + std::to_string(alphas[a]) + " seminorm rate";
      try {
        const LineFit lf = fit_window(snap_t, seminorms[a], snap_growth);
        fits["alpha_" + std::to_string(alphas[a])] = lf.slope;
        const bool ok = std::abs(lf.slope - expect) <= tol;
        verdicts.push_back({name, ok,
                            "fitted " + std::to_string(lf.slope) +
                                ", expected " + std::to_string(expect) +
                                " +/- " + std::to_string(tol)});
      } catch (const std::exception& e) {
        verdicts.push_back({name, false, e.what()});
      }
    }
    // Excluded-window Lipschitz seminorm: slope >= -0.1.
    try {
      std::vector<double> snap_tv = snap_t;
      const LineFit lf =
          fit_window(snap_tv, seminorms_excl.back(), snap_growth);
      fits["alpha_1_excluded"] = lf.slope;
      verdicts.push_back({"excluded-window Lipschitz rate", lf.slope >= -0.1,
                          "fitted " + std::to_string(lf.slope) +
                              ", required >= -0.1"});
    } catch (const std::exception& e) {
      verdicts.push_back({"excluded-window Lipschitz rate", false, e.what()});
    }
  }

  // Rescale snapshots and run the bootstrap monitor + profile distance.
  const ProfileTable profile = profile_for_config(cfg);
  std::vector<RescaledSnapshot> rescaled;
  for (std::size_t k = 0; k < snaps.size(); ++k) {
    const json& e = js_snaps[snap_index[k]];
    if (!e.contains("companion")) continue;
    const std::vector<double> c = e["companion"].get<std::vector<double>>();
    if (c.size() < 3 || !(c[0] - snaps[k].t > 0.0)) continue;
    PhysState stx;
    stx.model = cfg.model;
    stx.grid = grid;
    stx.t = snaps[k].t;
    stx.eps = cfg.eps;
    stx.h_star = cfg.h_star;
    if (rsv) {
      const LoadedSnapshot ls =
          read_snapshot_csv((dir / js_snaps[snap_index[k]]["file"]
                                       .get<std::string>()).string());
      stx.w = ls.w;
      stx.z = ls.z;
    } else {
      stx.v = snaps[k].f;
    }
    rescaled.push_back(
        rescale_snapshot(stx, compute_nonlocals(stx), c[0], c[1], c[2]));
  }
  std::cout << "rescaled " << rescaled.size() << " snapshots\n";
  if (!rescaled.empty()) {
    MonitorSeries ms;
    const VerifyReport mon = monitor_bootstrap(
        rescaled, profile, cfg.m_const, cfg.h_star, cfg.eps, cfg.theta_cap,
        &ms);
    std::cout << report_text(mon);
    write_monitor_csv(ms, (dir / "monitor.csv").string());
    manifest["files"].push_back("monitor.csv");
    manifest["analysis"]["monitor"] = report_json(mon);
    const ProfileDistance pd = profile_distance(rescaled.back(), profile);
    manifest["analysis"]["profile_distance"] =
        json{{"sup_weighted", pd.sup_weighted},
             {"sup_core_weight", pd.sup_core_weight},
             {"w0", pd.w0},
             {"wy0_plus2", pd.wy0_plus2},
             {"wyy0", pd.wyy0},
             {"y_window", pd.y_window}};
    double worst_resid = 0.0;
    std::size_t pairs = 0;
    for (std::size_t k = 1; k < rescaled.size(); ++k) {
      if (rescaled[k].s - rescaled[k - 1].s > 0.12) continue;
      worst_resid = std::max(
          worst_resid, residual_check(rescaled[k - 1], rescaled[k]).sup);
      ++pairs;
    }
    manifest["analysis"]["residual_pairs"] = pairs;
    manifest["analysis"]["residual_sup"] = worst_resid;
    // Overlay plot data: final rescaled slope vs the profile.
    {
      const RescaledSnapshot& rs = rescaled.back();
      std::ofstream os((dir / "overlay_final.csv").string());
      os << std::setprecision(12) << "y,Wy,profile_slope\n";
      for (std::size_t j = 0; j < rs.y.size(); ++j) {
        if (std::abs(rs.y[j]) > rs.y_window || !std::isfinite(rs.Wy[j]))
          continue;
        os << rs.y[j] << ',' << rs.Wy[j] << ','
           << profile_eval(profile, rs.y[j]).wp << '\n';
      }
      manifest["files"].push_back("overlay_final.csv");
    }
  }

  // Rate-fit plot data.
  {
    std::ofstream os((dir / "rate_fits.csv").string());
    os << std::setprecision(12) << "t,min_wx";
    for (double a : alphas) os << ",alpha_" << a << ",alpha_excl_" << a;
    os << '\n';
    for (std::size_t k = 0; k < snaps.size(); ++k) {
      os << snaps[k].t << ',' << snaps[k].min_wx;
      for (std::size_t a = 0; a < alphas.size(); ++a)
        os << ',' << seminorms[a][k] << ',' << seminorms_excl[a][k];
      os << '\n';
    }
    manifest["files"].push_back("rate_fits.csv");
  }
  if (svg && have_tstar && !snaps.empty()) {
    std::vector<double> lx;
    std::map<std::string, std::vector<double>> sv;
    for (std::size_t k = 0; k < snaps.size(); ++k) {
      const double rem = t_star - snaps[k].t;
      if (!(rem > 0)) continue;
      lx.push_back(std::log10(rem));
      for (std::size_t a = 0; a < alphas.size(); ++a)
        sv["alpha=" + std::to_string(alphas[a])].push_back(seminorms[a][k]);
    }
    write_svg_chart((dir / "seminorm_rates.svg").string(),
                    "Hölder seminorms vs T*-t (log-log)", "log10(T*-t)", lx,
                    sv, true);
    manifest["files"].push_back("seminorm_rates.svg");
  }

  manifest["analysis"]["fits"] = fits;
  json jv = json::array();
  for (const Verdict& v : verdicts)
    jv.push_back({{"name", v.name}, {"pass", v.pass}, {"detail", v.detail}});
  manifest["analysis"]["verdicts"] = jv;
  write_json_file(manifest, manifest_path);

  std::cout << "analysis verdicts:\n";
  print_verdicts(verdicts);
  const bool all =
      std::all_of(verdicts.begin(), verdicts.end(),
                  [](const Verdict& v) { return v.pass; });
  std::cout << (all ? "all analysis checks passed"
                    : "some analysis checks failed")
            << '\n';
  return all ? 0 : 1;
}

int cmd_verify(double ymax, double rtol) {
  const ProfileTable table = solve_profile(1.0, ymax, rtol);
  const VerifyReport rep = check_profile_inequalities(table);
  std::cout << report_text(rep);
  return rep.all_pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gradient blow-up laboratory for regularized shallow-water "
               "and Burgers models"};
  app.require_subcommand(1);

  // profile
  auto* sp = app.add_subcommand("profile", "compute the self-similar profile");
  double beta = 1.0, ymax = 1e4, rtol = 1e-10;
  std::string out_csv;
  bool check = false;
  sp->add_option("--beta", beta, "profile family parameter (> 0)")
      ->check(CLI::PositiveNumber);
  sp->add_option("--ymax", ymax, "table extent")->check(CLI::PositiveNumber);
  sp->add_option("--rtol", rtol, "integration tolerance");
  sp->add_option("--out", out_csv, "CSV output path");
  sp->add_flag("--check", check, "run the inequality suite (beta = 1)");

  // simulate
  auto* ss = app.add_subcommand("simulate", "run a blow-up simulation");
  std::string model_arg;
  ss->add_option("model", model_arg, "rsv or rb")
      ->required()
      ->check(CLI::IsMember({"rsv", "rb"}));
  std::string config_path, outdir;
  bool svg = false;
  SimConfig defaults;
  double eps = defaults.eps, hstar = defaults.h_star, L = defaults.L;
  std::int64_t n = defaults.n;
  double cfl = defaults.cfl, stop_growth = defaults.stop_growth_factor;
  double tmax = defaults.t_max, theta = defaults.theta_cap;
  double mconst = defaults.m_const;
  ss->add_option("--config", config_path, "JSON config file");
  auto* o_eps = ss->add_option("--eps", eps, "steepness parameter in (0, 0.5]")
                    ->check(CLI::Range(1e-6, 0.5));
  auto* o_h = ss->add_option("--hstar", hstar, "far-field depth")
                  ->check(CLI::PositiveNumber);
  auto* o_L = ss->add_option("--L", L, "half-domain length");
  auto* o_n = ss->add_option("--n", n, "grid nodes")->check(CLI::Range(16, 1 << 24));
  auto* o_cfl = ss->add_option("--cfl", cfl, "CFL number");
  auto* o_sg = ss->add_option("--stop-growth", stop_growth,
                              "stop at this slope growth factor");
  auto* o_tm = ss->add_option("--tmax", tmax, "time limit");
  auto* o_th = ss->add_option("--theta", theta, "initial-tube weight constant");
  auto* o_mc = ss->add_option("--mconst", mconst, "bootstrap monitor constant");
  ss->add_option("--outdir", outdir, "output directory");
  ss->add_flag("--svg", svg, "emit SVG charts");

  // analyze
  auto* sa = app.add_subcommand("analyze", "analyze a recorded run");
  std::string manifest_path;
  bool svg_a = false;
  sa->add_option("--manifest", manifest_path, "path to manifest.json")
      ->required();
  sa->add_flag("--svg", svg_a, "emit SVG charts");

  // verify
  auto* sv = app.add_subcommand("verify", "static profile inequality suite");
  double v_ymax = 1e4, v_rtol = 1e-10;
  sv->add_option("--ymax", v_ymax, "table extent");
  sv->add_option("--rtol", v_rtol, "integration tolerance");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sp->parsed()) return cmd_profile(beta, ymax, rtol, out_csv, check);
    if (ss->parsed()) {
      SimConfig cfg;
      if (!config_path.empty())
        cfg = config_from_json(read_json_file(config_path));
      cfg.model = (model_arg == "rsv") ? Model::rSV : Model::rB;
      if (o_eps->count()) cfg.eps = eps;
      if (o_h->count()) cfg.h_star = hstar;
      if (o_L->count()) cfg.L = L;
      if (o_n->count()) cfg.n = static_cast<std::ptrdiff_t>(n);
      if (o_cfl->count()) cfg.cfl = cfl;
      if (o_sg->count()) cfg.stop_growth_factor = stop_growth;
      if (o_tm->count()) cfg.t_max = tmax;
      if (o_th->count()) cfg.theta_cap = theta;
      if (o_mc->count()) cfg.m_const = mconst;
      if (outdir.empty()) outdir = "out_" + model_arg;
      return cmd_simulate(cfg, outdir, svg);
    }
    if (sa->parsed()) return cmd_analyze(manifest_path, svg_a);
    if (sv->parsed()) return cmd_verify(v_ymax, v_rtol);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
