#include "cusplab/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace cusplab {

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  os << std::setprecision(17);
  return os;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open for reading: " + path);
  return is;
}

std::vector<double> split_csv_row(const std::string& line) {
  std::vector<double> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(std::stod(cell));
  return out;
}

}  // namespace

void write_snapshot_csv(const Snapshot& sn, const Grid1D& grid, Model model,
                        const std::string& path) {
  std::ofstream os = open_out(path);
  if (model == Model::rSV) {
    Field h, u;
    riemann_invert(sn.w, sn.z, h, u);
    os << "x,w,z,h,u\n";
    for (std::ptrdiff_t i = 0; i < grid.n; ++i) {
      const auto k = static_cast<std::size_t>(i);
      os << grid.x(i) << ',' << sn.w[k] << ',' << sn.z[k] << ',' << h[k]
         << ',' << u[k] << '\n';
    }
  } else {
    os << "x,v\n";
    for (std::ptrdiff_t i = 0; i < grid.n; ++i)
      os << grid.x(i) << ',' << sn.v[static_cast<std::size_t>(i)] << '\n';
  }
}

LoadedSnapshot read_snapshot_csv(const std::string& path) {
  std::ifstream is = open_in(path);
  std::string line;
  if (!std::getline(is, line))
    throw std::runtime_error("empty snapshot CSV: " + path);
  LoadedSnapshot out;
  if (line == "x,w,z,h,u")
    out.model = Model::rSV;
  else if (line == "x,v")
    out.model = Model::rB;
  else
    throw std::runtime_error("unrecognized snapshot CSV header: " + line);
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const std::vector<double> row = split_csv_row(line);
    out.x.push_back(row.at(0));
    if (out.model == Model::rSV) {
      out.w.push_back(row.at(1));
      out.z.push_back(row.at(2));
    } else {
      out.v.push_back(row.at(1));
    }
  }
  return out;
}

void write_series_csv(const Trajectory& traj, const std::string& path) {
  std::ofstream os = open_out(path);
  const bool mod = !traj.companion_series.empty();
  os << "t,energy,min_wx,argmin_x,max_abs_zx,norm_G,norm_q,dt";
  if (mod) os << ",tau,kappa,xi";
  os << '\n';
  for (std::size_t i = 0; i < traj.series.size(); ++i) {
    const SeriesPoint& p = traj.series[i];
    os << p.t << ',' << p.energy << ',' << p.min_wx << ',' << p.argmin_x
       << ',' << p.max_abs_zx << ',' << p.norm_G << ',' << p.norm_q << ','
       << p.dt;
    if (mod) {
      const std::vector<double>& c = traj.companion_series.at(i);
      for (double v : c) os << ',' << v;
    }
    os << '\n';
  }
}

void write_rescaled_csv(const RescaledSnapshot& rs, const std::string& path) {
  std::ofstream os = open_out(path);
  os << "# s=" << rs.s << " t=" << rs.t << " tau=" << rs.tau
     << " kappa=" << rs.kappa << " xi=" << rs.xi << " dtau=" << rs.dtau
     << " dkappa=" << rs.dkappa << " dxi=" << rs.dxi
     << " y_window=" << rs.y_window << '\n';
  const bool rsv = rs.model == Model::rSV;
  os << "y,W,Wy,Wy_alt,Wyy,Wyyy,Wyyyy,Q,Qy";
  if (rsv) os << ",Z,Zy,Gt";
  os << '\n';
  for (std::size_t j = 0; j < rs.y.size(); ++j) {
    os << rs.y[j] << ',' << rs.W[j] << ',' << rs.Wy[j] << ',' << rs.Wy_alt[j]
       << ',' << rs.Wyy[j] << ',' << rs.Wyyy[j] << ',' << rs.Wyyyy[j] << ','
       << rs.Q[j] << ',' << rs.Qy[j];
    if (rsv) os << ',' << rs.Z[j] << ',' << rs.Zy[j] << ',' << rs.Gt[j];
    os << '\n';
  }
}

void write_monitor_csv(const MonitorSeries& ms, const std::string& path) {
  std::ofstream os = open_out(path);
  os << "s";
  for (const std::string& id : ms.item_ids) os << ',' << id;
  os << '\n';
  for (std::size_t k = 0; k < ms.s.size(); ++k) {
    os << ms.s[k];
    for (const std::vector<double>& col : ms.margins)
      os << ',' << (k < col.size() ? col[k]
                                   : std::numeric_limits<double>::quiet_NaN());
    os << '\n';
  }
}

std::string report_text(const VerifyReport& rep) {
  std::ostringstream os;
  os << std::left << std::setw(34) << "check" << std::setw(6) << "pass"
     << std::setw(14) << "margin" << std::setw(14) << "location"
     << "note\n";
  for (const CheckItem& it : rep.items) {
    std::ostringstream m, l;
    m << std::setprecision(4) << it.margin;
    l << std::setprecision(4) << it.location;
    os << std::left << std::setw(34) << it.id << std::setw(6)
       << (it.pass ? "ok" : "FAIL") << std::setw(14) << m.str()
       << std::setw(14) << l.str() << it.note << '\n';
  }
  os << (rep.all_pass() ? "all checks passed" : "SOME CHECKS FAILED") << '\n';
  return os.str();
}

json report_json(const VerifyReport& rep) {
  json arr = json::array();
  for (const CheckItem& it : rep.items) {
    arr.push_back({{"id", it.id},
                   {"domain", it.domain},
                   {"margin", it.margin},
                   {"location", it.location},
                   {"pass", it.pass},
                   {"note", it.note}});
  }
  return json{{"items", arr}, {"all_pass", rep.all_pass()}};
}

json config_to_json(const SimConfig& cfg) {
  return json{{"model", model_name(cfg.model)},
              {"eps", cfg.eps},
              {"h_star", cfg.h_star},
              {"L", cfg.L},
              {"n", cfg.n},
              {"cfl", cfg.cfl},
              {"stop_growth_factor", cfg.stop_growth_factor},
              {"dt_floor", cfg.dt_floor},
              {"t_max", cfg.t_max},
              {"snapshot_cadence", cfg.snapshot_cadence},
              {"growth_milestone_ratio", cfg.growth_milestone_ratio},
              {"theta_cap", cfg.theta_cap},
              {"m_const", cfg.m_const},
              {"beta", cfg.beta},
              {"energy_drift_tol", cfg.energy_drift_tol}};
}

SimConfig config_from_json(const json& j) {
  SimConfig cfg;
  const std::string model = j.value("model", "rsv");
  if (model == "rsv")
    cfg.model = Model::rSV;
  else if (model == "rb")
    cfg.model = Model::rB;
  else
    throw std::runtime_error("config: unknown model " + model);
  cfg.eps = j.value("eps", cfg.eps);
  cfg.h_star = j.value("h_star", cfg.h_star);
  cfg.L = j.value("L", cfg.L);
  cfg.n = j.value("n", cfg.n);
  cfg.cfl = j.value("cfl", cfg.cfl);
  cfg.stop_growth_factor = j.value("stop_growth_factor", cfg.stop_growth_factor);
  cfg.dt_floor = j.value("dt_floor", cfg.dt_floor);
  cfg.t_max = j.value("t_max", cfg.t_max);
  cfg.snapshot_cadence = j.value("snapshot_cadence", cfg.snapshot_cadence);
  cfg.growth_milestone_ratio =
      j.value("growth_milestone_ratio", cfg.growth_milestone_ratio);
  cfg.theta_cap = j.value("theta_cap", cfg.theta_cap);
  cfg.m_const = j.value("m_const", cfg.m_const);
  cfg.beta = j.value("beta", cfg.beta);
  cfg.energy_drift_tol = j.value("energy_drift_tol", cfg.energy_drift_tol);
  return cfg;
}

json manifest_from_run(const SimConfig& cfg, const Trajectory& traj,
                       const SelfSimResult* ss,
                       const std::vector<std::string>& snapshot_files) {
  json series;
  auto col = [&](auto getter) {
    json arr = json::array();
    for (const SeriesPoint& p : traj.series) arr.push_back(getter(p));
    return arr;
  };
  series["t"] = col([](const SeriesPoint& p) { return p.t; });
  series["energy"] = col([](const SeriesPoint& p) { return p.energy; });
  series["min_wx"] = col([](const SeriesPoint& p) { return p.min_wx; });
  series["argmin_x"] = col([](const SeriesPoint& p) { return p.argmin_x; });
  series["max_abs_zx"] = col([](const SeriesPoint& p) { return p.max_abs_zx; });
  series["norm_G"] = col([](const SeriesPoint& p) { return p.norm_G; });
  series["norm_q"] = col([](const SeriesPoint& p) { return p.norm_q; });
  series["dt"] = col([](const SeriesPoint& p) { return p.dt; });

  json modulation;
  if (!traj.companion_series.empty()) {
    json tau = json::array(), kappa = json::array(), xi = json::array();
    for (const std::vector<double>& c : traj.companion_series) {
      tau.push_back(c.size() > 0 ? c[0] : 0.0);
      kappa.push_back(c.size() > 1 ? c[1] : 0.0);
      xi.push_back(c.size() > 2 ? c[2] : 0.0);
    }
    modulation = json{{"tau", tau}, {"kappa", kappa}, {"xi", xi}};
  }

  json snaps = json::array();
  for (std::size_t i = 0; i < traj.snaps.size(); ++i) {
    json e{{"t", traj.snaps[i].t},
           {"energy", traj.snaps[i].energy},
           {"min_wx", traj.snaps[i].min_wx},
           {"argmin_x", traj.snaps[i].argmin_x},
           {"file", i < snapshot_files.size() ? snapshot_files[i] : ""}};
    if (!traj.snaps[i].companion.empty()) e["companion"] = traj.snaps[i].companion;
    snaps.push_back(std::move(e));
  }

  json files = json::array();
  for (const std::string& f : snapshot_files)
    if (!f.empty()) files.push_back(f);

  json m{{"kind", "cusplab-run"},
         {"config", config_to_json(cfg)},
         {"initial",
          {{"energy", traj.initial_energy},
           {"max_neg_slope", traj.initial_max_neg_slope}}},
         {"stop",
          {{"reason", traj.stop_reason},
           {"detail", traj.stop_detail},
           {"t_final", traj.final_state.t}}},
         {"series", series},
         {"snapshots", snaps},
         {"files", files}};
  if (!modulation.is_null()) m["modulation"] = modulation;
  if (ss != nullptr) {
    m["stop"]["tau_final"] = ss->tau_final;
    m["estimates"] = json{{"T_star_modulation", ss->tau_final}};
  }
  return m;
}

void write_json_file(const json& j, const std::string& path) {
  std::ofstream os = open_out(path);
  os << j.dump(1) << '\n';
}

json read_json_file(const std::string& path) {
  std::ifstream is = open_in(path);
  json j;
  is >> j;
  return j;
}

void write_svg_chart(const std::string& path, const std::string& title,
                     const std::string& x_label,
                     const std::vector<double>& xs,
                     const std::map<std::string, std::vector<double>>& series,
                     bool log_abs_y) {
  const int width = 860, height = 480, ml = 70, mr = 20, mt = 40, mb = 50;
  auto finite_min_max = [](const std::vector<double>& v, double& lo,
                           double& hi) {
    for (double x : v) {
      if (!std::isfinite(x)) continue;
      lo = std::min(lo, x);
      hi = std::max(hi, x);
    }
  };
  double xlo = std::numeric_limits<double>::infinity(), xhi = -xlo;
  finite_min_max(xs, xlo, xhi);
  double ylo = std::numeric_limits<double>::infinity(), yhi = -ylo;
  auto ymap = [&](double v) {
    return log_abs_y ? std::log10(std::max(std::abs(v), 1e-300)) : v;
  };
  for (const auto& [name, ys] : series) {
    (void)name;
    std::vector<double> mapped;
    mapped.reserve(ys.size());
    for (double v : ys) mapped.push_back(ymap(v));
    finite_min_max(mapped, ylo, yhi);
  }
  if (!(xhi > xlo)) xhi = xlo + 1.0;
  if (!(yhi > ylo)) yhi = ylo + 1.0;
  auto px = [&](double x) {
    return ml + (x - xlo) / (xhi - xlo) * (width - ml - mr);
  };
  auto py = [&](double y) {
    return height - mb - (y - ylo) / (yhi - ylo) * (height - mt - mb);
  };
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                 "#ff7f0e", "#8c564b"};
  std::ofstream os = open_out(path);
  os << std::setprecision(6);
  os << "<svg xmlns='http://www.w3.org/2000/svg' width='" << width
     << "' height='" << height << "'>\n"
     << "<rect width='100%' height='100%' fill='white'/>\n"
     << "<text x='" << width / 2 << "' y='24' text-anchor='middle' "
        "font-family='sans-serif' font-size='16'>"
     << title << "</text>\n"
     << "<line x1='" << ml << "' y1='" << height - mb << "' x2='"
     << width - mr << "' y2='" << height - mb << "' stroke='black'/>\n"
     << "<line x1='" << ml << "' y1='" << mt << "' x2='" << ml << "' y2='"
     << height - mb << "' stroke='black'/>\n"
     << "<text x='" << width / 2 << "' y='" << height - 12
     << "' text-anchor='middle' font-family='sans-serif' font-size='12'>"
     << x_label << "</text>\n"
     << "<text x='" << ml << "' y='" << height - mb + 16
     << "' font-family='sans-serif' font-size='10'>" << xlo << "</text>\n"
     << "<text x='" << width - mr << "' y='" << height - mb + 16
     << "' text-anchor='end' font-family='sans-serif' font-size='10'>" << xhi
     << "</text>\n"
     << "<text x='" << ml - 4 << "' y='" << height - mb
     << "' text-anchor='end' font-family='sans-serif' font-size='10'>"
     << (log_abs_y ? "1e" + std::to_string(static_cast<int>(ylo)) : std::to_string(ylo))
     << "</text>\n"
     << "<text x='" << ml - 4 << "' y='" << mt + 4
     << "' text-anchor='end' font-family='sans-serif' font-size='10'>"
     << (log_abs_y ? "1e" + std::to_string(static_cast<int>(yhi)) : std::to_string(yhi))
     << "</text>\n";
  int ci = 0;
  int legend_y = mt;
  for (const auto& [name, ys] : series) {
    const char* color = colors[ci++ % 6];
    os << "<polyline fill='none' stroke='" << color << "' stroke-width='1.5' "
          "points='";
    const std::size_t npts = std::min(xs.size(), ys.size());
    for (std::size_t i = 0; i < npts; ++i) {
      const double yv = ymap(ys[i]);
      if (!std::isfinite(xs[i]) || !std::isfinite(yv)) continue;
      os << px(xs[i]) << ',' << py(yv) << ' ';
    }
    os << "'/>\n";
    os << "<text x='" << width - mr - 4 << "' y='" << legend_y
       << "' text-anchor='end' font-family='sans-serif' font-size='11' fill='"
       << color << "'>" << name << "</text>\n";
    legend_y += 16;
  }
  os << "</svg>\n";
}

}  // namespace cusplab
