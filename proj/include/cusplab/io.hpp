#pragma once
// Persistence: snapshot/series CSVs, run manifests (JSON), report
// rendering, and minimal self-contained SVG line charts.

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "cusplab/pde.hpp"
#include "cusplab/report.hpp"
#include "cusplab/selfsim.hpp"
#include "cusplab/verify.hpp"

namespace cusplab {

using json = nlohmann::json;

// Physical snapshot: rSV columns x,w,z,h,u; rB columns x,v.  17 significant
// digits (lossless round trip).
void write_snapshot_csv(const Snapshot& sn, const Grid1D& grid, Model model,
                        const std::string& path);

// Reads a snapshot CSV written by write_snapshot_csv; the model is inferred
// from the header.  Only w,z (rSV) or v (rB) are restored.
struct LoadedSnapshot {
  Model model = Model::rSV;
  std::vector<double> x;
  Field w, z, v;
};
LoadedSnapshot read_snapshot_csv(const std::string& path);

void write_series_csv(const Trajectory& traj, const std::string& path);
void write_rescaled_csv(const RescaledSnapshot& rs, const std::string& path);
void write_monitor_csv(const MonitorSeries& ms, const std::string& path);

std::string report_text(const VerifyReport& rep);
json report_json(const VerifyReport& rep);

json config_to_json(const SimConfig& cfg);
SimConfig config_from_json(const json& j);

// Self-contained run manifest: config echo, scalar series, modulation
// series, snapshot index with file names, stop data, and the emitted-file
// list.  snapshot_files[i] names the CSV of traj.snaps[i] ("" = not written).
json manifest_from_run(const SimConfig& cfg, const Trajectory& traj,
                       const SelfSimResult* ss,
                       const std::vector<std::string>& snapshot_files);

void write_json_file(const json& j, const std::string& path);
json read_json_file(const std::string& path);

// Minimal SVG polyline chart; one polyline per named series over shared xs.
void write_svg_chart(const std::string& path, const std::string& title,
                     const std::string& x_label,
                     const std::vector<double>& xs,
                     const std::map<std::string, std::vector<double>>& series,
                     bool log_abs_y = false);

}  // namespace cusplab
