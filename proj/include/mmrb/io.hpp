#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "mmrb/fom.hpp"
#include "mmrb/greedy.hpp"
#include "mmrb/metrics.hpp"

namespace mmrb {

/// Binary snapshot stream: little-endian doubles, header "MMRB1" followed by
/// n_dof, N_v and N_t as 64-bit integers, then N_t+1 time levels of a rho
/// block and the g blocks column-major.
class FileSnapshotSink : public SnapshotSink {
public:
  FileSnapshotSink(const std::string& path, int n_dof, int n_v, int n_steps);
  void on_level(int n, const Vector& rho, const Matrix& g) override;

private:
  std::ofstream os_;
};

/// Sequential reader for the same format.
class SnapshotReader {
public:
  explicit SnapshotReader(const std::string& path);
  int n_dof() const { return n_dof_; }
  int n_v() const { return n_v_; }
  int n_steps() const { return n_steps_; }
  /// Reads the next level; false once all N_t+1 levels are consumed.
  bool next(Vector& rho, Matrix& g);

private:
  std::ifstream is_;
  int n_dof_ = 0, n_v_ = 0, n_steps_ = 0, read_ = 0;
};

// --- plot/report emission ------------------------------------------------

void write_greedy_report_csv(const std::string& path, const GreedyReport& report);
void write_metrics_csv(const std::string& path, const RunMetrics& m);

/// One row per time level: t, err_rho, err_vf, err_f_worst (relative).
struct ErrorSeriesRow {
  double t = 0.0;
  double err_rho = 0.0;
  double err_vf = 0.0;
  double err_f = 0.0;
};
void write_error_series_csv(const std::string& path, const std::vector<ErrorSeriesRow>& rows);

/// Node list for sphere scatter plots; origin is "initial" or "greedy".
void write_node_list_csv(const std::string& path, const AngularQuadrature& quad,
                         int n_initial_nodes);

/// Cell grid as CSV (ny rows by nx columns, row j holds y-index j).
void write_grid_csv(const std::string& path, const SpatialMesh& mesh, const Vector& field);

/// Simple heat map: one rectangle per cell, viridis-like color ramp.
void write_grid_svg(const std::string& path, const SpatialMesh& mesh, const Vector& field);

/// Scalar flux history: one row per time level, "n,t,<n_dof values>".
void write_rho_history_csv(const std::string& path, const std::vector<Vector>& levels,
                           double dt);

// --- flat key-value configuration -----------------------------------------

/// Flat sectioned key-value text: "[section]" headers, "key = value" lines,
/// '#' comments. Keys are stored as "section.key"; emission is sorted, so
/// parse -> emit -> parse is idempotent.
using Config = std::map<std::string, std::string>;
Config parse_config(const std::string& text);
std::string emit_config(const Config& cfg);
Config load_config_file(const std::string& path);

// --- output manifest -------------------------------------------------------

/// 64-bit FNV-1a content hash, hex encoded.
std::string file_content_hash(const std::string& path);

/// Writes "<hash>  <relative path>" per artifact into dir/manifest.txt.
void write_manifest(const std::string& dir, const std::vector<std::string>& relative_paths);

} // namespace mmrb
