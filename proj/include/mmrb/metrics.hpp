#pragma once

#include <array>
#include <string>
#include <vector>

#include "mmrb/rom.hpp"

namespace mmrb {

/// Time-accumulated L2 errors of a reduced run against a full-order
/// reference, plus the compression ratio
///   C-R = (r_rho + N_v^rq * r_g) / ((N_v^train + 1) * n_dof).
struct RunMetrics {
  double e_rho = 0.0, r_rho = 0.0;
  double e_vf = 0.0, r_vf = 0.0;
  double e_f = 0.0, r_f = 0.0;
  double compression_ratio = 0.0;
  double wall_offline_ms = 0.0;
  double wall_online_ms = 0.0;
  double wall_reference_ms = 0.0;
  double wall_predict_ms = 0.0;
};

double compression_ratio(int r_rho, int r_g, int nv_rq, int nv_train, int n_dof);

/// Streaming accumulator for the error integrals: feed one time level at a
/// time (levels n = 1..N_t enter the sums). The f-errors track the worst
/// case over the fed directions. Norms are L2 through the diagonal mass.
class ErrorAccumulator {
public:
  ErrorAccumulator(double dt, const Vector& mass, int n_directions);

  void add_rho(const Vector& rom, const Vector& fom);
  /// In-plane first-moment pair (x then y component fields).
  void add_vf(const Vector& rom_x, const Vector& rom_y,
              const Vector& fom_x, const Vector& fom_y);
  void add_f(int direction, const Vector& rom, const Vector& fom);

  /// Finalizes E_* and R_* (leaves the compression ratio and timings at 0).
  RunMetrics finalize() const;

private:
  double dt_;
  Vector mass_;
  double num_rho_ = 0.0, den_rho_ = 0.0;
  double num_vf_ = 0.0, den_vf_ = 0.0;
  std::vector<double> num_f_, den_f_;
};

/// In-memory form of the metric evaluation: series indexed n = 0..N_t, the
/// f-fields as [direction][n]. The n = 0 level is excluded from the sums.
RunMetrics error_metrics(const std::vector<Vector>& rom_rho,
                         const std::vector<Vector>& fom_rho,
                         const std::vector<std::array<Vector, 2>>& rom_vf,
                         const std::vector<std::array<Vector, 2>>& fom_vf,
                         const std::vector<std::vector<Vector>>& rom_f,
                         const std::vector<std::vector<Vector>>& fom_f,
                         double dt, const Vector& mass);

struct PodResult {
  ReducedBasis basis;
  double svd_wall_ms = 0.0;
  int snapshot_count = 0;
};

/// Vanilla proper-orthogonal-decomposition baseline: one thin SVD of the
/// full snapshot matrix, timed. Refuses more than max_snapshots columns.
PodResult pod_baseline(const Matrix& snapshots, int rank, int max_snapshots = 200000);

} // namespace mmrb
