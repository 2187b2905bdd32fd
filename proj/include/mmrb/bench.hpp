#pragma once

#include "mmrb/io.hpp"
#include "mmrb/metrics.hpp"
#include "mmrb/presets.hpp"

namespace mmrb {

/// End-to-end benchmark products: the trained model, the error metrics
/// against a full-order reference on the test direction set, per-level error
/// series and the final-time fields for plotting.
struct BenchOutputs {
  GreedyResult greedy;
  RunMetrics metrics;
  std::vector<ErrorSeriesRow> series;
  TimeGrid grid;
  Vector rho_rom_final;
  Vector rho_fom_final;
  RomTrajectory online;
};

/// Trains on the preset's training rule, runs the reduced solver online,
/// marches the full-order reference on the test rule once while accumulating
/// the error integrals and advancing one unseen-direction prediction per test
/// node in lockstep.
BenchOutputs bench_run(const Preset& preset);

struct PodComparison {
  double mmd_offline_ms = 0.0;
  double fom_train_ms = 0.0;
  double pod_svd_ms = 0.0;
  int snapshot_count = 0;
  int pod_rank = 0;
};

/// Offline-cost comparison at desk scale: the greedy offline wall time
/// against the vanilla-POD route (one full-order solve over the training set
/// plus a thin SVD of every snapshot).
PodComparison pod_offline_comparison(const Preset& preset, int pod_rank = 0);

} // namespace mmrb
