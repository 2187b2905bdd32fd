#pragma once

#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "mmrb/rom.hpp"

namespace mmrb {

/// Sampled training parameters: time indices for rho and (time index, node
/// index into the training set) pairs for g. The g set is closed under the
/// antipodal map of the training set.
struct SampledSets {
  std::set<int> t_rb_rho;
  std::set<std::pair<int, int>> tv_rb_g;
};

struct GreedyConfig {
  double tol_ratio = 1e-4;
  double tol_error_rho = 0.01;
  double tol_error_f = 0.02;
  int max_iterations = 60;
  int initial_lebedev_points = 26;
  int m_min = 3;
  int m_max = 7;
  double svd_rel_cutoff = 1e-12;
  double cg_rel_tol = 1e-10;

  void validate() const {
    if (!(tol_ratio > 0.0) || !(tol_error_rho > 0.0) || !(tol_error_f > 0.0))
      throw ConfigError("greedy config: tolerances must be positive");
    if (max_iterations < 1) throw ConfigError("greedy config: max_iterations must be >= 1");
  }
};

struct GreedyIterationRecord {
  int iter = 0;
  int r_rho = 0;
  int r_g = 0;
  int nv_rq = 0;
  double ratio_rho = 0.0;
  double ratio_g = 0.0;
  double est_rho = 0.0;
  double est_f = 0.0;
  double wall_ms = 0.0;
};

struct GreedyReport {
  std::vector<GreedyIterationRecord> rows;
  std::string termination; // "converged", "budget" or "exhausted"
  double offline_wall_ms = 0.0;
};

/// L1 importance indicator of a reduced solution sample: the l1 norm of its
/// coordinates in the snapshot (interpolation) basis, V * Lambda^-1 * c.
inline double l1_indicator(const ReducedBasis& basis, const Vector& c) {
  return basis.snapshot_coordinates(c).lpNorm<1>();
}

/// Indicator tables over the training grid; row n-1 holds time level n.
struct IndicatorTables {
  std::vector<double> rho;  // n = 1..N_t
  Matrix g;                 // (N_t) x |V_train|
};

struct GreedyPicks {
  int t_rho = -1;
  int t_g = -1;
  int v_g = -1;
};

/// Argmax over unsampled candidates; ties break toward the smallest time
/// index, then the smallest node index. Returns nullopt when a pool is empty.
std::optional<GreedyPicks> select_samples(const IndicatorTables& tables,
                                          const SampledSets& sets);

/// Inserts t_rho and the pair (t_g, v_g) together with (t_g, -v_g) whenever
/// the training set contains the antipode.
void update_sampled_sets(SampledSets& sets, const GreedyPicks& picks,
                         const AngularQuadrature& v_train);

/// Snapshot store fed by the FOM(V_rq) runs inside the greedy loop: keeps rho
/// at the sampled times and g at the sampled (time, node) pairs, plus the
/// final level of everything.
struct FomSamples {
  std::vector<Vector> rho_at;        // aligned with rho_times
  std::vector<int> rho_times;
  std::vector<Vector> g_at;          // aligned with g_keys
  std::vector<std::pair<int, int>> g_keys; // (time, index into V_rq)
  Vector rho_final;
  Matrix g_final;
};

/// Equilibrium-respecting basis update: S_rho from the sampled rho snapshots,
/// S_g from the scaled derivative columns dt*Theta^-1*Dxi^- rho^m plus the
/// sampled g snapshots.
std::pair<ReducedBasis, ReducedBasis> update_bases(const FomSamples& samples,
                                                   const DgOperators& ops,
                                                   const Vector& theta_inv,
                                                   double dt, double svd_rel_cutoff);

struct StopInputs {
  double ratio_rho = 0.0;
  double ratio_g = 0.0;
  double est_rho = 0.0;
  double est_f = 0.0;
};

inline bool stopping_criteria(const StopInputs& s, const GreedyConfig& cfg) {
  return std::max(s.ratio_rho, s.ratio_g) < cfg.tol_ratio &&
         s.est_rho < cfg.tol_error_rho && s.est_f < cfg.tol_error_f;
}

struct GreedyResult {
  ReducedModel model;
  GreedyReport report;
  SampledSets sets;
  int n_initial_rq_nodes = 0; // leading nodes of quad_rq that came from the initial rule
};

/// The full offline training loop: initialization from FOM on the initial
/// Lebedev rule, then greedy sampling with symmetry-enhanced set updates,
/// non-negative reduced quadrature updates and equilibrium-respecting basis
/// enrichment, until the two-fold stopping criteria or the budget hits.
GreedyResult greedy_offline(const ProblemDefinition& problem, const SpatialMesh& mesh,
                            const AngularQuadrature& v_train, const GreedyConfig& config);

} // namespace mmrb
