#include "mmrb/greedy.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <map>

namespace mmrb {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

bool same_node(const Vec3& a, const Vec3& b, double tol = 1e-12) {
  return std::abs(a.x - b.x) <= tol && std::abs(a.y - b.y) <= tol && std::abs(a.z - b.z) <= tol;
}

int find_node(const std::vector<Vec3>& nodes, const Vec3& v) {
  for (size_t i = 0; i < nodes.size(); ++i)
    if (same_node(nodes[i], v)) return static_cast<int>(i);
  return -1;
}

// L2 norm realized through the diagonal mass matrix.
double mass_norm(const Vector& v, const Vector& mass) {
  return std::sqrt(v.dot(mass.cwiseProduct(v)));
}

// Retains the levels the basis update and the estimators need.
class SampleSink : public SnapshotSink {
public:
  SampleSink(std::set<int> rho_times, std::map<int, std::vector<int>> g_wanted, int final_level)
      : rho_times_(std::move(rho_times)), g_wanted_(std::move(g_wanted)),
        final_level_(final_level) {}

  void on_level(int n, const Vector& rho, const Matrix& g) override {
    if (rho_times_.count(n)) rho_[n] = rho;
    if (auto it = g_wanted_.find(n); it != g_wanted_.end())
      for (int col : it->second) g_[{n, col}] = g.col(col);
    if (n == final_level_) {
      rho_final = rho;
      g_final = g;
    }
  }

  FomSamples take() {
    FomSamples s;
    for (auto& [n, v] : rho_) {
      s.rho_times.push_back(n);
      s.rho_at.push_back(std::move(v));
    }
    for (auto& [key, v] : g_) {
      s.g_keys.push_back(key);
      s.g_at.push_back(std::move(v));
    }
    s.rho_final = std::move(rho_final);
    s.g_final = std::move(g_final);
    return s;
  }

  Vector rho_final;
  Matrix g_final;

private:
  std::set<int> rho_times_;
  std::map<int, std::vector<int>> g_wanted_;
  int final_level_;
  std::map<int, Vector> rho_;
  std::map<std::pair<int, int>, Vector> g_;
};

Vector theta_diagonal_inverse(const DgOperators& ops, double epsilon, double dt) {
  Vector theta = epsilon * epsilon * (ops.mass + dt * ops.sigma_a_diag) + dt * ops.sigma_s_diag;
  for (int i = 0; i < theta.size(); ++i)
    if (!(theta[i] > 0.0)) throw ModelError("greedy: nonpositive Theta entry");
  return theta.cwiseInverse();
}

} // namespace

std::optional<GreedyPicks> select_samples(const IndicatorTables& tables,
                                          const SampledSets& sets) {
  GreedyPicks picks;
  double best_rho = -std::numeric_limits<double>::infinity();
  for (int n = 1; n <= static_cast<int>(tables.rho.size()); ++n) {
    if (sets.t_rb_rho.count(n)) continue;
    if (tables.rho[n - 1] > best_rho) {
      best_rho = tables.rho[n - 1];
      picks.t_rho = n;
    }
  }

  double best_g = -std::numeric_limits<double>::infinity();
  for (int n = 1; n <= static_cast<int>(tables.g.rows()); ++n) {
    for (int v = 0; v < static_cast<int>(tables.g.cols()); ++v) {
      if (sets.tv_rb_g.count({n, v})) continue;
      if (tables.g(n - 1, v) > best_g) {
        best_g = tables.g(n - 1, v);
        picks.t_g = n;
        picks.v_g = v;
      }
    }
  }

  if (picks.t_rho < 0 || picks.t_g < 0) return std::nullopt;
  return picks;
}

void update_sampled_sets(SampledSets& sets, const GreedyPicks& picks,
                         const AngularQuadrature& v_train) {
  sets.t_rb_rho.insert(picks.t_rho);
  sets.tv_rb_g.insert({picks.t_g, picks.v_g});
  const Vec3& v = v_train.nodes[picks.v_g];
  const int anti = find_node(v_train.nodes, {-v.x, -v.y, -v.z});
  if (anti >= 0) sets.tv_rb_g.insert({picks.t_g, anti});
}

std::pair<ReducedBasis, ReducedBasis> update_bases(const FomSamples& samples,
                                                   const DgOperators& ops,
                                                   const Vector& theta_inv,
                                                   double dt, double svd_rel_cutoff) {
  const int n = static_cast<int>(ops.mass.size());
  const int n_rho = static_cast<int>(samples.rho_at.size());
  if (n_rho == 0) throw DegenerateBasisError("update_bases: no sampled rho snapshots");

  Matrix s_rho(n, n_rho);
  for (int i = 0; i < n_rho; ++i) s_rho.col(i) = samples.rho_at[i];

  const int n_g = static_cast<int>(samples.g_at.size());
  Matrix s_g(n, 2 * n_rho + n_g);
  for (int i = 0; i < n_rho; ++i) {
    s_g.col(2 * i) = dt * theta_inv.cwiseProduct(Vector(ops.dxm * samples.rho_at[i]));
    s_g.col(2 * i + 1) = dt * theta_inv.cwiseProduct(Vector(ops.dym * samples.rho_at[i]));
  }
  for (int i = 0; i < n_g; ++i) s_g.col(2 * n_rho + i) = samples.g_at[i];

  return {svd_orthonormalize(s_rho, svd_rel_cutoff),
          svd_orthonormalize(s_g, svd_rel_cutoff)};
}

GreedyResult greedy_offline(const ProblemDefinition& problem, const SpatialMesh& mesh,
                            const AngularQuadrature& v_train, const GreedyConfig& config) {
  config.validate();
  problem.validate();
  const auto t_start = Clock::now();

  // alphas always come from the training quadrature
  const DgOperators ops = assemble_problem_operators(problem, mesh, v_train);
  const TimeGrid grid = stable_dt(problem, mesh);
  const Vector theta_inv = theta_diagonal_inverse(ops, problem.epsilon, grid.dt);
  const Vector src = source_vector(problem, mesh);
  const Vector rho0 = initial_rho_vector(problem, mesh);
  const Matrix g0_train = initial_g_matrix(problem, mesh, v_train);

  FomOptions fom_opts;
  fom_opts.grid = grid;
  fom_opts.track_energy = false;
  fom_opts.cg_rel_tol = config.cg_rel_tol;

  // Step 1: initialization from the low-order Lebedev rule
  AngularQuadrature quad_rq = lebedev(config.initial_lebedev_points);
  const int n_initial = quad_rq.size();

  ReducedBasis basis_rho, basis_g;
  {
    SampleSink sink({}, {}, grid.n_steps);
    fom_solve(problem, mesh, quad_rq, ops, &sink, fom_opts);
    if (sink.rho_final.lpNorm<Eigen::Infinity>() == 0.0 &&
        sink.g_final.lpNorm<Eigen::Infinity>() == 0.0)
      throw DegenerateBasisError("greedy initialization: final-time snapshots are all zero");
    basis_rho = svd_orthonormalize(sink.rho_final, config.svd_rel_cutoff);
    basis_g = svd_orthonormalize(sink.g_final, config.svd_rel_cutoff);
  }
  ReducedModel model = project_operators(ops, basis_rho, basis_g, quad_rq,
                                         problem.epsilon, grid.dt);
  model.n_steps = grid.n_steps;

  GreedyResult result;
  result.n_initial_rq_nodes = n_initial;
  SampledSets sets;
  GreedyReport report;

  for (int iter = 1; iter <= config.max_iterations; ++iter) {
    const auto t_iter = Clock::now();

    // (i) reduced solve over the training set, with inline indicator tables
    IndicatorTables tables;
    tables.rho.assign(grid.n_steps, 0.0);
    tables.g.setZero(grid.n_steps, v_train.size());
    RomState rom_final;
    {
      RomSolver solver(model, v_train);
      RomState st = project_initial(model, rho0, g0_train);
      const Vector src_r = model.basis_rho.B.transpose() * src;
      const Matrix w_rho =
          model.basis_rho.V * model.basis_rho.lambda.cwiseInverse().asDiagonal();
      const Matrix w_g = model.basis_g.V * model.basis_g.lambda.cwiseInverse().asDiagonal();
      RomRecordOptions rec;
      rec.moments = false;
      rec.on_step = [&](int n, const RomState& s) {
        if (n == 0) return;
        tables.rho[n - 1] = (w_rho * s.c_rho).lpNorm<1>();
        for (int v = 0; v < v_train.size(); ++v)
          tables.g(n - 1, v) = (w_g * s.c_g.col(v)).lpNorm<1>();
      };
      rom_final = rom_solve(solver, st, grid.n_steps, src_r, rec).final_state;
    }

    // (ii) greedy picks
    auto picks = select_samples(tables, sets);
    if (!picks) {
      report.termination = "exhausted";
      break;
    }

    // (iii) symmetry-enhancing set update
    update_sampled_sets(sets, *picks, v_train);

    // (iv) quadrature update when the picked direction is new
    const Vec3 v_new = v_train.nodes[picks->v_g];
    if (find_node(quad_rq.nodes, v_new) < 0) {
      auto nodes = quad_rq.nodes;
      nodes.push_back(v_new);
      const Vec3 v_anti{-v_new.x, -v_new.y, -v_new.z};
      if (find_node(nodes, v_anti) < 0) nodes.push_back(v_anti);
      quad_rq = nonneg_reduced_quadrature(nodes, quad_rq, config.m_min, config.m_max);
    }

    // (v) full solve on the reduced rule and basis update
    std::map<int, std::vector<int>> g_wanted;
    for (const auto& [t, vtrain_idx] : sets.tv_rb_g) {
      const int rq_idx = find_node(quad_rq.nodes, v_train.nodes[vtrain_idx]);
      if (rq_idx >= 0) g_wanted[t].push_back(rq_idx);
    }
    {
      std::vector<int> all(quad_rq.size());
      for (int i = 0; i < quad_rq.size(); ++i) all[i] = i;
      g_wanted[grid.n_steps] = all;
    }
    SampleSink sink(sets.t_rb_rho, g_wanted, grid.n_steps);
    fom_solve(problem, mesh, quad_rq, ops, &sink, fom_opts);
    Vector fom_rho_final = sink.rho_final;
    Matrix fom_g_final = sink.g_final;
    auto samples = sink.take();

    auto [new_rho, new_g] = update_bases(samples, ops, theta_inv, grid.dt,
                                         config.svd_rel_cutoff);

    // estimators compare the pre-update reduced solution with the fresh FOM
    const double est_rho =
        mass_norm(model.basis_rho.B * rom_final.c_rho - fom_rho_final, ops.mass) /
        mass_norm(fom_rho_final, ops.mass);
    double est_f = std::numeric_limits<double>::infinity();
    bool intersection_nonempty = false;
    for (int k = 0; k < quad_rq.size(); ++k) {
      const int train_idx = find_node(v_train.nodes, quad_rq.nodes[k]);
      if (train_idx < 0) continue;
      const Vector f_rom = model.basis_rho.B * rom_final.c_rho +
                           problem.epsilon * (model.basis_g.B * rom_final.c_g.col(train_idx));
      const Vector f_fom = fom_rho_final + problem.epsilon * fom_g_final.col(k);
      const double denom = mass_norm(f_fom, ops.mass);
      const double err = mass_norm(f_rom - f_fom, ops.mass) / denom;
      if (!intersection_nonempty) {
        est_f = err;
        intersection_nonempty = true;
      } else {
        est_f = std::max(est_f, err);
      }
    }

    basis_rho = std::move(new_rho);
    basis_g = std::move(new_g);
    model = project_operators(ops, basis_rho, basis_g, quad_rq, problem.epsilon, grid.dt);
    model.n_steps = grid.n_steps;

    GreedyIterationRecord row;
    row.iter = iter;
    row.r_rho = basis_rho.rank();
    row.r_g = basis_g.rank();
    row.nv_rq = quad_rq.size();
    row.ratio_rho = basis_rho.lambda[basis_rho.rank() - 1] / basis_rho.lambda.sum();
    row.ratio_g = basis_g.lambda[basis_g.rank() - 1] / basis_g.lambda.sum();
    row.est_rho = est_rho;
    row.est_f = est_f;
    row.wall_ms = ms_since(t_iter);
    report.rows.push_back(row);

    StopInputs stop{row.ratio_rho, row.ratio_g, row.est_rho, row.est_f};
    if (stopping_criteria(stop, config)) {
      report.termination = "converged";
      break;
    }
  }

  if (report.termination.empty()) report.termination = "budget";
  report.offline_wall_ms = ms_since(t_start);

  result.model = std::move(model);
  result.report = std::move(report);
  result.sets = std::move(sets);
  return result;
}

} // namespace mmrb
