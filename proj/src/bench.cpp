#include "mmrb/bench.hpp"

#include <chrono>
#include <cmath>

#include "mmrb/parallel.hpp"

namespace mmrb {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

double mass_norm(const Vector& v, const Vector& mass) {
  return std::sqrt(v.dot(mass.cwiseProduct(v)));
}

// Accumulates the error integrals while the reference full-order solve runs,
// advancing one prediction state per test direction in lockstep.
class ReferenceSink : public SnapshotSink {
public:
  ReferenceSink(const BenchOutputs& out, const ReducedModel& model,
                const AngularQuadrature& v_test, const DgOperators& ops,
                const RomSolver& online_solver, const Matrix& g0_test)
      : out_(out), model_(model), v_test_(v_test), ops_(ops),
        solver_(online_solver), acc_(out.grid.dt, ops.mass, v_test.size()) {
    pred_.resize(model_.basis_g.rank(), v_test_.size());
    pred_ = model_.basis_g.B.transpose() * g0_test;
    u_test_.reserve(v_test_.size());
    for (int v = 0; v < v_test_.size(); ++v)
      u_test_.push_back(model_.upwind_reduced(v_test_.nodes[v]));
  }

  void on_level(int n, const Vector& rho, const Matrix& g) override {
    const double eps = model_.epsilon;
    const double dt = model_.dt;
    const int rg = model_.basis_g.rank();

    if (n > 0) {
      // advance every prediction from level n-1 using the recorded histories
      const Vector& upw = out_.online.upwind.at(n - 1);
      const Vector& crho_next = out_.online.c_rho.at(n);
      const Vector tx = model_.dxm_r * crho_next;
      const Vector ty = model_.dym_r * crho_next;
      Matrix next(rg, v_test_.size());
      parallel_for(v_test_.size(), [&](int v) {
        const Vec3& dir = v_test_.nodes[v];
        Vector b = eps * eps * (model_.mr_g * pred_.col(v));
        b.noalias() -= (eps * dt) * (u_test_[v] * pred_.col(v) - upw);
        b.noalias() -= dir.x * dt * tx + dir.y * dt * ty;
        next.col(v) = solver_.solve_theta(b);
      });
      pred_ = std::move(next);
    }

    rho_fom_final = rho;
    const Vector rho_rom = model_.basis_rho.B * out_.online.c_rho.at(n);
    rho_rom_final = rho_rom;
    if (n == 0) return;

    acc_.add_rho(rho_rom, rho);

    // first moments: <v f> = eps <v g>
    Vector fom_vfx = Vector::Zero(rho.size());
    Vector fom_vfy = Vector::Zero(rho.size());
    for (int j = 0; j < v_test_.size(); ++j) {
      const double w = v_test_.weights[j];
      fom_vfx += eps * w * v_test_.nodes[j].x * g.col(j);
      fom_vfy += eps * w * v_test_.nodes[j].y * g.col(j);
    }
    const Vector rom_vfx = eps * (model_.basis_g.B * out_.online.m1.at(n)[0]);
    const Vector rom_vfy = eps * (model_.basis_g.B * out_.online.m1.at(n)[1]);
    acc_.add_vf(rom_vfx, rom_vfy, fom_vfx, fom_vfy);

    // worst-case angular flux error over the test rule
    std::vector<double> level_f(v_test_.size(), 0.0);
    parallel_for(v_test_.size(), [&](int v) {
      const Vector f_rom = rho_rom + eps * (model_.basis_g.B * pred_.col(v));
      const Vector f_fom = rho + eps * g.col(v);
      acc_.add_f(v, f_rom, f_fom);
      const double den = mass_norm(f_fom, ops_.mass);
      level_f[v] = den > 0.0 ? mass_norm(f_rom - f_fom, ops_.mass) / den : 0.0;
    });

    ErrorSeriesRow row;
    row.t = n * dt;
    const double den_rho = mass_norm(rho, ops_.mass);
    row.err_rho = den_rho > 0.0 ? mass_norm(rho_rom - rho, ops_.mass) / den_rho : 0.0;
    const double den_vf = std::sqrt(fom_vfx.dot(ops_.mass.cwiseProduct(fom_vfx)) +
                                    fom_vfy.dot(ops_.mass.cwiseProduct(fom_vfy)));
    row.err_vf = den_vf > 0.0
                     ? std::sqrt((rom_vfx - fom_vfx).dot(ops_.mass.cwiseProduct(rom_vfx - fom_vfx)) +
                                 (rom_vfy - fom_vfy).dot(ops_.mass.cwiseProduct(rom_vfy - fom_vfy))) /
                           den_vf
                     : 0.0;
    row.err_f = *std::max_element(level_f.begin(), level_f.end());
    series.push_back(row);
  }

  RunMetrics finalize() const { return acc_.finalize(); }

  std::vector<ErrorSeriesRow> series;
  Vector rho_fom_final;
  Vector rho_rom_final;

private:
  const BenchOutputs& out_;
  const ReducedModel& model_;
  const AngularQuadrature& v_test_;
  const DgOperators& ops_;
  const RomSolver& solver_;
  ErrorAccumulator acc_;
  Matrix pred_;
  std::vector<Matrix> u_test_;
};

} // namespace

BenchOutputs bench_run(const Preset& preset) {
  BenchOutputs out;
  const SpatialMesh mesh = preset.mesh();
  const AngularQuadrature v_train = lebedev(preset.n_train);
  const AngularQuadrature v_test = lebedev(preset.n_test);

  const auto t_offline = Clock::now();
  out.greedy = greedy_offline(preset.problem, mesh, v_train, preset.greedy);
  const double offline_ms = ms_since(t_offline);

  const ReducedModel& model = out.greedy.model;
  out.grid = TimeGrid{model.dt, model.n_steps};

  // online reduced solve on the reduced quadrature
  const auto t_online = Clock::now();
  RomSolver online_solver(model, model.quad_rq);
  const Vector rho0 = initial_rho_vector(preset.problem, mesh);
  const Matrix g0_rq = initial_g_matrix(preset.problem, mesh, model.quad_rq);
  RomState c0 = project_initial(model, rho0, g0_rq);
  const Vector src_r =
      model.basis_rho.B.transpose() * source_vector(preset.problem, mesh);
  RomRecordOptions rec;
  rec.moments = true;
  rec.upwind = true;
  out.online = rom_solve(online_solver, c0, model.n_steps, src_r, rec);
  const double online_ms = ms_since(t_online);

  // reference march over the test rule with lockstep predictions
  const auto t_ref = Clock::now();
  const DgOperators ops = assemble_problem_operators(preset.problem, mesh, v_train);
  const Matrix g0_test = initial_g_matrix(preset.problem, mesh, v_test);
  ReferenceSink sink(out, model, v_test, ops, online_solver, g0_test);
  FomOptions fopts;
  fopts.grid = out.grid;
  fopts.track_energy = false;
  fom_solve(preset.problem, mesh, v_test, ops, &sink, fopts);
  const double reference_ms = ms_since(t_ref);

  out.metrics = sink.finalize();
  out.metrics.compression_ratio =
      compression_ratio(model.basis_rho.rank(), model.basis_g.rank(),
                        model.quad_rq.size(), v_train.size(), mesh.n_dof);
  out.metrics.wall_offline_ms = offline_ms;
  out.metrics.wall_online_ms = online_ms;
  out.metrics.wall_reference_ms = reference_ms;
  out.metrics.wall_predict_ms = reference_ms; // predictions ride the reference pass
  out.series = std::move(sink.series);
  out.rho_fom_final = std::move(sink.rho_fom_final);
  out.rho_rom_final = std::move(sink.rho_rom_final);
  return out;
}

namespace {

class PodSnapshotSink : public SnapshotSink {
public:
  PodSnapshotSink(int n_dof, int n_v, int n_levels) {
    snapshots.resize(n_dof, static_cast<Eigen::Index>(n_levels) * (1 + n_v));
    col_ = 0;
  }
  void on_level(int, const Vector& rho, const Matrix& g) override {
    snapshots.col(col_++) = rho;
    snapshots.middleCols(col_, g.cols()) = g;
    col_ += static_cast<int>(g.cols());
  }
  Matrix snapshots;

private:
  int col_;
};

} // namespace

PodComparison pod_offline_comparison(const Preset& preset, int pod_rank) {
  PodComparison cmp;
  const SpatialMesh mesh = preset.mesh();
  const AngularQuadrature v_train = lebedev(preset.n_train);

  const auto t_mmd = Clock::now();
  auto greedy = greedy_offline(preset.problem, mesh, v_train, preset.greedy);
  cmp.mmd_offline_ms = ms_since(t_mmd);

  const DgOperators ops = assemble_problem_operators(preset.problem, mesh, v_train);
  const TimeGrid grid = stable_dt(preset.problem, mesh);
  PodSnapshotSink sink(mesh.n_dof, v_train.size(), grid.n_steps + 1);
  const auto t_fom = Clock::now();
  FomOptions fopts;
  fopts.grid = grid;
  fopts.track_energy = false;
  fom_solve(preset.problem, mesh, v_train, ops, &sink, fopts);
  cmp.fom_train_ms = ms_since(t_fom);

  cmp.snapshot_count = static_cast<int>(sink.snapshots.cols());
  const int rank = pod_rank > 0
                       ? pod_rank
                       : greedy.model.basis_rho.rank() + greedy.model.basis_g.rank();
  cmp.pod_rank = rank;
  auto pod = pod_baseline(sink.snapshots, rank);
  cmp.pod_svd_ms = pod.svd_wall_ms;
  return cmp;
}

} // namespace mmrb
