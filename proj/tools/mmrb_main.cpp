#include <CLI11.hpp>
#include <filesystem>
#include <iostream>

#include "mmrb/bench.hpp"
#include "mmrb/parallel.hpp"

namespace fs = std::filesystem;
using namespace mmrb;

namespace {

struct CommonOptions {
  std::string preset_name = "homogeneous";
  std::string scale = "desk";
  double eps = -1.0;
  double sigma_s_value = 1.0;
  std::vector<int> mesh_dims;
  double tfinal = -1.0;
  int vtrain = 0;
  int vtest = 0;
  double tol_ratio = -1.0;
  double tol_rho = -1.0;
  double tol_f = -1.0;
  int max_iters = 0;
  std::string out_dir = "out";
  std::string config_path;
  int threads = 1;
  bool deterministic = false;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--preset", o.preset_name, "problem preset name");
  cmd->add_option("--scale", o.scale, "paper or desk");
  cmd->add_option("--eps", o.eps, "Knudsen number override");
  cmd->add_option("--sigma-s", o.sigma_s_value, "scattering value (anisotropic preset)");
  cmd->add_option("--mesh", o.mesh_dims, "cells NX NY")->expected(2);
  cmd->add_option("--tfinal", o.tfinal, "final time override");
  cmd->add_option("--vtrain", o.vtrain, "training Lebedev point count");
  cmd->add_option("--vtest", o.vtest, "test Lebedev point count");
  cmd->add_option("--tol-ratio", o.tol_ratio, "spectral ratio tolerance");
  cmd->add_option("--tol-rho", o.tol_rho, "scalar-flux estimator tolerance");
  cmd->add_option("--tol-f", o.tol_f, "angular-flux estimator tolerance");
  cmd->add_option("--max-iters", o.max_iters, "greedy iteration budget");
  cmd->add_option("--out", o.out_dir, "output directory");
  cmd->add_option("--config", o.config_path, "key-value config file with overrides");
  cmd->add_option("--threads", o.threads, "worker threads for angular loops");
  cmd->add_flag("--deterministic", o.deterministic, "force single-threaded execution");
}

double to_double(const std::string& s) { return std::stod(s); }
int to_int(const std::string& s) { return std::stoi(s); }

// Configs override presets; command line flags override both.
Preset resolve_preset(const CommonOptions& o) {
  Preset p = preset(o.preset_name, parse_scale(o.scale), o.eps, o.sigma_s_value);

  if (!o.config_path.empty()) {
    Config cfg = load_config_file(o.config_path);
    auto get = [&](const char* key) -> const std::string* {
      auto it = cfg.find(key);
      return it == cfg.end() ? nullptr : &it->second;
    };
    if (auto* v = get("problem.eps")) p.problem.epsilon = to_double(*v);
    if (auto* v = get("problem.tfinal")) p.problem.final_time = to_double(*v);
    if (auto* v = get("mesh.nx")) p.nx = to_int(*v);
    if (auto* v = get("mesh.ny")) p.ny = to_int(*v);
    if (auto* v = get("angular.vtrain")) p.n_train = to_int(*v);
    if (auto* v = get("angular.vtest")) p.n_test = to_int(*v);
    if (auto* v = get("angular.initial_lebedev_points"))
      p.greedy.initial_lebedev_points = to_int(*v);
    if (auto* v = get("greedy.tol_ratio")) p.greedy.tol_ratio = to_double(*v);
    if (auto* v = get("greedy.tol_error_rho")) p.greedy.tol_error_rho = to_double(*v);
    if (auto* v = get("greedy.tol_error_f")) p.greedy.tol_error_f = to_double(*v);
    if (auto* v = get("greedy.max_iterations")) p.greedy.max_iterations = to_int(*v);
  }

  if (o.mesh_dims.size() == 2) {
    p.nx = o.mesh_dims[0];
    p.ny = o.mesh_dims[1];
  }
  if (o.tfinal > 0.0) p.problem.final_time = o.tfinal;
  if (o.vtrain > 0) p.n_train = o.vtrain;
  if (o.vtest > 0) p.n_test = o.vtest;
  if (o.tol_ratio > 0.0) p.greedy.tol_ratio = o.tol_ratio;
  if (o.tol_rho > 0.0) p.greedy.tol_error_rho = o.tol_rho;
  if (o.tol_f > 0.0) p.greedy.tol_error_f = o.tol_f;
  if (o.max_iters > 0) p.greedy.max_iterations = o.max_iters;

  set_thread_count(o.deterministic ? 1 : o.threads);
  return p;
}

fs::path prepare_out(const CommonOptions& o) {
  fs::path dir(o.out_dir);
  fs::create_directories(dir);
  return dir;
}

int run_fom(const CommonOptions& o, bool with_snapshots, int stride) {
  Preset p = resolve_preset(o);
  const SpatialMesh mesh = p.mesh();
  const AngularQuadrature quad = lebedev(p.n_train);
  const DgOperators ops = assemble_problem_operators(p.problem, mesh, quad);
  const TimeGrid grid = stable_dt(p.problem, mesh);
  const fs::path dir = prepare_out(o);

  class StridedFileSink : public SnapshotSink {
  public:
    StridedFileSink(SnapshotSink* inner, int stride) : inner_(inner), stride_(stride) {}
    void on_level(int n, const Vector& rho, const Matrix& g) override {
      if (inner_ && n % stride_ == 0) inner_->on_level(n, rho, g);
      rhos.push_back(rho);
    }
    std::vector<Vector> rhos;

  private:
    SnapshotSink* inner_;
    int stride_;
  };

  std::unique_ptr<FileSnapshotSink> file_sink;
  if (with_snapshots)
    file_sink = std::make_unique<FileSnapshotSink>((dir / "snapshots.bin").string(),
                                                   mesh.n_dof, quad.size(),
                                                   grid.n_steps / stride);
  StridedFileSink sink(file_sink.get(), stride);
  FomOptions opts;
  opts.grid = grid;
  auto sum = fom_solve(p.problem, mesh, quad, ops, &sink, opts);

  write_rho_history_csv((dir / "rho_history.csv").string(), sink.rhos, grid.dt);
  write_grid_csv((dir / "rho_final.csv").string(), mesh, sum.final_state.rho);
  write_grid_svg((dir / "rho_final.svg").string(), mesh, sum.final_state.rho);
  {
    auto os = std::ofstream(dir / "energy.csv");
    os << std::setprecision(17) << "n,t,energy\n";
    for (size_t n = 0; n < sum.energy.size(); ++n)
      os << n << ',' << n * grid.dt << ',' << sum.energy[n] << '\n';
  }
  std::vector<std::string> artifacts = {"rho_history.csv", "rho_final.csv", "rho_final.svg",
                                        "energy.csv"};
  if (with_snapshots) artifacts.push_back("snapshots.bin");
  write_manifest(dir.string(), artifacts);
  std::cout << "fom: " << grid.n_steps << " steps, dt " << grid.dt << ", outputs in " << dir
            << "\n";
  return 0;
}

int run_offline(const CommonOptions& o) {
  Preset p = resolve_preset(o);
  const SpatialMesh mesh = p.mesh();
  const AngularQuadrature v_train = lebedev(p.n_train);
  const fs::path dir = prepare_out(o);

  auto result = greedy_offline(p.problem, mesh, v_train, p.greedy);
  save_model((dir / "model.bin").string(), result.model);
  write_greedy_report_csv((dir / "training_history.csv").string(), result.report);
  save_quadrature_file((dir / "quad_rq.txt").string(), result.model.quad_rq);
  write_node_list_csv((dir / "nodes.csv").string(), result.model.quad_rq,
                      result.n_initial_rq_nodes);
  write_manifest(dir.string(), {"model.bin", "training_history.csv", "quad_rq.txt", "nodes.csv"});
  std::cout << "offline: " << result.report.termination << " after "
            << result.report.rows.size() << " iterations; r_rho "
            << result.model.basis_rho.rank() << ", r_g " << result.model.basis_g.rank()
            << ", quadrature " << result.model.quad_rq.size() << " nodes; outputs in " << dir
            << "\n";
  return 0;
}

// online/predict need the model and the same problem to rebuild initial data.
ReducedModel load_model_checked(const Preset& p, const std::string& path) {
  ReducedModel model = load_model(path);
  const TimeGrid grid = stable_dt(p.problem, p.mesh());
  if (std::abs(model.dt - grid.dt) > 1e-14 * grid.dt || model.n_steps != grid.n_steps)
    throw ConfigError("model was trained with a different time grid than this problem");
  if (model.basis_rho.B.rows() != p.mesh().n_dof)
    throw ConfigError("model was trained on a different mesh than this problem");
  return model;
}

int run_online(const CommonOptions& o, const std::string& model_path) {
  Preset p = resolve_preset(o);
  const SpatialMesh mesh = p.mesh();
  const fs::path dir = prepare_out(o);
  ReducedModel model = load_model_checked(p, model_path);

  RomSolver solver(model, model.quad_rq);
  const Vector rho0 = initial_rho_vector(p.problem, mesh);
  const Matrix g0 = initial_g_matrix(p.problem, mesh, model.quad_rq);
  const Vector src_r = model.basis_rho.B.transpose() * source_vector(p.problem, mesh);
  RomRecordOptions rec;
  rec.moments = true;
  RomTrajectory traj = rom_solve(solver, project_initial(model, rho0, g0),
                                 model.n_steps, src_r, rec);

  const int last = model.n_steps;
  write_grid_csv((dir / "rho_final.csv").string(), mesh,
                 reconstruct_moment(model, traj, last, 0));
  write_grid_svg((dir / "rho_final.svg").string(), mesh,
                 reconstruct_moment(model, traj, last, 0));
  write_grid_csv((dir / "vf_x_final.csv").string(), mesh,
                 reconstruct_moment(model, traj, last, 1, 0));
  write_grid_csv((dir / "vf_y_final.csv").string(), mesh,
                 reconstruct_moment(model, traj, last, 1, 1));
  write_grid_csv((dir / "vf_z_final.csv").string(), mesh,
                 reconstruct_moment(model, traj, last, 1, 2));
  {
    std::vector<Vector> levels;
    levels.reserve(traj.c_rho.size());
    for (const auto& c : traj.c_rho) levels.push_back(model.basis_rho.B * c);
    write_rho_history_csv((dir / "rho_history.csv").string(), levels, model.dt);
  }
  write_manifest(dir.string(), {"rho_final.csv", "rho_final.svg", "vf_x_final.csv",
                                "vf_y_final.csv", "vf_z_final.csv", "rho_history.csv"});
  std::cout << "online: " << model.n_steps << " steps on " << model.quad_rq.size()
            << " reduced nodes; outputs in " << dir << "\n";
  return 0;
}

int run_predict(const CommonOptions& o, const std::string& model_path,
                const std::string& nodes_path) {
  Preset p = resolve_preset(o);
  const SpatialMesh mesh = p.mesh();
  const fs::path dir = prepare_out(o);
  ReducedModel model = load_model_checked(p, model_path);

  // node list: "vx vy vz" per line ('#' comments allowed)
  std::vector<Vec3> directions;
  {
    std::ifstream is(nodes_path);
    if (!is) throw Error("cannot open node list: " + nodes_path);
    std::string line;
    while (std::getline(is, line)) {
      if (line.empty() || line[0] == '#') continue;
      std::istringstream ls(line);
      Vec3 v;
      if (!(ls >> v.x >> v.y >> v.z)) throw Error("node list: malformed line '" + line + "'");
      directions.push_back(v);
    }
  }

  RomSolver solver(model, model.quad_rq);
  const Vector rho0 = initial_rho_vector(p.problem, mesh);
  const Matrix g0 = initial_g_matrix(p.problem, mesh, model.quad_rq);
  const Vector src_r = model.basis_rho.B.transpose() * source_vector(p.problem, mesh);
  RomRecordOptions rec;
  rec.moments = false;
  rec.upwind = true;
  RomTrajectory traj = rom_solve(solver, project_initial(model, rho0, g0),
                                 model.n_steps, src_r, rec);

  std::ofstream ff(dir / "f_final.csv");
  ff << std::setprecision(17) << "vx,vy,vz,values...\n";
  std::ofstream fn(dir / "f_norms.csv");
  fn << std::setprecision(17) << "t";
  for (size_t d = 0; d < directions.size(); ++d) fn << ",node" << d;
  fn << "\n";

  std::vector<std::vector<Vector>> coeffs;
  for (const auto& v : directions) {
    Vector c0(model.basis_g.rank());
    if (p.problem.initial_g) {
      Vector g0v(mesh.n_dof);
      for (int j = 0; j < mesh.ny; ++j)
        for (int i = 0; i < mesh.nx; ++i)
          g0v[mesh.index(i, j)] = p.problem.initial_g(mesh.center_x(i), mesh.center_y(j), v);
      c0 = model.basis_g.B.transpose() * g0v;
    } else {
      c0.setZero();
    }
    coeffs.push_back(predict_unseen(solver, v, traj.c_rho, traj.upwind, c0));
  }

  const double area = mesh.cell_area();
  for (int n = 0; n <= model.n_steps; ++n) {
    fn << n * model.dt;
    for (size_t d = 0; d < directions.size(); ++d) {
      const Vector f = model.basis_rho.B * traj.c_rho[n] +
                       model.epsilon * (model.basis_g.B * coeffs[d][n]);
      fn << ',' << std::sqrt(area * f.squaredNorm());
    }
    fn << "\n";
  }
  for (size_t d = 0; d < directions.size(); ++d) {
    const Vector f = model.basis_rho.B * traj.c_rho[model.n_steps] +
                     model.epsilon * (model.basis_g.B * coeffs[d][model.n_steps]);
    ff << directions[d].x << ',' << directions[d].y << ',' << directions[d].z;
    for (int i = 0; i < f.size(); ++i) ff << ',' << f[i];
    ff << "\n";
  }
  write_manifest(dir.string(), {"f_final.csv", "f_norms.csv"});
  std::cout << "predict: " << directions.size() << " directions over " << model.n_steps
            << " steps; outputs in " << dir << "\n";
  return 0;
}

int run_bench(const CommonOptions& o, bool with_pod) {
  Preset p = resolve_preset(o);
  const fs::path dir = prepare_out(o);
  auto out = bench_run(p);

  write_metrics_csv((dir / "metrics.csv").string(), out.metrics);
  write_error_series_csv((dir / "error_series.csv").string(), out.series);
  write_greedy_report_csv((dir / "training_history.csv").string(), out.greedy.report);
  write_node_list_csv((dir / "nodes.csv").string(), out.greedy.model.quad_rq,
                      out.greedy.n_initial_rq_nodes);
  const SpatialMesh mesh = p.mesh();
  write_grid_csv((dir / "rho_rom_final.csv").string(), mesh, out.rho_rom_final);
  write_grid_csv((dir / "rho_fom_final.csv").string(), mesh, out.rho_fom_final);
  write_grid_svg((dir / "rho_rom_final.svg").string(), mesh, out.rho_rom_final);
  write_grid_svg((dir / "rho_fom_final.svg").string(), mesh, out.rho_fom_final);
  save_model((dir / "model.bin").string(), out.greedy.model);

  std::vector<std::string> artifacts = {
      "metrics.csv",       "error_series.csv",  "training_history.csv", "nodes.csv",
      "rho_rom_final.csv", "rho_fom_final.csv", "rho_rom_final.svg",    "rho_fom_final.svg",
      "model.bin"};

  if (with_pod) {
    auto cmp = pod_offline_comparison(p);
    auto os = std::ofstream(dir / "pod_comparison.csv");
    os << std::setprecision(17)
       << "mmd_offline_ms,fom_train_ms,pod_svd_ms,snapshot_count,pod_rank\n"
       << cmp.mmd_offline_ms << ',' << cmp.fom_train_ms << ',' << cmp.pod_svd_ms << ','
       << cmp.snapshot_count << ',' << cmp.pod_rank << "\n";
    artifacts.push_back("pod_comparison.csv");
  }
  write_manifest(dir.string(), artifacts);

  std::cout << "bench " << p.name << " (eps " << p.problem.epsilon << "): "
            << out.greedy.report.termination << " after " << out.greedy.report.rows.size()
            << " iterations\n"
            << "  R_rho " << 100 * out.metrics.r_rho << "%  R_vf " << 100 * out.metrics.r_vf
            << "%  R_f " << 100 * out.metrics.r_f << "%  C-R "
            << 100 * out.metrics.compression_ratio << "%\n"
            << "  outputs in " << dir << "\n";
  return 0;
}

int run_quad(const std::string& path, int degree) {
  AngularQuadrature quad = load_quadrature_file(path);
  const int check_degree = degree > 0 ? degree : quad.exactness_degree;
  quad.check_invariants(1e-12);

  double worst = 0.0;
  for (int m = 1; m <= check_degree; ++m)
    for (int l = -m; l <= m; ++l) {
      Eigen::VectorXd samples(quad.size());
      for (int k = 0; k < quad.size(); ++k) {
        const double theta = std::acos(std::clamp(quad.nodes[k].z, -1.0, 1.0));
        double phi = std::atan2(quad.nodes[k].y, quad.nodes[k].x);
        if (phi < 0) phi += 2 * std::numbers::pi;
        samples[k] = real_spherical_harmonic(m, l, theta, phi);
      }
      worst = std::max(worst, std::abs(quad.moment(samples)));
    }

  std::cout << "quad: " << quad.size() << " nodes, declared degree " << quad.exactness_degree
            << ", checked degree " << check_degree << "\n"
            << "  sum of weights deviation " << std::abs(quad.weights.sum() - 1.0) << "\n"
            << "  worst harmonic moment " << worst << " (tolerance 1e-9)\n";
  if (worst > 1e-9) {
    std::cerr << "error: quadrature fails the exactness certification\n";
    return 1;
  }
  std::cout << "certified exact to degree " << check_degree << "\n";
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"micro-macro reduced-basis solver for time-dependent radiative transfer"};
  app.require_subcommand(1);

  CommonOptions o;
  bool with_snapshots = true;
  int stride = 1;
  bool with_pod = false;
  std::string model_path, nodes_path, quad_path;
  int quad_degree = 0;

  auto* fom_cmd = app.add_subcommand("fom", "run the full-order solver and write snapshots");
  add_common(fom_cmd, o);
  fom_cmd->add_flag("!--no-snapshots", with_snapshots, "skip the binary snapshot file");
  fom_cmd->add_option("--stride", stride, "write every Nth level to the snapshot file");

  auto* offline_cmd = app.add_subcommand("offline", "train and serialize a reduced model");
  add_common(offline_cmd, o);

  auto* online_cmd = app.add_subcommand("online", "reduced solve and moment reconstruction");
  add_common(online_cmd, o);
  online_cmd->add_option("--model", model_path, "trained model file")->required();

  auto* predict_cmd = app.add_subcommand("predict", "angular flux at unseen directions");
  add_common(predict_cmd, o);
  predict_cmd->add_option("--model", model_path, "trained model file")->required();
  predict_cmd->add_option("--nodes", nodes_path, "node list file (vx vy vz per line)")
      ->required();

  auto* bench_cmd = app.add_subcommand("bench", "end-to-end benchmark with metrics and plots");
  add_common(bench_cmd, o);
  bench_cmd->add_flag("--pod", with_pod, "also time the vanilla-POD offline baseline");

  auto* quad_cmd = app.add_subcommand("quad", "certify a quadrature file's exactness");
  quad_cmd->add_option("file", quad_path, "quadrature text file")->required();
  quad_cmd->add_option("--degree", quad_degree, "degree to certify (default: declared)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (fom_cmd->parsed()) return run_fom(o, with_snapshots, std::max(1, stride));
    if (offline_cmd->parsed()) return run_offline(o);
    if (online_cmd->parsed()) return run_online(o, model_path);
    if (predict_cmd->parsed()) return run_predict(o, model_path, nodes_path);
    if (bench_cmd->parsed()) return run_bench(o, with_pod);
    if (quad_cmd->parsed()) return run_quad(quad_path, quad_degree);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
