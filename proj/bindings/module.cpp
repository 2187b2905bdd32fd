#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "mmrb/bench.hpp"
#include "mmrb/parallel.hpp"

namespace py = pybind11;
using namespace mmrb;

namespace {

Eigen::MatrixXd nodes_to_array(const std::vector<Vec3>& nodes) {
  Eigen::MatrixXd a(nodes.size(), 3);
  for (size_t i = 0; i < nodes.size(); ++i) {
    a(i, 0) = nodes[i].x;
    a(i, 1) = nodes[i].y;
    a(i, 2) = nodes[i].z;
  }
  return a;
}

std::vector<Vec3> array_to_nodes(const Eigen::MatrixXd& a) {
  if (a.cols() != 3) throw std::invalid_argument("node array must have shape (n, 3)");
  std::vector<Vec3> nodes(a.rows());
  for (Eigen::Index i = 0; i < a.rows(); ++i) nodes[i] = {a(i, 0), a(i, 1), a(i, 2)};
  return nodes;
}

const char* provenance_str(QuadratureProvenance p) {
  switch (p) {
    case QuadratureProvenance::lebedev_table: return "lebedev_table";
    case QuadratureProvenance::reduced_ls: return "reduced_ls";
    case QuadratureProvenance::fallback_zero_padded: return "fallback_zero_padded";
  }
  return "unknown";
}

// triplet export of a sparse operator for scipy-style consumption
py::tuple sparse_triplets(const SparseMat& m) {
  std::vector<int> rows, cols;
  std::vector<double> vals;
  rows.reserve(m.nonZeros());
  cols.reserve(m.nonZeros());
  vals.reserve(m.nonZeros());
  for (int k = 0; k < m.outerSize(); ++k)
    for (SparseMat::InnerIterator it(m, k); it; ++it) {
      rows.push_back(static_cast<int>(it.row()));
      cols.push_back(static_cast<int>(it.col()));
      vals.push_back(it.value());
    }
  return py::make_tuple(rows, cols, vals);
}

AngularField wrap_initial_g(const std::function<double(double, double, double, double, double)>& f) {
  if (!f) return nullptr;
  return [f](double x, double y, const Vec3& v) { return f(x, y, v.x, v.y, v.z); };
}

} // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "micro-macro reduced-basis solver for time-dependent radiative transfer";

  py::register_exception<Error>(m, "MmrbError");

  m.def("set_thread_count", &set_thread_count, py::arg("n"));

  // --- angular -------------------------------------------------------------
  py::class_<AngularQuadrature>(m, "AngularQuadrature")
      .def_property_readonly("nodes",
                             [](const AngularQuadrature& q) { return nodes_to_array(q.nodes); })
      .def_property_readonly("weights",
                             [](const AngularQuadrature& q) { return q.weights; })
      .def_readonly("exactness_degree", &AngularQuadrature::exactness_degree)
      .def_property_readonly(
          "provenance",
          [](const AngularQuadrature& q) { return std::string(provenance_str(q.provenance)); })
      .def("__len__", &AngularQuadrature::size)
      .def("moment", &AngularQuadrature::moment, py::arg("samples"))
      .def("second_moment", &AngularQuadrature::second_moment, py::arg("xi"), py::arg("eta"))
      .def("check_invariants", &AngularQuadrature::check_invariants, py::arg("tol") = 1e-12)
      .def("save", [](const AngularQuadrature& q, const std::string& path) {
        save_quadrature_file(path, q);
      });

  m.def("lebedev", &lebedev, py::arg("points"));
  m.def("lebedev_available", [] { return lebedev_available(); });
  m.def("load_quadrature", &load_quadrature_file, py::arg("path"));
  m.def("real_spherical_harmonic", &real_spherical_harmonic, py::arg("m"), py::arg("l"),
        py::arg("theta"), py::arg("phi"));
  m.def(
      "ls_quadrature_weights",
      [](const Eigen::MatrixXd& nodes, int degree) {
        auto out = ls_quadrature_weights(array_to_nodes(nodes), degree);
        return py::make_tuple(out.weights, out.full_rank);
      },
      py::arg("nodes"), py::arg("degree"));
  m.def(
      "nonneg_reduced_quadrature",
      [](const Eigen::MatrixXd& nodes, const AngularQuadrature& old_quad, int m_min, int m_max) {
        return nonneg_reduced_quadrature(array_to_nodes(nodes), old_quad, m_min, m_max);
      },
      py::arg("nodes"), py::arg("old_quad"), py::arg("m_min") = 3, py::arg("m_max") = 7);

  // --- mesh and operators ----------------------------------------------------
  py::class_<SpatialMesh>(m, "SpatialMesh")
      .def_readonly("nx", &SpatialMesh::nx)
      .def_readonly("ny", &SpatialMesh::ny)
      .def_readonly("n_dof", &SpatialMesh::n_dof)
      .def_readonly("h", &SpatialMesh::h)
      .def_readonly("dx", &SpatialMesh::dx)
      .def_readonly("dy", &SpatialMesh::dy)
      .def("cell_area", &SpatialMesh::cell_area);

  m.def("build_mesh", &build_mesh, py::arg("x0"), py::arg("x1"), py::arg("y0"), py::arg("y1"),
        py::arg("nx"), py::arg("ny"));

  py::enum_<BoundaryCondition>(m, "BoundaryCondition")
      .value("vacuum", BoundaryCondition::vacuum)
      .value("periodic", BoundaryCondition::periodic);

  py::class_<DgOperators>(m, "DgOperators")
      .def_readonly("mass", &DgOperators::mass)
      .def_readonly("sigma_s_diag", &DgOperators::sigma_s_diag)
      .def_readonly("sigma_a_diag", &DgOperators::sigma_a_diag)
      .def_readonly("alpha_x", &DgOperators::alpha_x)
      .def_readonly("alpha_y", &DgOperators::alpha_y)
      .def("dxm_triplets", [](const DgOperators& o) { return sparse_triplets(o.dxm); })
      .def("dxp_triplets", [](const DgOperators& o) { return sparse_triplets(o.dxp); })
      .def("dym_triplets", [](const DgOperators& o) { return sparse_triplets(o.dym); })
      .def("dyp_triplets", [](const DgOperators& o) { return sparse_triplets(o.dyp); })
      .def("djump_triplets", [](const DgOperators& o) { return sparse_triplets(o.djump); })
      .def("upwind_triplets", [](const DgOperators& o, double vx, double vy) {
        return sparse_triplets(o.upwind_derivative(vx, vy));
      });

  m.def("assemble_operators", &assemble_operators, py::arg("mesh"), py::arg("sigma_s"),
        py::arg("sigma_a"), py::arg("bc") = BoundaryCondition::vacuum, py::arg("alpha_x") = 3.0,
        py::arg("alpha_y") = 3.0, py::arg("k") = 0);

  // --- problems and presets ----------------------------------------------------
  py::class_<ProblemDefinition>(m, "ProblemDefinition")
      .def(py::init<>())
      .def_readwrite("epsilon", &ProblemDefinition::epsilon)
      .def_readwrite("final_time", &ProblemDefinition::final_time)
      .def_readwrite("bc", &ProblemDefinition::bc)
      .def_property(
          "sigma_s", [](const ProblemDefinition& p) { return p.sigma_s; },
          [](ProblemDefinition& p, ScalarField f) { p.sigma_s = std::move(f); })
      .def_property(
          "sigma_a", [](const ProblemDefinition& p) { return p.sigma_a; },
          [](ProblemDefinition& p, ScalarField f) { p.sigma_a = std::move(f); })
      .def_property(
          "source", [](const ProblemDefinition& p) { return p.source; },
          [](ProblemDefinition& p, ScalarField f) { p.source = std::move(f); })
      .def_property(
          "initial_rho", [](const ProblemDefinition& p) { return p.initial_rho; },
          [](ProblemDefinition& p, ScalarField f) { p.initial_rho = std::move(f); })
      .def(
          "set_initial_g",
          [](ProblemDefinition& p,
             const std::function<double(double, double, double, double, double)>& f) {
            p.initial_g = wrap_initial_g(f);
          },
          py::arg("f"), "g(x, y, vx, vy, vz) at t = 0");

  py::enum_<PresetScale>(m, "PresetScale")
      .value("paper", PresetScale::paper)
      .value("desk", PresetScale::desk);

  py::class_<GreedyConfig>(m, "GreedyConfig")
      .def(py::init<>())
      .def_readwrite("tol_ratio", &GreedyConfig::tol_ratio)
      .def_readwrite("tol_error_rho", &GreedyConfig::tol_error_rho)
      .def_readwrite("tol_error_f", &GreedyConfig::tol_error_f)
      .def_readwrite("max_iterations", &GreedyConfig::max_iterations)
      .def_readwrite("initial_lebedev_points", &GreedyConfig::initial_lebedev_points)
      .def_readwrite("m_min", &GreedyConfig::m_min)
      .def_readwrite("m_max", &GreedyConfig::m_max);

  py::class_<Preset>(m, "Preset")
      .def_readonly("name", &Preset::name)
      .def_readwrite("problem", &Preset::problem)
      .def_readwrite("nx", &Preset::nx)
      .def_readwrite("ny", &Preset::ny)
      .def_readwrite("n_train", &Preset::n_train)
      .def_readwrite("n_test", &Preset::n_test)
      .def_readwrite("greedy", &Preset::greedy)
      .def("mesh", &Preset::mesh);

  m.def(
      "preset",
      [](const std::string& name, const std::string& scale, double eps, double sigma_s) {
        return preset(name, parse_scale(scale), eps, sigma_s);
      },
      py::arg("name"), py::arg("scale") = "desk", py::arg("eps") = -1.0,
      py::arg("sigma_s") = 1.0);

  // --- full-order solver ----------------------------------------------------
  py::class_<TimeGrid>(m, "TimeGrid")
      .def_readonly("dt", &TimeGrid::dt)
      .def_readonly("n_steps", &TimeGrid::n_steps);

  m.def("stable_dt", &stable_dt, py::arg("problem"), py::arg("mesh"));
  m.def("assemble_problem_operators", &assemble_problem_operators, py::arg("problem"),
        py::arg("mesh"), py::arg("quad"));

  py::class_<FomSummary>(m, "FomSummary")
      .def_property_readonly("rho", [](const FomSummary& s) { return s.final_state.rho; })
      .def_property_readonly("g", [](const FomSummary& s) { return s.final_state.g; })
      .def_readonly("energy", &FomSummary::energy)
      .def_readonly("dt", &FomSummary::dt)
      .def_readonly("n_steps", &FomSummary::n_steps);

  m.def(
      "fom_solve",
      [](const ProblemDefinition& p, const SpatialMesh& mesh, const AngularQuadrature& quad,
         bool store_levels) {
        InMemorySink sink;
        auto ops = assemble_problem_operators(p, mesh, quad);
        auto sum = fom_solve(p, mesh, quad, ops, store_levels ? &sink : nullptr);
        py::dict out;
        out["rho"] = sum.final_state.rho;
        out["g"] = sum.final_state.g;
        out["energy"] = sum.energy;
        out["dt"] = sum.dt;
        out["n_steps"] = sum.n_steps;
        if (store_levels) {
          out["rho_levels"] = sink.rhos;
          out["g_levels"] = sink.gs;
        }
        return out;
      },
      py::arg("problem"), py::arg("mesh"), py::arg("quad"), py::arg("store_levels") = false);

  m.def(
      "diffusion_limit_solve",
      [](const ProblemDefinition& p, const SpatialMesh& mesh, const AngularQuadrature& quad) {
        auto ops = assemble_problem_operators(p, mesh, quad);
        auto grid = stable_dt(p, mesh);
        return diffusion_limit_solve(p, mesh, ops, grid);
      },
      py::arg("problem"), py::arg("mesh"), py::arg("quad"));

  // --- reduced model and training -------------------------------------------
  py::class_<ReducedModel>(m, "ReducedModel")
      .def_property_readonly("r_rho",
                             [](const ReducedModel& md) { return md.basis_rho.rank(); })
      .def_property_readonly("r_g", [](const ReducedModel& md) { return md.basis_g.rank(); })
      .def_readonly("epsilon", &ReducedModel::epsilon)
      .def_readonly("dt", &ReducedModel::dt)
      .def_readonly("n_steps", &ReducedModel::n_steps)
      .def_readonly("quad_rq", &ReducedModel::quad_rq)
      .def_property_readonly("basis_rho",
                             [](const ReducedModel& md) { return md.basis_rho.B; })
      .def_property_readonly("basis_g", [](const ReducedModel& md) { return md.basis_g.B; })
      .def("save", [](const ReducedModel& md, const std::string& path) { save_model(path, md); });

  m.def("load_model", &load_model, py::arg("path"));

  py::class_<GreedyIterationRecord>(m, "GreedyIterationRecord")
      .def_readonly("iter", &GreedyIterationRecord::iter)
      .def_readonly("r_rho", &GreedyIterationRecord::r_rho)
      .def_readonly("r_g", &GreedyIterationRecord::r_g)
      .def_readonly("nv_rq", &GreedyIterationRecord::nv_rq)
      .def_readonly("ratio_rho", &GreedyIterationRecord::ratio_rho)
      .def_readonly("ratio_g", &GreedyIterationRecord::ratio_g)
      .def_readonly("est_rho", &GreedyIterationRecord::est_rho)
      .def_readonly("est_f", &GreedyIterationRecord::est_f)
      .def_readonly("wall_ms", &GreedyIterationRecord::wall_ms);

  py::class_<GreedyReport>(m, "GreedyReport")
      .def_readonly("rows", &GreedyReport::rows)
      .def_readonly("termination", &GreedyReport::termination)
      .def_readonly("offline_wall_ms", &GreedyReport::offline_wall_ms);

  py::class_<GreedyResult>(m, "GreedyResult")
      .def_readonly("model", &GreedyResult::model)
      .def_readonly("report", &GreedyResult::report)
      .def_readonly("n_initial_rq_nodes", &GreedyResult::n_initial_rq_nodes);

  // problem fields may be python callables, so the GIL stays held
  m.def("greedy_offline", &greedy_offline, py::arg("problem"), py::arg("mesh"),
        py::arg("v_train"), py::arg("config"));

  // --- online solve, reconstruction, prediction ------------------------------
  m.def(
      "rom_online",
      [](const ReducedModel& model, const ProblemDefinition& p, const SpatialMesh& mesh) {
        RomSolver solver(model, model.quad_rq);
        const Vector rho0 = initial_rho_vector(p, mesh);
        const Matrix g0 = initial_g_matrix(p, mesh, model.quad_rq);
        const Vector src_r = model.basis_rho.B.transpose() * source_vector(p, mesh);
        RomRecordOptions rec;
        rec.moments = true;
        rec.upwind = true;
        auto traj = rom_solve(solver, project_initial(model, rho0, g0), model.n_steps, src_r,
                              rec);
        py::dict out;
        out["c_rho"] = traj.c_rho;
        out["rho_final"] = Vector(model.basis_rho.B * traj.c_rho.back());
        std::vector<Vector> vf_final;
        for (int xi = 0; xi < 3; ++xi)
          vf_final.push_back(model.epsilon * (model.basis_g.B * traj.m1.back()[xi]));
        out["vf_final"] = vf_final;
        out["upwind"] = traj.upwind;
        return out;
      },
      py::arg("model"), py::arg("problem"), py::arg("mesh"));

  m.def(
      "predict_directions",
      [](const ReducedModel& model, const ProblemDefinition& p, const SpatialMesh& mesh,
         const Eigen::MatrixXd& directions) {
        RomSolver solver(model, model.quad_rq);
        const Vector rho0 = initial_rho_vector(p, mesh);
        const Matrix g0 = initial_g_matrix(p, mesh, model.quad_rq);
        const Vector src_r = model.basis_rho.B.transpose() * source_vector(p, mesh);
        RomRecordOptions rec;
        rec.moments = false;
        rec.upwind = true;
        auto traj = rom_solve(solver, project_initial(model, rho0, g0), model.n_steps, src_r,
                              rec);
        std::vector<Vector> f_final;
        for (const Vec3& v : array_to_nodes(directions)) {
          Vector c0 = Vector::Zero(model.basis_g.rank());
          if (p.initial_g) {
            Vector g0v(mesh.n_dof);
            for (int j = 0; j < mesh.ny; ++j)
              for (int i = 0; i < mesh.nx; ++i)
                g0v[mesh.index(i, j)] = p.initial_g(mesh.center_x(i), mesh.center_y(j), v);
            c0 = model.basis_g.B.transpose() * g0v;
          }
          auto coeffs = predict_unseen(solver, v, traj.c_rho, traj.upwind, c0);
          f_final.push_back(model.basis_rho.B * traj.c_rho.back() +
                            model.epsilon * (model.basis_g.B * coeffs.back()));
        }
        return f_final;
      },
      py::arg("model"), py::arg("problem"), py::arg("mesh"), py::arg("directions"));

  // --- benchmark -------------------------------------------------------------
  py::class_<RunMetrics>(m, "RunMetrics")
      .def_readonly("e_rho", &RunMetrics::e_rho)
      .def_readonly("r_rho", &RunMetrics::r_rho)
      .def_readonly("e_vf", &RunMetrics::e_vf)
      .def_readonly("r_vf", &RunMetrics::r_vf)
      .def_readonly("e_f", &RunMetrics::e_f)
      .def_readonly("r_f", &RunMetrics::r_f)
      .def_readonly("compression_ratio", &RunMetrics::compression_ratio)
      .def_readonly("wall_offline_ms", &RunMetrics::wall_offline_ms)
      .def_readonly("wall_online_ms", &RunMetrics::wall_online_ms);

  m.def(
      "bench_run",
      [](const Preset& p) {
        auto out = bench_run(p);
        py::dict d;
        d["metrics"] = out.metrics;
        d["termination"] = out.greedy.report.termination;
        d["iterations"] = out.greedy.report.rows.size();
        d["r_rho"] = out.greedy.model.basis_rho.rank();
        d["r_g"] = out.greedy.model.basis_g.rank();
        d["nv_rq"] = out.greedy.model.quad_rq.size();
        d["rho_rom_final"] = out.rho_rom_final;
        d["rho_fom_final"] = out.rho_fom_final;
        return d;
      },
      py::arg("preset"));
}
