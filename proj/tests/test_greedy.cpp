#include <cmath>
#include <limits>
#include <random>

#include "doctest.h"
#include "mmrb/greedy.hpp"

using namespace mmrb;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

ProblemDefinition homogeneous_small(double eps, double tfinal) {
  ProblemDefinition p;
  p.epsilon = eps;
  p.sigma_s = [](double, double) { return 1.0; };
  p.sigma_a = [](double, double) { return 0.0; };
  p.source = [](double x, double y) {
    return std::exp(-25.0 * ((x - 1.0) * (x - 1.0) + (y - 1.0) * (y - 1.0)));
  };
  p.final_time = tfinal;
  return p;
}

} // namespace

TEST_CASE("l1 indicator: interpolation-basis property and pseudo-inverse oracle") {
  std::mt19937 rng(23);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix snapshots(12, 3);
  for (int i = 0; i < 12; ++i)
    for (int j = 0; j < 3; ++j) snapshots(i, j) = gauss(rng);
  auto basis = svd_orthonormalize(snapshots);

  // a reduced state equal to snapshot column k has coordinates e_k
  for (int k = 0; k < 3; ++k) {
    const Vector c = basis.B.transpose() * snapshots.col(k);
    CHECK(l1_indicator(basis, c) == doctest::Approx(1.0).epsilon(1e-10));
  }
  CHECK(l1_indicator(basis, Vector::Zero(3)) == 0.0);

  // fast formula equals the direct least-squares coordinates ||S^+ (B c)||_1
  for (int trial = 0; trial < 50; ++trial) {
    Vector c(3);
    for (int i = 0; i < 3; ++i) c[i] = gauss(rng);
    const Vector x = snapshots.colPivHouseholderQr().solve(Vector(basis.B * c));
    CHECK(std::abs(l1_indicator(basis, c) - x.lpNorm<1>()) < 1e-10);
  }
}

TEST_CASE("sample selection argmax with deterministic tie-breaking") {
  IndicatorTables t;
  t.rho = {1.0, 1.0, 1.0};
  t.g = Matrix::Ones(3, 4);
  SampledSets sets;

  auto picks = select_samples(t, sets);
  REQUIRE(picks.has_value());
  CHECK(picks->t_rho == 1);
  CHECK(picks->t_g == 1);
  CHECK(picks->v_g == 0);

  t.rho = {0.1, 5.0, 0.2};
  t.g(1, 2) = 9.0;
  picks = select_samples(t, sets);
  CHECK(picks->t_rho == 2);
  CHECK(picks->t_g == 2);
  CHECK(picks->v_g == 2);

  // sampled candidates are excluded; a single remaining candidate is taken
  sets.t_rb_rho = {1, 2};
  sets.tv_rb_g = {{1, 0}, {1, 1}};
  picks = select_samples(t, sets);
  CHECK(picks->t_rho == 3);

  sets.t_rb_rho = {1, 2, 3};
  CHECK(!select_samples(t, sets).has_value());
}

TEST_CASE("sampled-set updates are symmetry closed and deduplicated") {
  auto v_train = lebedev(26);
  SampledSets sets;
  GreedyPicks p;
  p.t_rho = 4;
  p.t_g = 2;
  p.v_g = 3;
  update_sampled_sets(sets, p, v_train);
  CHECK(sets.t_rb_rho.size() == 1);
  CHECK(sets.tv_rb_g.size() == 2);

  // the antipodal partner is in the set
  const Vec3 v = v_train.nodes[3];
  bool found = false;
  for (const auto& [t, idx] : sets.tv_rb_g) {
    const Vec3& w = v_train.nodes[idx];
    if (std::abs(w.x + v.x) + std::abs(w.y + v.y) + std::abs(w.z + v.z) < 1e-12) found = true;
  }
  CHECK(found);

  // re-picking the same rho time leaves the set unchanged
  update_sampled_sets(sets, p, v_train);
  CHECK(sets.t_rb_rho.size() == 1);
  CHECK(sets.tv_rb_g.size() == 2);
}

TEST_CASE("basis update counts and the diffusive-limit span") {
  auto mesh = build_mesh(0, 2, 0, 2, 8, 8);
  ProblemDefinition p = homogeneous_small(1e-6, 0.4);
  auto quad = lebedev(26);
  auto ops = assemble_problem_operators(p, mesh, quad);
  auto grid = stable_dt(p, mesh);

  InMemorySink sink;
  FomOptions opts;
  opts.grid = grid;
  fom_solve(p, mesh, quad, ops, &sink, opts);

  Vector theta =
      p.epsilon * p.epsilon * (ops.mass + grid.dt * ops.sigma_a_diag) + grid.dt * ops.sigma_s_diag;
  const Vector theta_inv = theta.cwiseInverse();

  SUBCASE("one sampled time, no g samples: r_rho = 1, r_g <= 2") {
    FomSamples samples;
    samples.rho_times = {grid.n_steps};
    samples.rho_at = {sink.rhos.back()};
    auto [brho, bg] = update_bases(samples, ops, theta_inv, grid.dt, 1e-12);
    CHECK(brho.rank() == 1);
    CHECK(bg.rank() <= 2);
    CHECK(bg.rank() >= 1);
  }

  SUBCASE("deep in the diffusive regime g lies in the enrichment span") {
    const int m = grid.n_steps;
    const Vector& rho_m = sink.rhos[m];
    Matrix span(mesh.n_dof, 2);
    span.col(0) = grid.dt * theta_inv.cwiseProduct(Vector(ops.dxm * rho_m));
    span.col(1) = grid.dt * theta_inv.cwiseProduct(Vector(ops.dym * rho_m));
    for (int j : {0, 9, 17}) {
      const Vector g = sink.gs[m].col(j);
      const Vector coef = span.colPivHouseholderQr().solve(g);
      const double resid = (span * coef - g).norm() / g.norm();
      CHECK(resid < 1e-5);
    }
  }
}

TEST_CASE("enrichment stays well defined when sigma_s vanishes in a subregion") {
  auto mesh = build_mesh(0, 2, 0, 2, 8, 8);
  ProblemDefinition p = homogeneous_small(1.0, 0.2);
  p.sigma_s = [](double x, double) { return x < 1.0 ? 0.0 : 1.0; };
  p.sigma_a = [](double x, double) { return x < 1.0 ? 10.0 : 0.0; };
  auto quad = lebedev(26);
  auto ops = assemble_problem_operators(p, mesh, quad);
  auto grid = stable_dt(p, mesh);

  Vector theta =
      p.epsilon * p.epsilon * (ops.mass + grid.dt * ops.sigma_a_diag) + grid.dt * ops.sigma_s_diag;
  REQUIRE(theta.minCoeff() > 0.0);

  InMemorySink sink;
  FomOptions opts;
  opts.grid = grid;
  fom_solve(p, mesh, quad, ops, &sink, opts);
  FomSamples samples;
  samples.rho_times = {grid.n_steps};
  samples.rho_at = {sink.rhos.back()};
  auto [brho, bg] = update_bases(samples, ops, theta.cwiseInverse(), grid.dt, 1e-12);
  CHECK(bg.B.allFinite());
}

TEST_CASE("greedy offline: immediate stop, growth invariants, determinism") {
  auto mesh = build_mesh(0, 2, 0, 2, 8, 8);
  ProblemDefinition p = homogeneous_small(0.5, 0.1);
  auto v_train = lebedev(50);

  GreedyConfig cfg;
  cfg.initial_lebedev_points = 26;
  cfg.max_iterations = 5;

  SUBCASE("infinite tolerances stop after one iteration") {
    GreedyConfig loose = cfg;
    loose.tol_ratio = kInf;
    loose.tol_error_rho = kInf;
    loose.tol_error_f = kInf;
    auto result = greedy_offline(p, mesh, v_train, loose);
    CHECK(result.report.termination == "converged");
    CHECK(result.report.rows.size() == 1);
    CHECK(result.report.rows[0].r_rho == 1);
    CHECK(result.model.basis_rho.rank() == 1);
    result.model.quad_rq.check_invariants(1e-12);
  }

  SUBCASE("set growth and quadrature monotonicity across iterations") {
    GreedyConfig tight = cfg;
    tight.tol_ratio = 1e-30; // never satisfied: runs to the budget
    tight.tol_error_rho = 1e-30;
    tight.tol_error_f = 1e-30;
    auto result = greedy_offline(p, mesh, v_train, tight);
    CHECK(result.report.termination == "budget");
    REQUIRE(result.report.rows.size() == 5);
    int prev_nv = 0;
    for (const auto& row : result.report.rows) {
      CHECK(row.nv_rq >= prev_nv);
      prev_nv = row.nv_rq;
      CHECK(row.est_rho >= 0.0);
    }
    CHECK(static_cast<int>(result.sets.t_rb_rho.size()) == 5);
    const size_t tv = result.sets.tv_rb_g.size();
    CHECK(tv >= 5);
    CHECK(tv <= 10);
    result.model.quad_rq.check_invariants(1e-12);
    // every quadrature node beyond the initial rule came from the training set
    for (int k = result.n_initial_rq_nodes; k < result.model.quad_rq.size(); ++k) {
      bool in_train = false;
      for (const auto& w : v_train.nodes) {
        const auto& q = result.model.quad_rq.nodes[k];
        if (std::abs(w.x - q.x) + std::abs(w.y - q.y) + std::abs(w.z - q.z) < 1e-12)
          in_train = true;
      }
      CHECK(in_train);
    }
  }

  SUBCASE("bitwise reproducibility") {
    GreedyConfig two = cfg;
    two.max_iterations = 2;
    two.tol_ratio = 1e-30;
    two.tol_error_rho = 1e-30;
    two.tol_error_f = 1e-30;
    auto a = greedy_offline(p, mesh, v_train, two);
    auto b = greedy_offline(p, mesh, v_train, two);
    REQUIRE(a.report.rows.size() == b.report.rows.size());
    CHECK((a.model.basis_rho.B - b.model.basis_rho.B).cwiseAbs().maxCoeff() == 0.0);
    CHECK((a.model.basis_g.B - b.model.basis_g.B).cwiseAbs().maxCoeff() == 0.0);
    CHECK((a.model.quad_rq.weights - b.model.quad_rq.weights).cwiseAbs().maxCoeff() == 0.0);
    for (size_t i = 0; i < a.report.rows.size(); ++i) {
      CHECK(a.report.rows[i].est_rho == b.report.rows[i].est_rho);
      CHECK(a.report.rows[i].est_f == b.report.rows[i].est_f);
    }
  }
}

TEST_CASE("zero initial data and zero source fail cleanly") {
  auto mesh = build_mesh(0, 2, 0, 2, 4, 4);
  ProblemDefinition p = homogeneous_small(1.0, 0.05);
  p.source = nullptr;
  GreedyConfig cfg;
  cfg.initial_lebedev_points = 6;
  CHECK_THROWS_AS(greedy_offline(p, mesh, lebedev(26), cfg), DegenerateBasisError);
}

TEST_CASE("greedy converges on a small diffusive problem") {
  auto mesh = build_mesh(0, 2, 0, 2, 16, 16);
  ProblemDefinition p = homogeneous_small(0.005, 0.5);
  auto v_train = lebedev(50);

  GreedyConfig cfg;
  cfg.initial_lebedev_points = 26;
  cfg.tol_ratio = 1e-3;
  cfg.tol_error_rho = 0.02;
  cfg.tol_error_f = 0.04;
  cfg.max_iterations = 30;

  auto result = greedy_offline(p, mesh, v_train, cfg);
  CHECK(result.report.termination == "converged");
  const auto& last = result.report.rows.back();
  CHECK(last.est_rho < 0.02);
  CHECK(last.est_f < 0.04);
  CHECK(std::max(last.ratio_rho, last.ratio_g) < 1e-3);
}
