#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "doctest.h"
#include "mmrb/io.hpp"
#include "mmrb/metrics.hpp"
#include "mmrb/presets.hpp"
#include "mmrb/rom.hpp"

using namespace mmrb;
namespace fs = std::filesystem;

TEST_CASE("preset catalog matches the benchmark definitions") {
  auto hp = preset("homogeneous", PresetScale::paper, 1.0);
  CHECK(hp.nx == 80);
  CHECK(hp.problem.final_time == 0.25);
  CHECK(hp.greedy.tol_error_f == 0.02);
  CHECK(hp.n_train == 590);
  CHECK(hp.mesh().h == doctest::Approx(0.025));

  auto hd5 = preset("homogeneous", PresetScale::paper, 0.005);
  CHECK(hd5.problem.final_time == 1.5);

  auto lp = preset("lattice", PresetScale::paper);
  CHECK(lp.nx == 100);
  CHECK(lp.problem.final_time == 1.7);
  CHECK(lp.greedy.tol_ratio == 1e-3);
  CHECK(lp.greedy.initial_lebedev_points == 50);

  auto hd = preset("homogeneous", PresetScale::desk, 1.0);
  CHECK(hd.nx == 40);
  CHECK(hd.n_train == 110);
  CHECK(hd.n_test == 194);
  CHECK(hd.greedy.tol_ratio == 1e-4);
  CHECK(hd.greedy.tol_error_rho == 0.01);

  CHECK_THROWS_AS(preset("unknown", PresetScale::desk), ConfigError);
  CHECK(parse_scale("paper") == PresetScale::paper);
  CHECK_THROWS_AS(parse_scale("big"), ConfigError);
}

TEST_CASE("preset fields: lattice geometry and multiscale scattering") {
  auto lat = preset("lattice", PresetScale::paper);
  // center block carries the unit source and scatters
  CHECK(lat.problem.source(2.5, 2.5) == 1.0);
  CHECK(lat.problem.source(1.2, 2.5) == 0.0);
  CHECK(lat.problem.sigma_s(2.5, 2.5) == 1.0);
  // (1,0) block is an absorber (1+0 odd)
  CHECK(lat.problem.sigma_a(1.5, 0.5) == 100.0);
  CHECK(lat.problem.sigma_s(1.5, 0.5) == 0.0);
  // (0,0) block scatters
  CHECK(lat.problem.sigma_a(0.5, 0.5) == 0.0);
  CHECK(lat.problem.sigma_s(0.5, 0.5) == 1.0);

  auto ms = preset("multiscale", PresetScale::desk);
  CHECK(ms.problem.sigma_s(0.0, 0.0) == doctest::Approx(0.001).epsilon(1e-12));
  CHECK(ms.problem.sigma_s(1.0, 0.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(ms.problem.sigma_s(0.9, 0.9) == 1.0); // r > 1
  CHECK(ms.problem.epsilon == 0.01);
  CHECK(ms.problem.initial_rho(0.0, 0.0) ==
        doctest::Approx(5.0 / std::numbers::pi).epsilon(1e-12));
}

TEST_CASE("anisotropic initial data branches") {
  auto an = preset("anisotropic", PresetScale::desk);
  const double q = std::sqrt(0.5);
  // positive quadrant bump peaks at phi = pi/4
  const double peak = an.problem.initial_g(0.0, 0.0, {q, q, 0.0}) /
                      an.problem.initial_rho(0.0, 0.0);
  CHECK(peak == doctest::Approx(std::exp(-16.0 / (std::numbers::pi * std::numbers::pi)))
                    .epsilon(1e-12));
  // third quadrant is negative, the remaining quadrants vanish
  CHECK(an.problem.initial_g(0.0, 0.0, {-q, -q, 0.0}) < 0.0);
  CHECK(an.problem.initial_g(0.0, 0.0, {-q, q, 0.0}) == 0.0);
  CHECK(an.problem.initial_g(0.0, 0.0, {q, -q, 0.0}) == 0.0);
  // rho bump is compactly supported
  CHECK(an.problem.initial_rho(0.9, 0.0) == 0.0);
}

TEST_CASE("compression ratio formula") {
  CHECK(compression_ratio(13, 52, 48, 590, 6400) ==
        doctest::Approx((13.0 + 48.0 * 52.0) / (591.0 * 6400.0)).epsilon(1e-15));
}

TEST_CASE("error metrics on synthetic data") {
  auto mesh = build_mesh(0, 1, 0, 1, 2, 2);
  const Vector mass = Vector::Constant(4, mesh.cell_area());
  const double dt = 0.5;

  Vector a(4), b(4);
  a << 1, 2, 3, 4;
  b << 1, 1, 1, 1;

  SUBCASE("identical series give zero errors") {
    auto m = error_metrics({a, a}, {a, a}, {{ {a, b} }, { {a, b} }}, {{ {a, b} }, { {a, b} }},
                           {{a, a}}, {{a, a}}, dt, mass);
    CHECK(m.e_rho == 0.0);
    CHECK(m.r_rho == 0.0);
    CHECK(m.e_vf == 0.0);
    CHECK(m.e_f == 0.0);
  }

  SUBCASE("zero reduced run against a nonzero reference is exactly 1") {
    const Vector z = Vector::Zero(4);
    auto m = error_metrics({z, z}, {z, a}, {}, {}, {}, {}, dt, mass);
    CHECK(m.r_rho == doctest::Approx(1.0).epsilon(1e-15));
  }

  SUBCASE("hand-computed single step") {
    // E_rho = sqrt(dt * ||a-b||_M^2), norm over cells of area 1/4
    const double diff2 = 0.25 * ((0.0) + 1.0 + 4.0 + 9.0);
    auto m = error_metrics({b, a}, {b, b}, {}, {}, {}, {}, dt, mass);
    CHECK(m.e_rho == doctest::Approx(std::sqrt(dt * diff2)).epsilon(1e-14));
    const double den2 = 0.25 * 4.0;
    CHECK(m.r_rho == doctest::Approx(std::sqrt(diff2 / den2)).epsilon(1e-14));
  }

  SUBCASE("f error is the worst case over directions") {
    const Vector z = Vector::Zero(4);
    auto m = error_metrics({b, b}, {b, b}, {}, {},
                           {{z, b}, {z, z}}, {{z, b}, {z, a}}, dt, mass);
    // direction 0 matches exactly; direction 1 misses a entirely
    const double e1 = std::sqrt(dt * 0.25 * (1 + 4 + 9 + 16));
    CHECK(m.e_f == doctest::Approx(e1).epsilon(1e-14));
    CHECK(m.r_f == doctest::Approx(1.0).epsilon(1e-14)); // max_v denominators coincide
  }

  SUBCASE("length mismatch is rejected") {
    CHECK_THROWS_AS(error_metrics({a}, {a, a}, {}, {}, {}, {}, dt, mass),
                    std::invalid_argument);
  }
}

TEST_CASE("pod baseline") {
  Matrix snaps(6, 3);
  snaps.col(0) = Vector::LinSpaced(6, 1, 6);
  snaps.col(1) = 2.0 * snaps.col(0);
  snaps.col(2) = Vector::Ones(6);

  SUBCASE("full rank reconstructs exactly") {
    auto pod = pod_baseline(snaps, 3);
    const Matrix recon = pod.basis.B * pod.basis.B.transpose() * snaps;
    CHECK((recon - snaps).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(pod.svd_wall_ms >= 0.0);
  }

  SUBCASE("rank one on rank-one data has zero residual") {
    Matrix r1(6, 2);
    r1.col(0) = snaps.col(0);
    r1.col(1) = 3.0 * snaps.col(0);
    auto pod = pod_baseline(r1, 1);
    const Matrix recon = pod.basis.B * pod.basis.B.transpose() * r1;
    CHECK((recon - r1).cwiseAbs().maxCoeff() < 1e-12);
  }

  SUBCASE("memory guard refuses oversized snapshot sets") {
    CHECK_THROWS_AS(pod_baseline(snaps, 2, 2), ConfigError);
  }
}

TEST_CASE("config parse and emit are idempotent") {
  const std::string text =
      "# a comment\n"
      "top = 1\n"
      "[mesh]\n"
      "nx = 40   # trailing comment\n"
      "ny = 40\n"
      "\n"
      "[greedy]\n"
      "tol_ratio = 1e-4\n";
  auto cfg = parse_config(text);
  CHECK(cfg.at("top") == "1");
  CHECK(cfg.at("mesh.nx") == "40");
  CHECK(cfg.at("greedy.tol_ratio") == "1e-4");

  const std::string emitted = emit_config(cfg);
  auto cfg2 = parse_config(emitted);
  CHECK(cfg2 == cfg);
  CHECK(emit_config(cfg2) == emitted);

  CHECK_THROWS_AS(parse_config("novalue\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[open\n"), ConfigError);
}

TEST_CASE("snapshot files round-trip bitwise") {
  const std::string path = "harness_snapshots.bin";
  auto mesh = build_mesh(0, 1, 0, 1, 3, 2);
  const int nv = 4, n_steps = 2;

  std::vector<Vector> rhos;
  std::vector<Matrix> gs;
  {
    FileSnapshotSink sink(path, mesh.n_dof, nv, n_steps);
    for (int n = 0; n <= n_steps; ++n) {
      Vector rho = Vector::LinSpaced(mesh.n_dof, n, n + 1.0);
      Matrix g = Matrix::Random(mesh.n_dof, nv);
      sink.on_level(n, rho, g);
      rhos.push_back(rho);
      gs.push_back(g);
    }
  }

  SnapshotReader reader(path);
  CHECK(reader.n_dof() == mesh.n_dof);
  CHECK(reader.n_v() == nv);
  CHECK(reader.n_steps() == n_steps);
  Vector rho;
  Matrix g;
  int got = 0;
  while (reader.next(rho, g)) {
    CHECK((rho - rhos[got]).cwiseAbs().maxCoeff() == 0.0);
    CHECK((g - gs[got]).cwiseAbs().maxCoeff() == 0.0);
    ++got;
  }
  CHECK(got == n_steps + 1);
  std::remove(path.c_str());
}

TEST_CASE("plot files carry stable headers") {
  const std::string dir = "harness_plot_test";
  fs::create_directories(dir);

  GreedyReport rep;
  rep.rows.push_back({1, 2, 3, 26, 1e-3, 2e-3, 0.1, 0.2, 12.5});
  write_greedy_report_csv(dir + "/report.csv", rep);
  std::ifstream r(dir + "/report.csv");
  std::string header;
  std::getline(r, header);
  CHECK(header == "iter,r_rho,r_g,nv_rq,ratio_rho,ratio_g,est_rho,est_f,wall_ms");

  RunMetrics m;
  write_metrics_csv(dir + "/metrics.csv", m);
  std::ifstream mm(dir + "/metrics.csv");
  std::getline(mm, header);
  CHECK(header == "e_rho,r_rho,e_vf,r_vf,e_f,r_f,compression_ratio,"
                  "wall_offline_ms,wall_online_ms,wall_reference_ms,wall_predict_ms");

  write_error_series_csv(dir + "/series.csv", {{0.1, 1e-3, 2e-3, 3e-3}});
  std::ifstream ss(dir + "/series.csv");
  std::getline(ss, header);
  CHECK(header == "t,err_rho,err_vf,err_f");

  write_node_list_csv(dir + "/nodes.csv", lebedev(6), 4);
  std::ifstream nn(dir + "/nodes.csv");
  std::getline(nn, header);
  CHECK(header == "vx,vy,vz,weight,origin");
  int initial = 0, greedy = 0;
  std::string line;
  while (std::getline(nn, line)) {
    if (line.find("initial") != std::string::npos) ++initial;
    if (line.find("greedy") != std::string::npos) ++greedy;
  }
  CHECK(initial == 4);
  CHECK(greedy == 2);

  auto mesh = build_mesh(0, 1, 0, 1, 3, 3);
  write_grid_svg(dir + "/grid.svg", mesh, Vector::LinSpaced(9, 0, 8));
  std::ifstream svg(dir + "/grid.svg");
  std::string svg_text((std::istreambuf_iterator<char>(svg)), {});
  CHECK(svg_text.rfind("<svg", 0) == 0);
  size_t rects = 0, pos = 0;
  while ((pos = svg_text.find("<rect", pos)) != std::string::npos) {
    ++rects;
    pos += 5;
  }
  CHECK(rects == 9);

  fs::remove_all(dir);
}

TEST_CASE("manifest hashes every artifact") {
  const std::string dir = "harness_manifest_test";
  fs::create_directories(dir);
  std::ofstream(dir + "/a.txt") << "alpha";
  std::ofstream(dir + "/b.txt") << "beta";
  write_manifest(dir, {"a.txt", "b.txt"});

  std::ifstream mf(dir + "/manifest.txt");
  std::string l1, l2;
  std::getline(mf, l1);
  std::getline(mf, l2);
  CHECK(l1.size() > 18);
  CHECK(l1.substr(16, 2) == "  ");
  CHECK(l1.substr(18) == "a.txt");
  CHECK(l2.substr(18) == "b.txt");
  CHECK(l1.substr(0, 16) != l2.substr(0, 16));
  CHECK(file_content_hash(dir + "/a.txt") == l1.substr(0, 16));

  fs::remove_all(dir);
}
