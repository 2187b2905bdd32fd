#include "mmrb/presets.hpp"

#include <cmath>
#include <numbers>

namespace mmrb {

namespace {

constexpr double kPi = std::numbers::pi;

double anisotropic_u(const Vec3& v) {
  // azimuth in [0, 2pi)
  double phi = std::atan2(v.y, v.x);
  if (phi < 0.0) phi += 2.0 * kPi;
  if (v.x > 0.0 && v.y > 0.0) {
    const double d = kPi * kPi / 16.0 - (phi - kPi / 4.0) * (phi - kPi / 4.0);
    return d > 0.0 ? std::exp(-1.0 / d) : 0.0;
  }
  if (v.x < 0.0 && v.y < 0.0) {
    const double d = 9.0 * kPi * kPi / 16.0 - (phi + 3.0 * kPi / 4.0) * (phi + 3.0 * kPi / 4.0);
    return d != 0.0 ? -std::exp(-1.0 / d) : 0.0;
  }
  return 0.0;
}

double anisotropic_rho0(double x, double y) {
  const double r2 = x * x + y * y;
  return r2 < 0.5 ? std::exp(-1.0 / (0.5 - r2)) : 0.0;
}

// Lattice blocks on [0,5]^2: unit squares, absorbers on the checkerboard
// (i+j odd), a unit source square at the center block [2,3]^2.
bool lattice_absorber(double x, double y) {
  const int i = static_cast<int>(std::floor(x));
  const int j = static_cast<int>(std::floor(y));
  if (i < 0 || i > 4 || j < 0 || j > 4) return false;
  return (i + j) % 2 == 1;
}

Preset base_preset(const std::string& name, PresetScale scale) {
  Preset p;
  p.name = name;
  p.scale = scale;
  if (scale == PresetScale::paper) {
    p.n_train = 590;
    p.n_test = 2030;
  } else {
    p.n_train = 110;
    p.n_test = 194;
  }
  return p;
}

} // namespace

PresetScale parse_scale(const std::string& s) {
  if (s == "paper") return PresetScale::paper;
  if (s == "desk") return PresetScale::desk;
  throw ConfigError("unknown scale '" + s + "' (expected paper or desk)");
}

Preset preset(const std::string& name, PresetScale scale, double epsilon,
              double sigma_s_value) {
  const bool paper = scale == PresetScale::paper;

  if (name == "homogeneous") {
    Preset p = base_preset(name, scale);
    p.x0 = 0; p.x1 = 2; p.y0 = 0; p.y1 = 2;
    p.nx = p.ny = paper ? 80 : 40;
    p.problem.epsilon = epsilon > 0.0 ? epsilon : 1.0;
    p.problem.sigma_s = [](double, double) { return 1.0; };
    p.problem.sigma_a = [](double, double) { return 0.0; };
    p.problem.source = [](double x, double y) {
      return std::exp(-100.0 * ((x - 1.0) * (x - 1.0) + (y - 1.0) * (y - 1.0)));
    };
    p.problem.final_time = p.problem.epsilon < 0.1 ? 1.5 : 0.25;
    p.greedy.initial_lebedev_points = 26;
    p.greedy.tol_ratio = 1e-4;
    p.greedy.tol_error_rho = 0.01;
    p.greedy.tol_error_f = 0.02;
    return p;
  }

  if (name == "anisotropic") {
    Preset p = base_preset(name, scale);
    p.x0 = -1; p.x1 = 1; p.y0 = -1; p.y1 = 1;
    p.nx = p.ny = paper ? 80 : 40;
    p.problem.epsilon = epsilon > 0.0 ? epsilon : 1.0;
    const double ss = sigma_s_value;
    p.problem.sigma_s = [ss](double, double) { return ss; };
    p.problem.sigma_a = [](double, double) { return 0.0; };
    p.problem.source = nullptr;
    p.problem.initial_rho = anisotropic_rho0;
    p.problem.initial_g = [](double x, double y, const Vec3& v) {
      return anisotropic_u(v) * anisotropic_rho0(x, y);
    };
    p.problem.final_time = 0.5;
    p.greedy.initial_lebedev_points = 26;
    p.greedy.tol_ratio = 1e-4;
    p.greedy.tol_error_rho = 0.0125;
    p.greedy.tol_error_f = 0.0125;
    return p;
  }

  if (name == "multiscale") {
    Preset p = base_preset(name, scale);
    p.x0 = -1; p.x1 = 1; p.y0 = -1; p.y1 = 1;
    p.nx = p.ny = paper ? 80 : 40;
    p.problem.epsilon = epsilon > 0.0 ? epsilon : 0.01;
    p.problem.sigma_s = [](double x, double y) {
      const double r = std::sqrt(x * x + y * y);
      if (r >= 1.0) return 1.0;
      const double r4 = r * r * r * r;
      const double a = r + std::numbers::sqrt2;
      const double b = r - std::numbers::sqrt2;
      return 0.999 * r4 * a * a * b * b + 0.001;
    };
    p.problem.sigma_a = [](double, double) { return 0.0; };
    p.problem.source = nullptr;
    p.problem.initial_rho = [](double x, double y) {
      return 5.0 / kPi * std::exp(-25.0 * (x * x + y * y));
    };
    p.problem.final_time = 0.05;
    p.greedy.initial_lebedev_points = 50;
    p.greedy.tol_ratio = 1e-4;
    p.greedy.tol_error_rho = 0.015;
    p.greedy.tol_error_f = 0.025;
    return p;
  }

  if (name == "lattice") {
    Preset p = base_preset(name, scale);
    p.x0 = 0; p.x1 = 5; p.y0 = 0; p.y1 = 5;
    p.nx = p.ny = paper ? 100 : 40;
    p.problem.epsilon = epsilon > 0.0 ? epsilon : 1.0;
    p.problem.sigma_s = [](double x, double y) { return lattice_absorber(x, y) ? 0.0 : 1.0; };
    p.problem.sigma_a = [](double x, double y) { return lattice_absorber(x, y) ? 100.0 : 0.0; };
    p.problem.source = [](double x, double y) {
      return (std::abs(x - 2.5) < 0.5 && std::abs(y - 2.5) < 0.5) ? 1.0 : 0.0;
    };
    p.problem.final_time = 1.7;
    p.greedy.initial_lebedev_points = 50;
    p.greedy.tol_ratio = 1e-3;
    p.greedy.tol_error_rho = 0.015;
    p.greedy.tol_error_f = 0.03;
    return p;
  }

  throw ConfigError("unknown preset '" + name +
                    "' (available: homogeneous, anisotropic, multiscale, lattice)");
}

} // namespace mmrb
