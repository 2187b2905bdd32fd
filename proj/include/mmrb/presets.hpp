#pragma once

#include <string>

#include "mmrb/greedy.hpp"

namespace mmrb {

enum class PresetScale { paper, desk };

/// A fully specified benchmark configuration. Desk scale keeps every
/// algorithmic path of the paper-scale setup but shrinks the mesh to at most
/// 40x40 cells and the angular sets to 110 training / 194 test nodes so a
/// full run finishes in minutes.
struct Preset {
  std::string name;
  PresetScale scale = PresetScale::desk;
  ProblemDefinition problem;
  double x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  int nx = 1, ny = 1;
  int n_train = 110;
  int n_test = 194;
  GreedyConfig greedy;

  SpatialMesh mesh() const { return build_mesh(x0, x1, y0, y1, nx, ny); }
};

/// Returns the named benchmark: "homogeneous", "anisotropic", "multiscale"
/// or "lattice". epsilon <= 0 selects the preset default. sigma_s_value
/// applies to the anisotropic case only (the benchmark varies it).
Preset preset(const std::string& name, PresetScale scale, double epsilon = -1.0,
              double sigma_s_value = 1.0);

PresetScale parse_scale(const std::string& s);

} // namespace mmrb
