#pragma once

namespace mmrb::detail {

// One symmetry orbit of the octahedral group. code selects the generator:
//   1: (1,0,0) permutations, 6 points
//   2: (0, 1/sqrt2, 1/sqrt2) type, 12 points
//   3: (1/sqrt3, 1/sqrt3, 1/sqrt3) type, 8 points
//   4: (a, a, b) with b = sqrt(1-2a^2), 24 points
//   5: (a, b, 0) with b = sqrt(1-a^2), 24 points
//   6: (a, b, c) with c = sqrt(1-a^2-b^2), 48 points
struct LebedevOrbit {
  int code;
  double w;
  double a;
  double b;
};

struct LebedevRule {
  int n_points;
  int exactness_degree;
  const LebedevOrbit* orbits;
  int n_orbits;
};

extern const LebedevRule kLebedevRules[];
extern const int kLebedevRuleCount;

} // namespace mmrb::detail
