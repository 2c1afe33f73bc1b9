#pragma once

// Manufactured-solution refinement ladder: runs the forced problem on a
// sequence of cubic grids with dt proportional to h and reports the discrete
// L2 error at t_end against the exact manufactured field.

#include <vector>

#include "zk/solver.hpp"

namespace zk {

struct MmsLevel {
  int n = 0;
  double h = 0.0;  // h_x
  double dt = 0.0;
  long steps = 0;
  double l2_error = 0.0;
  double order = 0.0;  // against the previous level; 0 for the first
};

struct MmsStudy {
  std::vector<MmsLevel> levels;
  bool exact = false;  // every error is zero (order undefined)
  bool monotone = true;
  double finest_order = 0.0;
};

/// base supplies params, t_end, nonlinear settings and the manufactured
/// descriptor; its grid sizes are ignored. dt_coarse is used on ladder[0] and
/// scaled by h / h_coarse (rounded to a whole number of steps) on finer levels.
/// Throws ValidationError for fewer than two levels or a non-increasing ladder.
MmsStudy run_mms_ladder(const SolverConfig& base, const std::vector<int>& ladder, double dt_coarse);

/// Discrete L2 norm of u - u_m(t).
double mms_l2_error(const Field3& u, const ManufacturedSolution& m, const PhysParams& p, double t);

}  // namespace zk
