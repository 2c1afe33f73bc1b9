#pragma once

// Numerical checks of the two functional inequalities the decay argument rests
// on: the Steklov (Poincare) lower bound ||v_a||^2 >= (pi/side)^2 ||v||^2 for
// fields vanishing on the boundary, and the interpolation inequality
// ||u||_{L^q} <= 4^theta ||grad u||^theta ||u||^{1-theta}, theta = 3(1/2 - 1/q).

#include <cstdint>
#include <vector>

#include "zk/grid.hpp"

namespace zk {

/// 3(1/2 - 1/q); throws ValidationError outside 2 <= q <= 6.
double theta(double q);

/// ||d_axis f||^2 / ||f||^2. Throws ValidationError for the zero field or a free tag.
double steklov_ratio(const Field3& f, Axis axis);

/// (pi / side)^2 for the axis.
double steklov_bound(const Grid3& g, Axis axis);

/// ||f||_{L^q} / (4^theta ||grad f||^theta ||f||^{1-theta}).
double interpolation_ratio(const Field3& f, double q);

/// One tensor sine mode coefficient * sin(p pi x/L) sin(q pi y/B_y) sin(r pi z/B_z).
struct SineMode {
  int p = 1;
  int q = 1;
  int r = 1;
  double coefficient = 1.0;
};

/// Fixed-seed source of smooth fields vanishing on the box boundary: sums of
/// 1..5 tensor sine modes, wavenumbers 1..4 per axis, coefficients in [-1, 1].
class RandomSineFields {
 public:
  explicit RandomSineFields(std::uint64_t seed) : state_(seed) {}
  std::vector<SineMode> next_modes();
  Field3 next(const Grid3& g);

 private:
  std::uint64_t state_;
};

Field3 sine_field(const Grid3& g, const std::vector<SineMode>& modes);

struct IneqReport {
  int n_samples = 0;
  double worst_ratio = 0.0;  // max over samples of lhs/rhs
  int worst_sample_id = -1;
  double tolerance = 0.0;
  bool pass = false;  // worst_ratio <= 1 + tolerance
};

/// For every sample, lhs/rhs = (pi/side)^2 / steklov_ratio. The discrete
/// Rayleigh quotient undershoots by O(h^2), so the suite accepts
/// steklov_ratio >= (pi/side)^2 (1 - slack_factor h^2).
IneqReport steklov_suite(const Grid3& g, Axis axis, int n_samples, std::uint64_t seed, double slack_factor = 5.0);

/// Worst interpolation_ratio over the samples; pass iff <= 1 + tolerance.
IneqReport interpolation_suite(const Grid3& g, double q, int n_samples, std::uint64_t seed,
                               double tolerance = 1e-8);

}  // namespace zk
