#include "zk/ineq.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "zk/errors.hpp"

namespace zk {

double theta(double q) {
  if (!(q >= 2.0 && q <= 6.0)) {
    std::ostringstream msg;
    msg << "interpolation exponent q=" << q << " outside [2, 6]";
    throw ValidationError(msg.str());
  }
  return 3.0 * (0.5 - 1.0 / q);
}

namespace {

double checked_l2_sq(const Field3& f) {
  if (f.tag() != BcTag::dirichlet_all) throw ValidationError("inequality checks need a zero-boundary field");
  const double s = l2_sq(f);
  if (!(s > 0.0)) throw ValidationError("inequality ratio is undefined for the zero field");
  return s;
}

}  // namespace

double steklov_ratio(const Field3& f, Axis axis) {
  const double denom = checked_l2_sq(f);
  return l2_sq(deriv(f, axis)) / denom;
}

double steklov_bound(const Grid3& g, Axis axis) {
  const double side = g.length(axis);
  return std::numbers::pi * std::numbers::pi / (side * side);
}

double interpolation_ratio(const Field3& f, double q) {
  const double th = theta(q);
  const double f2 = std::sqrt(checked_l2_sq(f));
  const double grad = std::sqrt(grad_sq(f));
  const double rhs = std::pow(4.0, th) * std::pow(grad, th) * std::pow(f2, 1.0 - th);
  return lq_norm(f, q) / rhs;
}

std::vector<SineMode> RandomSineFields::next_modes() {
  std::mt19937_64 rng(state_);
  state_ = rng();
  std::uniform_int_distribution<int> count(1, 5);
  std::uniform_int_distribution<int> wave(1, 4);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  std::vector<SineMode> modes(static_cast<std::size_t>(count(rng)));
  for (SineMode& m : modes) {
    m.p = wave(rng);
    m.q = wave(rng);
    m.r = wave(rng);
    m.coefficient = coef(rng);
  }
  return modes;
}

Field3 RandomSineFields::next(const Grid3& g) { return sine_field(g, next_modes()); }

Field3 sine_field(const Grid3& g, const std::vector<SineMode>& modes) {
  const double px = std::numbers::pi / g.L;
  const double py = std::numbers::pi / g.B_y;
  const double pz = std::numbers::pi / g.B_z;
  return Field3::sample(
      g,
      [&](double x, double y, double z) {
        double s = 0.0;
        for (const SineMode& m : modes) {
          s += m.coefficient * std::sin(m.p * px * x) * std::sin(m.q * py * y) * std::sin(m.r * pz * z);
        }
        return s;
      },
      BcTag::dirichlet_all);
}

IneqReport steklov_suite(const Grid3& g, Axis axis, int n_samples, std::uint64_t seed, double slack_factor) {
  if (n_samples < 1) throw ValidationError("suite needs at least one sample");
  if (!(slack_factor >= 0.0)) throw ValidationError("slack factor must be >= 0");
  const double h = g.spacing(axis);
  const double relax = slack_factor * h * h;
  if (!(relax < 1.0)) throw ValidationError("Steklov slack factor * h^2 must be < 1");

  const double bound = steklov_bound(g, axis);
  IneqReport rep;
  rep.n_samples = n_samples;
  rep.tolerance = relax / (1.0 - relax);
  RandomSineFields gen(seed);
  for (int s = 0; s < n_samples; ++s) {
    const double ratio = bound / steklov_ratio(gen.next(g), axis);
    if (ratio > rep.worst_ratio) {
      rep.worst_ratio = ratio;
      rep.worst_sample_id = s;
    }
  }
  rep.pass = rep.worst_ratio <= 1.0 + rep.tolerance;
  return rep;
}

IneqReport interpolation_suite(const Grid3& g, double q, int n_samples, std::uint64_t seed, double tolerance) {
  if (n_samples < 1) throw ValidationError("suite needs at least one sample");
  IneqReport rep;
  rep.n_samples = n_samples;
  rep.tolerance = tolerance;
  RandomSineFields gen(seed);
  for (int s = 0; s < n_samples; ++s) {
    const double ratio = interpolation_ratio(gen.next(g), q);
    if (ratio > rep.worst_ratio) {
      rep.worst_ratio = ratio;
      rep.worst_sample_id = s;
    }
  }
  rep.pass = rep.worst_ratio <= 1.0 + rep.tolerance;
  return rep;
}

}  // namespace zk
