#pragma once

// Closed-form constants of the decay theorem for the box IBVP, the hypothesis
// certificate built from them, and the exponential envelopes the simulated
// functionals are compared against.

#include <string_view>

#include "zk/grid.hpp"

namespace zk {

struct PhysParams {
  double c_s = 1.0;
  double L = 1.0;
  double B_y = 1.0;
  double B_z = 1.0;

  /// Throws ValidationError unless every field is finite and strictly positive.
  void validate() const;
};

/// Which of the two printed values of C1 to use. theorem_statement is
/// 1 + c_s + (2^11/3)||u0||^4; estimate_iii is 2/5 of that.
enum class C1Convention { theorem_statement, estimate_iii };

std::string_view to_string(C1Convention c) noexcept;
/// Throws ValidationError for unknown names.
C1Convention parse_c1_convention(std::string_view name);

struct TheoryConstants {
  double K1 = 0.0;
  double K2 = 0.0;
  double K3 = 0.0;
  double K4 = 0.0;
  double C1 = 0.0;
  double chi = 0.0;
  C1Convention c1_convention = C1Convention::theorem_statement;
};

double c1_value(double c_s, double u0_l2, C1Convention convention);

TheoryConstants compute_constants(const PhysParams& p, double u0_l2,
                                  C1Convention convention = C1Convention::theorem_statement);

struct Condition {
  bool pass = false;
  double margin = 0.0;  // signed; pass iff margin >= 0
};

struct HypothesisCertificate {
  Condition cond_K2;  // K2 - 4 c_s
  Condition cond_u0;  // K2/(4 K3) - ||u0||^4
  Condition cond_J0;  // K2/(4 K4) - J0^2
  bool overall = false;
};

HypothesisCertificate check_hypotheses(const TheoryConstants& c, double c_s, double u0_l2, double J0);

struct CompatibilityReport {
  double residual = 0.0;   // max |d_x u0| on the face x = L
  double tolerance = 0.0;  // 10 h_x^2 max_a ||d_a u0||_inf
  bool ok = false;
};

/// u0 must carry the dirichlet_all tag; the x = L Neumann residual is measured
/// with the one-sided stencil.
CompatibilityReport check_compatibility(const Field3& u0);

/// ((1+x), u0^2 + [(c_s+u0) u0_x + Lap u0_x]^2). Throws CompatibilityError
/// (carrying the residual) for incompatible data.
double compute_J0(const Field3& u0, const PhysParams& p);

/// initial_value * exp(-rate * t). Throws ValidationError for t < 0.
double decay_envelope(double initial_value, double rate, double t);

}  // namespace zk
