#include "zk/theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>

#include "zk/errors.hpp"

namespace zk {

namespace {

bool positive(double v) { return std::isfinite(v) && v > 0.0; }

}  // namespace

void PhysParams::validate() const {
  if (!positive(c_s) || !positive(L) || !positive(B_y) || !positive(B_z)) {
    std::ostringstream msg;
    msg << "physical parameters must be finite and positive (c_s=" << c_s << ", L=" << L
        << ", B_y=" << B_y << ", B_z=" << B_z << ")";
    throw ValidationError(msg.str());
  }
}

std::string_view to_string(C1Convention c) noexcept {
  return c == C1Convention::theorem_statement ? "theorem_statement" : "estimate_iii";
}

C1Convention parse_c1_convention(std::string_view name) {
  if (name == "theorem_statement") return C1Convention::theorem_statement;
  if (name == "estimate_iii") return C1Convention::estimate_iii;
  throw ValidationError("unknown c1_convention '" + std::string(name) +
                        "' (expected theorem_statement or estimate_iii)");
}

double c1_value(double c_s, double u0_l2, C1Convention convention) {
  const double u4 = u0_l2 * u0_l2 * u0_l2 * u0_l2;
  const double base = 1.0 + c_s + (2048.0 / 3.0) * u4;
  return convention == C1Convention::theorem_statement ? base : 0.4 * base;
}

TheoryConstants compute_constants(const PhysParams& p, double u0_l2, C1Convention convention) {
  p.validate();
  if (!(u0_l2 >= 0.0) || !std::isfinite(u0_l2)) throw ValidationError("||u0|| must be finite and >= 0");

  constexpr double pi2 = std::numbers::pi * std::numbers::pi;
  const double one_plus_L = 1.0 + p.L;
  const double l2 = one_plus_L * one_plus_L;

  TheoryConstants c;
  c.c1_convention = convention;
  c.K1 = 131072.0 / 3.0;
  c.K2 = pi2 * (7.0 / (8.0 * p.B_y * p.B_y) + 7.0 / (8.0 * p.B_z * p.B_z) + 23.0 / (8.0 * p.L * p.L));
  c.C1 = c1_value(p.c_s, u0_l2, convention);
  // 3^3 2^16 = 1769472, 3^3 2^19 = 14155776
  c.K3 = 1769472.0 * l2 * l2 * (2.0 * c.C1 * c.C1 + 1.0);
  c.K4 = (14155776.0 / 25.0) * l2 * l2 * l2;
  c.chi = c.K2 / (4.0 * one_plus_L);
  return c;
}

HypothesisCertificate check_hypotheses(const TheoryConstants& c, double c_s, double u0_l2, double J0) {
  HypothesisCertificate cert;
  const double u4 = u0_l2 * u0_l2 * u0_l2 * u0_l2;
  cert.cond_K2.margin = c.K2 - 4.0 * c_s;
  cert.cond_u0.margin = c.K2 / (4.0 * c.K3) - u4;
  cert.cond_J0.margin = c.K2 / (4.0 * c.K4) - J0 * J0;
  for (Condition* cond : {&cert.cond_K2, &cert.cond_u0, &cert.cond_J0}) cond->pass = cond->margin >= 0.0;
  cert.overall = cert.cond_K2.pass && cert.cond_u0.pass && cert.cond_J0.pass;
  return cert;
}

CompatibilityReport check_compatibility(const Field3& u0) {
  if (u0.tag() != BcTag::dirichlet_all) {
    throw CompatibilityError("initial data must vanish on the boundary (dirichlet_all tag)",
                             std::numeric_limits<double>::infinity(), 0.0);
  }
  const Grid3& g = u0.grid();
  CompatibilityReport r;
  for (double d : face_x_derivative(u0, Face::xL)) r.residual = std::max(r.residual, std::abs(d));
  double grad_inf = 0.0;
  for (Axis a : kAxes) grad_inf = std::max(grad_inf, deriv(u0, a).max_abs());
  r.tolerance = 10.0 * g.h_x * g.h_x * grad_inf;
  r.ok = r.residual <= r.tolerance;
  return r;
}

double compute_J0(const Field3& u0, const PhysParams& p) {
  p.validate();
  const CompatibilityReport compat = check_compatibility(u0);
  if (!compat.ok) {
    std::ostringstream msg;
    msg << "initial data violates u_x(L)=0: residual " << compat.residual << " exceeds tolerance "
        << compat.tolerance;
    throw CompatibilityError(msg.str(), compat.residual, compat.tolerance);
  }
  const Field3 ux = deriv(u0, Axis::x);
  const Field3 lap_ux = laplacian(ux);
  std::vector<double> g(u0.size());
  for (std::size_t n = 0; n < g.size(); ++n) g[n] = (p.c_s + u0[n]) * ux[n] + lap_ux[n];
  const Field3 flux(u0.grid(), std::move(g), BcTag::free);
  return weighted_l2_sq(u0) + weighted_l2_sq(flux);
}

double decay_envelope(double initial_value, double rate, double t) {
  if (!(t >= 0.0)) throw ValidationError("envelope time must be >= 0");
  if (!(initial_value >= 0.0) || !(rate >= 0.0)) throw ValidationError("envelope needs initial >= 0, rate >= 0");
  return initial_value * std::exp(-rate * t);
}

}  // namespace zk
