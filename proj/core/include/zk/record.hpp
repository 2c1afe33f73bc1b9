#pragma once

#include <array>

namespace zk {

/// One row of the functional time series. Every entry is a finite, nonnegative
/// quadrature value at time t.
struct DiagnosticsRecord {
  double t = 0.0;
  double l2_sq = 0.0;        // ||u||^2
  double w_l2_sq = 0.0;      // ((1+x), u^2)
  double trace_x0 = 0.0;     // int_S u_x^2(0,y,z)
  double trace_accum = 0.0;  // int_0^t int_S u_x^2(0,y,z,tau)
  double ux_sq = 0.0;
  double uy_sq = 0.0;
  double uz_sq = 0.0;
  double h2_sq = 0.0;      // ||u||_{H^2}^2
  double ut_w_sq = 0.0;    // ((1+x), u_t^2), u_t from the equation
  double second_yz = 0.0;  // ((1+x), u_yy^2 + u_zz^2 + u_yz^2)
  double uxx_sq = 0.0;
  std::array<double, 2> traces_2nd{};  // u_xy^2, u_xz^2 on x = 0
  std::array<double, 3> traces_3rd{};  // u_xyy^2, u_xzz^2, u_xyz^2 on x = 0
};

}  // namespace zk
