#pragma once

// Implicit Crank-Nicolson operator for the linear part of the equation,
//
//   A u = c_s u_x + (Lap u)_x,
//
// restricted to interior nodes. Dirichlet data on all faces and u_x(L) = 0
// close the stencils:
//   * y and z second differences are the 3-point Dirichlet Laplacians;
//   * d/dx is the centered difference with zero boundary neighbours;
//   * d^3/dx^3 is the centered 5-point stencil, replaced at the first interior
//     node by the second-order one-sided stencil on nodes 0..4, and at the last
//     interior node closed through the ghost value u_{n} = u_{n-2} from the
//     centered form of u_x(L) = 0.
//
// The y/z Laplacians are diagonalised exactly by the type-I discrete sine
// transform, which splits (I + dt/2 A) into one banded x-system per (y,z) mode.
// Each banded system is LU-factored once; solve() reuses the factors.

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "zk/grid.hpp"

namespace zk {

/// Interior-node storage used by the propagator: x slowest, then z, then y.
struct InteriorLayout {
  int m_x = 0;
  int m_y = 0;
  int m_z = 0;

  explicit InteriorLayout(const Grid3& g) : m_x(g.n_x - 2), m_y(g.n_y - 2), m_z(g.n_z - 2) {}

  std::size_t size() const noexcept {
    return static_cast<std::size_t>(m_x) * static_cast<std::size_t>(m_y) * static_cast<std::size_t>(m_z);
  }
  std::size_t slice() const noexcept { return static_cast<std::size_t>(m_y) * static_cast<std::size_t>(m_z); }
  /// a, b, c are zero-based interior indices (node i = a + 1, ...).
  std::size_t index(int a, int b, int c) const noexcept {
    return static_cast<std::size_t>(a) * slice() + static_cast<std::size_t>(c) * static_cast<std::size_t>(m_y) +
           static_cast<std::size_t>(b);
  }
};

/// Copies the interior of a field into propagator layout.
std::vector<double> gather_interior(const Field3& f);
/// Builds a dirichlet_all field from interior values.
Field3 scatter_interior(const Grid3& g, std::span<const double> interior);

class LinearPropagator {
 public:
  /// Throws ValidationError for dt <= 0 and SingularSystemError if any mode
  /// matrix cannot be factored.
  LinearPropagator(const Grid3& grid, double c_s, double dt);
  ~LinearPropagator();
  LinearPropagator(LinearPropagator&&) noexcept;
  LinearPropagator& operator=(LinearPropagator&&) noexcept;
  LinearPropagator(const LinearPropagator&) = delete;
  LinearPropagator& operator=(const LinearPropagator&) = delete;

  const Grid3& grid() const noexcept { return grid_; }
  const InteriorLayout& layout() const noexcept { return layout_; }
  double dt() const noexcept { return dt_; }
  double c_s() const noexcept { return c_s_; }

  /// out = A u, evaluated with the physical-space stencils.
  void apply(std::span<const double> u, std::span<double> out) const;

  /// Solves (I + dt/2 A) u = rhs. Safe to call concurrently.
  void solve(std::span<const double> rhs, std::span<double> u) const;

  /// -(1/2) d/dx (v^2) with the same centered x-difference as A.
  void nonlinear_term(std::span<const double> v, std::span<double> out) const;

 private:
  struct Plan;

  Grid3 grid_;
  InteriorLayout layout_;
  double c_s_;
  double dt_;
  std::vector<double> factors_;  // banded LU per mode, LAPACK layout
  std::vector<int> pivots_;
  std::unique_ptr<Plan> plan_;
};

}  // namespace zk
