#pragma once

// Uniform collocated mesh on the box (0,L) x (0,B_y) x (0,B_z), scalar fields
// sampled on its nodes, and the finite-difference / quadrature machinery used
// by every other module. All stencils are second order.

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace zk {

enum class Axis { x = 0, y = 1, z = 2 };

inline constexpr std::array<Axis, 3> kAxes{Axis::x, Axis::y, Axis::z};

/// Boundary condition a field is supposed to satisfy.
enum class BcTag {
  dirichlet_all,  // zero on every face of the box
  free,
};

struct Grid3 {
  double L = 1.0;
  double B_y = 1.0;
  double B_z = 1.0;
  int n_x = 5;
  int n_y = 5;
  int n_z = 5;
  double h_x = 0.25;
  double h_y = 0.25;
  double h_z = 0.25;

  static constexpr int kMinNodes = 5;

  std::size_t size() const noexcept {
    return static_cast<std::size_t>(n_x) * static_cast<std::size_t>(n_y) *
           static_cast<std::size_t>(n_z);
  }

  /// Lexicographic node index, x fastest.
  std::size_t index(int i, int j, int k) const noexcept {
    return static_cast<std::size_t>(i) +
           static_cast<std::size_t>(n_x) *
               (static_cast<std::size_t>(j) + static_cast<std::size_t>(n_y) * static_cast<std::size_t>(k));
  }

  double x(int i) const noexcept { return i * h_x; }
  double y(int j) const noexcept { return j * h_y; }
  double z(int k) const noexcept { return k * h_z; }

  int count(Axis a) const noexcept;
  double spacing(Axis a) const noexcept;
  double length(Axis a) const noexcept;
  /// Distance between consecutive entries along the axis in the flat array.
  std::size_t stride(Axis a) const noexcept;

  bool is_boundary(int i, int j, int k) const noexcept {
    return i == 0 || j == 0 || k == 0 || i == n_x - 1 || j == n_y - 1 || k == n_z - 1;
  }

  bool operator==(const Grid3&) const = default;
};

/// Throws ValidationError for non-positive lengths or fewer than 5 nodes per axis.
Grid3 make_grid(double L, double B_y, double B_z, int n_x, int n_y, int n_z);

class Field3 {
 public:
  /// Zero field.
  Field3(const Grid3& grid, BcTag tag);
  /// Takes ownership of node values. Validates length, finiteness and, for
  /// dirichlet_all, that every boundary value is exactly zero.
  Field3(const Grid3& grid, std::vector<double> values, BcTag tag);

  /// Samples fn(x, y, z) at every node. With dirichlet_all the boundary nodes
  /// are set to exactly zero regardless of fn.
  static Field3 sample(const Grid3& grid, const std::function<double(double, double, double)>& fn,
                       BcTag tag);

  const Grid3& grid() const noexcept { return grid_; }
  BcTag tag() const noexcept { return tag_; }
  std::span<const double> values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }

  double operator()(int i, int j, int k) const noexcept { return values_[grid_.index(i, j, k)]; }
  double operator[](std::size_t n) const noexcept { return values_[n]; }

  double max_abs() const noexcept;

  /// Same values, relabelled as free (always valid).
  Field3 as_free() const;

  /// Moves the node values out.
  std::vector<double> release() && { return std::move(values_); }

 private:
  Grid3 grid_;
  std::vector<double> values_;
  BcTag tag_;
};

// Pointwise arithmetic. The result keeps dirichlet_all only when every operand has it.
Field3 operator+(const Field3& a, const Field3& b);
Field3 operator-(const Field3& a, const Field3& b);
Field3 operator*(double s, const Field3& a);
Field3 hadamard(const Field3& a, const Field3& b);

/// First derivative along an axis: centered in the interior, 3-point one-sided at the ends.
Field3 deriv(const Field3& f, Axis axis);

/// d^2 f / (da db). Repeated axes use the 3-point second difference (4-point
/// one-sided at the ends); mixed pairs compose deriv.
Field3 second_deriv(const Field3& f, Axis a, Axis b);

Field3 laplacian(const Field3& f);

/// Tensor-product trapezoidal rule over the box.
double integrate(const Field3& f);

/// Integral of f^2 over the box.
double l2_sq(const Field3& f);

/// Integral of (1+x) f^2 over the box.
double weighted_l2_sq(const Field3& f);

enum class NormKind { L2, L3, L4, H1, H2 };

double norm(const Field3& f, NormKind kind);

/// L^q norm for real q >= 1.
double lq_norm(const Field3& f, double q);

/// Squared L2 norm of the gradient, sum of ||f_a||^2 over the three axes.
double grad_sq(const Field3& f);

enum class Face { x0, xL };

/// Tangential derivative orders taken before the normal x-derivative in a face trace.
struct TangentialDerivative {
  int y = 0;
  int z = 0;
};

/// Integral over the face x = 0 of (f_x)^2, f_x from the 3-point one-sided stencil.
double trace_x0_sq(const Field3& f);

/// Integral over a face of (d_x d_y^p d_z^q f)^2. The tangential derivatives
/// are taken with deriv/second_deriv on the whole field, then the x-derivative
/// with the one-sided stencil at the face.
double trace_face_sq(const Field3& f, Face face, TangentialDerivative tangential);

/// Discrete x-derivative on the face as a (n_y x n_z) array, j fastest.
std::vector<double> face_x_derivative(const Field3& f, Face face);

}  // namespace zk
