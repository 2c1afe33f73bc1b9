#include "zk/grid.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "zk/errors.hpp"

namespace zk {

int Grid3::count(Axis a) const noexcept {
  switch (a) {
    case Axis::x: return n_x;
    case Axis::y: return n_y;
    case Axis::z: return n_z;
  }
  return 0;
}

double Grid3::spacing(Axis a) const noexcept {
  switch (a) {
    case Axis::x: return h_x;
    case Axis::y: return h_y;
    case Axis::z: return h_z;
  }
  return 0.0;
}

double Grid3::length(Axis a) const noexcept {
  switch (a) {
    case Axis::x: return L;
    case Axis::y: return B_y;
    case Axis::z: return B_z;
  }
  return 0.0;
}

std::size_t Grid3::stride(Axis a) const noexcept {
  switch (a) {
    case Axis::x: return 1;
    case Axis::y: return static_cast<std::size_t>(n_x);
    case Axis::z: return static_cast<std::size_t>(n_x) * static_cast<std::size_t>(n_y);
  }
  return 0;
}

Grid3 make_grid(double L, double B_y, double B_z, int n_x, int n_y, int n_z) {
  const auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
  if (!positive(L) || !positive(B_y) || !positive(B_z)) {
    std::ostringstream msg;
    msg << "box lengths must be positive and finite (L=" << L << ", B_y=" << B_y << ", B_z=" << B_z
        << ")";
    throw ValidationError(msg.str());
  }
  if (n_x < Grid3::kMinNodes || n_y < Grid3::kMinNodes || n_z < Grid3::kMinNodes) {
    std::ostringstream msg;
    msg << "need at least " << Grid3::kMinNodes << " nodes per axis (got " << n_x << ", " << n_y
        << ", " << n_z << ")";
    throw ValidationError(msg.str());
  }
  Grid3 g;
  g.L = L;
  g.B_y = B_y;
  g.B_z = B_z;
  g.n_x = n_x;
  g.n_y = n_y;
  g.n_z = n_z;
  g.h_x = L / (n_x - 1);
  g.h_y = B_y / (n_y - 1);
  g.h_z = B_z / (n_z - 1);
  return g;
}

// ---------------------------------------------------------------------------
// Field3

Field3::Field3(const Grid3& grid, BcTag tag) : grid_(grid), values_(grid.size(), 0.0), tag_(tag) {}

Field3::Field3(const Grid3& grid, std::vector<double> values, BcTag tag)
    : grid_(grid), values_(std::move(values)), tag_(tag) {
  if (values_.size() != grid_.size()) {
    std::ostringstream msg;
    msg << "field has " << values_.size() << " values, grid has " << grid_.size() << " nodes";
    throw ValidationError(msg.str());
  }
  for (double v : values_) {
    if (!std::isfinite(v)) throw ValidationError("field contains a non-finite value");
  }
  if (tag_ == BcTag::dirichlet_all) {
    for (int k = 0; k < grid_.n_z; ++k) {
      for (int j = 0; j < grid_.n_y; ++j) {
        for (int i = 0; i < grid_.n_x; ++i) {
          if (grid_.is_boundary(i, j, k) && values_[grid_.index(i, j, k)] != 0.0) {
            std::ostringstream msg;
            msg << "dirichlet field is nonzero at boundary node (" << i << ", " << j << ", " << k
                << ")";
            throw ValidationError(msg.str());
          }
        }
      }
    }
  }
}

Field3 Field3::sample(const Grid3& grid, const std::function<double(double, double, double)>& fn,
                      BcTag tag) {
  std::vector<double> v(grid.size(), 0.0);
  for (int k = 0; k < grid.n_z; ++k) {
    for (int j = 0; j < grid.n_y; ++j) {
      for (int i = 0; i < grid.n_x; ++i) {
        if (tag == BcTag::dirichlet_all && grid.is_boundary(i, j, k)) continue;
        v[grid.index(i, j, k)] = fn(grid.x(i), grid.y(j), grid.z(k));
      }
    }
  }
  return Field3(grid, std::move(v), tag);
}

double Field3::max_abs() const noexcept {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

Field3 Field3::as_free() const {
  Field3 out = *this;
  out.tag_ = BcTag::free;
  return out;
}

namespace {

void require_same_grid(const Field3& a, const Field3& b) {
  if (!(a.grid() == b.grid())) throw ValidationError("fields live on different grids");
}

BcTag combine_tags(const Field3& a, const Field3& b) {
  return (a.tag() == BcTag::dirichlet_all && b.tag() == BcTag::dirichlet_all) ? BcTag::dirichlet_all
                                                                              : BcTag::free;
}

template <class Op>
Field3 zip(const Field3& a, const Field3& b, Op op) {
  require_same_grid(a, b);
  std::vector<double> out(a.size());
  for (std::size_t n = 0; n < out.size(); ++n) out[n] = op(a[n], b[n]);
  return Field3(a.grid(), std::move(out), combine_tags(a, b));
}

// Position of a flat index along an axis.
int coordinate(const Grid3& g, std::size_t n, Axis a) {
  switch (a) {
    case Axis::x: return static_cast<int>(n % static_cast<std::size_t>(g.n_x));
    case Axis::y:
      return static_cast<int>((n / static_cast<std::size_t>(g.n_x)) % static_cast<std::size_t>(g.n_y));
    case Axis::z:
      return static_cast<int>(n / (static_cast<std::size_t>(g.n_x) * static_cast<std::size_t>(g.n_y)));
  }
  return 0;
}

double trapezoid_weight(int p, int count, double h) {
  return (p == 0 || p == count - 1) ? 0.5 * h : h;
}

}  // namespace

Field3 operator+(const Field3& a, const Field3& b) {
  return zip(a, b, [](double u, double v) { return u + v; });
}

Field3 operator-(const Field3& a, const Field3& b) {
  return zip(a, b, [](double u, double v) { return u - v; });
}

Field3 operator*(double s, const Field3& a) {
  std::vector<double> out(a.values().begin(), a.values().end());
  for (double& v : out) v *= s;
  return Field3(a.grid(), std::move(out), a.tag());
}

Field3 hadamard(const Field3& a, const Field3& b) {
  return zip(a, b, [](double u, double v) { return u * v; });
}

// ---------------------------------------------------------------------------
// Differential operators

Field3 deriv(const Field3& f, Axis axis) {
  const Grid3& g = f.grid();
  const int n = g.count(axis);
  const auto s = static_cast<std::ptrdiff_t>(g.stride(axis));
  const double inv2h = 1.0 / (2.0 * g.spacing(axis));
  const auto v = f.values();
  std::vector<double> out(v.size());
  for (std::size_t idx = 0; idx < v.size(); ++idx) {
    const int p = coordinate(g, idx, axis);
    const auto q = static_cast<std::ptrdiff_t>(idx);
    if (p == 0) {
      out[idx] = (-3.0 * v[q] + 4.0 * v[q + s] - v[q + 2 * s]) * inv2h;
    } else if (p == n - 1) {
      out[idx] = (3.0 * v[q] - 4.0 * v[q - s] + v[q - 2 * s]) * inv2h;
    } else {
      out[idx] = (v[q + s] - v[q - s]) * inv2h;
    }
  }
  return Field3(g, std::move(out), BcTag::free);
}

namespace {

Field3 second_deriv_same(const Field3& f, Axis axis) {
  const Grid3& g = f.grid();
  const int n = g.count(axis);
  const auto s = static_cast<std::ptrdiff_t>(g.stride(axis));
  const double h = g.spacing(axis);
  const double invh2 = 1.0 / (h * h);
  const auto v = f.values();
  std::vector<double> out(v.size());
  for (std::size_t idx = 0; idx < v.size(); ++idx) {
    const int p = coordinate(g, idx, axis);
    const auto q = static_cast<std::ptrdiff_t>(idx);
    if (p == 0) {
      out[idx] = (2.0 * v[q] - 5.0 * v[q + s] + 4.0 * v[q + 2 * s] - v[q + 3 * s]) * invh2;
    } else if (p == n - 1) {
      out[idx] = (2.0 * v[q] - 5.0 * v[q - s] + 4.0 * v[q - 2 * s] - v[q - 3 * s]) * invh2;
    } else {
      out[idx] = (v[q + s] - 2.0 * v[q] + v[q - s]) * invh2;
    }
  }
  return Field3(g, std::move(out), BcTag::free);
}

}  // namespace

Field3 second_deriv(const Field3& f, Axis a, Axis b) {
  if (a == b) return second_deriv_same(f, a);
  return deriv(deriv(f, a), b);
}

Field3 laplacian(const Field3& f) {
  Field3 out = second_deriv_same(f, Axis::x);
  out = out + second_deriv_same(f, Axis::y);
  return out + second_deriv_same(f, Axis::z);
}

// ---------------------------------------------------------------------------
// Quadrature and norms

namespace {

// Fixed-order weighted sum of pointwise integrand values g(n, x).
template <class Integrand>
double quadrature(const Grid3& g, Integrand integrand) {
  double total = 0.0;
  for (int k = 0; k < g.n_z; ++k) {
    const double wz = trapezoid_weight(k, g.n_z, g.h_z);
    double plane = 0.0;
    for (int j = 0; j < g.n_y; ++j) {
      const double wy = trapezoid_weight(j, g.n_y, g.h_y);
      double line = 0.0;
      for (int i = 0; i < g.n_x; ++i) {
        line += trapezoid_weight(i, g.n_x, g.h_x) * integrand(g.index(i, j, k), g.x(i));
      }
      plane += wy * line;
    }
    total += wz * plane;
  }
  return total;
}

}  // namespace

double integrate(const Field3& f) {
  const auto v = f.values();
  return quadrature(f.grid(), [&](std::size_t n, double) { return v[n]; });
}

double l2_sq(const Field3& f) {
  const auto v = f.values();
  return quadrature(f.grid(), [&](std::size_t n, double) { return v[n] * v[n]; });
}

double weighted_l2_sq(const Field3& f) {
  const auto v = f.values();
  return quadrature(f.grid(), [&](std::size_t n, double x) { return (1.0 + x) * v[n] * v[n]; });
}

double lq_norm(const Field3& f, double q) {
  if (!(q >= 1.0) || !std::isfinite(q)) throw ValidationError("L^q norm needs finite q >= 1");
  if (q == 2.0) return std::sqrt(l2_sq(f));
  const auto v = f.values();
  const double s = quadrature(f.grid(), [&](std::size_t n, double) { return std::pow(std::abs(v[n]), q); });
  return std::pow(s, 1.0 / q);
}

double grad_sq(const Field3& f) {
  double s = 0.0;
  for (Axis a : kAxes) s += l2_sq(deriv(f, a));
  return s;
}

double norm(const Field3& f, NormKind kind) {
  switch (kind) {
    case NormKind::L2: return std::sqrt(l2_sq(f));
    case NormKind::L3: return lq_norm(f, 3.0);
    case NormKind::L4: return lq_norm(f, 4.0);
    case NormKind::H1: return std::sqrt(l2_sq(f) + grad_sq(f));
    case NormKind::H2: {
      double s = l2_sq(f) + grad_sq(f);
      for (std::size_t a = 0; a < kAxes.size(); ++a) {
        for (std::size_t b = a; b < kAxes.size(); ++b) s += l2_sq(second_deriv(f, kAxes[a], kAxes[b]));
      }
      return std::sqrt(s);
    }
  }
  return 0.0;
}

// ---------------------------------------------------------------------------
// Face traces

std::vector<double> face_x_derivative(const Field3& f, Face face) {
  const Grid3& g = f.grid();
  const double inv2h = 1.0 / (2.0 * g.h_x);
  std::vector<double> out(static_cast<std::size_t>(g.n_y) * static_cast<std::size_t>(g.n_z));
  for (int k = 0; k < g.n_z; ++k) {
    for (int j = 0; j < g.n_y; ++j) {
      double d = 0.0;
      if (face == Face::x0) {
        d = (-3.0 * f(0, j, k) + 4.0 * f(1, j, k) - f(2, j, k)) * inv2h;
      } else {
        const int e = g.n_x - 1;
        d = (3.0 * f(e, j, k) - 4.0 * f(e - 1, j, k) + f(e - 2, j, k)) * inv2h;
      }
      out[static_cast<std::size_t>(j) + static_cast<std::size_t>(g.n_y) * static_cast<std::size_t>(k)] = d;
    }
  }
  return out;
}

namespace {

double face_integral_sq(const Grid3& g, const std::vector<double>& face_values) {
  double total = 0.0;
  for (int k = 0; k < g.n_z; ++k) {
    double line = 0.0;
    for (int j = 0; j < g.n_y; ++j) {
      const double d = face_values[static_cast<std::size_t>(j) + static_cast<std::size_t>(g.n_y) * static_cast<std::size_t>(k)];
      line += trapezoid_weight(j, g.n_y, g.h_y) * d * d;
    }
    total += trapezoid_weight(k, g.n_z, g.h_z) * line;
  }
  return total;
}

Field3 tangential(const Field3& f, Axis axis, int order) {
  switch (order) {
    case 0: return f;
    case 1: return deriv(f, axis);
    case 2: return second_deriv(f, axis, axis);
    default: throw ValidationError("tangential derivative order must be 0, 1 or 2");
  }
}

}  // namespace

double trace_x0_sq(const Field3& f) {
  return face_integral_sq(f.grid(), face_x_derivative(f, Face::x0));
}

double trace_face_sq(const Field3& f, Face face, TangentialDerivative t) {
  const Field3 g = tangential(tangential(f, Axis::y, t.y), Axis::z, t.z);
  return face_integral_sq(f.grid(), face_x_derivative(g, face));
}

}  // namespace zk
