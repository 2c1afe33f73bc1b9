#include "zk/linear_propagator.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>
#include <sstream>

#include "zk/errors.hpp"

extern "C" {
void dgbtrf_(const int* m, const int* n, const int* kl, const int* ku, double* ab, const int* ldab, int* ipiv,
             int* info);
void dgbtrs_(const char* trans, const int* n, const int* kl, const int* ku, const int* nrhs, const double* ab,
             const int* ldab, const int* ipiv, double* b, const int* ldb, int* info, std::size_t trans_len);
}

namespace zk {

namespace {

constexpr int kLower = 2;
constexpr int kUpper = 3;
constexpr int kLdab = 2 * kLower + kUpper + 1;

struct Entry {
  int col;
  double w;
};

// x-direction stencil rows over interior unknowns 0..m-1 (node = row + 1).
struct XStencil {
  std::vector<std::vector<Entry>> d1;
  std::vector<std::vector<Entry>> d3;
};

XStencil build_x_stencil(int m, double h) {
  const int n = m + 2;
  XStencil s;
  s.d1.resize(static_cast<std::size_t>(m));
  s.d3.resize(static_cast<std::size_t>(m));

  // Adds weight w on node `node` to row `row`; boundary nodes are zero and the
  // ghost node n is the reflection of node n-2.
  const auto add = [&](std::vector<Entry>& row, int node, double w) {
    if (node == n) node = n - 2;
    if (node <= 0 || node >= n - 1) return;
    const int col = node - 1;
    for (Entry& e : row) {
      if (e.col == col) {
        e.w += w;
        return;
      }
    }
    row.push_back({col, w});
  };

  const double c1 = 1.0 / (2.0 * h);
  const double c3 = 1.0 / (2.0 * h * h * h);
  for (int r = 0; r < m; ++r) {
    const int i = r + 1;
    auto& d1 = s.d1[static_cast<std::size_t>(r)];
    add(d1, i + 1, c1);
    add(d1, i - 1, -c1);

    auto& d3 = s.d3[static_cast<std::size_t>(r)];
    if (i == 1) {
      constexpr double w[5] = {-3.0, 10.0, -12.0, 6.0, -1.0};  // nodes 0..4
      for (int o = 0; o < 5; ++o) add(d3, o, w[o] * c3);
    } else {
      add(d3, i - 2, -c3);
      add(d3, i - 1, 2.0 * c3);
      add(d3, i + 1, -2.0 * c3);
      add(d3, i + 2, c3);
    }
  }
  return s;
}

// Eigenvalues of the negated 3-point Dirichlet second difference.
std::vector<double> dirichlet_eigenvalues(int m, double h) {
  std::vector<double> ev(static_cast<std::size_t>(m));
  for (int q = 0; q < m; ++q) {
    const double s = std::sin((q + 1) * std::numbers::pi / (2.0 * (m + 1)));
    ev[static_cast<std::size_t>(q)] = 4.0 * s * s / (h * h);
  }
  return ev;
}

std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

struct LinearPropagator::Plan {
  fftw_plan plan = nullptr;
  XStencil x;
  ~Plan() {
    if (plan != nullptr) {
      std::lock_guard lock(fftw_planner_mutex());
      fftw_destroy_plan(plan);
    }
  }
};

std::vector<double> gather_interior(const Field3& f) {
  const Grid3& g = f.grid();
  const InteriorLayout lay(g);
  std::vector<double> out(lay.size());
  for (int a = 0; a < lay.m_x; ++a)
    for (int c = 0; c < lay.m_z; ++c)
      for (int b = 0; b < lay.m_y; ++b) out[lay.index(a, b, c)] = f(a + 1, b + 1, c + 1);
  return out;
}

Field3 scatter_interior(const Grid3& g, std::span<const double> interior) {
  const InteriorLayout lay(g);
  std::vector<double> v(g.size(), 0.0);
  for (int a = 0; a < lay.m_x; ++a)
    for (int c = 0; c < lay.m_z; ++c)
      for (int b = 0; b < lay.m_y; ++b) v[g.index(a + 1, b + 1, c + 1)] = interior[lay.index(a, b, c)];
  return Field3(g, std::move(v), BcTag::dirichlet_all);
}

LinearPropagator::LinearPropagator(const Grid3& grid, double c_s, double dt)
    : grid_(grid), layout_(grid), c_s_(c_s), dt_(dt), plan_(std::make_unique<Plan>()) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ValidationError("time step must be positive and finite");
  if (!std::isfinite(c_s)) throw ValidationError("c_s must be finite");

  const int mx = layout_.m_x;
  const int my = layout_.m_y;
  const int mz = layout_.m_z;
  plan_->x = build_x_stencil(mx, grid_.h_x);

  const std::vector<double> ky = dirichlet_eigenvalues(my, grid_.h_y);
  const std::vector<double> kz = dirichlet_eigenvalues(mz, grid_.h_z);

  const std::size_t modes = layout_.slice();
  const std::size_t band = static_cast<std::size_t>(kLdab) * static_cast<std::size_t>(mx);
  factors_.assign(modes * band, 0.0);
  pivots_.assign(modes * static_cast<std::size_t>(mx), 0);

  const double half = 0.5 * dt_;
  for (int c = 0; c < mz; ++c) {
    for (int b = 0; b < my; ++b) {
      const std::size_t mode = static_cast<std::size_t>(c) * static_cast<std::size_t>(my) + static_cast<std::size_t>(b);
      double* ab = factors_.data() + mode * band;
      // Column-major band storage: A(r, col) -> ab[(kl + ku + r - col) + col * ldab].
      const auto put = [&](int r, int col, double w) {
        ab[static_cast<std::size_t>(kLower + kUpper + r - col) + static_cast<std::size_t>(col) * kLdab] += w;
      };
      const double d1_coeff = c_s_ - (ky[static_cast<std::size_t>(b)] + kz[static_cast<std::size_t>(c)]);
      for (int r = 0; r < mx; ++r) {
        put(r, r, 1.0);
        for (const Entry& e : plan_->x.d1[static_cast<std::size_t>(r)]) put(r, e.col, half * d1_coeff * e.w);
        for (const Entry& e : plan_->x.d3[static_cast<std::size_t>(r)]) put(r, e.col, half * e.w);
      }
      int info = 0;
      dgbtrf_(&mx, &mx, &kLower, &kUpper, ab, &kLdab, pivots_.data() + mode * static_cast<std::size_t>(mx), &info);
      if (info != 0) {
        std::ostringstream msg;
        msg << "implicit mode matrix (" << b << ", " << c << ") is singular (dgbtrf info " << info << ")";
        throw SingularSystemError(msg.str());
      }
    }
  }

  std::vector<double> scratch(layout_.size());
  const int dims[2] = {mz, my};
  const fftw_r2r_kind kinds[2] = {FFTW_RODFT00, FFTW_RODFT00};
  const int dist = my * mz;
  std::lock_guard lock(fftw_planner_mutex());
  plan_->plan = fftw_plan_many_r2r(2, dims, mx, scratch.data(), nullptr, 1, dist, scratch.data(), nullptr, 1, dist,
                                   kinds, FFTW_ESTIMATE | FFTW_UNALIGNED);
  if (plan_->plan == nullptr) throw SingularSystemError("could not create the sine-transform plan");
}

LinearPropagator::~LinearPropagator() = default;
LinearPropagator::LinearPropagator(LinearPropagator&&) noexcept = default;
LinearPropagator& LinearPropagator::operator=(LinearPropagator&&) noexcept = default;

void LinearPropagator::apply(std::span<const double> u, std::span<double> out) const {
  const int mx = layout_.m_x;
  const int my = layout_.m_y;
  const int mz = layout_.m_z;
  const std::size_t sl = layout_.slice();
  const double iy = 1.0 / (grid_.h_y * grid_.h_y);
  const double iz = 1.0 / (grid_.h_z * grid_.h_z);

  // v = c_s u + (u_yy + u_zz)
  std::vector<double> v(u.size());
  for (int a = 0; a < mx; ++a) {
    for (int c = 0; c < mz; ++c) {
      for (int b = 0; b < my; ++b) {
        const std::size_t n = layout_.index(a, b, c);
        const double uc = u[n];
        const double yl = b > 0 ? u[n - 1] : 0.0;
        const double yr = b < my - 1 ? u[n + 1] : 0.0;
        const double zl = c > 0 ? u[n - static_cast<std::size_t>(my)] : 0.0;
        const double zr = c < mz - 1 ? u[n + static_cast<std::size_t>(my)] : 0.0;
        v[n] = c_s_ * uc + (yl - 2.0 * uc + yr) * iy + (zl - 2.0 * uc + zr) * iz;
      }
    }
  }
  // out = D1 v + D3 u, row by row in x.
  for (int a = 0; a < mx; ++a) {
    double* o = out.data() + static_cast<std::size_t>(a) * sl;
    for (std::size_t n = 0; n < sl; ++n) o[n] = 0.0;
    for (const Entry& e : plan_->x.d1[static_cast<std::size_t>(a)]) {
      const double* src = v.data() + static_cast<std::size_t>(e.col) * sl;
      for (std::size_t n = 0; n < sl; ++n) o[n] += e.w * src[n];
    }
    for (const Entry& e : plan_->x.d3[static_cast<std::size_t>(a)]) {
      const double* src = u.data() + static_cast<std::size_t>(e.col) * sl;
      for (std::size_t n = 0; n < sl; ++n) o[n] += e.w * src[n];
    }
  }
}

void LinearPropagator::nonlinear_term(std::span<const double> v, std::span<double> out) const {
  const int mx = layout_.m_x;
  const std::size_t sl = layout_.slice();
  const double c = -0.5 / (2.0 * grid_.h_x);
  for (int a = 0; a < mx; ++a) {
    double* o = out.data() + static_cast<std::size_t>(a) * sl;
    const double* right = a + 1 < mx ? v.data() + static_cast<std::size_t>(a + 1) * sl : nullptr;
    const double* left = a > 0 ? v.data() + static_cast<std::size_t>(a - 1) * sl : nullptr;
    for (std::size_t n = 0; n < sl; ++n) {
      const double r = right != nullptr ? right[n] * right[n] : 0.0;
      const double l = left != nullptr ? left[n] * left[n] : 0.0;
      o[n] = c * (r - l);
    }
  }
}

void LinearPropagator::solve(std::span<const double> rhs, std::span<double> u) const {
  const int mx = layout_.m_x;
  const std::size_t sl = layout_.slice();
  std::vector<double> coef(rhs.begin(), rhs.end());
  fftw_execute_r2r(plan_->plan, coef.data(), coef.data());

  // Mode-major copy so every banded solve runs on contiguous memory.
  const std::size_t band = static_cast<std::size_t>(kLdab) * static_cast<std::size_t>(mx);
  const auto m = static_cast<std::size_t>(mx);
  std::vector<double> lines(coef.size());
  for (std::size_t a = 0; a < m; ++a) {
    const double* src = coef.data() + a * sl;
    for (std::size_t mode = 0; mode < sl; ++mode) lines[mode * m + a] = src[mode];
  }
  const int one = 1;
  const char trans = 'N';
  for (std::size_t mode = 0; mode < sl; ++mode) {
    int info = 0;
    dgbtrs_(&trans, &mx, &kLower, &kUpper, &one, factors_.data() + mode * band, &kLdab, pivots_.data() + mode * m,
            lines.data() + mode * m, &mx, &info, 1);
  }
  for (std::size_t a = 0; a < m; ++a) {
    double* dst = coef.data() + a * sl;
    for (std::size_t mode = 0; mode < sl; ++mode) dst[mode] = lines[mode * m + a];
  }

  fftw_execute_r2r(plan_->plan, coef.data(), coef.data());
  const double scale = 1.0 / (4.0 * (layout_.m_y + 1) * (layout_.m_z + 1));
  for (std::size_t n = 0; n < coef.size(); ++n) u[n] = coef[n] * scale;
}

}  // namespace zk
