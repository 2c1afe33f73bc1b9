#include <gtest/gtest.h>

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "zk/convergence.hpp"
#include "zk/diagnostics.hpp"
#include "zk/errors.hpp"
#include "zk/linear_propagator.hpp"
#include "zk/solver.hpp"

namespace {

using std::numbers::pi;
using zk::BcTag;
using zk::Field3;
using zk::Grid3;
using zk::PhysParams;
using zk::SolverConfig;

SolverConfig small_config(int n, double dt, double t_end) {
  SolverConfig c;
  c.params = {1.0, pi, pi, pi};
  c.n_x = c.n_y = c.n_z = n;
  c.dt = dt;
  c.t_end = t_end;
  c.record_every = 5;
  return c;
}

Field3 random_interior(const Grid3& g, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  return Field3::sample(g, [&](double, double, double) { return u(rng); }, BcTag::dirichlet_all);
}

// (I + dt/2 A) over interior nodes, assembled directly from the stencil
// definitions, ordered x fastest.
Eigen::SparseMatrix<double> assemble_cn_matrix(const Grid3& g, double c_s, double dt) {
  const int mx = g.n_x - 2;
  const int my = g.n_y - 2;
  const int mz = g.n_z - 2;
  const auto id = [&](int i, int j, int k) { return (i - 1) + mx * ((j - 1) + my * (k - 1)); };
  const int N = mx * my * mz;
  std::vector<Eigen::Triplet<double>> t;
  const double hx = g.h_x;
  const double iy = 1 / (g.h_y * g.h_y);
  const double iz = 1 / (g.h_z * g.h_z);
  const int last = g.n_x - 1;

  // v_node = c_s u + u_yy + u_zz at a node as (column, weight) terms.
  const auto v_terms = [&](int i, int j, int k, double w, int row) {
    if (i <= 0 || i >= last) return;
    t.emplace_back(row, id(i, j, k), w * (c_s - 2 * iy - 2 * iz));
    if (j > 1) t.emplace_back(row, id(i, j - 1, k), w * iy);
    if (j < g.n_y - 2) t.emplace_back(row, id(i, j + 1, k), w * iy);
    if (k > 1) t.emplace_back(row, id(i, j, k - 1), w * iz);
    if (k < g.n_z - 2) t.emplace_back(row, id(i, j, k + 1), w * iz);
  };
  const auto u_term = [&](int i, int j, int k, double w, int row) {
    if (i == g.n_x) i = g.n_x - 2;  // u_x(L) = 0 reflection
    if (i <= 0 || i >= last) return;
    t.emplace_back(row, id(i, j, k), w);
  };

  const double s = 0.5 * dt;
  for (int k = 1; k <= mz; ++k)
    for (int j = 1; j <= my; ++j)
      for (int i = 1; i <= mx; ++i) {
        const int row = id(i, j, k);
        t.emplace_back(row, row, 1.0);
        v_terms(i + 1, j, k, s / (2 * hx), row);
        v_terms(i - 1, j, k, -s / (2 * hx), row);
        const double c3 = s / (2 * hx * hx * hx);
        if (i == 1) {
          const double w[5] = {-3, 10, -12, 6, -1};
          for (int o = 0; o < 5; ++o) u_term(o, j, k, w[o] * c3, row);
        } else {
          u_term(i - 2, j, k, -c3, row);
          u_term(i - 1, j, k, 2 * c3, row);
          u_term(i + 1, j, k, -2 * c3, row);
          u_term(i + 2, j, k, c3, row);
        }
      }
  Eigen::SparseMatrix<double> M(N, N);
  M.setFromTriplets(t.begin(), t.end());
  return M;
}

TEST(Propagator, MatchesSparseLuReference) {
  const Grid3 g = zk::make_grid(2.0, 1.5, 1.2, 11, 9, 8);
  const double c_s = 1.3;
  const double dt = 0.05;
  const zk::LinearPropagator prop(g, c_s, dt);
  const Eigen::SparseMatrix<double> M = assemble_cn_matrix(g, c_s, dt);
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(M);
  ASSERT_EQ(lu.info(), Eigen::Success);

  const Field3 f = random_interior(g, 11);
  const int mx = g.n_x - 2;
  const int my = g.n_y - 2;
  Eigen::VectorXd b(M.rows());
  for (int k = 1; k < g.n_z - 1; ++k)
    for (int j = 1; j < g.n_y - 1; ++j)
      for (int i = 1; i < g.n_x - 1; ++i) b[(i - 1) + mx * ((j - 1) + my * (k - 1))] = f(i, j, k);
  const Eigen::VectorXd x_ref = lu.solve(b);
  const Eigen::VectorXd Mb = M * b;

  const std::vector<double> rhs = zk::gather_interior(f);
  std::vector<double> sol(rhs.size());
  std::vector<double> Au(rhs.size());
  prop.solve(rhs, sol);
  prop.apply(rhs, Au);
  const Field3 xs = zk::scatter_interior(g, sol);
  const Field3 as = zk::scatter_interior(g, Au);

  double err = 0.0;
  double scale = 0.0;
  double err_apply = 0.0;
  for (int k = 1; k < g.n_z - 1; ++k)
    for (int j = 1; j < g.n_y - 1; ++j)
      for (int i = 1; i < g.n_x - 1; ++i) {
        const int r = (i - 1) + mx * ((j - 1) + my * (k - 1));
        err = std::max(err, std::abs(xs(i, j, k) - x_ref[r]));
        scale = std::max(scale, std::abs(x_ref[r]));
        const double applied = f(i, j, k) + 0.5 * dt * as(i, j, k);
        err_apply = std::max(err_apply, std::abs(applied - Mb[r]) / (1.0 + std::abs(Mb[r])));
      }
  EXPECT_LT(err / scale, 1e-11);
  EXPECT_LT(err_apply, 1e-11);
}

TEST(Propagator, RejectsBadStep) {
  const Grid3 g = zk::make_grid(1, 1, 1, 7, 7, 7);
  EXPECT_THROW(zk::LinearPropagator(g, 1.0, 0.0), zk::ValidationError);
  EXPECT_THROW(zk::LinearPropagator(g, 1.0, -1.0), zk::ValidationError);
}

TEST(Bump, Properties) {
  const Grid3 g = zk::make_grid(pi, pi, pi, 33, 33, 33);
  EXPECT_EQ(zk::make_initial_bump(g, 0.0).max_abs(), 0.0);
  const Field3 b = zk::make_initial_bump(g, 1.0);
  EXPECT_NEAR(b(16, 16, 16), 1.0, 1e-15);
  EXPECT_NEAR(b.max_abs(), 1.0, 1e-15);
  EXPECT_EQ(b.tag(), BcTag::dirichlet_all);
  std::vector<double> res;
  for (int n : {17, 33, 65}) {
    const Grid3 gg = zk::make_grid(pi, pi, pi, n, 9, 9);
    res.push_back(zk::check_compatibility(zk::make_initial_bump(gg, 1.0)).residual);
  }
  EXPECT_GT(res[0] / res[1], 3.5);
  EXPECT_GT(res[1] / res[2], 3.5);
}

TEST(ComputeUt, ZeroField) {
  const Grid3 g = zk::make_grid(1, 1, 1, 9, 9, 9);
  EXPECT_EQ(zk::compute_ut(Field3(g, BcTag::dirichlet_all), 1.0).max_abs(), 0.0);
}

TEST(ComputeUt, ManufacturedTimeDerivative) {
  const PhysParams p{1.0, pi, pi, pi};
  const zk::ManufacturedSolution m{1.0, 1.0};
  const auto forcing = zk::mms_forcing(m, p);
  std::vector<double> err;
  std::vector<double> interior;
  for (int n : {17, 33, 65}) {
    const Grid3 g = zk::make_grid(pi, pi, pi, n, n, n);
    const Field3 u = Field3::sample(
        g, [&](double x, double y, double z) { return zk::manufactured_value(m, p, x, y, z, 0.0); },
        BcTag::dirichlet_all);
    const Field3 f = Field3::sample(g, [&](double x, double y, double z) { return forcing(x, y, z, 0.0); },
                                    BcTag::free);
    const Field3 ut = zk::compute_ut(u, p.c_s, &f);
    const Field3 exact = Field3::sample(
        g, [&](double x, double y, double z) { return zk::manufactured_time_derivative(m, p, x, y, z, 0.0); },
        BcTag::free);
    const Field3 d = ut - exact;
    err.push_back(std::sqrt(zk::l2_sq(d)));
    double m = 0.0;
    for (int k = 0; k < n; ++k)
      for (int j = 0; j < n; ++j)
        for (int i = 3; i < n - 3; ++i) m = std::max(m, std::abs(d(i, j, k)));
    interior.push_back(m);
  }
  // Second order away from the x faces; the one-sided closures cost half an order in L2.
  for (std::size_t i = 1; i < err.size(); ++i) {
    EXPECT_GE(interior[i - 1] / interior[i], 3.5);
    EXPECT_LE(interior[i - 1] / interior[i], 4.5);
    EXPECT_GT(err[i - 1] / err[i], 2.5);
  }
}

TEST(ComputeUt, J0Identity) {
  const PhysParams p{1.0, pi, pi, pi};
  for (int n : {17, 25}) {
    for (double a : {1e-4, 1e-2, 1.0}) {
      const Grid3 g = zk::make_grid(pi, pi, pi, n, n, n);
      const Field3 u0 = zk::make_initial_bump(g, a);
      const double J0 = zk::compute_J0(u0, p);
      const double sum = zk::weighted_l2_sq(zk::compute_ut(u0, p.c_s)) + zk::weighted_l2_sq(u0);
      EXPECT_NEAR(sum, J0, 1e-12 * J0);
    }
  }
}

// Fourth-order central differences of the closed-form manufactured field.
double fd_forcing(const zk::ManufacturedSolution& m, const PhysParams& p, double x, double y, double z, double t) {
  const double h = 1e-2;
  const auto u = [&](double a, double b, double c, double s) { return zk::manufactured_value(m, p, a, b, c, s); };
  const auto d1 = [&](const std::function<double(double)>& g, double v) {
    return (-g(v + 2 * h) + 8 * g(v + h) - 8 * g(v - h) + g(v - 2 * h)) / (12 * h);
  };
  const auto d2 = [&](const std::function<double(double)>& g, double v) {
    return (-g(v + 2 * h) + 16 * g(v + h) - 30 * g(v) + 16 * g(v - h) - g(v - 2 * h)) / (12 * h * h);
  };
  const double ut = d1([&](double s) { return u(x, y, z, s); }, t);
  const double ux = d1([&](double a) { return u(a, y, z, t); }, x);
  const double lap_x = d1(
      [&](double a) {
        return d2([&](double b) { return u(b, y, z, t); }, a) + d2([&](double b) { return u(a, b, z, t); }, y) +
               d2([&](double c) { return u(a, y, c, t); }, z);
      },
      x);
  return ut + (p.c_s + u(x, y, z, t)) * ux + lap_x;
}

TEST(MmsForcing, MatchesFiniteDifferenceOracle) {
  const PhysParams p{1.0, pi, pi, pi};
  const zk::ManufacturedSolution m{1.0, 1.0};
  const auto f = zk::mms_forcing(m, p);
  const double c = pi / 2;
  EXPECT_NEAR(f(c, c, c, 0.0), fd_forcing(m, p, c, c, c, 0.0), 1e-6);
  for (auto [x, y, z, t] : {std::array<double, 4>{0.3, 1.1, 2.5, 0.2}, std::array<double, 4>{2.9, 0.4, 1.7, 1.3}}) {
    EXPECT_NEAR(f(x, y, z, t), fd_forcing(m, p, x, y, z, t), 1e-6);
  }
}

TEST(MmsForcing, ZeroAmplitudeAndStationary) {
  const PhysParams p{1.0, pi, pi, pi};
  const auto zero = zk::mms_forcing({0.0, 1.0}, p);
  EXPECT_EQ(zero(0.4, 1.0, 2.0, 0.7), 0.0);
  const auto stat = zk::mms_forcing({0.7, 0.0}, p);
  EXPECT_EQ(stat(0.4, 1.0, 2.0, 0.0), stat(0.4, 1.0, 2.0, 3.5));
}

TEST(Config, Validation) {
  SolverConfig c = small_config(9, 0.1, 1.0);
  EXPECT_NO_THROW(c.validate());
  EXPECT_EQ(c.step_count(), 10);
  c.t_end = 1.05;
  EXPECT_THROW(c.validate(), zk::ValidationError);
  c = small_config(9, 0.0, 1.0);
  EXPECT_THROW(c.validate(), zk::ValidationError);
  c = small_config(9, 0.1, 1.0);
  c.record_every = 0;
  EXPECT_THROW(c.validate(), zk::ValidationError);
  c = small_config(4, 0.1, 1.0);
  EXPECT_THROW(c.validate(), zk::ValidationError);
  EXPECT_EQ(zk::parse_nonlinear_mode("extrapolated"), zk::NonlinearMode::extrapolated);
  EXPECT_THROW(zk::parse_nonlinear_mode("newton"), zk::ValidationError);
}

TEST(Step, ZeroIsFixedPoint) {
  for (double dt : {1e-3, 0.1, 2.0}) {
    const SolverConfig c = small_config(9, dt, 10 * dt);
    const zk::Solver s(c);
    zk::SimState st = s.initial_state(Field3(s.grid(), BcTag::dirichlet_all));
    for (int i = 0; i < 10; ++i) st = s.step(st);
    EXPECT_EQ(st.u.max_abs(), 0.0);
    EXPECT_EQ(st.trace_accum, 0.0);
  }
}

TEST(Step, BoundaryExactAndDeterministic) {
  const SolverConfig c = small_config(13, 0.01, 0.1);
  const zk::Solver s(c);
  const Field3 u0 = zk::make_initial_bump(s.grid(), 0.5);
  zk::SimState a = s.initial_state(u0);
  zk::SimState b = s.initial_state(u0);
  double accum = 0.0;
  for (int i = 0; i < 10; ++i) {
    a = s.step(a);
    b = s.step(b);
    const Grid3& g = s.grid();
    for (int k = 0; k < g.n_z; ++k)
      for (int j = 0; j < g.n_y; ++j)
        for (int ii = 0; ii < g.n_x; ++ii)
          if (g.is_boundary(ii, j, k)) {
            ASSERT_EQ(a.u(ii, j, k), 0.0);
          }
    EXPECT_GE(a.trace_accum, accum);
    accum = a.trace_accum;
  }
  const auto va = a.u.values();
  const auto vb = b.u.values();
  EXPECT_TRUE(std::equal(va.begin(), va.end(), vb.begin()));
}

TEST(Step, IncompatibleInitialDataRejected) {
  const zk::Solver s(small_config(17, 0.01, 0.1));
  const Field3 bad = Field3::sample(
      s.grid(), [](double x, double y, double z) { return std::sin(x) * std::sin(y) * std::sin(z); },
      BcTag::dirichlet_all);
  EXPECT_THROW((void)s.initial_state(bad), zk::CompatibilityError);
}

TEST(Step, PicardFailureIsReported) {
  SolverConfig c = small_config(9, 0.05, 0.1);
  c.damped_startup = false;
  c.picard = {2, 1e-300};
  const zk::Solver s(c);
  const Field3 u0 = zk::make_initial_bump(s.grid(), 1.0);
  EXPECT_THROW((void)s.step(s.initial_state(u0)), zk::DivergenceError);
  try {
    zk::run(s, u0);
    FAIL() << "expected StepError";
  } catch (const zk::StepError& e) {
    EXPECT_EQ(e.time(), 0.0);
    EXPECT_THROW(std::rethrow_if_nested(e), zk::DivergenceError);
  }
}

TEST(Step, PicardAndExtrapolatedAgree) {
  SolverConfig c = small_config(13, 0.005, 0.1);
  const Field3 u0 = zk::make_initial_bump(c.grid(), 0.3);
  const auto picard = zk::run(c, u0);
  c.nonlinear_mode = zk::NonlinearMode::extrapolated;
  const auto extrap = zk::run(c, u0);
  const double diff = std::sqrt(zk::l2_sq(picard.final_state.u - extrap.final_state.u));
  EXPECT_LT(diff, 1e-4 * std::sqrt(zk::l2_sq(picard.final_state.u)));
}

// Crank-Nicolson on the dissipative linear part: large steps stay bounded.
TEST(Step, LinearLargeStepBounded) {
  SolverConfig c = small_config(17, 0.0, 0.0);
  const double h = pi / 16;
  c.dt = 10 * h;
  c.t_end = 40 * c.dt;
  c.nonlinear = false;
  c.record_every = 1;
  const auto r = zk::run(c, zk::make_initial_bump(c.grid(), 1.0));
  const double e0 = r.series.front().l2_sq;
  for (const auto& rec : r.series) EXPECT_LE(rec.l2_sq, e0 * (1 + 1e-12)) << "t = " << rec.t;
}

TEST(Run, SingleRecordForZeroEndTime) {
  const auto r = zk::run(small_config(9, 0.01, 0.0), zk::make_initial_bump(zk::make_grid(pi, pi, pi, 9, 9, 9), 0.1));
  ASSERT_EQ(r.series.size(), 1u);
  EXPECT_EQ(r.series[0].t, 0.0);
}

TEST(Run, ZeroDataGivesZeroRows) {
  const SolverConfig c = small_config(9, 0.01, 0.1);
  const auto r = zk::run(c, Field3(c.grid(), BcTag::dirichlet_all));
  EXPECT_EQ(r.series.size(), 3u);
  for (const auto& rec : r.series) {
    for (auto f : {zk::Functional::l2_sq, zk::Functional::w_l2_sq, zk::Functional::trace_x0,
                   zk::Functional::trace_accum, zk::Functional::ux_sq, zk::Functional::uy_sq, zk::Functional::uz_sq,
                   zk::Functional::h2_sq, zk::Functional::ut_w_sq, zk::Functional::second_yz,
                   zk::Functional::uxx_sq}) {
      EXPECT_EQ(zk::value(rec, f), 0.0);
    }
  }
}

TEST(Run, SmallAmplitudeEnergyNonincreasing) {
  SolverConfig c = small_config(17, 0.01, 1.0);
  c.record_every = 1;
  const auto r = zk::run(c, zk::make_initial_bump(c.grid(), 1e-3));
  const double e0 = r.series.front().l2_sq;
  const double tol = 0.02 * e0;
  for (std::size_t i = 1; i < r.series.size(); ++i) {
    EXPECT_LE(r.series[i].l2_sq, r.series[i - 1].l2_sq + tol);
  }
  EXPECT_LT(r.series.back().l2_sq, e0);
}

TEST(Run, MmsErrorContractsUnderRefinement) {
  SolverConfig base = small_config(17, 0.02, 0.5);
  base.forcing = zk::ManufacturedSolution{0.5, 1.0};
  std::vector<double> err;
  for (auto [n, dt] : {std::pair{17, 0.02}, std::pair{33, 0.01}}) {
    SolverConfig c = base;
    c.n_x = c.n_y = c.n_z = n;
    c.dt = dt;
    c.record_every = 1000;
    const zk::Solver s(c);
    const Field3 u0 = Field3::sample(
        s.grid(), [&](double x, double y, double z) { return zk::manufactured_value(*c.forcing, c.params, x, y, z, 0); },
        BcTag::dirichlet_all);
    const auto r = zk::run(s, u0);
    err.push_back(zk::mms_l2_error(r.final_state.u, *c.forcing, c.params, r.final_state.t));
  }
  const double factor = err[0] / err[1];
  EXPECT_GE(factor, 3.0);
  EXPECT_LE(factor, 5.0);
}

}  // namespace
