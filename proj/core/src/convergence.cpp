#include "zk/convergence.hpp"

#include <cmath>

#include "zk/errors.hpp"

namespace zk {

double mms_l2_error(const Field3& u, const ManufacturedSolution& m, const PhysParams& p, double t) {
  const Field3 exact = Field3::sample(
      u.grid(), [&](double x, double y, double z) { return manufactured_value(m, p, x, y, z, t); },
      BcTag::dirichlet_all);
  return std::sqrt(l2_sq(u - exact));
}

MmsStudy run_mms_ladder(const SolverConfig& base, const std::vector<int>& ladder, double dt_coarse) {
  if (ladder.size() < 2) throw ValidationError("MMS ladder needs at least two resolutions to form an order");
  for (std::size_t i = 1; i < ladder.size(); ++i) {
    if (ladder[i] <= ladder[i - 1]) throw ValidationError("MMS ladder must be strictly increasing");
  }
  if (!base.forcing) throw ValidationError("MMS study needs a manufactured solution");
  if (!(dt_coarse > 0.0)) throw ValidationError("MMS dt must be positive");

  const ManufacturedSolution m = *base.forcing;
  const double h_coarse = base.params.L / (ladder.front() - 1);

  MmsStudy study;
  for (int n : ladder) {
    SolverConfig cfg = base;
    cfg.n_x = cfg.n_y = cfg.n_z = n;
    const double h = base.params.L / (n - 1);
    const double target = dt_coarse * h / h_coarse;
    const long steps = std::max(1L, std::lround(base.t_end / target));
    cfg.dt = base.t_end > 0.0 ? base.t_end / static_cast<double>(steps) : target;
    cfg.record_every = static_cast<int>(std::max(1L, steps));

    const Solver solver(cfg);
    SimState state = solver.initial_state(
        Field3::sample(solver.grid(), [&](double x, double y, double z) { return manufactured_value(m, base.params, x, y, z, 0.0); },
                       BcTag::dirichlet_all));
    const long count = cfg.step_count();
    for (long s = 0; s < count; ++s) state = solver.step(state);

    MmsLevel level{.n = n, .h = h, .dt = cfg.dt, .steps = count,
                   .l2_error = mms_l2_error(state.u, m, base.params, state.t), .order = 0.0};
    if (!study.levels.empty()) {
      const MmsLevel& prev = study.levels.back();
      if (level.l2_error > 0.0 && prev.l2_error > 0.0) {
        level.order = std::log(prev.l2_error / level.l2_error) / std::log(prev.h / level.h);
      }
      if (!(level.l2_error < prev.l2_error)) study.monotone = false;
    }
    study.levels.push_back(level);
  }

  study.exact = true;
  for (const MmsLevel& l : study.levels) study.exact = study.exact && l.l2_error == 0.0;
  if (study.exact) study.monotone = true;
  study.finest_order = study.levels.back().order;
  return study;
}

}  // namespace zk
