#ifndef PJM_INVERSE_HPP
#define PJM_INVERSE_HPP

// Inversion of the height map by continuation in the target: solve
// h(p) = t * target for t running from 0 to 1, starting at p = 0 where h = 0.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "pjm/heights.hpp"
#include "pjm/jacobian.hpp"
#include "pjm/linalg.hpp"
#include "pjm/model.hpp"
#include "pjm/spectrum.hpp"

namespace pjm {

struct SolveOptions {
  double tol = 1e-10;           // on ||h(p) - target||_inf
  int max_newton = 50;          // per continuation stage
  double t_step_init = 0.25;
  double t_step_min = 1e-4;
  bool fd_jacobian = false;
  double fd_step = 1e-6;
  int fast_iterations = 4;      // stage counts as fast at or below this
  int polish_iterations = 3;    // extra Newton steps once t = 1 has converged
  double armijo_c = 1e-4;
  double alpha_min = 0x1p-20;
  JacobianOptions jacobian;
};

struct SolveStage {
  double t = 0.0;
  bool accepted = false;
  int iterations = 0;
  std::vector<double> residuals; // ||F||_2 after each accepted Newton step
};

struct SolveTrace {
  std::vector<SolveStage> stages;
  int newton_iterations = 0;
  int jacobian_evaluations = 0;
  double final_residual = std::numeric_limits<double>::infinity();
};

struct SolveResult {
  CoefficientPoint point;
  SolveTrace trace;
};

class ContinuationStall : public NumericalError {
public:
  ContinuationStall(double last_t, CoefficientPoint last_point, SolveTrace trace)
      : NumericalError("continuation stalled at t = " + std::to_string(last_t)),
        last_t_(last_t), last_point_(std::move(last_point)), trace_(std::move(trace)) {}
  double last_t() const noexcept { return last_t_; }
  const CoefficientPoint& last_point() const noexcept { return last_point_; }
  const SolveTrace& trace() const noexcept { return trace_; }

private:
  double last_t_;
  CoefficientPoint last_point_;
  SolveTrace trace_;
};

class SingularJacobianError : public NumericalError {
public:
  SingularJacobianError(CoefficientPoint point, std::size_t gap)
      : NumericalError("height Jacobian is singular near gap " + std::to_string(gap)),
        point_(std::move(point)), gap_(gap) {}
  const CoefficientPoint& point() const noexcept { return point_; }
  std::size_t gap() const noexcept { return gap_; }

private:
  CoefficientPoint point_;
  std::size_t gap_;
};

namespace detail {

struct Iterate {
  Vector w;        // chart coordinates (u, v)
  CoefficientPoint p;
  SpectralData sd;
  HeightVector h;
  Vector residual; // h(p) - goal
  double norm2 = 0.0;
  double norm_inf = 0.0;
};

inline double norm_inf(const Vector& v) {
  double m = 0.0;
  for (double e : v) m = std::max(m, std::abs(e));
  return m;
}

inline double norm2_squared(const Vector& v) {
  double s = 0.0;
  for (double e : v) s += e * e;
  return s;
}

/// Empty when the height map cannot be evaluated at w.
inline std::optional<Iterate> make_iterate(const Vector& w, std::size_t n, const Vector& goal,
                                           const SolveOptions& opts) {
  for (double e : w) {
    if (!std::isfinite(e)) return std::nullopt;
  }
  Iterate it;
  it.w = w;
  it.p = embed(ReducedPoint::from_flat(w), n);
  try {
    it.sd = spectral_data(it.p, opts.jacobian.heights.spectrum);
    it.h = height_map(it.p, it.sd, opts.jacobian.heights);
  } catch (const NumericalError&) {
    return std::nullopt;
  }
  const Vector hv = it.h.flat();
  it.residual.resize(hv.size());
  for (std::size_t i = 0; i < hv.size(); ++i) it.residual[i] = hv[i] - goal[i];
  it.norm2 = norm2_squared(it.residual);
  it.norm_inf = norm_inf(it.residual);
  if (!std::isfinite(it.norm2)) return std::nullopt;
  return it;
}

inline Vector newton_direction(const Iterate& it, const SolveOptions& opts, SolveTrace& trace) {
  Matrix jac = opts.fd_jacobian
                   ? fd_jacobian(it.p, opts.fd_step, opts.jacobian.heights)
                   : grad_heights(it.p, it.sd, it.h, opts.jacobian).matrix;
  ++trace.jacobian_evaluations;
  try {
    const LuDecomposition lu(std::move(jac));
    Vector d = lu.solve(it.residual);
    for (double& e : d) e = -e;
    return d;
  } catch (const SingularMatrixError& e) {
    throw SingularJacobianError(it.p, e.row() % (it.p.n - 1) + 1);
  }
}

/// One damped Newton step with Armijo backtracking on ||F||_2^2.
inline std::optional<Iterate> armijo_step(const Iterate& it, const Vector& goal,
                                          const SolveOptions& opts, SolveTrace& trace) {
  const Vector d = newton_direction(it, opts, trace);
  for (double alpha = 1.0; alpha >= opts.alpha_min; alpha *= 0.5) {
    Vector w(it.w);
    for (std::size_t i = 0; i < w.size(); ++i) w[i] += alpha * d[i];
    auto trial = make_iterate(w, it.p.n, goal, opts);
    if (trial && trial->norm2 <= (1.0 - 2.0 * opts.armijo_c * alpha) * it.norm2) return trial;
  }
  return std::nullopt;
}

/// Newton on h(p) = goal from `start`; empty on failure.
inline std::optional<Iterate> newton_stage(const Iterate& start, const Vector& goal,
                                           const SolveOptions& opts, SolveStage& stage,
                                           SolveTrace& trace) {
  auto it = make_iterate(start.w, start.p.n, goal, opts);
  if (!it) return std::nullopt;
  while (it->norm_inf > opts.tol) {
    if (stage.iterations >= opts.max_newton) return std::nullopt;
    auto next = armijo_step(*it, goal, opts, trace);
    ++stage.iterations;
    ++trace.newton_iterations;
    if (!next) return std::nullopt;
    it = std::move(next);
    stage.residuals.push_back(std::sqrt(it->norm2));
  }
  return it;
}

} // namespace detail

/// The unique p with ||h(p) - target||_inf <= tol.
inline SolveResult invert(const HeightVector& target, std::size_t n_period,
                          const SolveOptions& opts = {}) {
  if (n_period < 2) throw DomainError("period N must be at least 2");
  const Vector goal = target.flat();
  const std::size_t dim = 2 * (n_period - 1);
  if (goal.size() != dim) {
    throw DomainError("target has length " + std::to_string(goal.size()) + ", expected 2N-2 = " +
                      std::to_string(dim));
  }
  for (double e : goal) {
    if (!std::isfinite(e)) throw DomainError("target must be finite");
  }
  if (!(opts.t_step_min > 0.0) || !(opts.t_step_init >= opts.t_step_min) || !(opts.tol > 0.0)) {
    throw DomainError("invalid solver options");
  }

  SolveTrace trace;
  const Vector zero_goal(dim, 0.0);
  auto current = detail::make_iterate(Vector(dim, 0.0), n_period, zero_goal, opts);
  if (!current) throw NumericalError("height map failed at p = 0");

  auto scaled_goal = [&](double t) {
    Vector g(goal);
    for (double& e : g) e *= t;
    return g;
  };

  double t = 0.0;
  double step = opts.t_step_init;
  while (t < 1.0) {
    const double t_next = std::min(1.0, t + step);
    SolveStage stage;
    stage.t = t_next;
    auto next = detail::newton_stage(*current, scaled_goal(t_next), opts, stage, trace);
    stage.accepted = next.has_value();
    const int iterations = stage.iterations;
    trace.stages.push_back(std::move(stage));
    if (next) {
      t = t_next;
      current = std::move(next);
      if (iterations <= opts.fast_iterations) step *= 2.0;
    } else {
      step *= 0.5;
      if (step < opts.t_step_min) throw ContinuationStall(t, current->p, trace);
    }
  }

  // Newton past tol costs little and pulls p down to rounding level.
  for (int k = 0; k < opts.polish_iterations; ++k) {
    const Vector d = detail::newton_direction(*current, opts, trace);
    Vector w(current->w);
    for (std::size_t i = 0; i < w.size(); ++i) w[i] += d[i];
    auto trial = detail::make_iterate(w, n_period, goal, opts);
    if (!trial || trial->norm2 >= current->norm2) break;
    current = std::move(trial);
  }

  trace.final_residual = current->norm_inf;
  return {current->p, trace};
}

} // namespace pjm

#endif // PJM_INVERSE_HPP
