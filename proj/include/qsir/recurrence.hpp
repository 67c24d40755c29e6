#pragma once

#include <cstddef>

#include "qsir/core.hpp"

namespace qsir::recurrence {

/// A state together with the (positive) time it is attached to.
struct StepInput {
  SirState state;
  double t{};
};

/// Advance one quantum step, from t to q*t.
///
/// This is the explicit form of the q-difference SIR system in which the
/// incidence uses x(qt) and removal uses y(qt) (nonlocal placement):
///
///   x(qt) = x (x + y) / (x + y (1 + B))
///   y(qt) = y (1 + B)(x + y) / ((1 + C)(x + y (1 + B)))
///   z(qt) = C y(qt) + z
///
/// with B = b(q-1)t and C = c(q-1)t. Every factor is positive, so
/// nonnegative input stays nonnegative and x + y + z is preserved up to
/// roundoff. The state x = y = 0 is returned unchanged (the 0/0 there is an
/// equilibrium). Nonnegative x(t0), y(t0) are accepted, which is wider than
/// the strictly positive initial data the model is usually stated with.
inline SirState step(const StepInput& in, const Params& p) {
  const SirState& s = in.state;
  if (!s.finite() || !std::isfinite(in.t)) throw NonFiniteError("non-finite step input");
  if (!s.nonnegative()) throw ValidationError("compartments must be nonnegative");
  if (!(in.t > 0.0)) throw ValidationError("step time must be positive");

  const double sum = s.x + s.y;
  if (sum == 0.0) return s;

  const double h = (p.q() - 1.0) * in.t;
  const double infect = 1.0 + p.b() * h;
  const double remove = 1.0 + p.c() * h;
  const double denom = s.x + s.y * infect;

  // Scale by ratios rather than forming x (x + y), which underflows long
  // before x itself does.
  const double shrink = sum / denom;
  SirState out;
  out.x = s.x * shrink;
  out.y = s.y * shrink * (infect / remove);
  out.z = p.c() * h * out.y + s.z;
  if (!out.finite()) throw NonFiniteError("step produced a non-finite state");
  return out;
}

/// Records n = 0..n_steps starting from (0, t0, state0); times follow the
/// grid by running multiplication.
inline Trajectory iterate(const SirState& state0, const Params& p, std::size_t n_steps) {
  if (n_steps == 0) throw ValidationError("n_steps must be at least 1");
  validate(state0);

  Trajectory traj{p, {}};
  traj.records.reserve(n_steps + 1);
  traj.records.push_back({GridIndex(0), p.t0(), state0});
  for (std::size_t k = 0; k < n_steps; ++k) {
    const Record& cur = traj.records.back();
    SirState next;
    try {
      next = step({cur.state, cur.t}, p);
    } catch (const NonFiniteError& e) {
      throw NonFiniteError(e.what(), k);
    }
    traj.records.push_back({cur.n.next(), cur.t * p.q(), next});
  }
  return traj;
}

}  // namespace qsir::recurrence
