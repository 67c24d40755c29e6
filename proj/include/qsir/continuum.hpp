#pragma once

#include <cmath>
#include <cstddef>
#include <span>

#include "qsir/core.hpp"

namespace qsir::continuum {

/// Time derivatives (x', y', z') of Bailey's continuous SIR system.
struct Rates {
  double dx{};
  double dy{};
  double dz{};
};

/// Below this x + y the incidence term is taken as zero.
inline constexpr double kIncidenceFloor = 1e-15;

/// Guard on the number of RK4 steps a single integration may take.
inline constexpr double kMaxSteps = 1e7;

inline Rates rhs(const SirState& s, const Params& p) noexcept {
  const double sum = s.x + s.y;
  const double incidence = sum < kIncidenceFloor ? 0.0 : p.b() * s.x * s.y / sum;
  const double removal = p.c() * s.y;
  return {-incidence, incidence - removal, removal};
}

/// Classical fourth-order Runge-Kutta step of length dt. No clamping.
inline SirState rk4_step(const SirState& s, double dt, const Params& p) {
  if (!(dt > 0.0)) throw ValidationError("dt must be positive");
  auto shifted = [&](const Rates& k, double h) {
    return SirState{s.x + h * k.dx, s.y + h * k.dy, s.z + h * k.dz};
  };
  const Rates k1 = rhs(s, p);
  const Rates k2 = rhs(shifted(k1, 0.5 * dt), p);
  const Rates k3 = rhs(shifted(k2, 0.5 * dt), p);
  const Rates k4 = rhs(shifted(k3, dt), p);
  const double w = dt / 6.0;
  SirState out{s.x + w * (k1.dx + 2.0 * k2.dx + 2.0 * k3.dx + k4.dx),
               s.y + w * (k1.dy + 2.0 * k2.dy + 2.0 * k3.dy + k4.dy),
               s.z + w * (k1.dz + 2.0 * k2.dz + 2.0 * k3.dz + k4.dz)};
  if (!out.finite()) throw NonFiniteError("RK4 step produced a non-finite state");
  return out;
}

struct ContinuumConfig {
  double dt{0.01};
  double t_end{};

  void validate(double t_start) const {
    if (!(std::isfinite(dt) && dt > 0.0)) throw ValidationError("dt must be positive");
    if (!(std::isfinite(t_end) && t_end > t_start)) throw ValidationError("t_end must exceed the start time");
    if ((t_end - t_start) / dt > kMaxSteps) throw ValidationError("integration would exceed 1e7 steps");
  }
};

/// Bookkeeping for one integration run.
struct IntegrationStats {
  std::size_t steps{0};
  /// Components that came out of a step negative and were reset to zero.
  std::size_t clamped{0};
};

namespace detail {

inline void clamp_nonnegative(SirState& s, IntegrationStats& stats) noexcept {
  for (double* v : {&s.x, &s.y, &s.z}) {
    if (*v < 0.0) {
      *v = 0.0;
      ++stats.clamped;
    }
  }
}

/// Integrates from t_from to t_to in steps of dt, the last one shortened to
/// land on t_to exactly. Step k starts at t_from + k dt (no accumulated drift).
inline SirState advance(SirState s, double t_from, double t_to, double dt, const Params& p,
                        IntegrationStats& stats) {
  const double span = t_to - t_from;
  if (span <= 0.0) return s;
  const auto n = static_cast<std::size_t>(std::ceil(span / dt * (1.0 - 1e-12)));
  for (std::size_t k = 0; k < n; ++k) {
    const double h = (k + 1 == n) ? t_to - (t_from + static_cast<double>(k) * dt) : dt;
    s = rk4_step(s, h, p);
    clamp_nonnegative(s, stats);
    ++stats.steps;
  }
  return s;
}

}  // namespace detail

/// Uniform-grid trajectory from t_start to cfg.t_end; record k sits at
/// t_start + k dt and the final record at t_end.
inline Trajectory integrate(const SirState& state0, const ContinuumConfig& cfg, const Params& p, double t_start,
                            IntegrationStats* stats = nullptr) {
  validate(state0);
  cfg.validate(t_start);
  IntegrationStats local;
  IntegrationStats& st = stats ? *stats : local;

  Trajectory traj{p, {}};
  traj.records.push_back({GridIndex(0), t_start, state0});
  SirState s = state0;
  double t = t_start;
  for (std::size_t k = 1;; ++k) {
    double next = t_start + static_cast<double>(k) * cfg.dt;
    if (next >= cfg.t_end * (1.0 - 1e-12)) next = cfg.t_end;
    s = detail::advance(s, t, next, cfg.dt, p, st);
    t = next;
    traj.records.push_back({GridIndex(k), t, s});
    if (next == cfg.t_end) break;
  }
  return traj;
}

/// Integrates with steps of at most dt and records the state at each of the
/// given (increasing, >= t_start) times. Record k carries index k.
inline Trajectory sample_at(const SirState& state0, const Params& p, double t_start, std::span<const double> times,
                            double dt, IntegrationStats* stats = nullptr) {
  validate(state0);
  if (!(std::isfinite(dt) && dt > 0.0)) throw ValidationError("dt must be positive");
  if (!times.empty() && (times.back() - t_start) / dt > kMaxSteps)
    throw ValidationError("integration would exceed 1e7 steps");
  IntegrationStats local;
  IntegrationStats& st = stats ? *stats : local;

  Trajectory traj{p, {}};
  traj.records.reserve(times.size());
  SirState s = state0;
  double t = t_start;
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (times[k] < t) throw ValidationError("sample times must be increasing and not before t_start");
    s = detail::advance(s, t, times[k], dt, p, st);
    t = times[k];
    traj.records.push_back({GridIndex(k), t, s});
  }
  return traj;
}

}  // namespace qsir::continuum
