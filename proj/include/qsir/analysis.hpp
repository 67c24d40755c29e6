#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "qsir/core.hpp"
#include "qsir/exact.hpp"

namespace qsir::analysis {

inline constexpr double kDefaultTol = 1e-8;
inline constexpr std::size_t kDefaultMaxSteps = 100000;

inline double reproduction_number(const Params& p) noexcept { return p.b() / p.c(); }

enum class EquilibriumClass {
  /// Predicted limit (0, 0, N).
  DiseaseFreeFullDepletion,
  /// Predicted limit (alpha, 0, N - alpha) with alpha in ]0, N].
  DiseaseFreePartialDepletion,
};

inline std::string_view to_string(EquilibriumClass c) noexcept {
  switch (c) {
    case EquilibriumClass::DiseaseFreeFullDepletion: return "DiseaseFree_FullDepletion";
    case EquilibriumClass::DiseaseFreePartialDepletion: return "DiseaseFree_PartialDepletion";
  }
  return "unknown";
}

/// Advisory prediction from R0 = b/c alone; estimate_alpha() is the check.
inline EquilibriumClass classify_limit(const Params& p) noexcept {
  return p.b() >= p.c() ? EquilibriumClass::DiseaseFreeFullDepletion : EquilibriumClass::DiseaseFreePartialDepletion;
}

/// Finite-horizon view of the closed-form factor sequences.
///
/// For i = 0..horizon-1: a_i is the i-th x-factor after the prefactor,
/// a_tilde_i = a_i / xi_{i+1} the matching y-factor, and condition_ok[i]
/// records a_tilde_i < 1 (y strictly decreasing from t_{i+1} to t_{i+2}).
/// xi_seq holds xi_0..xi_horizon.
///
/// The monotonicity flags are decided on cancellation-free quantities:
/// xi ordering on xi_k - c/b, xi against one on xi_k - 1, and a_i > a_{i+1}
/// on the sign of (1 - q) + P_i (xi_{i+1} - q), which is equivalent to it.
/// The raw double sequences saturate (xi at c/b, a at 1) well inside a
/// 500-step horizon and would report spurious ties.
struct Diagnostics {
  std::size_t horizon{0};
  std::vector<double> xi_seq;
  std::vector<double> a_seq;
  std::vector<double> a_tilde_seq;
  std::vector<bool> condition_ok;

  /// Conjunction of condition_ok over the horizon.
  bool condition_holds{true};
  std::optional<std::size_t> condition_first_failure;
  /// Smallest i0 with condition_ok[i] for every i0 <= i < horizon.
  std::size_t condition_holds_from{0};

  bool xi_decreasing{true};
  bool xi_increasing{true};
  bool xi_above_one{true};
  bool xi_below_one{true};
  /// Every xi_k compares equal to 1.0 in double precision.
  bool xi_identically_one{true};

  bool a_below_one{true};
  bool a_decreasing{true};
  std::optional<std::size_t> a_first_non_decrease;

  /// Observed, not asserted: strict increase of a_tilde over the horizon.
  bool a_tilde_increasing{true};
  /// sum_i log(a_tilde_i); negative means the y-factor product is shrinking.
  double log_a_tilde_product{0.0};
};

namespace detail {

/// True when a_i > a_{i+1}, given P_i = kappa prod_{j<=i} xi_j (and its log)
/// and d = xi_{i+1} - q.
inline bool a_step_decreases(double p_i, double log_p_i, double d, double q) noexcept {
  if (d <= 0.0) return true;
  if (std::isfinite(p_i)) return (1.0 - q) + p_i * d < 0.0;
  return log_p_i + std::log(d) < std::log(q - 1.0);
}

}  // namespace detail

/// Full diagnostics over indices 0..horizon-1, driven by the same
/// accumulators as the closed-form evaluator.
inline Diagnostics sequence_diagnostics(const Params& p, const SirState& state0, std::size_t horizon) {
  if (horizon == 0) throw ValidationError("horizon must be at least 1");
  exact::ExactTerms terms(state0, p);

  Diagnostics d;
  d.horizon = horizon;
  d.xi_seq.reserve(horizon + 1);
  d.a_seq.reserve(horizon);
  d.a_tilde_seq.reserve(horizon);
  d.condition_ok.reserve(horizon);

  // c/b - q, rounded once.
  const double limit_minus_q = std::fma(-p.q(), p.b(), p.c()) / p.b();

  auto record_xi = [&](double prev_gap) {
    const double xi = terms.xi_current();
    const double gap = terms.xi_gap();
    const double excess = terms.xi_excess();
    d.xi_seq.push_back(xi);
    if (!(excess > 0.0)) d.xi_above_one = false;
    if (!(excess < 0.0)) d.xi_below_one = false;
    if (xi != 1.0) d.xi_identically_one = false;
    if (d.xi_seq.size() > 1) {
      if (!(gap < prev_gap)) d.xi_decreasing = false;
      if (!(gap > prev_gap)) d.xi_increasing = false;
    }
    return gap;
  };

  double gap = record_xi(0.0);
  terms.advance();  // now at n = 1: the factors below are a_0, a_tilde_0

  for (std::size_t i = 0; i < horizon; ++i) {
    gap = record_xi(gap);  // xi_{i+1}

    const double a = terms.x_factor();
    const double a_tilde = terms.y_factor();
    if (!(terms.incidence_ratio() > 0.0)) d.a_below_one = false;
    if (!d.a_tilde_seq.empty() && !(a_tilde > d.a_tilde_seq.back())) d.a_tilde_increasing = false;
    d.a_seq.push_back(a);
    d.a_tilde_seq.push_back(a_tilde);
    d.log_a_tilde_product += std::log(a_tilde);

    const bool ok = a_tilde < 1.0;
    d.condition_ok.push_back(ok);
    if (!ok) {
      d.condition_holds = false;
      if (!d.condition_first_failure) d.condition_first_failure = i;
      d.condition_holds_from = i + 1;
    }

    // a_i > a_{i+1} needs P_i (held at n = i + 1) and xi_{i+1}.
    if (i + 1 < horizon) {
      const double dist = limit_minus_q + gap;  // xi_{i+1} - q
      if (!detail::a_step_decreases(terms.kappa_xi_product(), terms.log_kappa_xi_product(), dist, p.q())) {
        if (d.a_decreasing) d.a_first_non_decrease = i;
        d.a_decreasing = false;
      }
    }
    terms.advance();
  }
  return d;
}

/// Finite-horizon check of a_tilde_i < 1. The verdict is
/// Diagnostics::condition_holds and only covers indices below horizon.
inline Diagnostics check_decay_condition(const Params& p, const SirState& state0, std::size_t horizon) {
  return sequence_diagnostics(p, state0, horizon);
}

struct LimitEstimate {
  double alpha{0.0};
  bool converged{false};
  std::size_t steps_used{0};
  /// Last |x(t_{n+1}) - x(t_n)|.
  double residual{0.0};
  SirState final_state;
};

/// Runs the closed form until |x(t_{n+1}) - x(t_n)| < tol N and
/// y(t_{n+1}) < tol N, or max_n steps. With y(t0) = 0 the state is already
/// an equilibrium and is returned as converged.
inline LimitEstimate estimate_alpha(const Params& p, const SirState& state0, double tol = kDefaultTol,
                                    std::size_t max_n = kDefaultMaxSteps) {
  if (!(tol > 0.0)) throw ValidationError("tol must be positive");
  validate(state0);
  const double population = total_population(state0);

  LimitEstimate est;
  if (state0.y == 0.0) {
    est.alpha = state0.x;
    est.converged = true;
    est.final_state = state0;
    return est;
  }

  const double bound = tol * population;
  exact::ExactTerms terms(state0, p);
  double prev_x = state0.x;
  SirState s = state0;
  for (std::size_t n = 1; n <= max_n; ++n) {
    terms.advance();
    s = terms.state();
    est.residual = std::abs(s.x - prev_x);
    est.steps_used = n;
    if (est.residual < bound && s.y < bound) {
      est.converged = true;
      break;
    }
    prev_x = s.x;
  }
  est.alpha = std::clamp(s.x, 0.0, population);
  est.final_state = s;
  return est;
}

}  // namespace qsir::analysis
