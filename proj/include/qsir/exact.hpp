#pragma once

#include <cmath>
#include <cstddef>

#include "qsir/core.hpp"

namespace qsir::exact {

namespace detail {

/// Above this magnitude the running products switch to log space.
inline constexpr double kLogSwitch = 1e300;

/// log(1 + e^v) without overflow.
inline double log1p_exp(double v) noexcept {
  return v > 0.0 ? v + std::log1p(std::exp(-v)) : std::log1p(std::exp(v));
}

}  // namespace detail

/// (1 + c(q-1)t) / (1 + b(q-1)t) at an arbitrary positive time t.
///
/// Once (q-1)t exceeds one, numerator and denominator are both divided by
/// it, which keeps the ratio finite (tending to c/b) after t overflows.
inline double xi_at_time(double t, const Params& p) noexcept {
  const double u = (p.q() - 1.0) * t;
  if (u <= 1.0) return (1.0 + p.c() * u) / (1.0 + p.b() * u);
  const double w = 1.0 / u;
  return (w + p.c()) / (w + p.b());
}

/// Per-step ratio of the closed form at grid index k.
inline double xi(std::size_t k, const Params& p) noexcept { return xi_at_time(grid_time(GridIndex(k), p), p); }

/// xi_k - c/b, evaluated as (b - c) / (b (1 + b(q-1)t_k)).
///
/// xi_k itself saturates at c/b in double precision after a few hundred
/// steps; its distance to the limit stays representable and carries the
/// sign and monotonicity of the sequence.
inline double xi_gap_to_limit(std::size_t k, const Params& p) noexcept {
  const double u = (p.q() - 1.0) * grid_time(GridIndex(k), p);
  return (p.b() - p.c()) / (p.b() * (1.0 + p.b() * u));
}

inline double kappa_bar(const SirState& state0) {
  if (state0.y == 0.0) throw ZeroInfected();
  return state0.x / state0.y;
}

/// Incremental evaluator for the closed-form solution on the grid.
///
/// With P_i = kappa * prod_{j<=i} xi_j (P_{-1} = kappa) and
/// B_i = b(q-1) q^{i+1} t0, the solution is
///
///   x(t_n) = x0 * pre * prod_{i=0}^{n-2} a_i,        a_i = 1 / (1 + B_i / (1 + P_i))
///   y(t_n) = y0 / xi_0 * pre * prod_{i=0}^{n-2} a_i / xi_{i+1}
///
/// where pre = (kappa + 1) / (kappa + 1 + b(q-1)t0). The evaluator sits at
/// index n and advance() multiplies in one more factor; z always comes from
/// conservation. P and B move to log space once they pass 1e300, and a
/// product that underflows to zero stays zero.
class ExactTerms {
 public:
  ExactTerms(const SirState& state0, const Params& p)
      : params_(p), state0_(state0), population_(total_population(state0)) {
    validate(state0);
    kappa_ = exact::kappa_bar(state0);
    t_ = p.t0();
    log_t_ = std::log(p.t0());
    log_q_ = std::log(p.q());
    log_rate_ = std::log(p.b() * (p.q() - 1.0));
    xi_ = xi_at_time(t_, p);
    p_prev_ = kappa_;
    log_p_prev_ = std::log(kappa_);
  }

  std::size_t index() const noexcept { return n_; }
  double time() const noexcept { return t_; }
  double kappa_bar() const noexcept { return kappa_; }
  double population() const noexcept { return population_; }

  /// xi_n at the current index.
  double xi_current() const noexcept { return xi_; }

  /// kappa * prod_{j<n} xi_j, i.e. P_{n-1}; +inf once it has left double range.
  double kappa_xi_product() const noexcept { return p_prev_; }
  /// log of kappa_xi_product(), valid in both regimes.
  double log_kappa_xi_product() const noexcept { return log_p_prev_; }

  /// Factor taking x(t_n) to x(t_{n+1}): the prefactor at n = 0, a_{n-1} after.
  double x_factor() const noexcept {
    if (n_ == 0) {
      const double k1 = kappa_ + 1.0;
      return k1 / (k1 + params_.b() * (params_.q() - 1.0) * params_.t0());
    }
    return 1.0 / (1.0 + incidence_ratio());
  }

  /// Factor taking y(t_n) to y(t_{n+1}).
  double y_factor() const noexcept { return x_factor() / xi_; }

  /// B_{n-1} / (1 + P_{n-1}) with B_{n-1} = b(q-1)t_n, so x_factor() = 1 / (1 + ratio).
  /// Unlike x_factor() it keeps full relative precision when the factor is near 1.
  double incidence_ratio() const noexcept {
    const double b_term = params_.b() * (params_.q() - 1.0) * t_;
    if (b_term <= detail::kLogSwitch && p_prev_ <= detail::kLogSwitch) return b_term / (1.0 + p_prev_);
    const double log_b = log_rate_ + log_t_;
    return std::exp(log_b - detail::log1p_exp(log_p_prev_));
  }

  /// xi_n - c/b without cancellation; see xi_gap_to_limit().
  double xi_gap() const noexcept {
    return (params_.b() - params_.c()) / (params_.b() * (1.0 + params_.b() * (params_.q() - 1.0) * t_));
  }

  /// xi_n - 1 without cancellation.
  double xi_excess() const noexcept {
    const double u = (params_.q() - 1.0) * t_;
    if (u <= 1.0) return (params_.c() - params_.b()) * u / (1.0 + params_.b() * u);
    return (params_.c() - params_.b()) / (1.0 / u + params_.b());
  }

  double x_product() const noexcept { return x_product_; }
  double y_product() const noexcept { return y_product_; }

  SirState state() const noexcept {
    if (n_ == 0) return state0_;
    const double x = state0_.x * x_product_;
    const double y = state0_.y * y_product_;
    return {x, y, std::max(0.0, population_ - x - y)};
  }

  void advance() {
    const double a = x_factor();
    x_product_ *= a;
    y_product_ *= a / xi_;
    if (!std::isfinite(x_product_) || !std::isfinite(y_product_))
      throw NonFiniteError("closed-form product is non-finite", n_);

    p_prev_ *= xi_;
    log_p_prev_ += std::log(xi_);
    ++n_;
    t_ *= params_.q();
    log_t_ += log_q_;
    xi_ = xi_at_time(t_, params_);
  }

 private:
  Params params_;
  SirState state0_;
  double population_;
  double kappa_{};
  std::size_t n_{0};
  double t_{};
  double log_t_{};
  double log_q_{};
  double log_rate_{};
  double xi_{};
  double p_prev_{};
  double log_p_prev_{};
  double x_product_{1.0};
  double y_product_{1.0};
};

/// Closed-form state at grid index n, evaluated from scratch.
inline SirState exact_state(GridIndex n, const SirState& state0, const Params& p) {
  ExactTerms terms(state0, p);
  for (std::size_t i = 0; i < n.value; ++i) terms.advance();
  return terms.state();
}

inline Trajectory exact_trajectory(std::size_t n_max, const SirState& state0, const Params& p) {
  if (n_max == 0) throw ValidationError("n_max must be at least 1");
  ExactTerms terms(state0, p);
  Trajectory traj{p, {}};
  traj.records.reserve(n_max + 1);
  traj.records.push_back({GridIndex(0), terms.time(), state0});
  for (std::size_t k = 1; k <= n_max; ++k) {
    terms.advance();
    traj.records.push_back({GridIndex(k), terms.time(), terms.state()});
  }
  return traj;
}

}  // namespace qsir::exact
