#pragma once

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "qsir/errors.hpp"

namespace qsir {

/// Epidemic rates and quantum time grid constants.
///
/// b is the infection rate, c the removal rate (both 1/time), q > 1 the grid
/// ratio and t0 > 0 the first grid time. Construction rejects anything else.
class Params {
 public:
  Params(double b, double c, double q, double t0) : b_(b), c_(c), q_(q), t0_(t0) {
    require(std::isfinite(b) && b > 0.0, "b must be positive");
    require(std::isfinite(c) && c > 0.0, "c must be positive");
    require(std::isfinite(q) && q > 1.0, "q must exceed 1");
    require(std::isfinite(t0) && t0 > 0.0, "t0 must be positive");
  }

  double b() const noexcept { return b_; }
  double c() const noexcept { return c_; }
  double q() const noexcept { return q_; }
  double t0() const noexcept { return t0_; }

  /// Same rates and grid origin, different ratio.
  Params with_q(double q) const { return Params(b_, c_, q, t0_); }

  bool operator==(const Params&) const = default;

 private:
  static void require(bool ok, const char* what) {
    if (!ok) throw ValidationError(what);
  }

  double b_;
  double c_;
  double q_;
  double t0_;
};

/// Susceptible, infected and removed fractions at one instant.
struct SirState {
  double x{};
  double y{};
  double z{};

  bool finite() const noexcept { return std::isfinite(x) && std::isfinite(y) && std::isfinite(z); }
  bool nonnegative() const noexcept { return x >= 0.0 && y >= 0.0 && z >= 0.0; }
  bool valid() const noexcept { return finite() && nonnegative(); }

  bool operator==(const SirState&) const = default;
};

inline void validate(const SirState& s) {
  if (!s.finite()) throw NonFiniteError("state has a non-finite compartment");
  if (!s.nonnegative()) throw ValidationError("compartments must be nonnegative");
}

inline double total_population(const SirState& s) noexcept { return s.x + s.y + s.z; }

/// Step count on the quantum grid t_n = q^n t0.
struct GridIndex {
  std::size_t value{};

  constexpr GridIndex() = default;
  constexpr explicit GridIndex(std::size_t n) : value(n) {}

  constexpr GridIndex next() const noexcept { return GridIndex(value + 1); }
  constexpr auto operator<=>(const GridIndex&) const = default;
};

/// q^n t0 by running multiplication, so grid_time(n + 1) == q * grid_time(n)
/// bit for bit. Saturates to +inf on overflow.
inline double grid_time(GridIndex n, const Params& p) noexcept {
  double t = p.t0();
  for (std::size_t i = 0; i < n.value; ++i) t *= p.q();
  return t;
}

struct Record {
  GridIndex n;
  double t{};
  SirState state;

  bool operator==(const Record&) const = default;
};

/// Ordered (n, t, state) records for one parameter set.
///
/// Quantum and exact trajectories live on the grid (t of record n is q^n t0);
/// continuum trajectories reuse the type with n as a plain sample counter.
struct Trajectory {
  Params params;
  std::vector<Record> records;

  bool empty() const noexcept { return records.empty(); }
  std::size_t size() const noexcept { return records.size(); }
  const Record& operator[](std::size_t i) const { return records[i]; }
  const Record& back() const { return records.back(); }
};

/// Records strictly increasing in n with no gaps, starting at 0.
inline bool contiguous(const Trajectory& traj) noexcept {
  for (std::size_t i = 0; i < traj.records.size(); ++i)
    if (traj.records[i].n.value != i) return false;
  return true;
}

/// contiguous() plus every t equal to grid_time(n) within relative tol.
inline bool on_grid(const Trajectory& traj, double rel_tol = 1e-12) noexcept {
  if (!contiguous(traj)) return false;
  double t = traj.params.t0();
  for (const auto& r : traj.records) {
    if (std::isfinite(t) ? std::abs(r.t - t) > rel_tol * t : r.t != t) return false;
    t *= traj.params.q();
  }
  return true;
}

/// |a - b| / max(|a|, |b|), with the denominator floored at the smallest
/// normal double so that two subnormal values compare by absolute gap.
inline double relative_difference(double a, double b) noexcept {
  if (a == b) return 0.0;
  const double scale = std::max({std::abs(a), std::abs(b), std::numeric_limits<double>::min()});
  return std::abs(a - b) / scale;
}

inline double max_relative_difference(const SirState& a, const SirState& b) noexcept {
  return std::max({relative_difference(a.x, b.x), relative_difference(a.y, b.y),
                   relative_difference(a.z, b.z)});
}

inline double max_abs_difference(const SirState& a, const SirState& b) noexcept {
  return std::max({std::abs(a.x - b.x), std::abs(a.y - b.y), std::abs(a.z - b.z)});
}

}  // namespace qsir
