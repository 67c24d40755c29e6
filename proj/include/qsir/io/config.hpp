#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qsir/analysis.hpp"
#include "qsir/core.hpp"
#include "qsir/io/csv.hpp"

namespace qsir::io {

enum class Mode { Quantum, Exact, Continuous, Compare, Analyze, Sweep };

inline constexpr std::string_view mode_name(Mode m) noexcept {
  switch (m) {
    case Mode::Quantum: return "quantum";
    case Mode::Exact: return "exact";
    case Mode::Continuous: return "continuous";
    case Mode::Compare: return "compare";
    case Mode::Analyze: return "analyze";
    case Mode::Sweep: return "sweep";
  }
  return "";
}

inline std::optional<Mode> parse_mode(std::string_view name) noexcept {
  for (Mode m : {Mode::Quantum, Mode::Exact, Mode::Continuous, Mode::Compare, Mode::Analyze, Mode::Sweep})
    if (mode_name(m) == name) return m;
  return std::nullopt;
}

/// Default end time for continuous integration when the config has none.
inline constexpr double kDefaultContinuousEnd = 100.0;

struct RunConfig {
  Params params;
  SirState state0;
  Mode mode{Mode::Quantum};
  std::size_t n_steps{200};
  /// Continuous horizon; kDefaultContinuousEnd when absent.
  std::optional<double> t_end{};
  double dt{0.01};
  std::vector<double> q_list{};
  std::optional<std::string> out_csv{};
  std::optional<std::string> out_svg{};
  std::size_t horizon{100};
  double tol{analysis::kDefaultTol};
  std::size_t max_n{analysis::kDefaultMaxSteps};

  double continuous_end() const noexcept { return t_end.value_or(kDefaultContinuousEnd); }
};

/// One `key = value` assignment and the line it came from (0 for overrides).
struct ConfigEntry {
  std::string value;
  std::size_t line{0};
};

using ConfigMap = std::map<std::string, ConfigEntry, std::less<>>;

inline constexpr std::string_view kConfigKeys[] = {"b",       "c",  "q",      "t0",      "x0",      "y0",
                                                   "z0",      "mode", "n_steps", "t_end", "dt",      "q_list",
                                                   "out_csv", "out_svg", "horizon", "tol",   "max_n"};

inline std::string_view trim(std::string_view s) noexcept {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

/// Splits flat `key = value` text into entries. `#` starts a comment;
/// blank lines are skipped; unknown and repeated keys are rejected.
inline ConfigMap parse_key_values(std::string_view text) {
  ConfigMap map;
  std::size_t line_no = 0;
  while (true) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (!line.empty()) {
      const auto eq = line.find('=');
      if (eq == std::string_view::npos) throw ParseError("expected key = value", line_no);
      const std::string key(trim(line.substr(0, eq)));
      const std::string value(trim(line.substr(eq + 1)));
      if (key.empty()) throw ParseError("empty key", line_no);
      bool known = false;
      for (auto k : kConfigKeys) known = known || k == key;
      if (!known) throw ParseError("unknown key", line_no, key);
      if (value.empty()) throw ParseError("empty value", line_no, key);
      if (!map.emplace(key, ConfigEntry{value, line_no}).second) throw ParseError("duplicate key", line_no, key);
    }
    if (nl == std::string_view::npos) break;
    text = text.substr(nl + 1);
  }
  return map;
}

namespace detail {

inline const ConfigEntry* find(const ConfigMap& map, std::string_view key) {
  const auto it = map.find(key);
  return it == map.end() ? nullptr : &it->second;
}

inline double number(const ConfigMap& map, std::string_view key, std::optional<double> fallback = std::nullopt) {
  const ConfigEntry* e = find(map, key);
  if (!e) {
    if (fallback) return *fallback;
    throw ParseError("missing required key", 0, std::string(key));
  }
  double v = 0.0;
  if (!parse_double(e->value, v)) throw ParseError("not a number: " + e->value, e->line, std::string(key));
  return v;
}

inline std::size_t count(const ConfigMap& map, std::string_view key, std::size_t fallback) {
  const ConfigEntry* e = find(map, key);
  if (!e) return fallback;
  std::size_t v = 0;
  if (!parse_size(e->value, v)) throw ParseError("not a nonnegative integer: " + e->value, e->line, std::string(key));
  if (v == 0) throw ValidationError(std::string(key) + " must be at least 1");
  return v;
}

}  // namespace detail

/// Validates merged entries into a RunConfig. The mode comes from the
/// `mode` key unless mode_override is given.
inline RunConfig build_config(const ConfigMap& map, std::optional<Mode> mode_override = std::nullopt) {
  using detail::number;

  // Parse every numeric field before validating so that a missing key is
  // reported ahead of an out-of-range one.
  const double b = number(map, "b");
  const double c = number(map, "c");
  const double q = number(map, "q");
  const double t0 = number(map, "t0");
  const SirState state0{number(map, "x0"), number(map, "y0"), number(map, "z0", 0.0)};

  std::optional<Mode> mode = mode_override;
  if (!mode) {
    const ConfigEntry* e = detail::find(map, "mode");
    if (!e) throw ParseError("missing required key", 0, "mode");
    mode = parse_mode(e->value);
    if (!mode) throw ParseError("unknown mode: " + e->value, e->line, "mode");
  }

  RunConfig cfg{.params = Params(b, c, q, t0), .state0 = state0, .mode = *mode};
  validate(cfg.state0);
  cfg.n_steps = detail::count(map, "n_steps", cfg.n_steps);
  cfg.horizon = detail::count(map, "horizon", cfg.horizon);
  cfg.max_n = detail::count(map, "max_n", cfg.max_n);
  cfg.dt = number(map, "dt", cfg.dt);
  if (!(std::isfinite(cfg.dt) && cfg.dt > 0.0)) throw ValidationError("dt must be positive");
  cfg.tol = number(map, "tol", cfg.tol);
  if (!(std::isfinite(cfg.tol) && cfg.tol > 0.0)) throw ValidationError("tol must be positive");
  if (detail::find(map, "t_end")) {
    cfg.t_end = number(map, "t_end");
    if (!(std::isfinite(*cfg.t_end) && *cfg.t_end > t0)) throw ValidationError("t_end must exceed t0");
  }

  if (const ConfigEntry* e = detail::find(map, "q_list")) {
    for (auto field : split(e->value, ',')) {
      double v = 0.0;
      if (!parse_double(trim(field), v)) throw ParseError("not a number: " + std::string(field), e->line, "q_list");
      if (!(std::isfinite(v) && v > 1.0)) throw ValidationError("q must exceed 1");
      cfg.q_list.push_back(v);
    }
  }
  if (cfg.mode == Mode::Sweep && cfg.q_list.empty()) throw ParseError("missing required key", 0, "q_list");

  if (const ConfigEntry* e = detail::find(map, "out_csv")) cfg.out_csv = e->value;
  if (const ConfigEntry* e = detail::find(map, "out_svg")) cfg.out_svg = e->value;
  return cfg;
}

/// Flat config text to a validated RunConfig. Required keys: b, c, q, t0,
/// x0, y0 (and mode unless overridden; q_list for sweep). Defaults: z0 = 0,
/// n_steps = 200, dt = 0.01.
inline RunConfig parse_config(std::string_view text, std::optional<Mode> mode_override = std::nullopt) {
  return build_config(parse_key_values(text), mode_override);
}

}  // namespace qsir::io
