#pragma once

#include <CLI11.hpp>

#include <algorithm>
#include <future>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "qsir/analysis.hpp"
#include "qsir/continuum.hpp"
#include "qsir/core.hpp"
#include "qsir/exact.hpp"
#include "qsir/io/config.hpp"
#include "qsir/io/csv.hpp"
#include "qsir/io/svg.hpp"
#include "qsir/recurrence.hpp"

namespace qsir::cli {

using io::RunConfig;

enum ExitCode : int { kOk = 0, kConfigError = 2, kNumericError = 3, kIoError = 4 };

/// Ordered key=value summary of one run.
struct RunReport {
  std::vector<std::pair<std::string, std::string>> entries;

  void add(std::string key, std::string value) { entries.emplace_back(std::move(key), std::move(value)); }
  void add(std::string key, const char* value) { add(std::move(key), std::string(value)); }
  void add(std::string key, double value) { add(std::move(key), io::format_double(value)); }
  void add(std::string key, std::size_t value) { add(std::move(key), std::to_string(value)); }
  void add(std::string key, bool value) { add(std::move(key), std::string(value ? "true" : "false")); }

  const std::string* find(std::string_view key) const {
    for (const auto& [k, v] : entries)
      if (k == key) return &v;
    return nullptr;
  }
};

inline std::ostream& operator<<(std::ostream& os, const RunReport& report) {
  for (const auto& [k, v] : report.entries) os << k << '=' << v << '\n';
  return os;
}

namespace detail {

inline double max_population_drift(const Trajectory& traj) {
  const double n0 = total_population(traj.records.front().state);
  double drift = 0.0;
  for (const auto& r : traj.records) drift = std::max(drift, std::abs(total_population(r.state) - n0));
  return n0 > 0.0 ? drift / n0 : drift;
}

inline void trajectory_summary(RunReport& report, const Trajectory& traj) {
  const auto& last = traj.back();
  report.add("records", traj.size());
  report.add("t_final", last.t);
  report.add("x_final", last.state.x);
  report.add("y_final", last.state.y);
  report.add("z_final", last.state.z);
  report.add("max_relative_population_drift", max_population_drift(traj));
}

inline void emit_trajectory(const RunConfig& cfg, const Trajectory& traj, const std::string& label) {
  if (cfg.out_csv) io::write_csv(traj, *cfg.out_csv);
  if (cfg.out_svg) {
    const io::LabeledTrajectory lt{label, &traj};
    io::render_svg(std::span(&lt, 1), *cfg.out_svg);
  }
}

inline RunReport run_compare(const RunConfig& cfg) {
  const Trajectory quantum = recurrence::iterate(cfg.state0, cfg.params, cfg.n_steps);
  const Trajectory closed = exact::exact_trajectory(cfg.n_steps, cfg.state0, cfg.params);

  // The continuous reference lands on each grid time up to its horizon.
  std::vector<double> times;
  for (const auto& r : quantum.records)
    if (r.t <= cfg.continuous_end()) times.push_back(r.t);
  continuum::IntegrationStats stats;
  const Trajectory continuous =
      continuum::sample_at(cfg.state0, cfg.params, cfg.params.t0(), std::span<const double>(times), cfg.dt, &stats);

  std::string csv =
      "n,t,x_quantum,y_quantum,z_quantum,x_exact,y_exact,z_exact,x_continuous,y_continuous,z_continuous,"
      "rel_dev_quantum_exact,abs_dev_quantum_continuous\n";
  double max_rel = 0.0;
  double max_abs_cont = 0.0;
  for (std::size_t k = 0; k < quantum.size(); ++k) {
    const SirState& sq = quantum[k].state;
    const SirState& se = closed[k].state;
    const double rel = max_relative_difference(sq, se);
    max_rel = std::max(max_rel, rel);
    csv += std::to_string(k) + ',' + io::format_double(quantum[k].t);
    for (double v : {sq.x, sq.y, sq.z, se.x, se.y, se.z}) csv += ',' + io::format_double(v);
    if (k < continuous.size()) {
      const SirState& sc = continuous[k].state;
      const double dev = max_abs_difference(sq, sc);
      max_abs_cont = std::max(max_abs_cont, dev);
      for (double v : {sc.x, sc.y, sc.z}) csv += ',' + io::format_double(v);
      csv += ',' + io::format_double(rel) + ',' + io::format_double(dev) + '\n';
    } else {
      csv += ",nan,nan,nan," + io::format_double(rel) + ",nan\n";
    }
  }
  if (cfg.out_csv) io::write_file_atomic(*cfg.out_csv, csv);
  if (cfg.out_svg) {
    const io::LabeledTrajectory lts[] = {{"quantum", &quantum}, {"continuous", &continuous}};
    io::render_svg(lts, *cfg.out_svg, "Quantum vs continuous SIR");
  }

  RunReport report;
  report.add("mode", std::string("compare"));
  report.add("records", quantum.size());
  report.add("continuous_records", continuous.size());
  report.add("continuous_clamped", stats.clamped);
  report.add("max_rel_dev_quantum_exact", max_rel);
  report.add("max_abs_dev_quantum_continuous", max_abs_cont);
  return report;
}

inline RunReport run_analyze(const RunConfig& cfg) {
  const Params& p = cfg.params;
  RunReport report;
  report.add("mode", std::string("analyze"));
  report.add("R0", analysis::reproduction_number(p));
  report.add("class", std::string(analysis::to_string(analysis::classify_limit(p))));

  if (cfg.state0.y > 0.0) {
    const auto d = analysis::check_decay_condition(p, cfg.state0, cfg.horizon);
    report.add("condition_horizon", d.horizon);
    report.add("condition_holds", d.condition_holds);
    report.add("condition_first_failure",
               d.condition_first_failure ? std::to_string(*d.condition_first_failure) : std::string("none"));
    report.add("condition_holds_from", d.condition_holds_from);
    report.add("xi_decreasing", d.xi_decreasing);
    report.add("xi_increasing", d.xi_increasing);
    report.add("xi_above_one", d.xi_above_one);
    report.add("xi_below_one", d.xi_below_one);
    report.add("xi_identically_one", d.xi_identically_one);
    report.add("a_below_one", d.a_below_one);
    report.add("a_decreasing", d.a_decreasing);
    report.add("a_first_non_decrease",
               d.a_first_non_decrease ? std::to_string(*d.a_first_non_decrease) : std::string("none"));
    report.add("a_tilde_increasing", d.a_tilde_increasing);
    report.add("log_a_tilde_product", d.log_a_tilde_product);

    if (cfg.out_csv) {
      std::string csv = "i,xi,a,a_tilde,condition_ok\n";
      for (std::size_t i = 0; i < d.horizon; ++i)
        csv += std::to_string(i) + ',' + io::format_double(d.xi_seq[i]) + ',' + io::format_double(d.a_seq[i]) + ',' +
               io::format_double(d.a_tilde_seq[i]) + ',' + (d.condition_ok[i] ? "1" : "0") + '\n';
      io::write_file_atomic(*cfg.out_csv, csv);
    }
    if (cfg.out_svg) {
      io::PlotSpec spec{"Closed-form factor sequences", "i", "factor", {}};
      io::Series a{"a_i", {}, d.a_seq, "#1f77b4", ""};
      io::Series at{"a_tilde_i", {}, d.a_tilde_seq, "#d62728", "6,4"};
      for (std::size_t i = 0; i < d.horizon; ++i) {
        a.xs.push_back(static_cast<double>(i));
        at.xs.push_back(static_cast<double>(i));
      }
      spec.series = {std::move(a), std::move(at)};
      io::write_plot(spec, *cfg.out_svg);
    }
  } else {
    report.add("condition_horizon", std::string("n/a (y0 = 0)"));
  }

  const auto est = analysis::estimate_alpha(p, cfg.state0, cfg.tol, cfg.max_n);
  const double n = total_population(cfg.state0);
  report.add("alpha", est.alpha);
  report.add("alpha_converged", est.converged);
  report.add("alpha_steps", est.steps_used);
  report.add("alpha_residual", est.residual);
  report.add("limit", "(" + io::format_double(est.alpha) + ", 0, " + io::format_double(n - est.alpha) + ")");
  return report;
}

inline RunReport run_sweep(const RunConfig& cfg) {
  std::vector<std::future<analysis::LimitEstimate>> jobs;
  for (double q : cfg.q_list) {
    const Params p = cfg.params.with_q(q);
    jobs.push_back(std::async(std::launch::async, [p, &cfg] {
      return analysis::estimate_alpha(p, cfg.state0, cfg.tol, cfg.max_n);
    }));
  }
  std::vector<analysis::LimitEstimate> results;
  for (auto& j : jobs) results.push_back(j.get());

  std::string csv = "q,alpha,converged,steps_used\n";
  bool decreasing = true;
  io::Series series{"alpha", cfg.q_list, {}, "#1f77b4", ""};
  for (std::size_t k = 0; k < results.size(); ++k) {
    csv += io::format_double(cfg.q_list[k]) + ',' + io::format_double(results[k].alpha) + ',' +
           (results[k].converged ? "1" : "0") + ',' + std::to_string(results[k].steps_used) + '\n';
    series.ys.push_back(results[k].alpha);
    if (k > 0 && !(results[k].alpha < results[k - 1].alpha)) decreasing = false;
  }
  if (cfg.out_csv) io::write_file_atomic(*cfg.out_csv, csv);
  if (cfg.out_svg) io::write_plot({"Limit of susceptibles against q", "q", "alpha", {std::move(series)}}, *cfg.out_svg);

  RunReport report;
  report.add("mode", std::string("sweep"));
  report.add("points", results.size());
  for (std::size_t k = 0; k < results.size(); ++k)
    report.add("alpha[q=" + io::format_double(cfg.q_list[k]) + "]", results[k].alpha);
  report.add("alpha_strictly_decreasing", decreasing);
  return report;
}

}  // namespace detail

/// Executes one configured run, writing any requested files.
inline RunReport run(const RunConfig& cfg) {
  using io::Mode;
  switch (cfg.mode) {
    case Mode::Quantum:
    case Mode::Exact: {
      const bool quantum = cfg.mode == Mode::Quantum;
      const Trajectory traj = quantum ? recurrence::iterate(cfg.state0, cfg.params, cfg.n_steps)
                                      : exact::exact_trajectory(cfg.n_steps, cfg.state0, cfg.params);
      detail::emit_trajectory(cfg, traj, quantum ? "quantum" : "exact");
      RunReport report;
      report.add("mode", std::string(io::mode_name(cfg.mode)));
      detail::trajectory_summary(report, traj);
      return report;
    }
    case Mode::Continuous: {
      continuum::IntegrationStats stats;
      const continuum::ContinuumConfig cc{cfg.dt, cfg.continuous_end()};
      const Trajectory traj = continuum::integrate(cfg.state0, cc, cfg.params, cfg.params.t0(), &stats);
      detail::emit_trajectory(cfg, traj, "continuous");
      RunReport report;
      report.add("mode", std::string("continuous"));
      detail::trajectory_summary(report, traj);
      report.add("clamped", stats.clamped);
      return report;
    }
    case Mode::Compare: return detail::run_compare(cfg);
    case Mode::Analyze: return detail::run_analyze(cfg);
    case Mode::Sweep: return detail::run_sweep(cfg);
  }
  throw ValidationError("unknown mode");
}

/// Whole command line: `qsir <mode> --config <path> [flags]`. Flags override
/// config keys. Returns the process exit status.
inline int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Quantum-time SIR model: closed form, recurrence, continuous reference and analysis"};
  std::string mode_text;
  std::string config_path;
  std::string out_csv, out_svg, tol;
  std::size_t steps = 0, horizon = 0;
  app.add_option("mode", mode_text, "quantum | exact | continuous | compare | analyze | sweep")
      ->required()
      ->check(CLI::IsMember({"quantum", "exact", "continuous", "compare", "analyze", "sweep"}));
  app.add_option("--config", config_path, "flat key = value config file")->required();
  app.add_option("--out-csv", out_csv, "CSV output path");
  app.add_option("--out-svg", out_svg, "SVG output path");
  app.add_option("--steps", steps, "number of grid steps (n_steps)");
  app.add_option("--horizon", horizon, "indices checked by analyze");
  app.add_option("--tol", tol, "convergence tolerance relative to N");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "qsir: error: " << e.what() << '\n';
    return kConfigError;
  }

  try {
    io::ConfigMap map = io::parse_key_values(io::read_file(config_path));
    if (!out_csv.empty()) map["out_csv"] = {out_csv, 0};
    if (!out_svg.empty()) map["out_svg"] = {out_svg, 0};
    if (app.count("--steps")) map["n_steps"] = {std::to_string(steps), 0};
    if (app.count("--horizon")) map["horizon"] = {std::to_string(horizon), 0};
    if (!tol.empty()) map["tol"] = {tol, 0};
    const RunConfig cfg = io::build_config(map, io::parse_mode(mode_text));
    out << run(cfg);
    return kOk;
  } catch (const ParseError& e) {
    err << "qsir: error: " << e.what() << '\n';
    return kConfigError;
  } catch (const ValidationError& e) {
    err << "qsir: error: " << e.what() << '\n';
    return kConfigError;
  } catch (const IoError& e) {
    err << "qsir: error: " << e.what() << '\n';
    return kIoError;
  } catch (const Error& e) {
    err << "qsir: error: " << e.what() << '\n';
    return kNumericError;
  }
}

}  // namespace qsir::cli
