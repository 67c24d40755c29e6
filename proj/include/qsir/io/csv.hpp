#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "qsir/core.hpp"

namespace qsir::io {

/// Shortest decimal text that parses back to the same double (at most 17
/// significant digits). 0.6 prints as "0.6", 1.0 as "1".
inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

/// Parses the whole of text as a double, accepting what format_double emits.
inline bool parse_double(std::string_view text, double& out) noexcept {
  if (text.empty()) return false;
  const char* first = text.data();
  const char* last = first + text.size();
  if (*first == '+') ++first;
  const auto res = std::from_chars(first, last, out);
  return res.ec == std::errc() && res.ptr == last;
}

inline bool parse_size(std::string_view text, std::size_t& out) noexcept {
  if (text.empty()) return false;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), out);
  return res.ec == std::errc() && res.ptr == text.data() + text.size();
}

/// Writes content to a sibling temp file and renames it over path.
inline void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open for writing", tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw IoError("write failed", tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw IoError("cannot move temporary file into place", path.string());
  }
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for reading", path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline constexpr std::string_view kTrajectoryHeader = "n,t,x,y,z,N";

inline std::string trajectory_csv(const Trajectory& traj) {
  if (traj.empty()) throw ValidationError("cannot write an empty trajectory");
  std::string out(kTrajectoryHeader);
  out += '\n';
  for (const auto& r : traj.records) {
    out += std::to_string(r.n.value);
    for (double v : {r.t, r.state.x, r.state.y, r.state.z, total_population(r.state)}) {
      out += ',';
      out += format_double(v);
    }
    out += '\n';
  }
  return out;
}

/// `n,t,x,y,z,N` header then one row per record. Nothing is created for an
/// empty trajectory.
inline void write_csv(const Trajectory& traj, const std::filesystem::path& path) {
  write_file_atomic(path, trajectory_csv(traj));
}

/// Header plus numeric rows, as read back from any CSV this library writes.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  std::size_t column(std::string_view name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return i;
    throw ValidationError("no column named " + std::string(name));
  }
};

inline std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline CsvTable parse_csv(std::string_view text) {
  CsvTable table;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    const auto fields = split(line, ',');
    if (table.header.empty()) {
      for (auto f : fields) table.header.emplace_back(f);
      continue;
    }
    if (fields.size() != table.header.size()) throw ParseError("wrong number of fields", line_no);
    std::vector<double> row(fields.size());
    for (std::size_t i = 0; i < fields.size(); ++i)
      if (!parse_double(fields[i], row[i])) throw ParseError("not a number: " + std::string(fields[i]), line_no);
    table.rows.push_back(std::move(row));
  }
  if (table.header.empty()) throw ParseError("missing header", 0);
  return table;
}

inline CsvTable read_csv(const std::filesystem::path& path) { return parse_csv(read_file(path)); }

/// Rebuilds a trajectory from `n,t,x,y,z,N` text; params are not stored in
/// the file and must be supplied.
inline Trajectory parse_trajectory_csv(std::string_view text, const Params& p) {
  const CsvTable table = parse_csv(text);
  std::vector<std::string> expected;
  for (auto f : split(kTrajectoryHeader, ',')) expected.emplace_back(f);
  if (table.header != expected) throw ParseError("unexpected trajectory header", 1);
  Trajectory traj{p, {}};
  traj.records.reserve(table.rows.size());
  for (const auto& row : table.rows) {
    if (!(row[0] >= 0.0) || row[0] != std::floor(row[0])) throw ParseError("bad record index", 0);
    traj.records.push_back({GridIndex(static_cast<std::size_t>(row[0])), row[1], SirState{row[2], row[3], row[4]}});
  }
  return traj;
}

inline Trajectory read_trajectory_csv(const std::filesystem::path& path, const Params& p) {
  return parse_trajectory_csv(read_file(path), p);
}

}  // namespace qsir::io
