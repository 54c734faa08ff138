#pragma once

#include <cstdio>
#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "agboost/errors.hpp"
#include "agboost/harness.hpp"

namespace agboost {

inline constexpr const char* kOnlineTraceHeader = "seed,t,cum_gain,best_hindsight_gain,cum_regret,theory_bound";
inline constexpr const char* kStatTraceHeader = "seed,t,cor_S";

/// Fixed nine decimals, so a zero renders as 0.000000000. Negative zero is
/// normalized so that equal values always print equal bytes.
inline std::string format_number(double v) {
  if (v == 0.0) v = 0.0;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9f", v);
  return buf;
}

inline void write_online_trace(std::ostream& out, const std::vector<OnlineTraceRow>& rows) {
  out << kOnlineTraceHeader << '\n';
  for (const auto& r : rows)
    out << r.seed << ',' << r.t << ',' << format_number(r.cum_gain) << ',' << format_number(r.best_hindsight_gain)
        << ',' << format_number(r.cum_regret) << ',' << format_number(r.theory_bound) << '\n';
}

inline void write_stat_trace(std::ostream& out, const std::vector<StatTraceRow>& rows) {
  out << kStatTraceHeader << '\n';
  for (const auto& r : rows) out << r.seed << ',' << r.t << ',' << format_number(r.cor) << '\n';
}

/// Rows are already ordered by (seed, t) because seeds run in the listed order.
inline void write_trace(std::ostream& out, const ExperimentReport& report) {
  if (report.metric == "cor_S")
    write_stat_trace(out, report.stat_rows);
  else
    write_online_trace(out, report.online_rows);
}

inline void write_trace(const ExperimentReport& report, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw io_error("cannot open '" + path + "' for writing");
  write_trace(out, report);
  out.flush();
  if (!out) throw io_error("write to '" + path + "' failed");
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string f;
  while (std::getline(ss, f, ',')) fields.push_back(f);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

inline double parse_field(const std::string& f) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(f, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (f.empty() || used != f.size()) throw invalid_input("csv: bad number '" + f + "'");
  return v;
}

inline std::uint64_t parse_unsigned(const std::string& f) {
  std::size_t used = 0;
  std::uint64_t v = 0;
  try {
    v = std::stoull(f, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (f.empty() || used != f.size() || f.front() == '-') throw invalid_input("csv: bad integer '" + f + "'");
  return v;
}

inline std::vector<std::vector<std::string>> read_csv_body(std::istream& in, const char* header, std::size_t width) {
  std::string line;
  if (!std::getline(in, line) || line != header) throw invalid_input(std::string("csv: expected header ") + header);
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto f = split_csv_line(line);
    if (f.size() != width) throw invalid_input("csv: wrong field count in '" + line + "'");
    rows.push_back(std::move(f));
  }
  return rows;
}

}  // namespace detail

inline std::vector<OnlineTraceRow> read_online_trace(std::istream& in) {
  std::vector<OnlineTraceRow> out;
  for (const auto& f : detail::read_csv_body(in, kOnlineTraceHeader, 6))
    out.push_back({detail::parse_unsigned(f[0]), static_cast<std::size_t>(detail::parse_unsigned(f[1])),
                   detail::parse_field(f[2]), detail::parse_field(f[3]), detail::parse_field(f[4]),
                   detail::parse_field(f[5])});
  return out;
}

inline std::vector<StatTraceRow> read_stat_trace(std::istream& in) {
  std::vector<StatTraceRow> out;
  for (const auto& f : detail::read_csv_body(in, kStatTraceHeader, 3))
    out.push_back({detail::parse_unsigned(f[0]), static_cast<std::size_t>(detail::parse_unsigned(f[1])),
                   detail::parse_field(f[2])});
  return out;
}

/// Human-readable report, deterministic except for the wall-time line.
inline void print_report(std::ostream& out, const ExperimentReport& r, bool with_wall_time = true) {
  out << "experiment: " << r.name << '\n'
      << "metric:     " << r.metric << " (" << (r.direction == BoundDirection::upper ? "upper" : "lower")
      << " bound)\n"
      << "seeds:      " << r.seeds.size() << '\n'
      << "mean:       " << format_number(r.stats.mean) << '\n'
      << "std:        " << format_number(r.stats.std) << '\n'
      << "ci:         " << format_number(r.stats.ci) << '\n'
      << "bound:      " << format_number(r.bound) << '\n'
      << "margin:     " << format_number(r.margin()) << '\n'
      << "clips:      " << r.clip_events << '\n'
      << "result:     " << (r.pass ? "PASS" : "FAIL") << '\n';
  if (with_wall_time) out << "wall_time:  " << format_number(r.wall_seconds) << " s\n";
}

}  // namespace agboost
