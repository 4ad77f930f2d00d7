#pragma once

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "scout/experiment.hpp"
#include "scout/nested.hpp"

namespace scout {

inline constexpr std::string_view kIterationLogHeader =
    "iteration,x,y,d,entropy,mean_x0,std_x0,mean_y0,std_y0,mean_r,std_r,log_z,ms";
inline constexpr std::string_view kEnsembleHeader = "x0,y0,r";

/// Shortest decimal form that parses back to the same double. CSV logs use
/// this everywhere so a replayed run can reproduce values bit-for-bit.
inline std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) throw std::runtime_error("format_double: conversion failed");
  return std::string(buf, ptr);
}

class LogFormatError : public std::runtime_error {
 public:
  explicit LogFormatError(const std::string& what) : std::runtime_error(what) {}
};

namespace detail {

inline std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

inline double parse_field_double(std::string_view s, std::string_view what) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw LogFormatError("log: bad " + std::string(what) + " value: " + std::string(s));
  return v;
}

inline long parse_field_long(std::string_view s, std::string_view what) {
  long v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw LogFormatError("log: bad " + std::string(what) + " value: " + std::string(s));
  return v;
}

inline std::string chomp(std::string line) {
  while (!line.empty() && (line.back() == '\n' || line.back() == '\r')) line.pop_back();
  return line;
}

}  // namespace detail

inline std::string iteration_record_csv(const IterationRecord& r) {
  std::string row;
  row += std::to_string(r.iteration);
  row += ',';
  row += format_double(r.x);
  row += ',';
  row += format_double(r.y);
  row += ',';
  row += format_double(r.d);
  row += ',';
  row += format_double(r.entropy);
  row += ',';
  row += format_double(r.summary.mean_x0);
  row += ',';
  row += format_double(r.summary.std_x0);
  row += ',';
  row += format_double(r.summary.mean_y0);
  row += ',';
  row += format_double(r.summary.std_y0);
  row += ',';
  row += format_double(r.summary.mean_r);
  row += ',';
  row += format_double(r.summary.std_r);
  row += ',';
  row += format_double(r.log_z);
  row += ',';
  row += format_double(r.ms);
  return row;
}

inline IterationRecord parse_iteration_record(std::string_view line) {
  const auto f = detail::split_csv(line);
  if (f.size() != 13) throw LogFormatError("log: expected 13 columns, got " +
                                           std::to_string(f.size()));
  IterationRecord r;
  r.iteration = static_cast<int>(detail::parse_field_long(f[0], "iteration"));
  r.x = detail::parse_field_double(f[1], "x");
  r.y = detail::parse_field_double(f[2], "y");
  r.d = detail::parse_field_double(f[3], "d");
  r.entropy = detail::parse_field_double(f[4], "entropy");
  r.summary.mean_x0 = detail::parse_field_double(f[5], "mean_x0");
  r.summary.std_x0 = detail::parse_field_double(f[6], "std_x0");
  r.summary.mean_y0 = detail::parse_field_double(f[7], "mean_y0");
  r.summary.std_y0 = detail::parse_field_double(f[8], "std_y0");
  r.summary.mean_r = detail::parse_field_double(f[9], "mean_r");
  r.summary.std_r = detail::parse_field_double(f[10], "std_r");
  r.log_z = detail::parse_field_double(f[11], "log_z");
  r.ms = detail::parse_field_double(f[12], "ms");
  return r;
}

inline void write_iteration_log(std::ostream& out, const std::vector<IterationRecord>& records) {
  out << kIterationLogHeader << '\n';
  for (const IterationRecord& r : records) out << iteration_record_csv(r) << '\n';
}

inline void write_iteration_log(const std::string& path,
                                const std::vector<IterationRecord>& records) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("log: cannot open " + path + " for writing");
  write_iteration_log(out, records);
  if (!out) throw std::runtime_error("log: write to " + path + " failed");
}

inline std::vector<IterationRecord> read_iteration_log(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw LogFormatError("log: missing header");
  if (detail::chomp(line) != kIterationLogHeader)
    throw LogFormatError("log: unexpected header: " + line);
  std::vector<IterationRecord> records;
  while (std::getline(in, line)) {
    const std::string row = detail::chomp(line);
    if (row.empty()) continue;
    records.push_back(parse_iteration_record(row));
  }
  return records;
}

inline std::vector<IterationRecord> read_iteration_log(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("log: cannot open " + path);
  return read_iteration_log(in);
}

inline void write_ensemble_csv(std::ostream& out, const PosteriorEnsemble& e) {
  out << kEnsembleHeader << '\n';
  for (const Circle& c : e.circles)
    out << format_double(c.x0) << ',' << format_double(c.y0) << ',' << format_double(c.r)
        << '\n';
}

inline void write_ensemble_csv(const std::string& path, const PosteriorEnsemble& e) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("ensemble: cannot open " + path + " for writing");
  write_ensemble_csv(out, e);
  if (!out) throw std::runtime_error("ensemble: write to " + path + " failed");
}

inline PosteriorEnsemble read_ensemble_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw LogFormatError("ensemble: missing header");
  if (detail::chomp(line) != kEnsembleHeader)
    throw LogFormatError("ensemble: unexpected header: " + line);
  PosteriorEnsemble e;
  while (std::getline(in, line)) {
    const std::string row = detail::chomp(line);
    if (row.empty()) continue;
    const auto f = detail::split_csv(row);
    if (f.size() != 3) throw LogFormatError("ensemble: expected 3 columns");
    Circle c;
    c.x0 = detail::parse_field_double(f[0], "x0");
    c.y0 = detail::parse_field_double(f[1], "y0");
    c.r = detail::parse_field_double(f[2], "r");
    e.circles.push_back(c);
  }
  return e;
}

inline PosteriorEnsemble read_ensemble_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("ensemble: cannot open " + path);
  return read_ensemble_csv(in);
}

}  // namespace scout
