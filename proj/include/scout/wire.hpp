#pragma once

#include <charconv>
#include <cmath>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>

namespace scout {

// Line protocol spoken between the experiment and a sensor backend:
//   request:  "MEASURE <x> <y>\n"   positions in cm, 3 fractional digits
//   response: "LIGHT <value>\n"     light level, 4 fractional digits
//             "ERR <token>\n"       token in {bad_request, out_of_range, busy}
//
// Every backend — including the in-process one — routes positions and values
// through these formatters, so trajectories are bit-identical regardless of
// transport.

inline constexpr int kPositionDigits = 3;
inline constexpr int kValueDigits = 4;

enum class ErrToken { BadRequest, OutOfRange, Busy };

inline std::string_view err_token_name(ErrToken t) {
  switch (t) {
    case ErrToken::BadRequest: return "bad_request";
    case ErrToken::OutOfRange: return "out_of_range";
    case ErrToken::Busy: return "busy";
  }
  return "bad_request";
}

inline std::optional<ErrToken> parse_err_token(std::string_view s) {
  if (s == "bad_request") return ErrToken::BadRequest;
  if (s == "out_of_range") return ErrToken::OutOfRange;
  if (s == "busy") return ErrToken::Busy;
  return std::nullopt;
}

inline std::string format_fixed(double v, int digits) {
  char buf[64];
  const int len = std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return std::string(buf, buf + len);
}

inline std::optional<double> parse_double(std::string_view s) {
  double v = 0.0;
  const char* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v)) return std::nullopt;
  return v;
}

/// Round-trip a coordinate through its wire representation (3 decimals).
inline double quantize_position(double v) {
  return *parse_double(format_fixed(v, kPositionDigits));
}

/// Round-trip a light value through its wire representation (4 decimals).
inline double quantize_value(double v) { return *parse_double(format_fixed(v, kValueDigits)); }

inline std::string format_measure_request(double x, double y) {
  return "MEASURE " + format_fixed(x, kPositionDigits) + " " +
         format_fixed(y, kPositionDigits) + "\n";
}

inline std::string format_light_response(double value) {
  return "LIGHT " + format_fixed(value, kValueDigits) + "\n";
}

inline std::string format_err_response(ErrToken t) {
  return "ERR " + std::string(err_token_name(t)) + "\n";
}

namespace detail {

// Strips one trailing '\n' (and a '\r' before it, for tolerant clients).
inline std::string_view strip_line_ending(std::string_view line) {
  if (!line.empty() && line.back() == '\n') line.remove_suffix(1);
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

inline std::optional<std::string_view> take_word(std::string_view& rest) {
  if (rest.empty()) return std::nullopt;
  const auto sp = rest.find(' ');
  std::string_view word = rest.substr(0, sp);
  rest = (sp == std::string_view::npos) ? std::string_view{} : rest.substr(sp + 1);
  if (word.empty()) return std::nullopt;
  return word;
}

}  // namespace detail

struct MeasureRequest {
  double x = 0.0;
  double y = 0.0;
};

/// Parses "MEASURE <x> <y>" (line ending optional). Anything else is malformed.
inline std::optional<MeasureRequest> parse_measure_request(std::string_view line) {
  std::string_view rest = detail::strip_line_ending(line);
  const auto verb = detail::take_word(rest);
  if (!verb || *verb != "MEASURE") return std::nullopt;
  const auto xs = detail::take_word(rest);
  const auto ys = detail::take_word(rest);
  if (!xs || !ys || !rest.empty()) return std::nullopt;
  const auto x = parse_double(*xs);
  const auto y = parse_double(*ys);
  if (!x || !y) return std::nullopt;
  return MeasureRequest{*x, *y};
}

struct WireResponse {
  enum class Kind { Light, Err };
  Kind kind = Kind::Light;
  double value = 0.0;    // valid when kind == Light
  ErrToken token = ErrToken::BadRequest;  // valid when kind == Err
};

/// Parses "LIGHT <value>" or "ERR <token>" (line ending optional).
inline std::optional<WireResponse> parse_response(std::string_view line) {
  std::string_view rest = detail::strip_line_ending(line);
  const auto verb = detail::take_word(rest);
  if (!verb) return std::nullopt;
  if (*verb == "LIGHT") {
    const auto vs = detail::take_word(rest);
    if (!vs || !rest.empty()) return std::nullopt;
    const auto v = parse_double(*vs);
    if (!v) return std::nullopt;
    return WireResponse{WireResponse::Kind::Light, *v, ErrToken::BadRequest};
  }
  if (*verb == "ERR") {
    const auto ts = detail::take_word(rest);
    if (!ts || !rest.empty()) return std::nullopt;
    const auto t = parse_err_token(*ts);
    if (!t) return std::nullopt;
    return WireResponse{WireResponse::Kind::Err, 0.0, *t};
  }
  return std::nullopt;
}

}  // namespace scout
