#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_set>

#include "scout/experiment.hpp"
#include "scout/logio.hpp"
#include "scout/sensor.hpp"

namespace scout {

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

enum class SensorMode { Simulated, Remote, FileDrop };

// Parsed form of the sensor key: "simulated", "remote:HOST:PORT", or
// "filedrop:PATH".
struct SensorSpec {
  SensorMode mode = SensorMode::Simulated;
  std::string host;
  int port = 0;
  std::string dir;

  std::string to_string() const {
    switch (mode) {
      case SensorMode::Simulated: return "simulated";
      case SensorMode::Remote: return "remote:" + host + ":" + std::to_string(port);
      case SensorMode::FileDrop: return "filedrop:" + dir;
    }
    return "simulated";
  }
};

inline SensorSpec parse_sensor_spec(std::string_view s) {
  SensorSpec spec;
  if (s == "simulated") return spec;
  if (s.rfind("remote:", 0) == 0) {
    const std::string_view rest = s.substr(7);
    const auto colon = rest.rfind(':');
    if (colon == std::string_view::npos || colon == 0 || colon + 1 == rest.size())
      throw ConfigError("sensor: expected remote:HOST:PORT, got: " + std::string(s));
    spec.mode = SensorMode::Remote;
    spec.host = std::string(rest.substr(0, colon));
    const std::string_view port_sv = rest.substr(colon + 1);
    int port = 0;
    const auto [ptr, ec] = std::from_chars(port_sv.data(), port_sv.data() + port_sv.size(), port);
    if (ec != std::errc() || ptr != port_sv.data() + port_sv.size() || port < 1 || port > 65535)
      throw ConfigError("sensor: bad port in: " + std::string(s));
    spec.port = port;
    return spec;
  }
  if (s.rfind("filedrop:", 0) == 0) {
    const std::string_view rest = s.substr(9);
    if (rest.empty()) throw ConfigError("sensor: expected filedrop:PATH, got: " + std::string(s));
    spec.mode = SensorMode::FileDrop;
    spec.dir = std::string(rest);
    return spec;
  }
  throw ConfigError("sensor: unknown mode: " + std::string(s) +
                    " (expected simulated, remote:HOST:PORT, or filedrop:PATH)");
}

// Every run-relevant setting, flat and explicit. Defaults reproduce the
// reference problem: 20x30 cm field, radii 1-15 cm, levels 0.8/0.2 with
// sigma 0.06, 100 live points, 150-member ensemble, 0.5 cm tolerances.
struct RunConfig {
  FieldBounds field{};
  double r_min = 1.0;
  double r_max = 15.0;
  SensorResponse response{};
  Circle true_circle{10.0, 15.0, 5.0};
  SamplerConfig sampler{};
  InquiryConfig inquiry{};
  int ensemble_size = 150;
  StoppingRule stopping{};
  std::uint64_t seed = 1;
  std::string out_dir = "out";
  SensorSpec sensor{};
  int sensor_timeout_ms = 5000;
  int sensor_poll_ms = 10;
  int sensor_retries = 3;
  double latency_ms = 0.0;       // serve-side artificial latency
  double raster_spacing = 1.0;   // baseline raster scan spacing

  PriorSupport support() const { return PriorSupport{field, r_min, r_max}; }

  GroundTruth ground_truth() const { return GroundTruth{true_circle, response, seed}; }

  ExperimentConfig experiment() const {
    ExperimentConfig cfg;
    cfg.support = support();
    cfg.response = response;
    cfg.sampler = sampler;
    cfg.inquiry = inquiry;
    cfg.stopping = stopping;
    cfg.ensemble_size = ensemble_size;
    cfg.sensor_retries = sensor_retries;
    cfg.seed = seed;
    return cfg;
  }

  void validate() const {
    if (!field.valid()) throw ConfigError("config: field bounds must satisfy min < max");
    if (!(r_min >= 0.0 && r_min < r_max))
      throw ConfigError("config: radius range must satisfy 0 <= r_min < r_max");
    if (!response.valid())
      throw ConfigError("config: sensor response needs white_level > black_level and sigma > 0");
    if (!sampler.valid()) throw ConfigError("config: invalid sampler settings");
    if (!inquiry.valid()) throw ConfigError("config: invalid inquiry settings");
    if (inquiry.grid_spacing >= std::min(field.width(), field.height()))
      throw ConfigError("config: grid_spacing must be smaller than the field extent");
    if (!stopping.valid()) throw ConfigError("config: invalid stopping rule");
    if (ensemble_size < 2) throw ConfigError("config: ensemble_size must be >= 2");
    if (!support().admits(true_circle))
      throw ConfigError("config: true circle must lie within the prior support");
    if (sensor_timeout_ms < 1) throw ConfigError("config: sensor_timeout_ms must be >= 1");
    if (sensor_poll_ms < 1) throw ConfigError("config: sensor_poll_ms must be >= 1");
    if (sensor_retries < 0) throw ConfigError("config: sensor_retries must be >= 0");
    if (latency_ms < 0.0) throw ConfigError("config: latency_ms must be >= 0");
    if (!(raster_spacing > 0.0) || raster_spacing >= std::min(field.width(), field.height()))
      throw ConfigError("config: raster_spacing must be in (0, min field extent)");
  }
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

inline double config_double(std::string_view v, std::string_view key) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size())
    throw ConfigError("config: bad number for " + std::string(key) + ": " + std::string(v));
  return out;
}

inline long config_long(std::string_view v, std::string_view key) {
  long out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size())
    throw ConfigError("config: bad integer for " + std::string(key) + ": " + std::string(v));
  return out;
}

inline std::uint64_t config_u64(std::string_view v, std::string_view key) {
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size())
    throw ConfigError("config: bad unsigned integer for " + std::string(key) + ": " +
                      std::string(v));
  return out;
}

inline int config_int(std::string_view v, std::string_view key) {
  const long l = config_long(v, key);
  if (l < INT32_MIN || l > INT32_MAX)
    throw ConfigError("config: integer out of range for " + std::string(key));
  return static_cast<int>(l);
}

}  // namespace detail

/// Applies one `key = value` assignment. Unknown keys are a hard error.
inline void apply_config_entry(RunConfig& cfg, std::string_view key, std::string_view value) {
  using detail::config_double;
  using detail::config_int;
  using detail::config_long;
  using detail::config_u64;

  if (key == "field_x_min") cfg.field.x_min = config_double(value, key);
  else if (key == "field_x_max") cfg.field.x_max = config_double(value, key);
  else if (key == "field_y_min") cfg.field.y_min = config_double(value, key);
  else if (key == "field_y_max") cfg.field.y_max = config_double(value, key);
  else if (key == "r_min") cfg.r_min = config_double(value, key);
  else if (key == "r_max") cfg.r_max = config_double(value, key);
  else if (key == "white_level") cfg.response.white_level = config_double(value, key);
  else if (key == "black_level") cfg.response.black_level = config_double(value, key);
  else if (key == "sigma") cfg.response.sigma = config_double(value, key);
  else if (key == "true_x0") cfg.true_circle.x0 = config_double(value, key);
  else if (key == "true_y0") cfg.true_circle.y0 = config_double(value, key);
  else if (key == "true_r") cfg.true_circle.r = config_double(value, key);
  else if (key == "n_live") cfg.sampler.n_live = config_int(value, key);
  else if (key == "termination_frac") cfg.sampler.termination_frac = config_double(value, key);
  else if (key == "walk_steps") cfg.sampler.walk_steps = config_int(value, key);
  else if (key == "walk_retries") cfg.sampler.walk_retries = config_int(value, key);
  else if (key == "max_iterations") cfg.sampler.max_iterations = config_long(value, key);
  else if (key == "grid_spacing") cfg.inquiry.grid_spacing = config_double(value, key);
  else if (key == "n_bins") cfg.inquiry.n_bins = config_int(value, key);
  else if (key == "k_per_model") cfg.inquiry.k_per_model = config_int(value, key);
  else if (key == "ensemble_size") cfg.ensemble_size = config_int(value, key);
  else if (key == "tol_x0") cfg.stopping.tol_x0 = config_double(value, key);
  else if (key == "tol_y0") cfg.stopping.tol_y0 = config_double(value, key);
  else if (key == "tol_r") cfg.stopping.tol_r = config_double(value, key);
  else if (key == "max_measurements") cfg.stopping.max_measurements = config_int(value, key);
  else if (key == "seed") cfg.seed = config_u64(value, key);
  else if (key == "out_dir") cfg.out_dir = std::string(value);
  else if (key == "sensor") cfg.sensor = parse_sensor_spec(value);
  else if (key == "sensor_timeout_ms") cfg.sensor_timeout_ms = config_int(value, key);
  else if (key == "sensor_poll_ms") cfg.sensor_poll_ms = config_int(value, key);
  else if (key == "sensor_retries") cfg.sensor_retries = config_int(value, key);
  else if (key == "latency_ms") cfg.latency_ms = config_double(value, key);
  else if (key == "raster_spacing") cfg.raster_spacing = config_double(value, key);
  else throw ConfigError("config: unknown key: " + std::string(key));
}

/// Parses flat `key = value` text with `#` comments onto the defaults.
inline RunConfig parse_config(std::istream& in) {
  RunConfig cfg;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view sv = line;
    const auto hash = sv.find('#');
    if (hash != std::string_view::npos) sv = sv.substr(0, hash);
    sv = detail::trim(sv);
    if (sv.empty()) continue;
    const auto eq = sv.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("config: line " + std::to_string(line_no) +
                        ": expected key = value, got: " + std::string(sv));
    const std::string_view key = detail::trim(sv.substr(0, eq));
    const std::string_view value = detail::trim(sv.substr(eq + 1));
    if (key.empty())
      throw ConfigError("config: line " + std::to_string(line_no) + ": empty key");
    apply_config_entry(cfg, key, value);
  }
  return cfg;
}

inline RunConfig parse_config_string(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("config: cannot open " + path);
  return parse_config(in);
}

/// Serializes every run-content key (out_dir is a delivery destination, not
/// run content, and is deliberately omitted). Reading the result back yields
/// an identical run.
inline std::string serialize_config(const RunConfig& cfg) {
  std::string s;
  s += "# effective configuration: all keys explicit\n";
  const auto kv = [&s](std::string_view key, const std::string& value) {
    s += key;
    s += " = ";
    s += value;
    s += '\n';
  };
  kv("field_x_min", format_double(cfg.field.x_min));
  kv("field_x_max", format_double(cfg.field.x_max));
  kv("field_y_min", format_double(cfg.field.y_min));
  kv("field_y_max", format_double(cfg.field.y_max));
  kv("r_min", format_double(cfg.r_min));
  kv("r_max", format_double(cfg.r_max));
  kv("white_level", format_double(cfg.response.white_level));
  kv("black_level", format_double(cfg.response.black_level));
  kv("sigma", format_double(cfg.response.sigma));
  kv("true_x0", format_double(cfg.true_circle.x0));
  kv("true_y0", format_double(cfg.true_circle.y0));
  kv("true_r", format_double(cfg.true_circle.r));
  kv("n_live", std::to_string(cfg.sampler.n_live));
  kv("termination_frac", format_double(cfg.sampler.termination_frac));
  kv("walk_steps", std::to_string(cfg.sampler.walk_steps));
  kv("walk_retries", std::to_string(cfg.sampler.walk_retries));
  kv("max_iterations", std::to_string(cfg.sampler.max_iterations));
  kv("grid_spacing", format_double(cfg.inquiry.grid_spacing));
  kv("n_bins", std::to_string(cfg.inquiry.n_bins));
  kv("k_per_model", std::to_string(cfg.inquiry.k_per_model));
  kv("ensemble_size", std::to_string(cfg.ensemble_size));
  kv("tol_x0", format_double(cfg.stopping.tol_x0));
  kv("tol_y0", format_double(cfg.stopping.tol_y0));
  kv("tol_r", format_double(cfg.stopping.tol_r));
  kv("max_measurements", std::to_string(cfg.stopping.max_measurements));
  kv("seed", std::to_string(cfg.seed));
  kv("sensor", cfg.sensor.to_string());
  kv("sensor_timeout_ms", std::to_string(cfg.sensor_timeout_ms));
  kv("sensor_poll_ms", std::to_string(cfg.sensor_poll_ms));
  kv("sensor_retries", std::to_string(cfg.sensor_retries));
  kv("latency_ms", format_double(cfg.latency_ms));
  kv("raster_spacing", format_double(cfg.raster_spacing));
  return s;
}

}  // namespace scout
