#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "scout/model.hpp"
#include "scout/wire.hpp"

namespace scout {

class OutOfField : public std::runtime_error {
 public:
  explicit OutOfField(const std::string& what) : std::runtime_error(what) {}
};

class Timeout : public std::runtime_error {
 public:
  explicit Timeout(const std::string& what) : std::runtime_error(what) {}
};

class ProtocolError : public std::runtime_error {
 public:
  explicit ProtocolError(const std::string& what) : std::runtime_error(what) {}
};

class ConnectionRefused : public std::runtime_error {
 public:
  explicit ConnectionRefused(const std::string& what) : std::runtime_error(what) {}
};

class SensorBusy : public std::runtime_error {
 public:
  explicit SensorBusy(const std::string& what) : std::runtime_error(what) {}
};

class BindFailure : public std::runtime_error {
 public:
  explicit BindFailure(const std::string& what) : std::runtime_error(what) {}
};

// The hidden truth a sensor measures against.
struct GroundTruth {
  Circle circle;
  SensorResponse response;
  std::uint64_t seed = 0;
};

struct SensorReading {
  Position position;
  double value = 0.0;
  double latency_ms = 0.0;
};

/// One raw reading: Normal(d_W, sigma) inside the circle, Normal(d_B, sigma)
/// outside. Throws OutOfField for positions outside the bounds.
inline SensorReading measure_simulated(const GroundTruth& gt, const FieldBounds& field,
                                       Position pos, Rng& rng) {
  if (!field.contains(pos))
    throw OutOfField("measure_simulated: position (" + std::to_string(pos.x) + ", " +
                     std::to_string(pos.y) + ") outside the field");
  const double mean =
      contains_point(gt.circle, pos) ? gt.response.white_level : gt.response.black_level;
  return SensorReading{pos, normal_draw(rng, mean, gt.response.sigma), 0.0};
}

/// Pluggable measurement oracle. measure() may throw the sensor errors above.
class Sensor {
 public:
  virtual ~Sensor() = default;
  virtual SensorReading measure(double x, double y) = 0;
};

namespace detail {

// Core request semantics shared by every backend: quantize the position to
// wire precision, bounds-check, draw the reading from the substream keyed by
// (seed, counter), quantize the value to wire precision. The counter advances
// only on success, so rejected requests do not perturb the noise stream.
struct RequestCore {
  GroundTruth gt;
  FieldBounds field;
  std::uint64_t counter = 0;

  struct Result {
    bool ok = false;
    SensorReading reading;
  };

  Result measure_at(double x, double y) {
    const Position pos{quantize_position(x), quantize_position(y)};
    if (!field.contains(pos)) return {false, {}};
    Rng rng = child_rng({gt.seed, kStreamSensor, counter});
    SensorReading r = measure_simulated(gt, field, pos, rng);
    r.value = quantize_value(r.value);
    ++counter;
    return {true, r};
  }

  /// Full wire-level handler: one request line in, one response line out.
  std::string handle_line(std::string_view line) {
    const auto req = parse_measure_request(line);
    if (!req) return format_err_response(ErrToken::BadRequest);
    const Result res = measure_at(req->x, req->y);
    if (!res.ok) return format_err_response(ErrToken::OutOfRange);
    return format_light_response(res.reading.value);
  }
};

}  // namespace detail

/// In-process sensor. Readings are routed through the wire formatters, so a
/// trajectory taken here is bit-identical to one taken over a transport
/// against the same ground truth and seed.
class SimulatedSensor : public Sensor {
 public:
  SimulatedSensor(const GroundTruth& gt, const FieldBounds& field) : core_{gt, field, 0} {}

  SensorReading measure(double x, double y) override {
    const auto res = core_.measure_at(x, y);
    if (!res.ok)
      throw OutOfField("sensor: position (" + format_fixed(x, kPositionDigits) + ", " +
                       format_fixed(y, kPositionDigits) + ") outside the field");
    return res.reading;
  }

  std::uint64_t requests_served() const { return core_.counter; }

 private:
  detail::RequestCore core_;
};

}  // namespace scout
