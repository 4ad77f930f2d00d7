#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include "scout/inquiry.hpp"
#include "scout/model.hpp"
#include "scout/nested.hpp"
#include "scout/sensor.hpp"

namespace scout {

// Stop once every posterior parameter standard deviation is at or below its
// tolerance, or after max_measurements regardless.
struct StoppingRule {
  double tol_x0 = 0.5;
  double tol_y0 = 0.5;
  double tol_r = 0.5;
  int max_measurements = 100;

  bool valid() const {
    return tol_x0 > 0.0 && tol_y0 > 0.0 && tol_r > 0.0 && max_measurements >= 1;
  }
  bool satisfied(const ParameterSummary& s) const {
    return s.std_x0 <= tol_x0 && s.std_y0 <= tol_y0 && s.std_r <= tol_r;
  }
};

struct ExperimentConfig {
  PriorSupport support;
  SensorResponse response;
  SamplerConfig sampler;
  InquiryConfig inquiry;
  StoppingRule stopping;
  int ensemble_size = 150;
  int sensor_retries = 3;  // extra attempts after a Timeout
  std::uint64_t seed = 0;

  bool valid() const {
    return support.valid() && response.valid() && sampler.valid() && inquiry.valid() &&
           stopping.valid() && ensemble_size >= 2 && sensor_retries >= 0;
  }
};

struct ExperimentState {
  Dataset dataset;
  PosteriorEnsemble ensemble;
  ParameterSummary summary;
  int iteration = 0;
  bool converged = false;
  double log_z = 0.0;
  double log_z_err = 0.0;
  std::uint64_t seed = 0;
};

struct IterationRecord {
  int iteration = 0;
  double x = 0.0;
  double y = 0.0;
  double d = 0.0;
  double entropy = 0.0;
  ParameterSummary summary;
  double log_z = 0.0;
  double ms = 0.0;  // wall time of the step; loggers may zero it for replayable runs
};

struct StepOutcome {
  IterationRecord record;
  EntropyMap map;                 // acquisition surface the selection came from
  double white_fraction = 0.0;    // pre-step ensemble white-fraction at the measured point
  bool white_branch = false;      // reading closer to d_W than to d_B
};

/// Initial state: no data, so the ensemble is 150 (cfg.ensemble_size) draws
/// from the prior and the evidence is exactly 1.
inline ExperimentState bootstrap(const ExperimentConfig& cfg) {
  if (!cfg.valid()) throw std::invalid_argument("bootstrap: invalid experiment config");
  ExperimentState state;
  state.seed = cfg.seed;
  Rng rng = child_rng({cfg.seed, kStreamBootstrap});
  state.ensemble.source_seed = cfg.seed;
  state.ensemble.circles.reserve(static_cast<std::size_t>(cfg.ensemble_size));
  for (int i = 0; i < cfg.ensemble_size; ++i)
    state.ensemble.circles.push_back(sample_prior(cfg.support, rng));
  state.summary = summarize(state.ensemble);
  return state;
}

/// One learning cycle: select the max-entropy site, measure there, re-infer
/// on the enlarged dataset, resample the ensemble, update convergence.
/// Sensor Timeouts are retried up to cfg.sensor_retries times, then rethrown.
inline StepOutcome step(ExperimentState& state, Sensor& sensor, const ExperimentConfig& cfg) {
  if (state.converged) throw std::logic_error("step: experiment already converged");
  if (state.iteration >= cfg.stopping.max_measurements)
    throw std::logic_error("step: measurement budget exhausted");

  const auto t0 = std::chrono::steady_clock::now();
  const std::uint64_t iter = static_cast<std::uint64_t>(state.iteration) + 1;

  const std::uint64_t select_seed = derive_seed({cfg.seed, kStreamInquiry, iter});
  SelectedMeasurement sel =
      select_measurement(state.ensemble, cfg.response, cfg.support.field, cfg.inquiry,
                         select_seed);

  SensorReading reading;
  for (int attempt = 0;; ++attempt) {
    try {
      reading = sensor.measure(sel.point.x, sel.point.y);
      break;
    } catch (const Timeout&) {
      if (attempt >= cfg.sensor_retries) throw;
    }
  }

  StepOutcome out;
  out.white_fraction = white_fraction(state.ensemble, reading.position.x, reading.position.y);
  out.white_branch = std::abs(reading.value - cfg.response.white_level) <
                     std::abs(reading.value - cfg.response.black_level);
  out.map = std::move(sel.map);

  state.dataset.append(reading.position.x, reading.position.y, reading.value);

  const std::uint64_t nested_seed = derive_seed({cfg.seed, kStreamNested, iter});
  const NestedRun run =
      run_nested(state.dataset, cfg.response, cfg.support, cfg.sampler, nested_seed);

  const std::uint64_t resample_seed = derive_seed({cfg.seed, kStreamResample, iter});
  state.ensemble = resample_ensemble(run, cfg.ensemble_size, resample_seed);
  state.summary = summarize(state.ensemble);
  state.iteration = static_cast<int>(state.dataset.size());
  state.log_z = run.log_z;
  state.log_z_err = run.log_z_err;
  state.converged = cfg.stopping.satisfied(state.summary);

  out.record.iteration = state.iteration;
  out.record.x = reading.position.x;
  out.record.y = reading.position.y;
  out.record.d = reading.value;
  out.record.entropy = sel.entropy;
  out.record.summary = state.summary;
  out.record.log_z = state.log_z;
  out.record.ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

struct ExperimentResult {
  ExperimentState state;
  std::vector<IterationRecord> records;
};

/// Called after each completed step with the updated state and the step's
/// outcome; used for logging, artifact emission, and instrumentation.
using StepObserver = std::function<void(const ExperimentState&, const StepOutcome&)>;

/// Runs the learning cycle until the stopping rule is satisfied or the
/// measurement budget runs out (a normal outcome, flagged via converged).
inline ExperimentResult run_experiment(const ExperimentConfig& cfg, Sensor& sensor,
                                       const StepObserver& observe = {}) {
  ExperimentResult result;
  result.state = bootstrap(cfg);
  while (!result.state.converged &&
         result.state.iteration < cfg.stopping.max_measurements) {
    StepOutcome out = step(result.state, sensor, cfg);
    if (observe) observe(result.state, out);
    result.records.push_back(out.record);
  }
  return result;
}

}  // namespace scout
