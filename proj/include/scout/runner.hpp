#pragma once

#include <atomic>
#include <filesystem>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include "scout/config.hpp"
#include "scout/experiment.hpp"
#include "scout/logio.hpp"
#include "scout/pgm.hpp"
#include "scout/transport.hpp"

namespace scout {

inline constexpr int kExitConverged = 0;
inline constexpr int kExitNotConverged = 2;
inline constexpr int kExitError = 1;

inline std::unique_ptr<Sensor> make_sensor(const RunConfig& cfg) {
  switch (cfg.sensor.mode) {
    case SensorMode::Simulated:
      return std::make_unique<SimulatedSensor>(cfg.ground_truth(), cfg.field);
    case SensorMode::Remote:
      return std::make_unique<RemoteSensor>(cfg.sensor.host, cfg.sensor.port,
                                            cfg.sensor_timeout_ms);
    case SensorMode::FileDrop:
      return std::make_unique<FileDropSensor>(cfg.sensor.dir, cfg.sensor_poll_ms,
                                              cfg.sensor_timeout_ms);
  }
  throw ConfigError("config: unhandled sensor mode");
}

namespace detail {

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw std::runtime_error("write to " + path.string() + " failed");
}

inline std::string summary_text(const ExperimentState& state) {
  std::string s;
  const auto kv = [&s](std::string_view key, const std::string& value) {
    s += key;
    s += " = ";
    s += value;
    s += '\n';
  };
  kv("converged", state.converged ? "true" : "false");
  kv("iterations", std::to_string(state.iteration));
  kv("mean_x0", format_double(state.summary.mean_x0));
  kv("std_x0", format_double(state.summary.std_x0));
  kv("mean_y0", format_double(state.summary.mean_y0));
  kv("std_y0", format_double(state.summary.std_y0));
  kv("mean_r", format_double(state.summary.mean_r));
  kv("std_r", format_double(state.summary.std_r));
  kv("log_z", format_double(state.log_z));
  kv("log_z_err", format_double(state.log_z_err));
  kv("seed", std::to_string(state.seed));
  return s;
}

}  // namespace detail

// Per-iteration artifact writer: posterior ensemble dump plus the acquisition
// map as a PGM heatmap with a text sidecar.
inline StepObserver artifact_observer(const std::filesystem::path& out_dir) {
  return [out_dir](const ExperimentState& state, const StepOutcome& out) {
    const std::string k = std::to_string(out.record.iteration);
    write_ensemble_csv((out_dir / ("iter_" + k + "_ensemble.csv")).string(), state.ensemble);
    write_entropy_pgm((out_dir / ("iter_" + k + "_entropy.pgm")).string(), out.map);
    write_entropy_sidecar((out_dir / ("iter_" + k + "_entropy.txt")).string(), out.map);
  };
}

/// Full experiment with artifact emission. Wall-time is recorded in the log
/// only for transports with real latency; deterministic backends log ms = 0
/// so that equal seeds give byte-identical directories.
inline int cmd_simulate_run(const RunConfig& cfg, Sensor& sensor,
                            const std::filesystem::path& out_dir,
                            const StepObserver& extra_observer = {}) {
  cfg.validate();
  std::filesystem::create_directories(out_dir);
  detail::write_text_file(out_dir / "config.effective", serialize_config(cfg));

  const StepObserver artifacts = artifact_observer(out_dir);
  ExperimentResult result = run_experiment(cfg.experiment(), sensor,
                                           [&](const ExperimentState& s, const StepOutcome& o) {
                                             artifacts(s, o);
                                             if (extra_observer) extra_observer(s, o);
                                           });

  if (cfg.sensor.mode == SensorMode::Simulated)
    for (IterationRecord& r : result.records) r.ms = 0.0;

  write_iteration_log((out_dir / "log.csv").string(), result.records);
  detail::write_text_file(out_dir / "summary.txt", detail::summary_text(result.state));
  return result.state.converged ? kExitConverged : kExitNotConverged;
}

/// Re-runs inference over a logged trajectory without any sensor: positions,
/// readings, and selection entropies are taken from the log; posterior
/// columns are recomputed. With the original seed and config this reproduces
/// the original log bit-for-bit (ms is always 0 in a replay).
inline int cmd_replay_run(const RunConfig& cfg, const std::string& log_path,
                          const std::filesystem::path& out_dir) {
  cfg.validate();
  const std::vector<IterationRecord> logged = read_iteration_log(log_path);

  std::filesystem::create_directories(out_dir);
  detail::write_text_file(out_dir / "config.effective", serialize_config(cfg));

  const ExperimentConfig ecfg = cfg.experiment();
  ExperimentState state = bootstrap(ecfg);
  std::vector<IterationRecord> records;
  records.reserve(logged.size());
  for (const IterationRecord& in : logged) {
    state.dataset.append(in.x, in.y, in.d);
    const std::uint64_t iter = state.dataset.size();
    const std::uint64_t nested_seed = derive_seed({ecfg.seed, kStreamNested, iter});
    const NestedRun run =
        run_nested(state.dataset, ecfg.response, ecfg.support, ecfg.sampler, nested_seed);
    const std::uint64_t resample_seed = derive_seed({ecfg.seed, kStreamResample, iter});
    state.ensemble = resample_ensemble(run, ecfg.ensemble_size, resample_seed);
    state.summary = summarize(state.ensemble);
    state.iteration = static_cast<int>(iter);
    state.log_z = run.log_z;
    state.log_z_err = run.log_z_err;
    state.converged = ecfg.stopping.satisfied(state.summary);

    IterationRecord out = in;
    out.iteration = state.iteration;
    out.summary = state.summary;
    out.log_z = state.log_z;
    out.ms = 0.0;
    records.push_back(out);

    const std::string k = std::to_string(state.iteration);
    write_ensemble_csv((out_dir / ("iter_" + k + "_ensemble.csv")).string(), state.ensemble);
  }

  write_iteration_log((out_dir / "log.csv").string(), records);
  detail::write_text_file(out_dir / "summary.txt", detail::summary_text(state));
  return state.converged ? kExitConverged : kExitNotConverged;
}

struct BaselineReport {
  int raster_measurements = 0;
  int adaptive_measurements = 0;
  bool adaptive_converged = false;
  double ratio = 0.0;  // adaptive / raster
  ParameterSummary raster_summary;
  ParameterSummary adaptive_summary;
};

inline std::string baseline_report_text(const BaselineReport& r) {
  std::string s;
  const auto kv = [&s](std::string_view key, const std::string& value) {
    s += key;
    s += " = ";
    s += value;
    s += '\n';
  };
  kv("raster_measurements", std::to_string(r.raster_measurements));
  kv("adaptive_measurements", std::to_string(r.adaptive_measurements));
  kv("adaptive_converged", r.adaptive_converged ? "true" : "false");
  kv("ratio", format_double(r.ratio));
  kv("raster_mean_x0", format_double(r.raster_summary.mean_x0));
  kv("raster_std_x0", format_double(r.raster_summary.std_x0));
  kv("raster_mean_y0", format_double(r.raster_summary.mean_y0));
  kv("raster_std_y0", format_double(r.raster_summary.std_y0));
  kv("raster_mean_r", format_double(r.raster_summary.mean_r));
  kv("raster_std_r", format_double(r.raster_summary.std_r));
  kv("adaptive_mean_x0", format_double(r.adaptive_summary.mean_x0));
  kv("adaptive_std_x0", format_double(r.adaptive_summary.std_x0));
  kv("adaptive_mean_y0", format_double(r.adaptive_summary.mean_y0));
  kv("adaptive_std_y0", format_double(r.adaptive_summary.std_y0));
  kv("adaptive_mean_r", format_double(r.adaptive_summary.mean_r));
  kv("adaptive_std_r", format_double(r.adaptive_summary.std_r));
  return s;
}

/// Exhaustive-raster comparison: measure every cell center of a fixed
/// raster, fit once, and set the adaptive run's measurement count against
/// it under the same master seed and ground truth.
inline BaselineReport baseline_compare(const RunConfig& cfg) {
  cfg.validate();
  BaselineReport report;

  // Fixed raster scan at cell centers (no jitter), row-major order.
  const CandidateGrid raster = make_grid(cfg.field, cfg.raster_spacing, 0.0, 0.0);
  SimulatedSensor raster_sensor(cfg.ground_truth(), cfg.field);
  Dataset raster_data;
  for (const GridPoint& p : raster.points) {
    const SensorReading reading = raster_sensor.measure(p.x, p.y);
    raster_data.append(reading.position.x, reading.position.y, reading.value);
  }
  report.raster_measurements = static_cast<int>(raster_data.size());

  const ExperimentConfig ecfg = cfg.experiment();
  const NestedRun run = run_nested(raster_data, ecfg.response, ecfg.support, ecfg.sampler,
                                   derive_seed({cfg.seed, kStreamBaseline, 1}));
  const PosteriorEnsemble raster_ensemble =
      resample_ensemble(run, cfg.ensemble_size, derive_seed({cfg.seed, kStreamBaseline, 2}));
  report.raster_summary = summarize(raster_ensemble);

  // Matched adaptive run: same seed, fresh sensor stream.
  SimulatedSensor adaptive_sensor(cfg.ground_truth(), cfg.field);
  const ExperimentResult adaptive = run_experiment(ecfg, adaptive_sensor);
  report.adaptive_measurements = adaptive.state.iteration;
  report.adaptive_converged = adaptive.state.converged;
  report.adaptive_summary = adaptive.state.summary;
  report.ratio = static_cast<double>(report.adaptive_measurements) /
                 static_cast<double>(report.raster_measurements);
  return report;
}

inline int cmd_baseline_run(const RunConfig& cfg, const std::filesystem::path& out_dir,
                            std::string* report_text_out = nullptr) {
  const BaselineReport report = baseline_compare(cfg);
  const std::string text = baseline_report_text(report);
  std::filesystem::create_directories(out_dir);
  detail::write_text_file(out_dir / "config.effective", serialize_config(cfg));
  detail::write_text_file(out_dir / "baseline.txt", text);
  if (report_text_out) *report_text_out = text;
  return report.adaptive_converged ? kExitConverged : kExitNotConverged;
}

}  // namespace scout
