// scout — adaptive circle-finding instrument.
//
//   simulate  run the learning cycle against a sensor backend
//   serve     expose a simulated sensor over TCP or a file-drop directory
//   replay    re-run inference over a logged trajectory (no sensor)
//   baseline  compare the adaptive run against an exhaustive raster scan

#include <atomic>
#include <csignal>
#include <cstdlib>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "scout/scout.hpp"

namespace {

std::atomic<bool> g_stop{false};

void handle_signal(int) { g_stop.store(true); }

scout::Circle parse_circle_triple(const std::string& s) {
  const auto first = s.find(',');
  const auto second = s.find(',', first == std::string::npos ? first : first + 1);
  if (first == std::string::npos || second == std::string::npos)
    throw scout::ConfigError("expected X,Y,R for --true-circle, got: " + s);
  const auto x = scout::parse_double(s.substr(0, first));
  const auto y = scout::parse_double(s.substr(first + 1, second - first - 1));
  const auto r = scout::parse_double(s.substr(second + 1));
  if (!x || !y || !r)
    throw scout::ConfigError("expected X,Y,R for --true-circle, got: " + s);
  return scout::Circle{*x, *y, *r};
}

struct SharedFlags {
  std::string config_path;
  std::string out_dir;
  std::string sensor_spec;
  std::string true_circle;
  std::uint64_t seed = 0;
  bool seed_set = false;

  void attach(CLI::App* cmd, bool with_out = true) {
    cmd->add_option("--config", config_path, "configuration file (key = value lines)");
    cmd->add_option("--seed", seed, "master seed (overrides the config file)")
        ->each([this](const std::string&) { seed_set = true; });
    if (with_out) cmd->add_option("--out", out_dir, "output directory");
    cmd->add_option("--sensor", sensor_spec,
                    "sensor backend: simulated, remote:HOST:PORT, or filedrop:PATH");
    cmd->add_option("--true-circle", true_circle, "ground truth as X,Y,R (cm)");
  }

  scout::RunConfig resolve() const {
    scout::RunConfig cfg;
    if (!config_path.empty()) cfg = scout::load_config(config_path);
    // Endpoint precedence: --sensor flag, then environment, then config file.
    if (const char* env = std::getenv("SCOUT_SENSOR_ENDPOINT"); env && *env)
      cfg.sensor = scout::parse_sensor_spec(env);
    if (!sensor_spec.empty()) cfg.sensor = scout::parse_sensor_spec(sensor_spec);
    if (seed_set) cfg.seed = seed;
    if (!true_circle.empty()) cfg.true_circle = parse_circle_triple(true_circle);
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    cfg.validate();
    return cfg;
  }
};

int run_simulate(const SharedFlags& flags) {
  const scout::RunConfig cfg = flags.resolve();
  const auto sensor = scout::make_sensor(cfg);
  const int code = scout::cmd_simulate_run(cfg, *sensor, cfg.out_dir);
  std::cerr << (code == scout::kExitConverged ? "converged" : "not converged")
            << "; artifacts in " << cfg.out_dir << "\n";
  return code;
}

int run_serve(const SharedFlags& flags, double latency_ms, bool latency_set) {
  scout::RunConfig cfg = flags.resolve();
  if (latency_set) cfg.latency_ms = latency_ms;
  const auto log_line = [](const std::string& line) {
    std::cout << line << "\n" << std::flush;
  };
  std::signal(SIGINT, handle_signal);
  std::signal(SIGTERM, handle_signal);

  if (cfg.sensor.mode == scout::SensorMode::Remote) {
    scout::ServeOptions opts;
    opts.host = cfg.sensor.host;
    opts.port = cfg.sensor.port;
    opts.latency_ms = cfg.latency_ms;
    opts.log = log_line;
    scout::SensorServer server(cfg.ground_truth(), cfg.field, opts);
    std::cout << "listening on " << cfg.sensor.host << ":" << server.port() << "\n"
              << std::flush;
    server.serve(g_stop);
    return 0;
  }
  if (cfg.sensor.mode == scout::SensorMode::FileDrop) {
    scout::FileDropServer server(cfg.ground_truth(), cfg.field, cfg.sensor.dir,
                                 cfg.sensor_poll_ms, cfg.latency_ms, log_line);
    std::cout << "serving file drop in " << cfg.sensor.dir << "\n" << std::flush;
    server.serve(g_stop);
    return 0;
  }
  throw scout::ConfigError(
      "serve needs an endpoint: --sensor remote:HOST:PORT or filedrop:PATH");
}

int run_replay(const SharedFlags& flags, const std::string& log_path) {
  const scout::RunConfig cfg = flags.resolve();
  const int code = scout::cmd_replay_run(cfg, log_path, cfg.out_dir);
  std::cerr << "replayed " << log_path << "; artifacts in " << cfg.out_dir << "\n";
  return code;
}

int run_baseline(const SharedFlags& flags, double spacing, bool spacing_set) {
  scout::RunConfig cfg = flags.resolve();
  if (spacing_set) cfg.raster_spacing = spacing;
  std::string report;
  const int code = scout::cmd_baseline_run(cfg, cfg.out_dir, &report);
  std::cout << report << std::flush;
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"adaptive circle-finding instrument"};
  app.require_subcommand(1);

  SharedFlags sim_flags, serve_flags, replay_flags, baseline_flags;

  CLI::App* sim = app.add_subcommand("simulate", "run the learning cycle");
  sim_flags.attach(sim);

  CLI::App* serve = app.add_subcommand("serve", "serve a simulated sensor");
  serve_flags.attach(serve, /*with_out=*/false);
  double latency_ms = 0.0;
  bool latency_set = false;
  serve->add_option("--latency-ms", latency_ms, "artificial per-request latency")
      ->each([&](const std::string&) { latency_set = true; });

  CLI::App* replay = app.add_subcommand("replay", "re-run inference over a logged run");
  replay_flags.attach(replay);
  std::string log_path;
  replay->add_option("--log", log_path, "iteration log to replay")->required();

  CLI::App* baseline = app.add_subcommand("baseline", "raster-scan comparison");
  baseline_flags.attach(baseline);
  double spacing = 1.0;
  bool spacing_set = false;
  baseline->add_option("--spacing", spacing, "raster spacing in cm")
      ->each([&](const std::string&) { spacing_set = true; });

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) return run_simulate(sim_flags);
    if (serve->parsed()) return run_serve(serve_flags, latency_ms, latency_set);
    if (replay->parsed()) return run_replay(replay_flags, log_path);
    if (baseline->parsed()) return run_baseline(baseline_flags, spacing, spacing_set);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return scout::kExitError;
  }
  std::cerr << "error: no command\n";
  return scout::kExitError;
}
