// Persistence-layer tests: lossless double formatting, iteration-log and
// ensemble CSV round trips, config parsing/serialization, sensor-spec
// grammar, and the entropy-map raster artifacts.

#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "scout/config.hpp"
#include "scout/logio.hpp"
#include "scout/pgm.hpp"
#include "scout/scout.hpp"

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("scout_io_" + name);
}

scout::IterationRecord awkward_record() {
  scout::IterationRecord r;
  r.iteration = 17;
  r.x = 10.0 / 3.0;
  r.y = 0.30000000000000004;  // 0.1 + 0.2, not representable as a short decimal
  r.d = 0.8310;
  r.entropy = std::log(32.0);
  r.summary.mean_x0 = 9.987654321987654;
  r.summary.std_x0 = 1e-12;
  r.summary.mean_y0 = -0.0;
  r.summary.std_y0 = 12345678.9012345;
  r.summary.mean_r = 5.000000000000001;
  r.summary.std_r = 2.2250738585072014e-308;  // smallest normal double
  r.log_z = -743.0301029995664;
  r.ms = 0.0;
  return r;
}

bool same_bits(double a, double b) {
  return std::memcmp(&a, &b, sizeof(double)) == 0;
}

}  // namespace

TEST_CASE("format_double: shortest form parses back to the identical double") {
  const std::vector<double> cases = {
      0.0,      -0.0,      1.0,         -1.0,        0.1,
      1.0 / 3., M_PI,      1e300,       -1e-300,     20.0 / std::sqrt(12.0),
      0.8310,   5.0 / 7.0, 1234567.875, 4.9406564584124654e-324};
  for (double v : cases) {
    const std::string s = scout::format_double(v);
    const double back = std::strtod(s.c_str(), nullptr);
    INFO("value " << v << " formatted as " << s);
    CHECK(same_bits(back, v));
  }
  // Sanity: common values take their natural short spelling.
  CHECK(scout::format_double(0.5) == "0.5");
  CHECK(scout::format_double(10.0) == "10");
  CHECK(scout::format_double(-2.25) == "-2.25");
}

TEST_CASE("iteration record: csv row round-trips bit for bit") {
  const scout::IterationRecord r = awkward_record();
  const std::string row = scout::iteration_record_csv(r);
  const scout::IterationRecord back = scout::parse_iteration_record(row);

  CHECK(back.iteration == r.iteration);
  CHECK(same_bits(back.x, r.x));
  CHECK(same_bits(back.y, r.y));
  CHECK(same_bits(back.d, r.d));
  CHECK(same_bits(back.entropy, r.entropy));
  CHECK(same_bits(back.summary.mean_x0, r.summary.mean_x0));
  CHECK(same_bits(back.summary.std_x0, r.summary.std_x0));
  CHECK(same_bits(back.summary.mean_y0, r.summary.mean_y0));
  CHECK(same_bits(back.summary.std_y0, r.summary.std_y0));
  CHECK(same_bits(back.summary.mean_r, r.summary.mean_r));
  CHECK(same_bits(back.summary.std_r, r.summary.std_r));
  CHECK(same_bits(back.log_z, r.log_z));
  CHECK(same_bits(back.ms, r.ms));
}

TEST_CASE("iteration log: write then read returns the same records") {
  std::vector<scout::IterationRecord> records;
  for (int i = 1; i <= 3; ++i) {
    scout::IterationRecord r = awkward_record();
    r.iteration = i;
    r.x = 0.5 + i;
    r.log_z = -1.5 * i;
    records.push_back(r);
  }

  std::ostringstream out;
  scout::write_iteration_log(out, records);
  const std::string text = out.str();

  // Header is the exact documented column list, and one line per record.
  std::istringstream first_line(text);
  std::string header;
  std::getline(first_line, header);
  CHECK(header == "iteration,x,y,d,entropy,mean_x0,std_x0,mean_y0,std_y0,mean_r,std_r,log_z,ms");
  CHECK(std::count(text.begin(), text.end(), '\n') == 4);

  std::istringstream in(text);
  const std::vector<scout::IterationRecord> back = scout::read_iteration_log(in);
  REQUIRE(back.size() == records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    CHECK(back[i].iteration == records[i].iteration);
    CHECK(same_bits(back[i].x, records[i].x));
    CHECK(same_bits(back[i].log_z, records[i].log_z));
    CHECK(same_bits(back[i].summary.std_r, records[i].summary.std_r));
  }

  SECTION("carriage returns and trailing blank lines are tolerated") {
    std::string crlf = text;
    std::string with_cr;
    for (char c : crlf) {
      if (c == '\n') with_cr += "\r\n";
      else with_cr += c;
    }
    with_cr += "\r\n";
    std::istringstream crin(with_cr);
    const auto parsed = scout::read_iteration_log(crin);
    CHECK(parsed.size() == records.size());
  }
}

TEST_CASE("iteration log: malformed input is a typed error") {
  SECTION("missing header") {
    std::istringstream in("");
    CHECK_THROWS_AS(scout::read_iteration_log(in), scout::LogFormatError);
  }
  SECTION("wrong header") {
    std::istringstream in("iter,x,y\n1,2,3\n");
    CHECK_THROWS_AS(scout::read_iteration_log(in), scout::LogFormatError);
  }
  SECTION("wrong column count") {
    std::istringstream in(std::string("iteration,x,y,d,entropy,mean_x0,std_x0,mean_y0,std_y0,"
                                      "mean_r,std_r,log_z,ms\n1,2,3\n"));
    CHECK_THROWS_AS(scout::read_iteration_log(in), scout::LogFormatError);
  }
  SECTION("non-numeric field") {
    std::istringstream in(std::string("iteration,x,y,d,entropy,mean_x0,std_x0,mean_y0,std_y0,"
                                      "mean_r,std_r,log_z,ms\n1,2,3,4,5,6,7,8,9,10,11,oops,13\n"));
    CHECK_THROWS_AS(scout::read_iteration_log(in), scout::LogFormatError);
  }
  SECTION("non-integer iteration") {
    std::istringstream in(std::string("iteration,x,y,d,entropy,mean_x0,std_x0,mean_y0,std_y0,"
                                      "mean_r,std_r,log_z,ms\n1.5,2,3,4,5,6,7,8,9,10,11,12,13\n"));
    CHECK_THROWS_AS(scout::read_iteration_log(in), scout::LogFormatError);
  }
}

TEST_CASE("ensemble csv: round trip and errors") {
  scout::PosteriorEnsemble e;
  e.circles = {{1.5, 2.5, 3.5}, {10.0 / 3.0, 0.1, 14.999999999999998}};

  std::ostringstream out;
  scout::write_ensemble_csv(out, e);
  const std::string text = out.str();
  CHECK(text.rfind("x0,y0,r\n", 0) == 0);

  std::istringstream in(text);
  const scout::PosteriorEnsemble back = scout::read_ensemble_csv(in);
  REQUIRE(back.circles.size() == e.circles.size());
  for (std::size_t i = 0; i < e.circles.size(); ++i) {
    CHECK(same_bits(back.circles[i].x0, e.circles[i].x0));
    CHECK(same_bits(back.circles[i].y0, e.circles[i].y0));
    CHECK(same_bits(back.circles[i].r, e.circles[i].r));
  }

  std::istringstream bad_header("a,b,c\n1,2,3\n");
  CHECK_THROWS_AS(scout::read_ensemble_csv(bad_header), scout::LogFormatError);
  std::istringstream bad_row("x0,y0,r\n1,2\n");
  CHECK_THROWS_AS(scout::read_ensemble_csv(bad_row), scout::LogFormatError);
}

TEST_CASE("config: parse handles comments, blanks, and repeated keys") {
  const std::string text =
      "# a comment line\n"
      "\n"
      "  seed = 99   # trailing comment\n"
      "true_x0=4.25\n"
      "\ttol_r\t=\t0.25\n"
      "sigma = 0.5\n"
      "sigma = 0.07\n"  // last assignment wins
      "sensor = remote:box:4040\n"
      "out_dir = /tmp/some/where\n";
  const scout::RunConfig cfg = scout::parse_config_string(text);
  CHECK(cfg.seed == 99);
  CHECK(cfg.true_circle.x0 == 4.25);
  CHECK(cfg.stopping.tol_r == 0.25);
  CHECK(cfg.response.sigma == 0.07);
  CHECK(cfg.sensor.mode == scout::SensorMode::Remote);
  CHECK(cfg.sensor.host == "box");
  CHECK(cfg.sensor.port == 4040);
  CHECK(cfg.out_dir == "/tmp/some/where");
  // Untouched keys keep their defaults.
  CHECK(cfg.field.x_max == 20.0);
  CHECK(cfg.sampler.n_live == 100);
  CHECK(cfg.ensemble_size == 150);
}

TEST_CASE("config: malformed input is a typed error") {
  CHECK_THROWS_AS(scout::parse_config_string("does_not_exist = 1\n"), scout::ConfigError);
  CHECK_THROWS_AS(scout::parse_config_string("seed\n"), scout::ConfigError);
  CHECK_THROWS_AS(scout::parse_config_string("= 5\n"), scout::ConfigError);
  CHECK_THROWS_AS(scout::parse_config_string("sigma = soft\n"), scout::ConfigError);
  CHECK_THROWS_AS(scout::parse_config_string("n_live = 12.5\n"), scout::ConfigError);
  CHECK_THROWS_AS(scout::parse_config_string("seed = -4\n"), scout::ConfigError);

  SECTION("line numbers appear in the message") {
    try {
      scout::parse_config_string("seed = 1\n\nbroken line\n");
      FAIL("expected ConfigError");
    } catch (const scout::ConfigError& err) {
      CHECK(std::string(err.what()).find("line 3") != std::string::npos);
    }
  }
}

TEST_CASE("config: serialize then parse reproduces every run setting") {
  scout::RunConfig cfg;
  cfg.field = {0.0, 18.5, -2.0, 31.0};
  cfg.r_min = 0.75;
  cfg.r_max = 9.5;
  cfg.response = {0.91, 0.13, 0.041};
  cfg.true_circle = {7.125, 11.0 / 3.0, 2.8};
  cfg.sampler.n_live = 64;
  cfg.sampler.termination_frac = 1e-4;
  cfg.sampler.walk_steps = 31;
  cfg.sampler.walk_retries = 9;
  cfg.sampler.max_iterations = 54321;
  cfg.inquiry.grid_spacing = 0.8;
  cfg.inquiry.n_bins = 64;
  cfg.inquiry.k_per_model = 7;
  cfg.ensemble_size = 99;
  cfg.stopping = {0.4, 0.3, 0.2, 44};
  cfg.seed = 18446744073709551615ULL;  // largest u64 survives the trip
  cfg.sensor = scout::parse_sensor_spec("filedrop:/tmp/drop");
  cfg.sensor_timeout_ms = 1234;
  cfg.sensor_poll_ms = 7;
  cfg.sensor_retries = 5;
  cfg.latency_ms = 12.5;
  cfg.raster_spacing = 1.25;

  const std::string text = scout::serialize_config(cfg);
  const scout::RunConfig back = scout::parse_config_string(text);

  CHECK(back.field.x_min == cfg.field.x_min);
  CHECK(back.field.x_max == cfg.field.x_max);
  CHECK(back.field.y_min == cfg.field.y_min);
  CHECK(back.field.y_max == cfg.field.y_max);
  CHECK(back.r_min == cfg.r_min);
  CHECK(back.r_max == cfg.r_max);
  CHECK(back.response.white_level == cfg.response.white_level);
  CHECK(back.response.black_level == cfg.response.black_level);
  CHECK(back.response.sigma == cfg.response.sigma);
  CHECK(same_bits(back.true_circle.y0, cfg.true_circle.y0));
  CHECK(back.sampler.n_live == cfg.sampler.n_live);
  CHECK(back.sampler.termination_frac == cfg.sampler.termination_frac);
  CHECK(back.sampler.walk_steps == cfg.sampler.walk_steps);
  CHECK(back.sampler.walk_retries == cfg.sampler.walk_retries);
  CHECK(back.sampler.max_iterations == cfg.sampler.max_iterations);
  CHECK(back.inquiry.grid_spacing == cfg.inquiry.grid_spacing);
  CHECK(back.inquiry.n_bins == cfg.inquiry.n_bins);
  CHECK(back.inquiry.k_per_model == cfg.inquiry.k_per_model);
  CHECK(back.ensemble_size == cfg.ensemble_size);
  CHECK(back.stopping.tol_x0 == cfg.stopping.tol_x0);
  CHECK(back.stopping.tol_y0 == cfg.stopping.tol_y0);
  CHECK(back.stopping.tol_r == cfg.stopping.tol_r);
  CHECK(back.stopping.max_measurements == cfg.stopping.max_measurements);
  CHECK(back.seed == cfg.seed);
  CHECK(back.sensor.mode == cfg.sensor.mode);
  CHECK(back.sensor.dir == cfg.sensor.dir);
  CHECK(back.sensor_timeout_ms == cfg.sensor_timeout_ms);
  CHECK(back.sensor_poll_ms == cfg.sensor_poll_ms);
  CHECK(back.sensor_retries == cfg.sensor_retries);
  CHECK(back.latency_ms == cfg.latency_ms);
  CHECK(back.raster_spacing == cfg.raster_spacing);

  // Serializing the parsed copy gives the identical text: a fixed point.
  CHECK(scout::serialize_config(back) == text);
}

TEST_CASE("sensor spec: grammar accepts the three forms and rejects the rest") {
  const scout::SensorSpec sim = scout::parse_sensor_spec("simulated");
  CHECK(sim.mode == scout::SensorMode::Simulated);
  CHECK(sim.to_string() == "simulated");

  const scout::SensorSpec rem = scout::parse_sensor_spec("remote:sensor.lan:8801");
  CHECK(rem.mode == scout::SensorMode::Remote);
  CHECK(rem.host == "sensor.lan");
  CHECK(rem.port == 8801);
  CHECK(rem.to_string() == "remote:sensor.lan:8801");

  const scout::SensorSpec fd = scout::parse_sensor_spec("filedrop:/var/drop box");
  CHECK(fd.mode == scout::SensorMode::FileDrop);
  CHECK(fd.dir == "/var/drop box");
  CHECK(fd.to_string() == "filedrop:/var/drop box");

  CHECK_THROWS_AS(scout::parse_sensor_spec("remote:hostonly"), scout::ConfigError);
  CHECK_THROWS_AS(scout::parse_sensor_spec("remote::123"), scout::ConfigError);
  CHECK_THROWS_AS(scout::parse_sensor_spec("remote:h:"), scout::ConfigError);
  CHECK_THROWS_AS(scout::parse_sensor_spec("remote:h:0"), scout::ConfigError);
  CHECK_THROWS_AS(scout::parse_sensor_spec("remote:h:65536"), scout::ConfigError);
  CHECK_THROWS_AS(scout::parse_sensor_spec("remote:h:eighty"), scout::ConfigError);
  CHECK_THROWS_AS(scout::parse_sensor_spec("filedrop:"), scout::ConfigError);
  CHECK_THROWS_AS(scout::parse_sensor_spec("Simulated"), scout::ConfigError);
  CHECK_THROWS_AS(scout::parse_sensor_spec("serial:/dev/ttyUSB0"), scout::ConfigError);
}

TEST_CASE("entropy raster: pixels scale with entropy and rows flip") {
  // A hand-built 3x2 map: cols 0..2, rows 0..1, bins fixed at 32.
  const double h_max = std::log(32.0);
  scout::EntropyMap map;
  map.n_bins = 32;
  auto add = [&map](int col, int row, double h) {
    map.entries.push_back({scout::GridPoint{0.5 + col, 0.5 + row, col, row}, h});
  };
  add(0, 0, 0.0);
  add(1, 0, h_max);
  add(2, 0, h_max / 2.0);
  add(0, 1, h_max / 4.0);
  add(1, 1, 0.1);
  add(2, 1, h_max);
  map.best = 5;
  map.best_entropy = h_max;

  const scout::EntropyImage img = scout::rasterize_entropy(map);
  REQUIRE(img.width == 3);
  REQUIRE(img.height == 2);
  REQUIRE(img.pixels.size() == 6);

  auto px = [&img](int col, int row_from_top) {
    return img.pixels[static_cast<std::size_t>(row_from_top) * img.width + col];
  };
  // Lattice row 1 (larger y) is the top raster row.
  CHECK(px(0, 1) == 0);
  CHECK(px(1, 1) == 255);
  CHECK(px(2, 1) == static_cast<unsigned char>(std::lround(255.0 / 2.0)));
  CHECK(px(0, 0) == static_cast<unsigned char>(std::lround(255.0 / 4.0)));
  CHECK(px(1, 0) == static_cast<unsigned char>(std::lround(0.1 / h_max * 255.0)));
  CHECK(px(2, 0) == 255);

  SECTION("the file is a binary P5 with the exact payload") {
    const auto path = temp_file("map.pgm");
    scout::write_entropy_pgm(path.string(), map);
    const std::string bytes = slurp(path);
    const std::string header = "P5\n3 2\n255\n";
    REQUIRE(bytes.size() == header.size() + 6);
    CHECK(bytes.rfind(header, 0) == 0);
    for (int i = 0; i < 6; ++i)
      CHECK(static_cast<unsigned char>(bytes[header.size() + i]) == img.pixels[i]);
    std::filesystem::remove(path);
  }

  SECTION("an empty map cannot be rasterized") {
    scout::EntropyMap empty;
    CHECK_THROWS_AS(scout::rasterize_entropy(empty), std::invalid_argument);
  }
}

TEST_CASE("entropy sidecar: selected point first, then every candidate") {
  scout::EntropyMap map;
  map.n_bins = 32;
  map.entries.push_back({scout::GridPoint{0.5, 0.5, 0, 0}, 0.25});
  map.entries.push_back({scout::GridPoint{1.5, 0.5, 1, 0}, 1.5});
  map.best = 1;
  map.best_entropy = 1.5;

  const auto path = temp_file("map.txt");
  scout::write_entropy_sidecar(path.string(), map);
  std::istringstream in(slurp(path));
  std::string line;

  REQUIRE(std::getline(in, line));
  CHECK(line == "# columns: x y entropy (nats); n_bins 32");
  REQUIRE(std::getline(in, line));
  CHECK(line == "selected 1.5 0.5 1.5");
  REQUIRE(std::getline(in, line));
  CHECK(line == "0.5 0.5 0.25");
  REQUIRE(std::getline(in, line));
  CHECK(line == "1.5 0.5 1.5");
  CHECK_FALSE(std::getline(in, line));
  std::filesystem::remove(path);
}
