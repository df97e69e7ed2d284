#include "errdens/csv.hpp"

#include "errdens/config.hpp"
#include "errdens/error.hpp"
#include "errdens/montecarlo.hpp"
#include "errdens/rng.hpp"
#include "errdens/run.hpp"

#include <doctest.h>
#include <functional>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

using namespace errdens;

namespace {

namespace fs = std::filesystem;

fs::path scratch_dir()
{
  const fs::path dir = fs::temp_directory_path() / "errdens_io_tests";
  fs::create_directories(dir);
  return dir;
}

std::string write_file(const std::string& name, const std::string& content)
{
  const fs::path path = scratch_dir() / name;
  std::ofstream file(path);
  file << content;
  file.close();
  return path.string();
}

std::string read_bytes(const std::string& path)
{
  std::ifstream file(path, std::ios::binary);
  REQUIRE(file.good());
  std::ostringstream buffer;
  buffer << file.rdbuf();
  return buffer.str();
}

ErrorCode code_of(const std::function<void()>& fn)
{
  try {
    fn();
  } catch (const Error& err) {
    return err.code();
  }
  FAIL("expected an errdens::Error");
  return ErrorCode::InvalidArgument;
}

} // namespace

TEST_CASE("load_sample happy path")
{
  const auto path = write_file("ok.csv", "x1,x2,y\n0.1,0.2,1.0\n0.3,0.4,2.0\n0.5,0.6,3.0\n");
  const Sample sample = load_sample(path);
  CHECK(sample.n == 3);
  CHECK(sample.d == 2);
  CHECK(sample.x[2] == 0.3);
  CHECK(sample.y[2] == 3.0);
}

TEST_CASE("load_sample error locations")
{
  const auto bad_cell = write_file("bad_cell.csv", "x1,y\n0.1,1.0\n0.5,abc\n");
  try {
    load_sample(bad_cell);
    FAIL("expected MalformedCsv");
  } catch (const Error& err) {
    CHECK(err.code() == ErrorCode::MalformedCsv);
    const std::string what = err.what();
    CHECK(what.find("row 3") != std::string::npos);
    CHECK(what.find("column 2") != std::string::npos);
  }

  const auto empty = write_file("empty.csv", "");
  CHECK(code_of([&] { load_sample(empty); }) == ErrorCode::EmptyFile);

  const auto ragged = write_file("ragged.csv", "x1,y\n0.1,1.0\n0.2\n");
  CHECK(code_of([&] { load_sample(ragged); }) == ErrorCode::MalformedCsv);

  const auto bad_header = write_file("bad_header.csv", "a,b\n0.1,1.0\n");
  CHECK(code_of([&] { load_sample(bad_header); }) == ErrorCode::MalformedCsv);

  const auto non_finite = write_file("inf.csv", "x1,y\n0.1,inf\n0.2,1.0\n");
  CHECK(code_of([&] { load_sample(non_finite); }) == ErrorCode::MalformedCsv);

  CHECK(code_of([&] { load_sample((scratch_dir() / "missing.csv").string()); }) ==
        ErrorCode::Io);
}

TEST_CASE("sample round trip is exact")
{
  Rng rng(101);
  Sample sample;
  sample.n = 37;
  sample.d = 2;
  for (int i = 0; i < sample.n; ++i) {
    sample.x.push_back(rng.normal() * 1e-3);
    sample.x.push_back(rng.normal() * 1e7);
    sample.y.push_back(rng.normal());
  }
  const auto path = (scratch_dir() / "roundtrip.csv").string();
  write_sample(path, sample);
  const Sample loaded = load_sample(path);
  REQUIRE(loaded.n == sample.n);
  REQUIRE(loaded.d == sample.d);
  CHECK(loaded.x == sample.x); // %.17g round-trips doubles exactly
  CHECK(loaded.y == sample.y);
}

TEST_CASE("config parsing and overrides")
{
  const auto path = write_file("run.cfg",
                               "# comment\n"
                               "mode = rate\n"
                               "output = /tmp/out\n"
                               "n_grid = 100, 200\n"
                               "reps = 5\n"
                               "seed = 7\n"
                               "d = 1\n");
  auto entries = parse_config_file(path);
  entries.emplace_back("reps", "9"); // override wins
  const RunConfig config = resolve_config(entries);
  CHECK(config.mode == RunMode::Rate);
  CHECK(config.reps == 9);
  CHECK(config.seed == 7);
  CHECK(config.n_grid == std::vector<int>{ 100, 200 });
  CHECK(config.model.seed == 7);

  CHECK(code_of([&] {
          resolve_config({ { "mode", "rate" }, { "output", "x" }, { "bogus", "1" } });
        }) == ErrorCode::InvalidArgument);
  CHECK(code_of([&] { resolve_config({ { "output", "x" } }); }) ==
        ErrorCode::InvalidArgument);
  CHECK(code_of([&] { resolve_config({ { "mode", "estimate" }, { "output", "x" } }); }) ==
        ErrorCode::InvalidArgument);
  CHECK(code_of([&] {
          resolve_config({ { "mode", "rate" },
                           { "output", "x" },
                           { "n_grid", "100" },
                           { "reps", "5" },
                           { "input", "y" } });
        }) == ErrorCode::InvalidArgument);
}

TEST_CASE("estimate run concentrates noiseless constant data at zero")
{
  ModelSpec model;
  model.d = 1;
  model.m_family = MeanFamily::Constant;
  model.noise_scale = 0.0;
  model.seed = 11;
  const SimulatedData data = simulate(model, 300, 0);
  const auto input = (scratch_dir() / "constant.csv").string();
  write_sample(input, data.sample);

  const auto output = (scratch_dir() / "constant_estimate").string();
  const RunConfig config = resolve_config({ { "mode", "estimate" },
                                            { "input", input },
                                            { "output", output } });
  run(config);

  const auto meta = nlohmann::json::parse(read_bytes(output + ".meta.json"));
  const double b1 = meta.at("b1").get<double>();
  CHECK(meta.at("n_trimmed_in").get<int>() > 0);
  CHECK(meta.at("a11").at("regime").get<std::string>() == "satisfied");

  // integrate the output curve: all mass within [-2 b1, 2 b1]
  std::ifstream curve(output + ".csv");
  std::string line;
  std::getline(curve, line);
  CHECK(line == "epsilon,f_hat");
  double mass = 0.0, mass_near_zero = 0.0;
  double prev_e = 0.0, prev_f = 0.0;
  bool first = true;
  while (std::getline(curve, line)) {
    const auto comma = line.find(',');
    const double e = std::stod(line.substr(0, comma));
    const double f = std::stod(line.substr(comma + 1));
    if (!first) {
      const double panel = 0.5 * (e - prev_e) * (f + prev_f);
      mass += panel;
      if (std::abs(e) <= 2.0 * b1 && std::abs(prev_e) <= 2.0 * b1)
        mass_near_zero += panel;
    }
    prev_e = e;
    prev_f = f;
    first = false;
  }
  CHECK(mass == doctest::Approx(1.0).epsilon(2e-3));
  CHECK(mass_near_zero == doctest::Approx(mass).epsilon(1e-6));
}

TEST_CASE("experiment runs are byte-identical on rerun")
{
  const auto output = (scratch_dir() / "det_gap").string();
  const std::vector<std::pair<std::string, std::string>> entries = {
    { "mode", "gap" },    { "output", output },      { "seed", "99" },
    { "d", "1" },         { "n_grid", "80,120,160,240" }, { "reps", "50" },
  };
  run(resolve_config(entries));
  const std::string csv_first = read_bytes(output + ".csv");
  const std::string meta_first = read_bytes(output + ".meta.json");

  run(resolve_config(entries));
  CHECK(read_bytes(output + ".csv") == csv_first);
  CHECK(read_bytes(output + ".meta.json") == meta_first);

  // sanity on the CSV shape: header plus one row per (n, rep)
  int lines = 0;
  for (char ch : csv_first)
    lines += ch == '\n';
  CHECK(lines == 1 + 200);

  const auto meta = nlohmann::json::parse(meta_first);
  CHECK(meta.at("summary").contains("median_sup_gap_n80"));
  CHECK(meta.at("config_echo").at("trim_lower").get<std::string>() ==
        "0.10000000000000001");
}

TEST_CASE("estimate mode honors manual bandwidths and explicit trim")
{
  ModelSpec model;
  model.d = 1;
  model.m_family = MeanFamily::Linear;
  model.noise_scale = 0.2;
  model.seed = 5;
  const SimulatedData data = simulate(model, 200, 0);
  const auto input = (scratch_dir() / "manual.csv").string();
  write_sample(input, data.sample);

  const auto output = (scratch_dir() / "manual_estimate").string();
  run(resolve_config({ { "mode", "estimate" },
                       { "input", input },
                       { "output", output },
                       { "b0", "0.15" },
                       { "b1", "0.3" },
                       { "trim_lower", "0.2" },
                       { "trim_upper", "0.8" },
                       { "grid_min", "-1" },
                       { "grid_max", "1" },
                       { "grid_count", "11" } }));
  const auto meta = nlohmann::json::parse(read_bytes(output + ".meta.json"));
  CHECK(meta.at("b0").get<double>() == 0.15);
  CHECK(meta.at("b1").get<double>() == 0.3);
  CHECK(meta.at("bandwidth_source").get<std::string>() == "manual");
  CHECK(meta.at("trim_lower")[0].get<double>() == 0.2);
  CHECK(meta.at("grid").at("count").get<int>() == 11);

  int lines = 0;
  for (char ch : read_bytes(output + ".csv"))
    lines += ch == '\n';
  CHECK(lines == 1 + 11);
}
