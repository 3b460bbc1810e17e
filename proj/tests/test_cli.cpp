#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "numidx/cli.hpp"

using namespace numidx;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "numidx");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch_dir() { return fs::temp_directory_path() / ("numidx-cli-test-" + std::to_string(::getpid())); }

struct RemoveScratch {
  ~RemoveScratch() {
    std::error_code ec;
    fs::remove_all(scratch_dir(), ec);
  }
} remove_scratch;

fs::path scratch(const std::string& name) {
  fs::create_directories(scratch_dir());
  return scratch_dir() / name;
}

std::string write(const std::string& name, const std::string& text) {
  const fs::path p = scratch(name);
  std::ofstream(p) << text;
  return p.string();
}

std::string line_value(const std::string& text, const std::string& key) {
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line))
    if (line.rfind(key + " ", 0) == 0) return line.substr(key.size() + 1);
  return "";
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("radius command") {
  const auto id = write("id.json", R"j({"descriptor": "lp(p=3, dim=2)", "matrix": [[1, 0], [0, 1]]})j");
  auto r = run({"radius", "--matrix", id});
  CHECK(r.code == 0);
  CHECK(std::stod(line_value(r.out, "value")) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(line_value(r.out, "guarantee") == "certified-lower-bound");

  const auto rot = write("rot.json", R"j({"descriptor": "lp(p=2, dim=2)", "matrix": [[0, -1], [1, 0]]})j");
  CHECK(std::stod(line_value(run({"radius", "--matrix", rot}).out, "value")) <= 1e-9);
  r = run({"radius", "--matrix", rot, "--field", "complex"});
  CHECK(r.code == 0);
  CHECK(std::stod(line_value(r.out, "value")) == doctest::Approx(1.0).epsilon(1e-6));

  r = run({"radius", "--matrix", rot, "--space", "lp(p=1, dim=2)"});
  CHECK(line_value(r.out, "guarantee") == "exact-enumeration");
  r = run({"radius", "--matrix", rot, "--method", "grid", "--resolution", "400"});
  CHECK(r.code == 0);
  CHECK(line_value(r.out, "method") == "grid");
  r = run({"radius", "--matrix", id, "--absolute"});
  CHECK(r.code == 0);
  CHECK(std::stod(line_value(r.out, "value")) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("radius command writes a report and manifest") {
  const auto id = write("id2.json", R"j({"descriptor": "lp(p=2, dim=2)", "matrix": [[2, 0], [0, 1]]})j");
  const auto out = scratch("radius-report.json");
  REQUIRE(run({"radius", "--matrix", id, "--out", out.string()}).code == 0);
  const auto report = nlohmann::json::parse(slurp(out));
  CHECK(report["radius"]["value"].get<double>() == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(report["radius"]["guarantee"] == "certified-lower-bound");
  const auto manifest = nlohmann::json::parse(slurp(out.string() + ".manifest.json"));
  CHECK(manifest.contains("started_at"));
  CHECK(manifest["artifact_version"] == kArtifactVersion);
  CHECK(manifest["files"][0] == out.string());
}

TEST_CASE("input errors exit with code 2") {
  const auto big = write("big.json", R"j({"descriptor": "lp(p=2, dim=4)", "matrix": [[1,0,0,0],[0,1,0,0],[0,0,1,0],[0,0,0,1]]})j");
  auto r = run({"radius", "--matrix", big, "--method", "grid"});
  CHECK(r.code == 2);
  CHECK(r.err.find("error:") != std::string::npos);
  CHECK(run({"radius", "--matrix", "/nonexistent.json"}).code == 2);
  const auto bad = write("bad.json", R"j({"descriptor": "lp(p=0.5, dim=2)", "matrix": [[1, 0], [0, 1]]})j");
  r = run({"radius", "--matrix", bad});
  CHECK(r.code == 2);
  CHECK(r.err.find("p:") != std::string::npos);
  CHECK(run({"index", "--space", "lp(p=2, dim=2)", "--rank", "5"}).code == 2);
  CHECK(run({"mp", "--p", "0.5"}).code == 2);
  CHECK(run({"sweep", "--family", "lpm", "--p", "3", "--m", "4..1"}).code == 2);
  CHECK(run({"sweep", "--family", "cubes"}).code == 2);
  CHECK(run({"verify", "--suite", "nope"}).code == 2);
  CHECK(run({"bogus"}).code == 2);
  CHECK(run({"--help"}).code == 0);
}

TEST_CASE("index command") {
  auto r = run({"index", "--space", "lp(p=2, dim=2)", "--budget", "30"});
  CHECK(r.code == 0);
  CHECK(std::stod(line_value(r.out, "upper_bound")) <= 1e-6);
  CHECK(line_value(r.out, "kind") == "numerical");
  const auto again = run({"index", "--space", "lp(p=2, dim=2)", "--budget", "30"});
  CHECK(again.out == r.out);
  r = run({"index", "--space", "lp(p=1, dim=2)", "--budget", "20", "--rank", "1"});
  CHECK(r.code == 0);
  CHECK(line_value(r.out, "kind") == "rank");
  r = run({"index", "--space", "lp(p=2, dim=2)", "--budget", "20", "--absolute"});
  CHECK(r.code == 0);
  CHECK(std::stod(line_value(r.out, "target")) == doctest::Approx(0.5));
}

TEST_CASE("seed controls the run") {
  const auto a = run({"--seed", "5", "index", "--space", "lp(p=3, dim=2)", "--budget", "10"});
  const auto b = run({"--seed", "6", "index", "--space", "lp(p=3, dim=2)", "--budget", "10"});
  CHECK(a.code == 0);
  CHECK(a.out != b.out);
  ::setenv("NUMIDX_SEED", "5", 1);
  const auto c = run({"index", "--space", "lp(p=3, dim=2)", "--budget", "10"});
  ::setenv("NUMIDX_SEED", "five", 1);
  const auto d = run({"index", "--space", "lp(p=3, dim=2)", "--budget", "10"});
  ::unsetenv("NUMIDX_SEED");
  CHECK(c.out == a.out);
  CHECK(d.code == 2);
}

TEST_CASE("mp command") {
  auto r = run({"mp", "--p", "3"});
  CHECK(r.code == 0);
  CHECK(std::stod(line_value(r.out, "M_p")) == doctest::Approx(0.2270833462110711).epsilon(1e-9));
  CHECK(std::stod(line_value(run({"mp", "--p", "2"}).out, "M_p")) <= 1e-12);
  const auto curve = scratch("curve.csv");
  REQUIRE(run({"mp", "--p", "3", "--emit-curve", curve.string(), "--points", "10"}).code == 0);
  std::istringstream in(slurp(curve));
  std::string line;
  int rows = 0;
  std::getline(in, line);
  CHECK(line == "row,t,value");
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 12);
}

TEST_CASE("sweep command") {
  auto r = run({"sweep", "--family", "lpm", "--p", "3", "--m", "1..3", "--budget", "20"});
  CHECK(r.code == 0);
  std::istringstream in(r.out);
  std::string line;
  int rows = -1;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 3);
  r = run({"sweep", "--family", "lp2-curve", "--p", "1.5,3", "--budget", "20"});
  CHECK(r.code == 0);
  CHECK(r.out.find("lp2-curve,1.5,2,") != std::string::npos);
}

TEST_CASE("verify writes deterministic reports") {
  const auto d1 = scratch("v1"), d2 = scratch("v2");
  const auto a = run({"verify", "--suite", "duality", "--space", "lp(p=3, dim=2)", "--cases", "5", "--out-dir", d1.string()});
  const auto b = run({"verify", "--suite", "duality", "--space", "lp(p=3, dim=2)", "--cases", "5", "--out-dir", d2.string()});
  CHECK(a.code == 0);
  CHECK(a.out.find("verdict PASS") != std::string::npos);
  int files = 0;
  for (const auto& e : fs::directory_iterator(d1)) {
    if (e.path().filename() == "manifest.json") continue;
    ++files;
    CHECK(slurp(e.path()) == slurp(d2 / e.path().filename()));
  }
  CHECK(files >= 1);
  CHECK(fs::exists(d1 / "manifest.json"));
}

TEST_CASE("range parsing") {
  CHECK(parse_range("3", "p") == std::vector<double>{3.0});
  CHECK(parse_range("1,2.5,4", "p") == std::vector<double>{1.0, 2.5, 4.0});
  CHECK(parse_range("1..4", "m") == std::vector<double>{1.0, 2.0, 3.0, 4.0});
  CHECK(parse_range("1..2:0.5", "p") == std::vector<double>{1.0, 1.5, 2.0});
  CHECK_THROWS_AS(parse_range("4..1", "m"), ParseError);
  CHECK_THROWS_AS(parse_range("", "m"), ParseError);
  CHECK_THROWS_AS(parse_range("1..x", "m"), ParseError);
  CHECK_THROWS_AS(parse_range("1..2:0", "m"), ParseError);
}
