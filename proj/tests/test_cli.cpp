#include "doctest.h"

#include "symlab/generators.hpp"
#include "symlab/io.hpp"
#include "symlab/runner.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace symlab;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("symlab_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string flat_config(const std::string& dir, double r_max = 0.5) {
  return R"({
    "measure": {"generator": "flat", "d": 2, "s": 1, "basis": [[1, 0]], "center": [0, 0], "c": 0.5, "R": 3.0, "h": 0.001},
    "kernel": {"name": "riesz", "d": 2},
    "points": {"explicit": [[0.1, 0], [-0.3, 0]]},
    "radii": {"r_max": )" +
         std::to_string(r_max) + R"(, "ratio": 0.5, "count": 4},
    "s": 1,
    "tau": [0.5, 0.25],
    "family": {"kind": "flat", "h_ratio": 50, "refine": false, "n_angles": 36},
    "output": {"dir": ")" +
         dir + R"("}
  })";
}

}  // namespace

TEST_CASE("measure table round trip") {
  const Measure spike = make_spike_measure<double>(3, 3, 0.3, Vec(Vec::Zero(2)), 0.7, 1.0, 1.0 / 37);
  std::stringstream ss;
  write_measure_table(ss, spike);
  const Measure back = read_measure_table(ss);
  CHECK(back.positions() == spike.positions());
  CHECK(back.weights() == spike.weights());
  CHECK(back.resolution() == spike.resolution());
  CHECK(back.provenance() == spike.provenance());
  CHECK(back.window().radius == spike.window().radius);

  std::stringstream bad("# d=2 h=0.1 provenance=x\n0 1\n");
  CHECK_THROWS(read_measure_table(bad));
}

TEST_CASE("number formatting and csv") {
  CHECK(format_real(0.1) == "0.10000000000000001");
  CHECK(std::stod(format_real(1.0 / 3)) == 1.0 / 3);
  CsvWriter csv({"a", "b"});
  csv.cell(1.5).cell(std::string("x,y"));
  csv.end_row();
  CHECK(csv.str() == "a,b\n1.5,\"x,y\"\n");
  csv.cell(1L);
  CHECK_THROWS(csv.end_row());
}

TEST_CASE("config errors name the key") {
  const std::string dir = scratch("cfg").string();
  std::string text = flat_config(dir);
  const auto replace = [](std::string s, const std::string& from, const std::string& to) {
    s.replace(s.find(from), from.size(), to);
    return s;
  };
  try {
    parse_config(replace(text, "\"generator\": \"flat\"", "\"generator\": \"spiral\""));
    FAIL("unknown generator accepted");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("measure.generator") != std::string::npos);
  }
  CHECK_THROWS_AS(build_kernel(nlohmann::json{{"name", "sobolev"}}), ConfigError);
  CHECK_THROWS_AS(parse_config(replace(text, "\"ratio\": 0.5", "\"ratio\": 1.5")), ConfigError);
  CHECK_THROWS_AS(parse_config("{not json"), ConfigError);
}

TEST_CASE("alpha refuses radii beyond a quarter of the window") {
  const std::string dir = scratch("refuse").string();
  const ExperimentConfig cfg = parse_config(flat_config(dir, 1.0));
  try {
    run("alpha", cfg);
    FAIL("window violation accepted");
  } catch (const RefusalError& e) {
    CHECK(std::string(e.what()).find("4r") != std::string::npos);
  }
}

TEST_CASE("sla run on a flat line") {
  const fs::path dir = scratch("sla");
  const RunManifest m = run("sla", parse_config(flat_config(dir.string())));
  REQUIRE(m.outputs.size() == 4);
  for (const auto& [name, ok] : m.verdicts) CHECK(ok);
  std::istringstream csv(slurp(dir / "sla_p0_tau0.csv"));
  std::string line;
  std::getline(csv, line);
  CHECK(line == "r,value_1,value_2,norm,error_estimate");
  int rows = 0;
  while (std::getline(csv, line)) {
    const auto a = line.find(',');
    const auto b = line.find(',', a + 1);
    const auto c = line.find(',', b + 1);
    const auto d = line.find(',', c + 1);
    CHECK(std::stod(line.substr(c + 1, d - c - 1)) <= 1e-12);
    ++rows;
  }
  CHECK(rows == 4);
  CHECK(fs::exists(dir / "manifest.json"));
  const auto manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));
  CHECK(manifest.at("command") == "sla");
  CHECK(manifest.at("config") == parse_config(flat_config(dir.string())).source);
}

TEST_CASE("gen then sla on the table matches the in-memory run") {
  const fs::path mem = scratch("mem");
  const fs::path disk = scratch("disk");
  run("sla", parse_config(flat_config(mem.string())));
  run("gen", parse_config(flat_config(disk.string())));
  std::string text = flat_config(disk.string());
  const std::string table = R"({"generator": "table", "path": ")" + (disk / "measure.txt").string() + R"("})";
  const auto begin = text.find("\"measure\": ") + 11;
  const auto end = text.find('}', begin) + 1;
  text.replace(begin, end - begin, table);
  run("sla", parse_config(text));
  for (const char* f : {"sla_p0_tau0.csv", "sla_p0_tau1.csv", "sla_p1_tau0.csv", "sla_p1_tau1.csv"})
    CHECK(slurp(mem / f) == slurp(disk / f));
}

TEST_CASE("runs are byte-identical") {
  const fs::path a = scratch("a");
  const fs::path b = scratch("b");
  std::string ta = flat_config(a.string()), tb = flat_config(b.string());
  const std::string from = "\"points\": {\"explicit\": [[0.1, 0], [-0.3, 0]]}";
  for (std::string* t : {&ta, &tb}) t->replace(t->find(from), from.size(), "\"points\": {\"sample\": 3}");
  ExperimentConfig ca = parse_config(ta), cb = parse_config(tb);
  ca.threads = 1;
  cb.threads = 3;
  for (const char* cmd : {"alpha", "density", "defect"}) {
    run(cmd, ca);
    run(cmd, cb);
  }
  int compared = 0;
  for (const auto& e : fs::directory_iterator(a)) {
    if (e.path().extension() != ".csv") continue;
    CHECK(slurp(e.path()) == slurp(b / e.path().filename()));
    ++compared;
  }
  CHECK(compared >= 7);
}

TEST_CASE("alpha with flat candidates on a spike") {
  const fs::path dir = scratch("spike");
  const std::string text = R"({
    "measure": {"generator": "spike", "k": 3, "m": 3, "alpha": 0, "z": [0, 0], "c": 0.5, "R": 3.0, "h": 0.01},
    "points": {"explicit": [[0, 0]]},
    "radii": {"r_max": 0.5, "ratio": 0.5, "count": 2},
    "s": 1,
    "family": {"kind": "flat", "h_ratio": 25, "refine": false, "n_angles": 36},
    "output": {"dir": ")" + dir.string() + R"("}
  })";
  const RunManifest m = run("alpha", parse_config(text));
  REQUIRE(m.verdicts.size() == 1);
  CHECK_FALSE(m.verdicts[0].second);
}

TEST_CASE("multiplier rows for the riesz kernel") {
  const fs::path dir = scratch("mult");
  const std::string text = R"({
    "measure": {"generator": "atoms", "positions": [[0, 0]], "weights": [1]},
    "kernel": {"name": "riesz", "d": 2},
    "multiplier": {"sphere_nodes": 12},
    "output": {"dir": ")" + dir.string() + R"("}
  })";
  run("multiplier", parse_config(text));
  std::istringstream csv(slurp(dir / "multiplier.csv"));
  std::string line;
  std::getline(csv, line);
  CHECK(line == "xi_1,xi_2,re_m1,im_m1,re_m2,im_m2,error_estimate");
  int rows = 0;
  while (std::getline(csv, line)) {
    std::vector<double> v;
    std::istringstream cells(line);
    for (std::string c; std::getline(cells, c, ',');) v.push_back(std::stod(c));
    REQUIRE(v.size() == 7);
    CHECK(std::abs(v[2]) <= 1e-8);
    CHECK(std::abs(v[3] + 2 * kPi * v[0]) <= 1e-6);
    CHECK(std::abs(v[4]) <= 1e-8);
    CHECK(std::abs(v[5] + 2 * kPi * v[1]) <= 1e-6);
    ++rows;
  }
  CHECK(rows == 12);
}
