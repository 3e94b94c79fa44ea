// SPDX-License-Identifier: Apache-2.0

#include <catch_amalgamated.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "structprob/io.hpp"

namespace fs = std::filesystem;
using namespace structprob;
using io::json;

namespace {

struct Result {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::current_path() / "cli_scratch" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

Result run(const std::string& args, const fs::path& dir) {
  const fs::path out = dir / "stdout.txt", err = dir / "stderr.txt";
  const std::string cmd = std::string("cd '") + dir.string() + "' && '" + STRUCTPROB_CLI + "' " + args + " > '" +
                          out.string() + "' 2> '" + err.string() + "'";
  const int status = std::system(cmd.c_str());
  Result r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

std::size_t count_lines(const fs::path& p) {
  std::ifstream f(p);
  std::size_t n = 0;
  std::string line;
  while (std::getline(f, line)) ++n;
  return n;
}

}  // namespace

TEST_CASE("simulate urn prints a KEY=VALUE summary", "[cli]") {
  const auto dir = scratch("urn");
  const auto r = run("simulate urn --reds 5 --whites 5 -n 1000000 --seed 42 --out out", dir);
  REQUIRE(r.code == 0);
  CHECK(r.out.rfind("target=urn n=1000000 seed=42 label=red", 0) == 0);
  const auto pos = r.out.find("frequency=");
  REQUIRE(pos != std::string::npos);
  CHECK(std::fabs(std::stod(r.out.substr(pos + 10)) - 0.5) <= 0.002);
  CHECK(count_lines(dir / "out" / "collective.csv") == 1'000'001);
}

TEST_CASE("simulate twoslit writes hits and histogram", "[cli]") {
  const auto dir = scratch("twoslit");
  const auto r = run("simulate twoslit --preset reference --mode both -K 100000 --seed 7 --out out", dir);
  REQUIRE(r.code == 0);
  CHECK(r.out.find("p_value=") != std::string::npos);
  const json j = json::parse(slurp(dir / "out" / "histogram.json"));
  CHECK(j.at("bins").size() == 1024);
  CHECK(count_lines(dir / "out" / "hits.csv") == 100'001);

  // the file parses back to what the library produces for the same seed
  const auto run_lib = twoslit::run_weak_beam(twoslit::reference_geometry(), twoslit::SlitMode::BothSlits, 100000, 7);
  CHECK(io::pattern_from_json(j) == run_lib.pattern);
}

TEST_CASE("simulate twoslit accepts a config file and bin override", "[cli]") {
  const auto dir = scratch("config");
  std::ofstream(dir / "g.json") << R"({"wavelength_nm":600,"d_mm":0.3,"a_mm":0.04,"L_m":1.0,"window_mm":24,"bins":512})";
  const auto r = run("simulate twoslit --config g.json --bins 256 -K 1000 --seed 1 --out out", dir);
  REQUIRE(r.code == 0);
  CHECK(json::parse(slurp(dir / "out" / "histogram.json")).at("bins").size() == 256);
}

TEST_CASE("simulate twoslit intense beam", "[cli]") {
  const auto dir = scratch("intense");
  const auto r = run("simulate twoslit --beam intense --out out", dir);
  REQUIRE(r.code == 0);
  const auto p = io::pattern_from_json(json::parse(slurp(dir / "out" / "histogram.json")));
  CHECK(p.profile ==
        twoslit::intensity_profile(twoslit::reference_geometry(), twoslit::SlitMode::BothSlits).pdf);
}

TEST_CASE("simulate roulette", "[cli]") {
  const auto dir = scratch("roulette");
  const auto r = run("simulate roulette -n 3700 --seed 1 --seed 2 --format json --out out", dir);
  REQUIRE(r.code == 0);
  CHECK(fs::exists(dir / "out" / "collective_seed1.json"));
  CHECK(fs::exists(dir / "out" / "collective_seed2.json"));
  CHECK(r.out.find("dof=36") != std::string::npos);
}

TEST_CASE("config errors exit 2", "[cli]") {
  const auto dir = scratch("config_errors");
  auto zero = run("simulate twoslit -K 0 --out out", dir);
  CHECK(zero.code == 2);
  CHECK(zero.err.find("ZeroPhotons") != std::string::npos);

  CHECK(run("simulate urn --reds 0 --whites 0", dir).code == 2);
  CHECK(run("simulate twoslit --mode three", dir).code == 2);
  CHECK(run("simulate twoslit --preset nope", dir).code == 2);
  CHECK(run("simulate urn --format xml", dir).code == 2);
  CHECK(run("frobnicate", dir).code == 2);
  CHECK(run("", dir).code == 2);
  CHECK(run("verify BOGUS", dir).code == 2);
  CHECK(run("verify", dir).code == 2);
  CHECK(run("--help", dir).code == 0);
}

TEST_CASE("verify runs the default fixtures", "[cli]") {
  const auto dir = scratch("verify");
  const auto r = run("verify --all --seed 42", dir);
  REQUIRE(r.code == 0);
  const json j = json::parse(slurp(dir / "report.json"));
  REQUIRE(j.at("checks").size() == 6);
  for (const auto& c : j.at("checks")) CHECK(c.at("passed") == true);
}

TEST_CASE("verify rejects a certain model", "[cli]") {
  const auto dir = scratch("verify_certain");
  const auto r = run("verify TSN --model certain", dir);
  CHECK(r.code == 2);
  CHECK(r.err.find("NonRandomEvent") != std::string::npos);
}

TEST_CASE("verify exits 1 when a biased sampler is injected", "[cli]") {
  const auto dir = scratch("verify_bias");
  const auto r = run("verify TLN --inject-bias 0.52 --seed 3 --out rep.json", dir);
  CHECK(r.code == 1);
  const json j = json::parse(slurp(dir / "rep.json"));
  CHECK(j.at("checks")[0].at("name") == "TLN");
  CHECK(j.at("checks")[0].at("passed") == false);
}

TEST_CASE("report compares a histogram to a preset", "[cli]") {
  const auto dir = scratch("report");
  REQUIRE(run("simulate twoslit -K 100000 --seed 7 --out out", dir).code == 0);
  const auto r = run("report --input out/histogram.json --preset reference --out plot.csv", dir);
  REQUIRE(r.code == 0);
  CHECK(r.out.find("p_value=") != std::string::npos);
  CHECK(count_lines(dir / "plot.csv") == 1025);

  CHECK(run("report --input out/histogram.json --bins 512", dir).code == 2);
  CHECK(run("report --input missing.json", dir).code == 3);

  std::ofstream(dir / "corrupt.json") << "{\"geometry\": ";
  CHECK(run("report --input corrupt.json", dir).code == 3);

  json empty = json::parse(slurp(dir / "out" / "histogram.json"));
  empty["K"] = 0;
  for (auto& b : empty["bins"]) b["count"] = 0;
  std::ofstream(dir / "empty.json") << empty.dump();
  CHECK(run("report --input empty.json", dir).code == 3);
}

TEST_CASE("unwritable outputs exit 3", "[cli]") {
  const auto dir = scratch("io_errors");
  std::ofstream(dir / "blocker") << "x";
  CHECK(run("simulate urn -n 10 --out blocker/sub", dir).code == 3);
  CHECK(run("verify TSN --out blocker/sub/report.json", dir).code == 3);
}

TEST_CASE("same config and seed give byte-identical files", "[cli]") {
  const auto dir = scratch("repro");
  REQUIRE(run("simulate twoslit -K 20000 --seed 11 --out a", dir).code == 0);
  REQUIRE(run("simulate twoslit -K 20000 --seed 11 --out b", dir).code == 0);
  CHECK(slurp(dir / "a" / "hits.csv") == slurp(dir / "b" / "hits.csv"));
  CHECK(slurp(dir / "a" / "histogram.json") == slurp(dir / "b" / "histogram.json"));

  REQUIRE(run("simulate urn -n 300000 --seed 5 --out a", dir).code == 0);
  REQUIRE(run("simulate urn -n 300000 --seed 5 --out b", dir).code == 0);
  CHECK(slurp(dir / "a" / "collective.csv") == slurp(dir / "b" / "collective.csv"));
}
