// SPDX-License-Identifier: Apache-2.0

#include <catch_amalgamated.hpp>

#include <sstream>

#include "structprob/classical.hpp"
#include "structprob/io.hpp"

using namespace structprob;
using namespace structprob::twoslit;
using io::json;

TEST_CASE("geometry config schema", "[io][geometry]") {
  const json ref = json::parse(R"({"wavelength_nm":500,"d_mm":0.25,"a_mm":0.05,"L_m":1.0,"window_mm":20,"bins":1024})");
  CHECK(io::geometry_from_json(ref) == reference_geometry());
  CHECK(io::geometry_preset("reference") == reference_geometry());
  CHECK(io::geometry_to_json(reference_geometry()) == ref);

  CHECK_THROWS_AS(io::geometry_preset("lab"), Error);
  json missing = ref;
  missing.erase("bins");
  CHECK_THROWS_AS(io::geometry_from_json(missing), Error);
  json narrow = ref;
  narrow["window_mm"] = 1.0;
  CHECK_THROWS_AS(io::geometry_from_json(narrow), Error);
}

TEST_CASE("hits.csv layout", "[io][hits]") {
  const auto run = run_weak_beam(reference_geometry(), SlitMode::BothSlits, 3, 7);
  std::ostringstream os;
  io::write_hits_csv(os, run.hits);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  CHECK(line == "photon_index,t_omega,bin,x_position_m");
  for (const auto& h : run.hits) {
    std::getline(is, line);
    const std::string expected = std::to_string(h.photon_index) + "," + std::to_string(h.t_omega) + "," +
                                 std::to_string(h.bin) + "," + io::format_g9(h.x_position);
    CHECK(line == expected);
  }
  CHECK(io::format_g9(-0.0012345678912) == "-0.00123456789");
  CHECK(io::format_g9(1.0) == "1");
}

TEST_CASE("histogram.json round-trips field for field", "[io][histogram][property]") {
  SlitGeometry wide = reference_geometry();
  wide.bins = 300;
  wide.window = 31e-3;
  for (const auto& g : {reference_geometry(), wide}) {
    for (auto mode : {SlitMode::BothSlits, SlitMode::SlitOneOnly, SlitMode::SlitTwoOnly}) {
      for (std::uint64_t seed : {0ULL, 7ULL, 123456789ULL}) {
        const auto run = run_weak_beam(g, mode, 2000, seed);
        const json j = io::pattern_to_json(run.pattern);
        const auto back = io::pattern_from_json(json::parse(j.dump()));
        REQUIRE(back == run.pattern);
      }
      const auto intense = run_intense_beam(g, mode);
      REQUIRE(io::pattern_from_json(json::parse(io::pattern_to_json(intense).dump())) == intense);
    }
  }
}

TEST_CASE("histogram.json layout", "[io][histogram]") {
  const auto run = run_weak_beam(reference_geometry(), SlitMode::BothSlits, 50, 3);
  const json j = io::pattern_to_json(run.pattern);
  CHECK(j.at("mode") == "both");
  CHECK(j.at("K") == 50);
  CHECK(j.at("seed") == 3);
  REQUIRE(j.at("bins").size() == 1024);
  const auto& b0 = j.at("bins")[0];
  CHECK(b0.at("x_lo").get<double>() == -0.01);
  CHECK(b0.contains("x_hi"));
  CHECK(b0.contains("count"));
  CHECK(b0.at("expected").get<double>() == run.pattern.profile[0]);
  CHECK(j.at("geometry").at("bins") == 1024);
}

TEST_CASE("corrupt histograms are rejected", "[io][histogram]") {
  const auto run = run_weak_beam(reference_geometry(), SlitMode::BothSlits, 50, 3);
  json j = io::pattern_to_json(run.pattern);

  json short_bins = j;
  short_bins["bins"].erase(0);
  CHECK_THROWS_AS(io::pattern_from_json(short_bins), io::FormatError);

  json bad_total = j;
  bad_total["K"] = 51;
  CHECK_THROWS_AS(io::pattern_from_json(bad_total), io::FormatError);

  json bad_mode = j;
  bad_mode["mode"] = "three";
  CHECK_THROWS_AS(io::pattern_from_json(bad_mode), io::FormatError);

  CHECK_THROWS_AS(io::pattern_from_json(json::object()), io::FormatError);
}

TEST_CASE("report.json layout", "[io][report]") {
  const auto urn = classical::urn_event(5, 5);
  std::vector<theorems::CheckReport> reports{theorems::check_tsn(urn, 1),
                                             theorems::check_tc(classical::urn_event(999, 1), "white", 100, 0)};
  const json j = io::reports_to_json(reports);
  REQUIRE(j.at("checks").size() == 2);
  const auto& c = j.at("checks")[0];
  CHECK(c.at("name") == "TSN");
  CHECK(c.at("passed") == true);
  CHECK(c.at("n") == 1);
  CHECK(c.at("seed") == 1);
  CHECK(c.at("threshold") == 0.0);
  CHECK(c.at("details").is_object());
  for (const char* key : {"name", "passed", "statistic", "threshold", "n", "seed", "details"}) CHECK(c.contains(key));
  if (!reports[1].passed) CHECK(j.at("checks")[1].at("details").contains("note"));
}

TEST_CASE("collective.csv layout", "[io][collective]") {
  const auto c = run_collective(classical::urn_event(5, 5), 4, 9);
  std::ostringstream os;
  io::write_collective_csv(os, c);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  CHECK(line == "trial_index,t_omega,realized");
  std::getline(is, line);
  CHECK(line == "0,1," + c.realized_label(0));

  const json j = io::collective_to_json(c);
  CHECK(j.at("n") == 4);
  CHECK(j.at("records").size() == 4);
  CHECK(j.at("model").at("outcomes")[0].at("label") == "red");
}

TEST_CASE("density csv rows", "[io][report]") {
  const auto run = run_weak_beam(reference_geometry(), SlitMode::BothSlits, 1000, 3);
  std::ostringstream os;
  io::write_density_csv(os, run.pattern, run.pattern.profile);
  std::istringstream is(os.str());
  std::string line;
  int rows = -1;
  while (std::getline(is, line)) ++rows;
  CHECK(rows == 1024);
  CHECK(os.str().rfind("x_position,observed_density,expected_density\n", 0) == 0);
}
