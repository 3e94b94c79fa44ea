// SPDX-License-Identifier: Apache-2.0

// File formats shared by the command-line tool and downstream plotting:
//
//   geometry config   {"wavelength_nm","d_mm","a_mm","L_m","window_mm","bins"}
//   hits.csv          photon_index,t_omega,bin,x_position_m
//   histogram.json    {"geometry":{...},"mode","beam","K","seed","bins":[{"x_lo","x_hi","count","expected"}]}
//   report.json       {"checks":[{"name","passed","statistic","threshold","n","seed","details":{...}}]}
//   collective.csv    trial_index,t_omega,realized

#pragma once

#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "structprob/error.hpp"
#include "structprob/event.hpp"
#include "structprob/stats.hpp"
#include "structprob/theorems.hpp"
#include "structprob/twoslit.hpp"

namespace structprob::io {

using nlohmann::json;

/// Malformed or inconsistent file content.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Geometry

inline json geometry_to_json(const twoslit::SlitGeometry& g) {
  const auto u = twoslit::to_units(g);
  return json{{"wavelength_nm", u.wavelength_nm}, {"d_mm", u.d_mm},           {"a_mm", u.a_mm},
              {"L_m", u.L_m},                     {"window_mm", u.window_mm}, {"bins", u.bins}};
}

inline twoslit::SlitGeometry geometry_from_json(const json& j) {
  twoslit::GeometryUnits u;
  try {
    u.wavelength_nm = j.at("wavelength_nm").get<double>();
    u.d_mm = j.at("d_mm").get<double>();
    u.a_mm = j.at("a_mm").get<double>();
    u.L_m = j.at("L_m").get<double>();
    u.window_mm = j.at("window_mm").get<double>();
    u.bins = j.at("bins").get<std::uint32_t>();
  } catch (const json::exception& e) {
    throw Error(ErrorKind::InvalidGeometry, std::string("geometry config: ") + e.what());
  }
  auto g = twoslit::from_units(u);
  g.validate();
  return g;
}

inline twoslit::SlitGeometry geometry_preset(const std::string& name) {
  if (name == "reference") return twoslit::reference_geometry();
  throw Error(ErrorKind::InvalidGeometry, "unknown preset '" + name + "'");
}

// ---------------------------------------------------------------------------
// Weak-beam output

/// Shortest "%.9g" rendering, matching the hits.csv contract.
inline std::string format_g9(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

inline void write_hits_csv(std::ostream& os, const std::vector<twoslit::ParticleHit>& hits) {
  os << "photon_index,t_omega,bin,x_position_m\n";
  for (const auto& h : hits) {
    os << h.photon_index << ',' << h.t_omega << ',' << h.bin << ',' << format_g9(h.x_position) << '\n';
  }
}

inline json pattern_to_json(const twoslit::DetectionPattern& p) {
  json bins = json::array();
  const auto& g = p.geometry;
  for (std::size_t i = 0; i < g.bins; ++i) {
    bins.push_back({{"x_lo", g.bin_lo(i)},
                    {"x_hi", g.bin_hi(i)},
                    {"count", p.counts.empty() ? std::uint64_t{0} : p.counts[i]},
                    {"expected", p.profile.at(i)}});
  }
  return json{{"geometry", geometry_to_json(g)},
              {"mode", std::string(twoslit::to_string(p.mode))},
              {"beam", std::string(twoslit::to_string(p.beam))},
              {"K", p.K},
              {"seed", p.seed},
              {"bins", std::move(bins)}};
}

inline twoslit::DetectionPattern pattern_from_json(const json& j) {
  twoslit::DetectionPattern p;
  try {
    p.geometry = geometry_from_json(j.at("geometry"));
    p.mode = twoslit::parse_slit_mode(j.at("mode").get<std::string>());
    p.beam = twoslit::parse_beam_mode(j.value("beam", std::string("weak")));
    p.K = j.at("K").get<std::uint64_t>();
    p.seed = j.at("seed").get<std::uint64_t>();
    const auto& bins = j.at("bins");
    if (!bins.is_array() || bins.size() != p.geometry.bins) {
      throw FormatError("histogram has " + std::to_string(bins.size()) + " bins, geometry says " +
                        std::to_string(p.geometry.bins));
    }
    std::uint64_t total = 0;
    for (const auto& b : bins) {
      p.profile.push_back(b.at("expected").get<double>());
      if (p.beam == twoslit::BeamMode::Weak) {
        p.counts.push_back(b.at("count").get<std::uint64_t>());
        total += p.counts.back();
      }
    }
    if (p.beam == twoslit::BeamMode::Weak && total != p.K) {
      throw FormatError("bin counts sum to " + std::to_string(total) + ", K is " + std::to_string(p.K));
    }
  } catch (const json::exception& e) {
    throw FormatError(std::string("histogram.json: ") + e.what());
  } catch (const Error& e) {
    throw FormatError(std::string("histogram.json: ") + e.what());
  }
  return p;
}

// ---------------------------------------------------------------------------
// Collectives

inline void write_collective_csv(std::ostream& os, const Collective& c) {
  os << "trial_index,t_omega,realized\n";
  for (std::size_t i = 0; i < c.size(); ++i) {
    const auto& r = c.records[i];
    os << r.trial_index << ',' << r.t_omega << ',' << c.model->label(r.realized) << '\n';
  }
}

inline json collective_to_json(const Collective& c) {
  json outcomes = json::array();
  for (std::size_t i = 0; i < c.model->size(); ++i) {
    outcomes.push_back({{"label", c.model->label(i)}, {"p", c.model->probability(i)}});
  }
  json records = json::array();
  for (const auto& r : c.records) {
    records.push_back({{"trial_index", r.trial_index}, {"t_omega", r.t_omega}, {"realized", c.model->label(r.realized)}});
  }
  return json{{"model", {{"alpha", c.model->alpha().label}, {"outcomes", std::move(outcomes)}}},
              {"n", c.size()},
              {"seed", c.seed},
              {"records", std::move(records)}};
}

// ---------------------------------------------------------------------------
// Check reports

inline json report_to_json(const theorems::CheckReport& r) {
  json details = json::object();
  for (const auto& [k, v] : r.details) details[k] = v;
  if (!r.note.empty()) details["note"] = r.note;
  return json{{"name", std::string(theorems::to_string(r.name))},
              {"passed", r.passed},
              {"statistic", r.statistic},
              {"threshold", r.threshold},
              {"n", r.n},
              {"seed", r.seed},
              {"details", std::move(details)}};
}

inline json reports_to_json(const std::vector<theorems::CheckReport>& reports) {
  json checks = json::array();
  for (const auto& r : reports) checks.push_back(report_to_json(r));
  return json{{"checks", std::move(checks)}};
}

// ---------------------------------------------------------------------------
// Plot-ready comparison

/// Rows of x_position, observed_density, expected_density (both per meter).
inline void write_density_csv(std::ostream& os, const twoslit::DetectionPattern& p,
                              const std::vector<double>& expected_pdf) {
  const auto& g = p.geometry;
  const auto observed = twoslit::observed_pdf(p);
  const double w = g.bin_width();
  os << "x_position,observed_density,expected_density\n";
  for (std::size_t i = 0; i < g.bins; ++i) {
    os << format_g9(g.bin_center(i)) << ',' << format_g9(observed[i] / w) << ',' << format_g9(expected_pdf[i] / w)
       << '\n';
  }
}

inline std::string gof_line(const stats::GofResult& r) {
  std::ostringstream os;
  os.precision(10);
  os << "chi2=" << r.statistic << " dof=" << r.dof << " p_value=" << r.p_value << " merged_bins=" << r.merged_bins;
  return os.str();
}

}  // namespace structprob::io
