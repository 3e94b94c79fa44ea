// SPDX-License-Identifier: Apache-2.0

// structprob: simulate events, verify the trial-status properties, and compare
// detected two-slit patterns against the model.
//
// Exit codes: 0 success, 1 a check's predicate is false, 2 bad config or
// arguments, 3 I/O failure.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "structprob/classical.hpp"
#include "structprob/io.hpp"
#include "structprob/structprob.hpp"

namespace fs = std::filesystem;
using namespace structprob;

namespace {

enum Exit : int { kOk = 0, kCheckFailed = 1, kConfigError = 2, kIoError = 3 };

class IoFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CommonOptions {
  std::vector<std::uint64_t> seeds;
  std::string out = ".";
  std::string format = "csv";
};

void add_common(CLI::App* cmd, CommonOptions& opts) {
  cmd->add_option("--seed", opts.seeds, "Seed (repeatable)")->take_all();
  cmd->add_option("--out", opts.out, "Output directory")->capture_default_str();
  cmd->add_option("--format", opts.format, "Collective file format")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
}

std::vector<std::uint64_t> seeds_or_default(const std::vector<std::uint64_t>& seeds) {
  return seeds.empty() ? std::vector<std::uint64_t>{42} : seeds;
}

fs::path prepare_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoFailure("cannot create output directory '" + dir + "'");
  const fs::path probe = fs::path(dir) / ".structprob_write_probe";
  {
    std::ofstream f(probe);
    if (!f) throw IoFailure("output directory '" + dir + "' is not writable");
  }
  fs::remove(probe, ec);
  return dir;
}

void prepare_file(const std::string& path) {
  const fs::path p(path);
  if (p.has_parent_path()) prepare_dir(p.parent_path().string());
  std::ofstream f(p, std::ios::app);
  if (!f) throw IoFailure("cannot write '" + path + "'");
}

std::string name_for(const std::string& stem, const std::string& ext, std::uint64_t seed, bool many) {
  return many ? stem + "_seed" + std::to_string(seed) + ext : stem + ext;
}

template <class Writer>
void write_file(const fs::path& path, Writer&& writer) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoFailure("cannot open '" + path.string() + "' for writing");
  writer(f);
  f.flush();
  if (!f) throw IoFailure("write to '" + path.string() + "' failed");
}

void write_json(const fs::path& path, const io::json& j) {
  write_file(path, [&](std::ostream& os) { os << j.dump(2) << '\n'; });
}

io::json read_json(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoFailure("cannot read '" + path + "'");
  try {
    return io::json::parse(f);
  } catch (const io::json::exception& e) {
    throw IoFailure("'" + path + "' is not valid JSON: " + e.what());
  }
}

std::string g9(double v) { return io::format_g9(v); }

// ---------------------------------------------------------------------------
// simulate

struct UrnArgs {
  CommonOptions common;
  std::int64_t reds = 5;
  std::int64_t whites = 5;
  std::uint64_t n = 1000;
  std::string label = "red";
};

struct RouletteArgs {
  CommonOptions common;
  std::uint64_t n = 37000;
};

struct TwoSlitArgs {
  CommonOptions common;
  std::string preset = "reference";
  std::string config;
  std::optional<std::uint32_t> bins;
  std::string mode = "both";
  std::string beam = "weak";
  std::uint64_t K = 100000;
};

void write_collective(const Collective& c, const CommonOptions& opts, const fs::path& dir, bool many) {
  if (opts.format == "json") {
    write_json(dir / name_for("collective", ".json", c.seed, many), io::collective_to_json(c));
  } else {
    write_file(dir / name_for("collective", ".csv", c.seed, many),
               [&](std::ostream& os) { io::write_collective_csv(os, c); });
  }
}

int simulate_urn(const UrnArgs& a) {
  const fs::path dir = prepare_dir(a.common.out);
  auto model = std::make_shared<const EventStructure>(classical::urn_event(a.reds, a.whites));
  const std::size_t label = model->index_of(a.label);
  const auto seeds = seeds_or_default(a.common.seeds);
  for (std::uint64_t seed : seeds) {
    const Collective c = run_collective(model, a.n, seed);
    write_collective(c, a.common, dir, seeds.size() > 1);
    const Frequency f = frequency(c, label);
    std::cout << "target=urn n=" << a.n << " seed=" << seed << " label=" << a.label << " count=" << f.count
              << " frequency=" << g9(f.value()) << " p=" << g9(model->probability(label)) << '\n';
  }
  return kOk;
}

int simulate_roulette(const RouletteArgs& a) {
  const fs::path dir = prepare_dir(a.common.out);
  auto model = std::make_shared<const EventStructure>(classical::roulette_event());
  const auto seeds = seeds_or_default(a.common.seeds);
  for (std::uint64_t seed : seeds) {
    const Collective c = run_collective(model, a.n, seed);
    write_collective(c, a.common, dir, seeds.size() > 1);
    const auto counts = outcome_counts(c);
    const std::vector<double> pdf(model->probabilities().begin(), model->probabilities().end());
    const auto gof = stats::chi_square_gof(counts, pdf, a.n);
    std::cout << "target=roulette n=" << a.n << " seed=" << seed << " chi2=" << g9(gof.statistic)
              << " dof=" << gof.dof << " p_value=" << g9(gof.p_value) << '\n';
  }
  return kOk;
}

twoslit::SlitGeometry load_geometry(const std::string& preset, const std::string& config,
                                    std::optional<std::uint32_t> bins) {
  twoslit::SlitGeometry g = config.empty() ? io::geometry_preset(preset) : io::geometry_from_json(read_json(config));
  if (bins) g.bins = *bins;
  g.validate();
  if (!g.far_field_valid()) std::cerr << "warning: screen distance below 1000 slit separations\n";
  return g;
}

int simulate_twoslit(const TwoSlitArgs& a) {
  const auto g = load_geometry(a.preset, a.config, a.bins);
  const auto mode = twoslit::parse_slit_mode(a.mode);
  const auto beam = twoslit::parse_beam_mode(a.beam);
  if (beam == twoslit::BeamMode::Weak && a.K == 0) throw Error(ErrorKind::ZeroPhotons, "K must be at least 1");
  const fs::path dir = prepare_dir(a.common.out);

  auto spacing = [](const twoslit::DetectionPattern& p) -> std::string {
    try {
      return g9(twoslit::measured_fringe_spacing(p));
    } catch (const Error&) {
      return "none";
    }
  };

  if (beam == twoslit::BeamMode::Intense) {
    const auto pattern = twoslit::run_intense_beam(g, mode);
    write_json(dir / "histogram.json", io::pattern_to_json(pattern));
    std::cout << "target=twoslit beam=intense mode=" << a.mode << " bins=" << g.bins
              << " fringe_spacing_m=" << spacing(pattern) << '\n';
    return kOk;
  }

  const auto seeds = seeds_or_default(a.common.seeds);
  const bool many = seeds.size() > 1;
  for (std::uint64_t seed : seeds) {
    const auto run = twoslit::run_weak_beam(g, mode, a.K, seed);
    write_file(dir / name_for("hits", ".csv", seed, many), [&](std::ostream& os) { io::write_hits_csv(os, run.hits); });
    write_json(dir / name_for("histogram", ".json", seed, many), io::pattern_to_json(run.pattern));
    std::ostringstream gof;
    try {
      const auto r = stats::chi_square_gof(run.pattern.counts, run.pattern.profile, a.K);
      gof << "chi2=" << g9(r.statistic) << " dof=" << r.dof << " p_value=" << g9(r.p_value);
    } catch (const Error& e) {
      gof << "chi2=none p_value=none";
    }
    std::cout << "target=twoslit beam=weak mode=" << a.mode << " K=" << a.K << " seed=" << seed << " bins=" << g.bins
              << ' ' << gof.str() << " ks=" << g9(stats::ks_distance(run.pattern.counts, run.pattern.profile))
              << " fringe_spacing_m=" << spacing(run.pattern) << '\n';
  }
  return kOk;
}

// ---------------------------------------------------------------------------
// verify

struct VerifyArgs {
  std::vector<std::string> checks;
  bool all = false;
  std::vector<std::uint64_t> seeds;
  std::string model = "urn";
  std::string label;
  std::optional<std::uint64_t> n;
  double confidence = 0.95;
  std::string out = "report.json";
  std::optional<double> inject_bias;
};

EventStructure verify_model(const std::string& name) {
  if (name == "urn") return classical::urn_event(5, 5);
  if (name == "roulette") return classical::roulette_event();
  if (name == "certain") return make_event({"certain", {}}, {{"only", 1.0}});
  throw Error(ErrorKind::UnknownLabel, "unknown model '" + name + "'");
}

std::vector<std::uint64_t> tln_schedule(std::uint64_t final_n) {
  std::vector<std::uint64_t> s;
  for (std::uint64_t c = 100; c < final_n; c *= 100) s.push_back(c);
  s.push_back(final_n);
  return s;
}

int verify(const VerifyArgs& a) {
  static const std::vector<std::string> kAll{"TSN", "TLN", "TIC", "TC", "TD", "INDIRECT"};
  std::vector<std::string> checks = a.all ? kAll : a.checks;
  if (checks.empty()) throw Error(ErrorKind::InvalidSchedule, "no checks selected (name some or pass --all)");
  for (auto& c : checks) {
    std::transform(c.begin(), c.end(), c.begin(), [](unsigned char ch) { return std::toupper(ch); });
    if (std::find(kAll.begin(), kAll.end(), c) == kAll.end()) {
      throw Error(ErrorKind::UnknownLabel, "unknown check '" + c + "'");
    }
  }
  const EventStructure event = verify_model(a.model);
  const std::string label = !a.label.empty() ? a.label : event.label(0);
  event.index_of(label);
  prepare_file(a.out);

  std::vector<theorems::CheckReport> reports;
  for (std::uint64_t seed : seeds_or_default(a.seeds)) {
    for (const auto& name : checks) {
      if (name == "TSN") {
        reports.push_back(theorems::check_tsn(event, seed));
      } else if (name == "TLN") {
        const auto schedule = tln_schedule(a.n.value_or(1'000'000));
        if (a.inject_bias) {
          const double p = *a.inject_bias;
          auto biased = make_event({"biased sampler", {{"p", p}}}, {{label, p}, {"other", 1.0 - p}});
          const Collective c = run_collective(biased, schedule.back(), seed);
          reports.push_back(theorems::check_tln_against(c, label, event.probability(label), schedule).first);
          reports.back().details["injected_p"] = p;
        } else {
          reports.push_back(theorems::check_tln(event, label, schedule, seed).first);
        }
      } else if (name == "TIC") {
        reports.push_back(theorems::check_tic(event, a.n.value_or(10'000), seed));
      } else if (name == "TC") {
        reports.push_back(theorems::check_tc(event, label, a.n.value_or(10'000), seed));
      } else if (name == "TD") {
        reports.push_back(theorems::check_td(event, a.n.value_or(10'000), seed));
      } else if (name == "INDIRECT") {
        reports.push_back(theorems::indirect_estimate(event, label, a.n.value_or(10'000), a.confidence, seed).report);
      }
    }
  }

  bool all_passed = true;
  for (const auto& r : reports) {
    all_passed = all_passed && r.passed;
    std::cout << "check=" << theorems::to_string(r.name) << " seed=" << r.seed << " n=" << r.n
              << " passed=" << (r.passed ? "true" : "false") << " statistic=" << g9(r.statistic)
              << " threshold=" << g9(r.threshold) << '\n';
  }
  write_json(a.out, io::reports_to_json(reports));
  return all_passed ? kOk : kCheckFailed;
}

// ---------------------------------------------------------------------------
// report

struct ReportArgs {
  std::string input;
  std::string preset = "reference";
  std::string config;
  std::optional<std::uint32_t> bins;
  std::string out = "density.csv";
};

int report(const ReportArgs& a) {
  const io::json j = read_json(a.input);
  twoslit::DetectionPattern pattern;
  try {
    pattern = io::pattern_from_json(j);
  } catch (const io::FormatError& e) {
    throw IoFailure(e.what());
  }
  const auto g = load_geometry(a.preset, a.config, a.bins);
  if (pattern.geometry.bins != g.bins) {
    throw Error(ErrorKind::LengthMismatch, "histogram has " + std::to_string(pattern.geometry.bins) +
                                               " bins, geometry has " + std::to_string(g.bins));
  }
  const bool weak = pattern.beam == twoslit::BeamMode::Weak;
  if (weak && pattern.K == 0) throw IoFailure("histogram is empty");
  const auto expected = twoslit::intensity_profile(g, pattern.mode).pdf;
  prepare_file(a.out);
  write_file(a.out, [&](std::ostream& os) { io::write_density_csv(os, pattern, expected); });

  std::cout << "input=" << a.input << " beam=" << twoslit::to_string(pattern.beam) << " bins=" << g.bins;
  if (weak) {
    std::cout << ' ' << io::gof_line(stats::chi_square_gof(pattern.counts, expected, pattern.K))
              << " ks=" << g9(stats::ks_distance(pattern.counts, expected));
  }
  std::cout << '\n';
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Structural probability simulator: events, trial statuses and two-slit detection"};
  app.require_subcommand(1);

  auto* simulate = app.add_subcommand("simulate", "Run a model and write its trials");
  simulate->require_subcommand(1);

  UrnArgs urn;
  auto* urn_cmd = simulate->add_subcommand("urn", "Draws from an urn of red and white balls");
  add_common(urn_cmd, urn.common);
  urn_cmd->add_option("--reds", urn.reds)->capture_default_str();
  urn_cmd->add_option("--whites", urn.whites)->capture_default_str();
  urn_cmd->add_option("-n", urn.n, "Trials")->capture_default_str();
  urn_cmd->add_option("--label", urn.label, "Outcome summarized on stdout")->capture_default_str();

  RouletteArgs roulette;
  auto* roulette_cmd = simulate->add_subcommand("roulette", "Spins of a 37-cell wheel");
  add_common(roulette_cmd, roulette.common);
  roulette_cmd->add_option("-n", roulette.n, "Spins")->capture_default_str();

  TwoSlitArgs slit;
  auto* slit_cmd = simulate->add_subcommand("twoslit", "Photons through a double slit");
  add_common(slit_cmd, slit.common);
  slit_cmd->add_option("--preset", slit.preset, "Named geometry")->capture_default_str();
  slit_cmd->add_option("--config", slit.config, "Geometry JSON file (overrides --preset)");
  slit_cmd->add_option("--bins", slit.bins, "Override screen bin count");
  slit_cmd->add_option("--mode", slit.mode, "Open slits: both|one|two")->capture_default_str();
  slit_cmd->add_option("--beam", slit.beam, "weak|intense")->capture_default_str();
  slit_cmd->add_option("-K", slit.K, "Photons (weak beam)")->capture_default_str();

  VerifyArgs ver;
  auto* verify_cmd = app.add_subcommand("verify", "Run property checks and write report.json");
  verify_cmd->add_option("checks", ver.checks, "TSN TLN TIC TC TD INDIRECT");
  verify_cmd->add_flag("--all", ver.all, "Run every check");
  verify_cmd->add_option("--seed", ver.seeds, "Seed (repeatable)")->take_all();
  verify_cmd->add_option("--model", ver.model, "urn|roulette|certain")->capture_default_str();
  verify_cmd->add_option("--label", ver.label, "Outcome under test (default: first outcome)");
  verify_cmd->add_option("-n", ver.n, "Trial count (final count for TLN)");
  verify_cmd->add_option("--confidence", ver.confidence)->capture_default_str();
  verify_cmd->add_option("--out", ver.out, "Report path")->capture_default_str();
  verify_cmd->add_option("--inject-bias", ver.inject_bias, "Test hook: draw the TLN run from a biased sampler")
      ->group("");

  ReportArgs rep;
  auto* report_cmd = app.add_subcommand("report", "Compare a histogram.json against a geometry");
  report_cmd->add_option("--input", rep.input, "histogram.json")->required();
  report_cmd->add_option("--preset", rep.preset)->capture_default_str();
  report_cmd->add_option("--config", rep.config, "Geometry JSON file (overrides --preset)");
  report_cmd->add_option("--bins", rep.bins);
  report_cmd->add_option("--out", rep.out, "Plot CSV path")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }

  try {
    if (*urn_cmd) return simulate_urn(urn);
    if (*roulette_cmd) return simulate_roulette(roulette);
    if (*slit_cmd) return simulate_twoslit(slit);
    if (*verify_cmd) return verify(ver);
    if (*report_cmd) return report(rep);
  } catch (const IoFailure& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIoError;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIoError;
  }
  return kConfigError;
}
