// SPDX-License-Identifier: Apache-2.0

// Two-slit detection screen as a random event.
//
// In flight a quantum is a wave: a normalized spatial probability over the
// screen bins, indeterminate in every bin it can reach. Detection is a trial of
// that event; the quantum ends as a particle, certain in one bin and absent
// from the others. A weak beam repeats this one photon at a time; an intense
// beam is the long-run limit and is reported as the profile itself.
//
// |psi|^2 on the screen comes from the far-field (Fraunhofer) closed form
//   I(x) = cos^2(pi d x / (lambda L)) * sinc^2(pi a x / (lambda L))
// with one slit open the cos^2 factor drops out.

#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include "structprob/error.hpp"
#include "structprob/event.hpp"
#include "structprob/random.hpp"
#include "structprob/stats.hpp"

namespace structprob::twoslit {

enum class SlitMode { BothSlits, SlitOneOnly, SlitTwoOnly };
enum class BeamMode { Weak, Intense };

constexpr std::string_view to_string(SlitMode m) noexcept {
  switch (m) {
    case SlitMode::BothSlits: return "both";
    case SlitMode::SlitOneOnly: return "one";
    case SlitMode::SlitTwoOnly: return "two";
  }
  return "?";
}

constexpr std::string_view to_string(BeamMode m) noexcept { return m == BeamMode::Weak ? "weak" : "intense"; }

inline SlitMode parse_slit_mode(std::string_view s) {
  if (s == "both") return SlitMode::BothSlits;
  if (s == "one") return SlitMode::SlitOneOnly;
  if (s == "two") return SlitMode::SlitTwoOnly;
  throw Error(ErrorKind::InvalidGeometry, "unknown slit mode '" + std::string(s) + "'");
}

inline BeamMode parse_beam_mode(std::string_view s) {
  if (s == "weak") return BeamMode::Weak;
  if (s == "intense") return BeamMode::Intense;
  throw Error(ErrorKind::InvalidGeometry, "unknown beam mode '" + std::string(s) + "'");
}

/// All lengths in meters. The screen window is centred on the optical axis.
struct SlitGeometry {
  double wavelength = 500e-9;
  double slit_separation = 0.25e-3;
  double slit_width = 0.05e-3;
  double screen_distance = 1.0;
  double window = 20e-3;
  std::uint32_t bins = 1024;

  friend bool operator==(const SlitGeometry&, const SlitGeometry&) = default;

  double fringe_spacing() const noexcept { return wavelength * screen_distance / slit_separation; }
  double bin_width() const noexcept { return window / bins; }
  double bin_lo(std::size_t i) const noexcept { return -0.5 * window + static_cast<double>(i) * bin_width(); }
  double bin_hi(std::size_t i) const noexcept { return bin_lo(i + 1); }
  double bin_center(std::size_t i) const noexcept {
    return -0.5 * window + (static_cast<double>(i) + 0.5) * bin_width();
  }

  /// Screen far enough for the far-field form: L / d >= 1000.
  bool far_field_valid() const noexcept { return screen_distance >= 1e3 * slit_separation; }

  void validate() const {
    auto positive = [](double v) { return v > 0.0 && std::isfinite(v); };
    if (!positive(wavelength) || !positive(slit_separation) || !positive(slit_width) ||
        !positive(screen_distance) || !positive(window)) {
      throw Error(ErrorKind::InvalidGeometry, "all lengths must be positive and finite");
    }
    if (bins == 0) throw Error(ErrorKind::InvalidGeometry, "bins must be positive");
    if (!(slit_width < slit_separation)) {
      throw Error(ErrorKind::InvalidGeometry, "slit width must be smaller than the slit separation");
    }
    if (window < 4.0 * fringe_spacing()) {
      throw Error(ErrorKind::InvalidGeometry, "window narrower than four fringe spacings");
    }
  }
};

/// Geometry in the units of the configuration file.
struct GeometryUnits {
  double wavelength_nm = 500.0;
  double d_mm = 0.25;
  double a_mm = 0.05;
  double L_m = 1.0;
  double window_mm = 20.0;
  std::uint32_t bins = 1024;

  friend bool operator==(const GeometryUnits&, const GeometryUnits&) = default;
};

namespace detail {

/// value * scale, nudged so that dividing back by scale recovers value exactly.
inline double scale_exact(double value, double scale) {
  double up = value * scale;
  for (int step = 0; step < 4 && up / scale != value; ++step) {
    up = std::nextafter(up, up / scale < value ? HUGE_VAL : -HUGE_VAL);
  }
  return up;
}

}  // namespace detail

inline SlitGeometry from_units(const GeometryUnits& u) {
  return {u.wavelength_nm / 1e9, u.d_mm / 1e3, u.a_mm / 1e3, u.L_m, u.window_mm / 1e3, u.bins};
}

inline GeometryUnits to_units(const SlitGeometry& g) {
  return {detail::scale_exact(g.wavelength, 1e9), detail::scale_exact(g.slit_separation, 1e3),
          detail::scale_exact(g.slit_width, 1e3),  g.screen_distance,
          detail::scale_exact(g.window, 1e3),      g.bins};
}

/// 500 nm light, d = 0.25 mm, a = 0.05 mm, L = 1 m, 20 mm window in 1024 bins.
inline SlitGeometry reference_geometry() { return from_units(GeometryUnits{}); }

inline double sinc(double u) noexcept { return u == 0.0 ? 1.0 : std::sin(u) / u; }

/// Unnormalized screen intensity at position x.
inline double intensity(const SlitGeometry& g, SlitMode mode, double x) noexcept {
  const double scale = std::numbers::pi * x / (g.wavelength * g.screen_distance);
  const double envelope = sinc(scale * g.slit_width);
  double value = envelope * envelope;
  if (mode == SlitMode::BothSlits) {
    const double c = std::cos(scale * g.slit_separation);
    value *= c * c;
  }
  return value;
}

/// Spatial probability of a quantum over the screen bins.
struct WaveProfile {
  SlitGeometry geometry;
  SlitMode mode = SlitMode::BothSlits;
  std::vector<double> pdf;

  /// A wave: indeterminate wherever it has mass.
  OutcomeStatus status(std::size_t bin) const { return OutcomeStatus::from_probability(pdf.at(bin)); }
};

/// Bin masses are the intensity at bin centres, normalized to sum to one.
inline WaveProfile intensity_profile(const SlitGeometry& g, SlitMode mode) {
  g.validate();
  WaveProfile p{g, mode, std::vector<double>(g.bins)};
  double sum = 0.0;
  for (std::size_t i = 0; i < g.bins; ++i) {
    p.pdf[i] = intensity(g, mode, g.bin_center(i));
    sum += p.pdf[i];
  }
  if (!(sum > 0.0)) throw Error(ErrorKind::InvalidGeometry, "profile has no mass inside the window");
  for (double& v : p.pdf) v /= sum;
  return p;
}

struct FringeSpacing {
  double analytic = 0.0;  // lambda L / d
  double measured = 0.0;  // from the computed two-slit profile
};

inline FringeSpacing fringe_spacing(const SlitGeometry& g) {
  const WaveProfile p = intensity_profile(g, SlitMode::BothSlits);
  return {g.fringe_spacing(), stats::peak_spacing(p.pdf, g.bin_width())};
}

struct ErgodicSource {
  std::string name = "laser";
  double wavelength = 500e-9;
};

inline std::string bin_label(std::size_t bin) { return "bin_" + std::to_string(bin); }

/// Free flight from the source to the screen, with the screen bins as outcome space.
inline EventStructure free_flight_event(const ErgodicSource& source, const WaveProfile& profile) {
  std::vector<std::pair<std::string, double>> outcomes;
  outcomes.reserve(profile.pdf.size());
  for (std::size_t i = 0; i < profile.pdf.size(); ++i) outcomes.emplace_back(bin_label(i), profile.pdf[i]);
  InitialConditions alpha{source.name, {{"wavelength_m", source.wavelength}}};
  return make_event(std::move(alpha), outcomes);
}

/// A detected quantum: certain in `bin`, absent everywhere else.
struct ParticleHit {
  std::uint64_t photon_index = 0;
  std::size_t bin = 0;
  double x_position = 0.0;
  std::uint64_t t_omega = 0;
  OutcomeStatus status_before = OutcomeStatus::determinate(0);
  OutcomeStatus status_after = OutcomeStatus::determinate(1);

  OutcomeStatus status(std::size_t b) const { return OutcomeStatus::determinate(b == bin ? 1 : 0); }

  TrialRecord as_trial() const { return {photon_index, t_omega, bin, status_before, status_after}; }

  friend bool operator==(const ParticleHit&, const ParticleHit&) = default;
};

/// One wavelet reaching the screen. The bin is drawn by inverse CDF; the hit
/// has no further evolution.
inline ParticleHit emit_wavelet(const EventStructure& flight, const SlitGeometry& g, std::uint64_t photon_index,
                                Xoshiro256& stream) {
  const TrialRecord rec = sample_trial(flight, stream, photon_index);
  return {photon_index, rec.realized, g.bin_center(rec.realized), rec.t_omega, rec.status_before, rec.status_after};
}

struct DetectionPattern {
  SlitGeometry geometry;
  SlitMode mode = SlitMode::BothSlits;
  BeamMode beam = BeamMode::Weak;
  std::uint64_t K = 0;
  std::uint64_t seed = 0;
  /// Photon counts per bin (weak beam only; empty for an intense beam).
  std::vector<std::uint64_t> counts;
  /// Model spatial probability per bin. For an intense beam this is the pattern.
  std::vector<double> profile;

  friend bool operator==(const DetectionPattern&, const DetectionPattern&) = default;
};

struct WeakBeamRun {
  DetectionPattern pattern;
  std::vector<ParticleHit> hits;
};

/// Sends K photons one at a time. Photon i uses sub-stream i of `seed`.
inline WeakBeamRun run_weak_beam(const SlitGeometry& g, SlitMode mode, std::uint64_t K, std::uint64_t seed) {
  if (K == 0) throw Error(ErrorKind::ZeroPhotons, "K must be at least 1");
  const WaveProfile profile = intensity_profile(g, mode);
  const EventStructure flight = free_flight_event({"laser", g.wavelength}, profile);
  WeakBeamRun run;
  run.pattern = {g, mode, BeamMode::Weak, K, seed, std::vector<std::uint64_t>(g.bins, 0), profile.pdf};
  run.hits.reserve(K);
  for (std::uint64_t i = 0; i < K; ++i) {
    auto stream = substream(seed, i);
    run.hits.push_back(emit_wavelet(flight, g, i, stream));
    ++run.pattern.counts[run.hits.back().bin];
  }
  return run;
}

/// The radiation limit: no sampling, the screen shows the profile.
inline DetectionPattern run_intense_beam(const SlitGeometry& g, SlitMode mode) {
  const WaveProfile profile = intensity_profile(g, mode);
  return {g, mode, BeamMode::Intense, 0, 0, {}, profile.pdf};
}

/// Observed spatial density per bin: normalized counts for a weak beam, the
/// profile for an intense one.
inline std::vector<double> observed_pdf(const DetectionPattern& p) {
  if (p.beam == BeamMode::Intense) return p.profile;
  std::vector<double> out(p.counts.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = p.K == 0 ? 0.0 : static_cast<double>(p.counts[i]) / static_cast<double>(p.K);
  }
  return out;
}

/// Bins each side of the moving average applied to weak-beam counts before peak finding.
inline constexpr std::size_t kSmoothingHalfWidth = 2;

/// Fringe spacing read off a detected pattern. Throws TooFewPeaks on a
/// fringeless (single-slit) pattern.
inline double measured_fringe_spacing(const DetectionPattern& p) {
  const auto density = observed_pdf(p);
  if (p.beam == BeamMode::Intense) return stats::peak_spacing(density, p.geometry.bin_width());
  return stats::peak_spacing(stats::moving_average(density, kSmoothingHalfWidth), p.geometry.bin_width());
}

}  // namespace structprob::twoslit
