// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "structprob/error.hpp"

namespace structprob::stats {

struct GofResult {
  double statistic = 0.0;
  double p_value = 1.0;
  int dof = 0;
  /// Number of input bins absorbed into a neighbour to meet the expected-count floor.
  int merged_bins = 0;
};

inline constexpr double kMinExpectedCount = 5.0;

namespace detail {

inline std::vector<double> normalized(std::span<const double> pdf) {
  double sum = 0.0;
  for (double v : pdf) {
    if (!(v >= 0.0)) throw Error(ErrorKind::InvalidCounts, "expected pdf has a negative or NaN entry");
    sum += v;
  }
  if (!(sum > 0.0)) throw Error(ErrorKind::InvalidCounts, "expected pdf sums to zero");
  std::vector<double> out(pdf.begin(), pdf.end());
  for (double& v : out) v /= sum;
  return out;
}

inline void require_same_length(std::size_t a, std::size_t b) {
  if (a != b) {
    throw Error(ErrorKind::LengthMismatch, std::to_string(a) + " observed bins vs " + std::to_string(b) + " expected");
  }
}

}  // namespace detail

/// Upper tail of the chi-square distribution with `dof` degrees of freedom.
inline double chi_square_sf(double statistic, int dof) {
  if (statistic <= 0.0) return 1.0;
  return boost::math::gamma_q(0.5 * dof, 0.5 * statistic);
}

/// Pearson goodness of fit. Adjacent bins are pooled left to right until each
/// pool expects at least five counts; a short tail is folded into the last pool.
/// The expected pdf is normalized here, so any positive rescaling gives the same result.
inline GofResult chi_square_gof(std::span<const std::uint64_t> observed, std::span<const double> expected_pdf,
                                std::uint64_t total) {
  detail::require_same_length(observed.size(), expected_pdf.size());
  const std::uint64_t sum = std::accumulate(observed.begin(), observed.end(), std::uint64_t{0});
  if (sum != total) {
    throw Error(ErrorKind::InvalidCounts,
                "total " + std::to_string(total) + " differs from observed sum " + std::to_string(sum));
  }
  if (total == 0) throw Error(ErrorKind::InvalidCounts, "no observations");
  const auto pdf = detail::normalized(expected_pdf);
  const double n = static_cast<double>(total);

  std::vector<std::pair<double, double>> pools;  // (observed, expected)
  double obs_acc = 0.0, exp_acc = 0.0;
  for (std::size_t i = 0; i < pdf.size(); ++i) {
    obs_acc += static_cast<double>(observed[i]);
    exp_acc += pdf[i] * n;
    if (exp_acc >= kMinExpectedCount) {
      pools.emplace_back(obs_acc, exp_acc);
      obs_acc = exp_acc = 0.0;
    }
  }
  if (obs_acc > 0.0 || exp_acc > 0.0) {
    if (pools.empty()) {
      pools.emplace_back(obs_acc, exp_acc);
    } else {
      pools.back().first += obs_acc;
      pools.back().second += exp_acc;
    }
  }
  if (pools.size() < 2) {
    throw Error(ErrorKind::AllBinsPooled, "fewer than two pools reach the expected-count floor");
  }

  GofResult res;
  for (const auto& [o, e] : pools) res.statistic += (o - e) * (o - e) / e;
  res.dof = static_cast<int>(pools.size()) - 1;
  res.merged_bins = static_cast<int>(pdf.size() - pools.size());
  res.p_value = std::clamp(chi_square_sf(res.statistic, res.dof), 0.0, 1.0);
  return res;
}

/// Largest gap between the empirical CDF of the binned counts and the model CDF,
/// taken over the bin edges.
inline double ks_distance(std::span<const std::uint64_t> observed, std::span<const double> expected_pdf) {
  detail::require_same_length(observed.size(), expected_pdf.size());
  const auto pdf = detail::normalized(expected_pdf);
  const double total = static_cast<double>(std::accumulate(observed.begin(), observed.end(), std::uint64_t{0}));
  if (!(total > 0.0)) throw Error(ErrorKind::InvalidCounts, "no observations");
  double emp = 0.0, model = 0.0, dist = 0.0;
  for (std::size_t i = 0; i < pdf.size(); ++i) {
    emp += static_cast<double>(observed[i]) / total;
    model += pdf[i];
    dist = std::max(dist, std::fabs(emp - model));
  }
  return std::min(dist, 1.0);
}

inline double normal_two_sided_z(double confidence) {
  if (!(confidence > 0.0 && confidence < 1.0)) {
    throw Error(ErrorKind::InvalidConfidence, "confidence must lie in (0,1), got " + std::to_string(confidence));
  }
  return boost::math::quantile(boost::math::normal_distribution<double>(), 0.5 + 0.5 * confidence);
}

/// Wilson score interval for a binomial proportion.
inline std::pair<double, double> wilson_interval(std::uint64_t successes, std::uint64_t n, double confidence) {
  if (n == 0 || successes > n) {
    throw Error(ErrorKind::InvalidCounts,
                std::to_string(successes) + " successes out of " + std::to_string(n));
  }
  const double z = normal_two_sided_z(confidence);
  const double nn = static_cast<double>(n);
  const double phat = static_cast<double>(successes) / nn;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nn;
  const double center = phat + z2 / (2.0 * nn);
  const double half = z * std::sqrt(phat * (1.0 - phat) / nn + z2 / (4.0 * nn * nn));
  double lo = std::clamp((center - half) / denom, 0.0, 1.0);
  double hi = std::clamp((center + half) / denom, 0.0, 1.0);
  if (successes == 0) lo = 0.0;
  if (successes == n) hi = 1.0;
  return {lo, hi};
}

// ---------------------------------------------------------------------------
// Fringe detection

inline constexpr double kPeakThreshold = 0.10;   // of the global maximum
inline constexpr double kMinProminence = 0.50;   // of the peak's own height

struct Peak {
  std::size_t index = 0;
  double height = 0.0;
  double prominence = 0.0;
};

/// Local maxima above `threshold * max` whose topographic prominence is at least
/// `min_prominence` of their height. Flat tops report their middle bin.
inline std::vector<Peak> find_peaks(std::span<const double> values, double threshold = kPeakThreshold,
                                    double min_prominence = kMinProminence) {
  std::vector<Peak> peaks;
  if (values.empty()) return peaks;
  const double gmax = *std::max_element(values.begin(), values.end());
  if (!(gmax > 0.0)) return peaks;
  const std::size_t n = values.size();

  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[j + 1] == values[i]) ++j;  // plateau [i, j]
    const bool left_lower = i == 0 || values[i - 1] < values[i];
    const bool right_lower = j + 1 == n || values[j + 1] < values[i];
    const double h = values[i];
    if (left_lower && right_lower && h >= threshold * gmax && h > 0.0) {
      // lowest point on each side before reaching something higher than h;
      // an equal peak to the right counts as higher, so ties keep only one
      double left_base = h;
      for (std::size_t k = i; k-- > 0 && values[k] <= h;) left_base = std::min(left_base, values[k]);
      double right_base = h;
      for (std::size_t k = j + 1; k < n && values[k] < h; ++k) right_base = std::min(right_base, values[k]);
      const double prominence = h - std::max(left_base, right_base);
      if (prominence >= min_prominence * h) peaks.push_back({(i + j) / 2, h, prominence});
    }
    i = j + 1;
  }
  return peaks;
}

namespace detail {

/// Middle of the run of minimal values strictly between two indices, as a
/// fractional bin index.
inline double valley_position(std::span<const double> values, std::size_t a, std::size_t b) {
  double lo = values[a];
  for (std::size_t k = a; k <= b; ++k) lo = std::min(lo, values[k]);
  std::size_t first = b, last = a;
  for (std::size_t k = a; k <= b; ++k) {
    if (values[k] == lo) {
      first = std::min(first, k);
      last = std::max(last, k);
    }
  }
  return 0.5 * static_cast<double>(first + last);
}

}  // namespace detail

/// Mean fringe spacing in the units of `bin_width`.
///
/// Fringe positions are read from the valleys separating consecutive qualifying
/// peaks rather than from the peak tops: a slowly varying envelope drags the
/// tops toward its centre but leaves the interference nulls in place. With only
/// two peaks (one valley) the peak-to-peak distance is used.
inline double peak_spacing(std::span<const double> pdf, double bin_width) {
  const auto peaks = find_peaks(pdf);
  if (peaks.size() < 2) {
    throw Error(ErrorKind::TooFewPeaks,
                std::to_string(peaks.size()) + " qualifying maxima (need at least 2)");
  }
  if (peaks.size() == 2) {
    return static_cast<double>(peaks[1].index - peaks[0].index) * bin_width;
  }
  std::vector<double> valleys;
  for (std::size_t p = 0; p + 1 < peaks.size(); ++p) {
    valleys.push_back(detail::valley_position(pdf, peaks[p].index, peaks[p + 1].index));
  }
  return (valleys.back() - valleys.front()) / static_cast<double>(valleys.size() - 1) * bin_width;
}

/// Centered moving average; the window shrinks at the edges.
inline std::vector<double> moving_average(std::span<const double> values, std::size_t half_width) {
  std::vector<double> out(values.size(), 0.0);
  for (std::size_t i = 0; i < values.size(); ++i) {
    const std::size_t lo = i >= half_width ? i - half_width : 0;
    const std::size_t hi = std::min(values.size() - 1, i + half_width);
    double acc = 0.0;
    for (std::size_t k = lo; k <= hi; ++k) acc += values[k];
    out[i] = acc / static_cast<double>(hi - lo + 1);
  }
  return out;
}

}  // namespace structprob::stats
