// SPDX-License-Identifier: Apache-2.0

#include <catch_amalgamated.hpp>

#include <cmath>
#include <algorithm>
#include <numbers>
#include <numeric>

#include "structprob/random.hpp"
#include "structprob/stats.hpp"

using namespace structprob;
using namespace structprob::stats;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

/// Closed-form Wilson bounds with z frozen at the 97.5% normal quantile.
std::pair<double, double> wilson_oracle(double s, double n) {
  const double z = 1.959963984540054;
  const double p = s / n;
  const double d = 1 + z * z / n;
  const double c = p + z * z / (2 * n);
  const double h = z * std::sqrt(p * (1 - p) / n + z * z / (4 * n * n));
  return {(c - h) / d, (c + h) / d};
}

}  // namespace

TEST_CASE("chi-square survival function matches reference values", "[chi2]") {
  // reference values: scipy.stats.chi2.sf
  CHECK_THAT(chi_square_sf(3.841458820694124, 1), WithinRel(0.05, 1e-8));
  CHECK_THAT(chi_square_sf(5.0, 10), WithinRel(0.8911780189141513, 1e-8));
  CHECK_THAT(chi_square_sf(40.0, 36), WithinRel(0.29702839792467406, 1e-8));
  CHECK_THAT(chi_square_sf(1100.0, 1000), WithinRel(0.014614408126295192, 1e-8));
  CHECK_THAT(chi_square_sf(2000.0, 2047), WithinRel(0.7672478243755186, 1e-8));
  CHECK(chi_square_sf(0.0, 5) == 1.0);
}

TEST_CASE("chi_square_gof on a perfect match", "[chi2]") {
  const std::vector<double> pdf{0.1, 0.2, 0.3, 0.4};
  const std::vector<std::uint64_t> obs{100, 200, 300, 400};
  const auto r = chi_square_gof(obs, pdf, 1000);
  CHECK(r.statistic == 0.0);
  CHECK(r.p_value == 1.0);
  CHECK(r.dof == 3);
  CHECK(r.merged_bins == 0);
}

TEST_CASE("chi_square_gof pools thin bins", "[chi2]") {
  // expected counts 2,2,2,2,92 -> pools {0,1,2} (6) and {3,4} (94)
  const std::vector<double> pdf{0.02, 0.02, 0.02, 0.02, 0.92};
  const std::vector<std::uint64_t> obs{0, 1, 2, 4, 93};
  const auto r = chi_square_gof(obs, pdf, 100);
  CHECK(r.dof == 1);
  CHECK(r.merged_bins == 3);
  CHECK_THAT(r.statistic, WithinRel(9.0 / 6.0 + 9.0 / 94.0, 1e-12));
  CHECK_THAT(r.p_value, WithinRel(0.20650729548542135, 1e-8));  // scipy.stats.chi2.sf
}

TEST_CASE("chi_square_gof errors", "[chi2]") {
  const std::vector<double> pdf{0.5, 0.5};
  const std::vector<std::uint64_t> three{1, 2, 3};
  try {
    chi_square_gof(three, pdf, 6);
    FAIL("no throw");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::LengthMismatch);
  }
  const std::vector<std::uint64_t> two{2, 2};
  try {
    chi_square_gof(two, pdf, 4);  // 4 expected counts in total, one pool only
    FAIL("no throw");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::AllBinsPooled);
  }
  CHECK_THROWS_AS(chi_square_gof(two, pdf, 5), Error);
}

TEST_CASE("chi_square_gof ignores the scale of the expected pdf", "[chi2][property]") {
  Xoshiro256 gen(3);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> pdf(40);
    std::vector<std::uint64_t> obs(40);
    std::uint64_t total = 0;
    for (std::size_t i = 0; i < pdf.size(); ++i) {
      pdf[i] = 0.1 + gen.uniform01();
      obs[i] = 5 + static_cast<std::uint64_t>(gen.uniform01() * 50);
      total += obs[i];
    }
    const double scale = 0.01 + 100 * gen.uniform01();
    std::vector<double> scaled(pdf);
    for (double& v : scaled) v *= scale;
    const auto a = chi_square_gof(obs, pdf, total);
    const auto b = chi_square_gof(obs, scaled, total);
    REQUIRE(a.dof == b.dof);
    REQUIRE_THAT(a.statistic, WithinRel(b.statistic, 1e-9));
    REQUIRE(a.p_value >= 0.0);
    REQUIRE(a.p_value <= 1.0);
  }
}

TEST_CASE("ks_distance", "[ks]") {
  const std::vector<double> pdf{0.1, 0.2, 0.4, 0.2, 0.1};
  const std::vector<std::uint64_t> prop{10, 20, 40, 20, 10};
  CHECK_THAT(ks_distance(prop, pdf), WithinAbs(0.0, 1e-12));

  const std::vector<std::uint64_t> leftmost{1, 0, 0, 0, 0};
  CHECK_THAT(ks_distance(leftmost, pdf), WithinAbs(1.0 - 0.1, 1e-12));

  const std::vector<std::uint64_t> four{1, 2, 3, 4};
  try {
    ks_distance(four, pdf);
    FAIL("no throw");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::LengthMismatch);
  }
}

TEST_CASE("ks_distance agrees with a per-sample empirical CDF", "[ks][property]") {
  Xoshiro256 gen(8);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t bins = 3 + trial;
    std::vector<double> pdf(bins);
    for (double& v : pdf) v = gen.uniform01();
    std::vector<std::size_t> samples(1 + trial * 7);
    for (auto& s : samples) s = static_cast<std::size_t>(gen.uniform01() * bins);
    std::vector<std::uint64_t> counts(bins, 0);
    for (auto s : samples) ++counts[s];

    // brute force: at each bin's right edge, fraction of samples <= bin vs model mass <= bin
    const double z = std::accumulate(pdf.begin(), pdf.end(), 0.0);
    double oracle = 0.0;
    for (std::size_t b = 0; b < bins; ++b) {
      const auto le = std::count_if(samples.begin(), samples.end(), [&](std::size_t s) { return s <= b; });
      double model = 0.0;
      for (std::size_t k = 0; k <= b; ++k) model += pdf[k] / z;
      oracle = std::max(oracle, std::fabs(static_cast<double>(le) / static_cast<double>(samples.size()) - model));
    }
    const double d = ks_distance(counts, pdf);
    REQUIRE_THAT(d, WithinAbs(oracle, 1e-12));
    REQUIRE(d >= 0.0);
    REQUIRE(d <= 1.0);
  }
}

TEST_CASE("wilson_interval matches the closed form", "[wilson]") {
  const auto [lo, hi] = wilson_interval(5, 10, 0.95);
  CHECK_THAT(lo, WithinAbs(0.236593090512564, 1e-12));
  CHECK_THAT(hi, WithinAbs(0.763406909487436, 1e-12));

  for (std::uint64_t n : {1u, 7u, 30u, 1000u}) {
    for (std::uint64_t s = 1; s < n; s += 1 + n / 10) {
      const auto [a, b] = wilson_interval(s, n, 0.95);
      const auto [oa, ob] = wilson_oracle(static_cast<double>(s), static_cast<double>(n));
      REQUIRE_THAT(a, WithinAbs(oa, 1e-12));
      REQUIRE_THAT(b, WithinAbs(ob, 1e-12));
    }
  }
}

TEST_CASE("wilson_interval boundaries are exact", "[wilson]") {
  CHECK(wilson_interval(0, 10, 0.95).first == 0.0);
  const auto [lo, hi] = wilson_interval(10, 10, 0.95);
  CHECK(hi == 1.0);
  CHECK(lo > 0.7);
  CHECK_THAT(lo, WithinAbs(0.7224672001371106, 1e-12));
  CHECK_THROWS_AS(wilson_interval(11, 10, 0.95), Error);
  CHECK_THROWS_AS(wilson_interval(0, 0, 0.95), Error);
  CHECK_THROWS_AS(wilson_interval(1, 2, 1.0), Error);
}

TEST_CASE("wilson width shrinks with n at a fixed ratio", "[wilson][property]") {
  for (double conf : {0.5, 0.9, 0.95, 0.999}) {
    double prev = 1.0;
    for (std::uint64_t n = 4; n <= 40000; n *= 2) {
      const auto [lo, hi] = wilson_interval(n / 4, n, conf);
      REQUIRE(0.0 <= lo);
      REQUIRE(lo <= hi);
      REQUIRE(hi <= 1.0);
      REQUIRE(hi - lo <= prev);
      prev = hi - lo;
    }
  }
}

TEST_CASE("peak_spacing recovers a known period", "[peaks]") {
  // 1 + cos(2 pi x / P) sampled at 1 um, period 0.5 mm
  const double bin = 1e-6, period = 0.5e-3;
  std::vector<double> pdf(3000);
  for (std::size_t i = 0; i < pdf.size(); ++i) {
    pdf[i] = 1.0 + std::cos(2 * std::numbers::pi * (static_cast<double>(i) + 0.5) * bin / period);
  }
  CHECK_THAT(peak_spacing(pdf, bin), WithinAbs(period, bin));
}

TEST_CASE("peak_spacing with exactly two peaks", "[peaks]") {
  const std::vector<double> pdf{0, 1, 5, 1, 0, 0, 1, 4, 1, 0};
  CHECK_THAT(peak_spacing(pdf, 0.5), WithinAbs(2.5, 1e-15));
}

TEST_CASE("peak_spacing rejects fringeless input", "[peaks]") {
  std::vector<double> lobe(200);
  for (std::size_t i = 0; i < lobe.size(); ++i) {
    const double u = (static_cast<double>(i) - 99.5) * 0.1;
    const double s = std::sin(u) / u;
    lobe[i] = s * s;  // sidelobes peak near 4.7% of the centre
  }
  try {
    peak_spacing(lobe, 1.0);
    FAIL("no throw");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::TooFewPeaks);
  }
  CHECK(find_peaks(lobe, 0.01, 0.5).size() > 1);  // the sidelobes exist below the threshold
}

TEST_CASE("find_peaks ignores small ripples and ties", "[peaks]") {
  const std::vector<double> ripple{0, 5, 10, 9.5, 10, 5, 0};
  const auto peaks = find_peaks(ripple);
  REQUIRE(peaks.size() == 1);
  CHECK(peaks[0].index == 4);
}

TEST_CASE("moving_average", "[smoothing]") {
  const std::vector<double> v{3, 0, 0, 3};
  const auto m = moving_average(v, 1);
  CHECK_THAT(m[0], WithinAbs(1.5, 1e-15));
  CHECK_THAT(m[1], WithinAbs(1.0, 1e-15));
  CHECK_THAT(m[3], WithinAbs(1.5, 1e-15));
}
