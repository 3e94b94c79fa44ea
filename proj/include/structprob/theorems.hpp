// SPDX-License-Identifier: Apache-2.0

// Executable checks for the single-trial, large-numbers, initial-conditions,
// continuity and discontinuity properties of random events, plus the
// interval-based indirect estimate of a single-trial probability.
//
// A check that runs but finds its predicate false returns a report with
// passed == false. A check that cannot run (bad model, bad arguments) throws.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "structprob/error.hpp"
#include "structprob/event.hpp"
#include "structprob/stats.hpp"

namespace structprob::theorems {

enum class CheckName { TSN, TLN, TIC, TC, TD, INDIRECT, BAYES };

constexpr std::string_view to_string(CheckName name) noexcept {
  switch (name) {
    case CheckName::TSN: return "TSN";
    case CheckName::TLN: return "TLN";
    case CheckName::TIC: return "TIC";
    case CheckName::TC: return "TC";
    case CheckName::TD: return "TD";
    case CheckName::INDIRECT: return "INDIRECT";
    case CheckName::BAYES: return "BAYES";
  }
  return "?";
}

struct CheckReport {
  CheckName name = CheckName::TSN;
  bool passed = false;
  double statistic = 0.0;
  double threshold = 0.0;
  std::uint64_t n = 0;
  std::uint64_t seed = 0;
  std::map<std::string, double> details;
  std::string note;
};

struct Checkpoint {
  std::uint64_t n = 0;
  double abs_error = 0.0;
};

struct ConvergenceTrace {
  std::vector<Checkpoint> checkpoints;
  double final_bound = 0.0;
};

/// Width multiplier of the binomial tolerance used for convergence checks.
inline constexpr double kSigmaBound = 4.0;
inline constexpr std::uint64_t kMinLargeN = 10'000;

inline double binomial_bound(double p, std::uint64_t n) {
  return kSigmaBound * std::sqrt(p * (1.0 - p) / static_cast<double>(n));
}

namespace detail {

inline void require_random(const EventStructure& event) {
  if (!event.is_random()) throw Error(ErrorKind::NonRandomEvent, "model has a certain outcome");
}

inline std::size_t require_nondegenerate(const EventStructure& event, const std::string& label) {
  const std::size_t idx = event.index_of(label);
  const double p = event.probability(idx);
  if (!(p > 0.0 && p < 1.0)) throw Error(ErrorKind::DegenerateLabel, "'" + label + "' has p=" + std::to_string(p));
  return idx;
}

inline void require_schedule(const std::vector<std::uint64_t>& schedule) {
  if (schedule.empty()) throw Error(ErrorKind::InvalidSchedule, "empty schedule");
  for (std::size_t i = 1; i < schedule.size(); ++i) {
    if (schedule[i] <= schedule[i - 1]) throw Error(ErrorKind::InvalidSchedule, "schedule must increase strictly");
  }
  if (schedule.front() == 0) throw Error(ErrorKind::InvalidSchedule, "checkpoint at n=0");
  if (schedule.back() < kMinLargeN) {
    throw Error(ErrorKind::InvalidSchedule,
                "final n=" + std::to_string(schedule.back()) + " below " + std::to_string(kMinLargeN));
  }
}

/// Prefix frequencies of an indicator sequence at each checkpoint.
inline std::pair<CheckReport, ConvergenceTrace> convergence(const std::function<bool(std::uint64_t)>& hit, double p,
                                                            const std::vector<std::uint64_t>& schedule,
                                                            std::uint64_t seed) {
  ConvergenceTrace trace;
  std::uint64_t count = 0, done = 0;
  for (std::uint64_t checkpoint : schedule) {
    for (; done < checkpoint; ++done) count += hit(done) ? 1 : 0;
    const double f = static_cast<double>(count) / static_cast<double>(checkpoint);
    trace.checkpoints.push_back({checkpoint, std::fabs(f - p)});
  }
  const std::uint64_t n = schedule.back();
  trace.final_bound = binomial_bound(p, n);
  CheckReport r;
  r.name = CheckName::TLN;
  r.statistic = trace.checkpoints.back().abs_error;
  r.threshold = trace.final_bound;
  r.passed = r.statistic <= r.threshold;
  r.n = n;
  r.seed = seed;
  r.details = {{"p", p},
               {"frequency", static_cast<double>(count) / static_cast<double>(n)},
               {"count", static_cast<double>(count)},
               {"checkpoints", static_cast<double>(schedule.size())}};
  return {r, trace};
}

}  // namespace detail

/// One trial only: every frequency is 0 or 1, so none can equal a probability
/// strictly between them.
inline CheckReport check_tsn(const EventStructure& event, std::uint64_t seed) {
  detail::require_random(event);
  const TrialRecord rec = sample_trial(event, seed, 0);
  bool integral = true;
  double min_gap = 1.0;
  for (std::size_t i = 0; i < event.size(); ++i) {
    const double f = i == rec.realized ? 1.0 : 0.0;
    integral = integral && (f == 0.0 || f == 1.0);
    const double p = event.probability(i);
    if (p > 0.0 && p < 1.0) min_gap = std::min(min_gap, std::fabs(f - p));
  }
  CheckReport r;
  r.name = CheckName::TSN;
  r.statistic = min_gap;
  r.threshold = 0.0;
  r.passed = integral && min_gap > 0.0;
  r.n = 1;
  r.seed = seed;
  r.details = {{"realized", static_cast<double>(rec.realized)},
               {"p_realized", event.probability(rec.realized)}};
  return r;
}

/// Frequency of `label` along one long run, sampled at each checkpoint of
/// `schedule`. Passes when the final error is within the 4-sigma binomial bound.
inline std::pair<CheckReport, ConvergenceTrace> check_tln(const EventStructure& event, const std::string& label,
                                                          const std::vector<std::uint64_t>& schedule,
                                                          std::uint64_t seed) {
  const std::size_t idx = detail::require_nondegenerate(event, label);
  detail::require_schedule(schedule);
  auto hit = [&](std::uint64_t i) { return sample_trial(event, seed, i).realized == idx; };
  auto out = detail::convergence(hit, event.probability(idx), schedule, seed);
  out.first.details["label_index"] = static_cast<double>(idx);
  return out;
}

/// Runs the convergence predicate on an existing collective against a stated
/// model probability. Used to audit collectives produced elsewhere, including
/// deliberately biased ones.
inline std::pair<CheckReport, ConvergenceTrace> check_tln_against(const Collective& collective,
                                                                  const std::string& label, double p_model,
                                                                  const std::vector<std::uint64_t>& schedule) {
  if (!(p_model > 0.0 && p_model < 1.0)) {
    throw Error(ErrorKind::DegenerateLabel, "model p=" + std::to_string(p_model));
  }
  detail::require_schedule(schedule);
  if (schedule.back() > collective.size()) {
    throw Error(ErrorKind::InvalidSchedule, "schedule exceeds collective size");
  }
  const std::size_t idx = collective.model->index_of(label);
  auto hit = [&](std::uint64_t i) { return collective.records[i].realized == idx; };
  return detail::convergence(hit, p_model, schedule, collective.seed);
}

namespace detail {

/// Ticks probed inside [0, t_omega): first, middle and last.
inline std::vector<std::int64_t> pre_ticks(const TrialRecord& r) {
  const auto last = static_cast<std::int64_t>(r.t_omega) - 1;
  if (last < 0) return {};
  std::vector<std::int64_t> ticks{0, last / 2, last};
  ticks.erase(std::unique(ticks.begin(), ticks.end()), ticks.end());
  return ticks;
}

/// Counts records that break the status timeline. `check_after` adds the
/// post-completion half (realized certain, others impossible).
inline std::uint64_t timeline_violations(const EventStructure& event, const Collective& c, bool check_after,
                                         std::uint64_t& probes) {
  std::uint64_t bad = 0;
  for (const auto& rec : c.records) {
    bool ok = rec.status_before.is_indeterminate() && rec.status_after == OutcomeStatus::determinate(1);
    for (std::size_t label = 0; label < event.size(); ++label) {
      const double p = event.probability(label);
      if (!(p > 0.0 && p < 1.0)) continue;  // impossible outcomes stay Determinate(0) throughout
      for (std::int64_t t : pre_ticks(rec)) {
        ++probes;
        ok = ok && status_at(event, rec, label, t).is_indeterminate();
      }
      if (check_after) {
        const auto t = static_cast<std::int64_t>(rec.t_omega);
        const OutcomeStatus want = OutcomeStatus::determinate(label == rec.realized ? 1 : 0);
        probes += 2;
        ok = ok && status_at(event, rec, label, t) == want && status_at(event, rec, label, t + 1) == want;
      }
    }
    if (!ok) ++bad;
  }
  return bad;
}

}  // namespace detail

/// Every outcome of every trial is indeterminate before its completion tick,
/// whatever the length of the run: probed on runs of 1, min(n, 100) and n trials.
inline CheckReport check_tic(const EventStructure& event, std::uint64_t n, std::uint64_t seed) {
  detail::require_random(event);
  if (n == 0) throw Error(ErrorKind::ZeroTrials, "n must be positive");
  auto model = std::make_shared<const EventStructure>(event);
  std::vector<std::uint64_t> sizes{1, std::min<std::uint64_t>(n, 100), n};
  sizes.erase(std::unique(sizes.begin(), sizes.end()), sizes.end());
  std::uint64_t bad = 0, probes = 0, records = 0;
  for (std::uint64_t size : sizes) {
    const Collective c = run_collective(model, size, seed);
    bad += detail::timeline_violations(event, c, false, probes);
    records += size;
  }
  CheckReport r;
  r.name = CheckName::TIC;
  r.statistic = static_cast<double>(bad);
  r.threshold = 0.0;
  r.passed = bad == 0;
  r.n = n;
  r.seed = seed;
  r.details = {{"records_checked", static_cast<double>(records)},
               {"probes", static_cast<double>(probes)},
               {"run_lengths", static_cast<double>(sizes.size())}};
  return r;
}

/// Each trial switches at t_omega: indeterminate one tick before, then
/// Determinate(1) for the realized outcome and Determinate(0) for the rest.
inline CheckReport check_td(const EventStructure& event, std::uint64_t n, std::uint64_t seed) {
  detail::require_random(event);
  const Collective c = run_collective(event, n, seed);
  std::uint64_t probes = 0;
  const std::uint64_t bad = detail::timeline_violations(event, c, true, probes);
  CheckReport r;
  r.name = CheckName::TD;
  r.statistic = static_cast<double>(bad);
  r.threshold = 0.0;
  r.passed = bad == 0;
  r.n = n;
  r.seed = seed;
  r.details = {{"records_checked", static_cast<double>(c.size())}, {"probes", static_cast<double>(probes)}};
  return r;
}

inline constexpr std::uint64_t kMinContinuityN = 100;

/// P(a binomial(n, p) run shows only one outcome) = p^n + (1-p)^n.
inline double degenerate_run_probability(double p, std::uint64_t n) {
  const double nn = static_cast<double>(n);
  return std::exp(nn * std::log(p)) + std::exp(nn * std::log1p(-p));
}

/// After all trials are done the collective's frequency of `label` is still
/// strictly between 0 and 1. For finite n this can fail by chance; the report
/// carries the exact probability of that.
inline CheckReport check_tc_on(const EventStructure& event, const std::string& label, const Collective& c) {
  const std::size_t idx = detail::require_nondegenerate(event, label);
  const Frequency f = frequency(c, idx);
  const double p = event.probability(idx);
  CheckReport r;
  r.name = CheckName::TC;
  r.statistic = std::min(f.value(), 1.0 - f.value());
  r.threshold = 0.0;
  r.passed = f.count > 0 && f.count < f.n;
  r.n = f.n;
  r.seed = c.seed;
  r.details = {{"count", static_cast<double>(f.count)},
               {"frequency", f.value()},
               {"p", p},
               {"degenerate_probability", degenerate_run_probability(p, f.n)}};
  if (!r.passed) r.note = "predicate false at finite n: every trial gave the same outcome";
  return r;
}

inline CheckReport check_tc(const EventStructure& event, const std::string& label, std::uint64_t n,
                            std::uint64_t seed) {
  detail::require_nondegenerate(event, label);
  if (n < kMinContinuityN) {
    throw Error(ErrorKind::TooFewTrials, "n=" + std::to_string(n) + " below " + std::to_string(kMinContinuityN));
  }
  return check_tc_on(event, label, run_collective(event, n, seed));
}

inline constexpr std::uint64_t kMinIndirectN = 30;

struct IndirectEstimate {
  double lo = 0.0;
  double hi = 1.0;
  CheckReport report;
};

/// Estimates a single-trial probability from the long run containing it.
/// The report passes when the model probability falls inside the interval.
inline IndirectEstimate indirect_estimate(const EventStructure& event, const std::string& label, std::uint64_t n,
                                          double confidence, std::uint64_t seed) {
  const std::size_t idx = event.index_of(label);
  if (n < kMinIndirectN) {
    throw Error(ErrorKind::TooFewTrials, "n=" + std::to_string(n) + " below " + std::to_string(kMinIndirectN));
  }
  stats::normal_two_sided_z(confidence);  // validates the level before running
  std::uint64_t count = 0;
  for (std::uint64_t i = 0; i < n; ++i) count += sample_trial(event, seed, i).realized == idx ? 1 : 0;
  const auto [lo, hi] = stats::wilson_interval(count, n, confidence);
  const double p = event.probability(idx);
  IndirectEstimate out{lo, hi, {}};
  CheckReport& r = out.report;
  r.name = CheckName::INDIRECT;
  r.statistic = p < lo ? lo - p : (p > hi ? p - hi : 0.0);  // distance of p outside the interval
  r.threshold = 0.0;
  r.passed = lo <= p && p <= hi;
  r.n = n;
  r.seed = seed;
  r.details = {{"lo", lo}, {"hi", hi}, {"p", p}, {"count", static_cast<double>(count)}, {"confidence", confidence}};
  return out;
}

// ---------------------------------------------------------------------------
// Beta-Bernoulli belief updating

struct BetaParams {
  double a = 1.0;
  double b = 1.0;

  double mean() const noexcept { return a / (a + b); }
  friend bool operator==(const BetaParams&, const BetaParams&) = default;
};

inline BetaParams bayesian_update(BetaParams prior, std::uint64_t successes, std::uint64_t failures) {
  if (!(prior.a > 0.0 && prior.b > 0.0)) {
    throw Error(ErrorKind::InvalidPrior, "Beta(" + std::to_string(prior.a) + ", " + std::to_string(prior.b) + ")");
  }
  return {prior.a + static_cast<double>(successes), prior.b + static_cast<double>(failures)};
}

/// Posterior mean after n trials lands within the 4-sigma binomial bound of p.
inline CheckReport check_bayes(const EventStructure& event, const std::string& label, std::uint64_t n,
                               std::uint64_t seed, BetaParams prior = {}) {
  const std::size_t idx = detail::require_nondegenerate(event, label);
  if (n == 0) throw Error(ErrorKind::ZeroTrials, "n must be positive");
  std::uint64_t count = 0;
  for (std::uint64_t i = 0; i < n; ++i) count += sample_trial(event, seed, i).realized == idx ? 1 : 0;
  const BetaParams post = bayesian_update(prior, count, n - count);
  const double p = event.probability(idx);
  CheckReport r;
  r.name = CheckName::BAYES;
  r.statistic = std::fabs(post.mean() - p);
  r.threshold = binomial_bound(p, n);
  r.passed = r.statistic <= r.threshold;
  r.n = n;
  r.seed = seed;
  r.details = {{"posterior_a", post.a}, {"posterior_b", post.b}, {"posterior_mean", post.mean()}, {"p", p}};
  return r;
}

}  // namespace structprob::theorems
