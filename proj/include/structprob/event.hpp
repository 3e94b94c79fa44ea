// SPDX-License-Identifier: Apache-2.0

// Structural event model: an event is the triad (initial conditions, process,
// outcome space). A trial realizes one outcome at its completion tick t_omega;
// before that tick every outcome keeps the model status, from it onward the
// realized outcome is certain and every other outcome impossible.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <thread>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

#include "structprob/discrete_sampler.hpp"
#include "structprob/error.hpp"
#include "structprob/random.hpp"
#include "structprob/rational.hpp"

namespace structprob {

// ---------------------------------------------------------------------------
// Outcome status

/// Probability exactly 0 or 1, held as an integer.
struct Determinate {
  int value = 0;
  friend bool operator==(const Determinate&, const Determinate&) = default;
};

/// Probability strictly inside (0, 1).
struct Indeterminate {
  double p = 0.5;
  friend bool operator==(const Indeterminate&, const Indeterminate&) = default;
};

class OutcomeStatus {
 public:
  static OutcomeStatus determinate(int value) {
    if (value != 0 && value != 1) {
      throw Error(ErrorKind::ProbabilityOutOfRange,
                  "determinate status must be 0 or 1, got " + std::to_string(value));
    }
    return OutcomeStatus(Determinate{value});
  }

  static OutcomeStatus indeterminate(double p) {
    if (!(p > 0.0 && p < 1.0)) {
      throw Error(ErrorKind::ProbabilityOutOfRange,
                  "indeterminate status needs 0 < p < 1, got " + std::to_string(p));
    }
    return OutcomeStatus(Indeterminate{p});
  }

  /// Exact classification: only the values 0.0 and 1.0 are determinate.
  static OutcomeStatus from_probability(double p) {
    if (p == 0.0) return determinate(0);
    if (p == 1.0) return determinate(1);
    return indeterminate(p);
  }

  bool is_determinate() const noexcept { return std::holds_alternative<Determinate>(v_); }
  bool is_indeterminate() const noexcept { return std::holds_alternative<Indeterminate>(v_); }

  /// Value of a determinate status; throws std::bad_variant_access otherwise.
  int determinate_value() const { return std::get<Determinate>(v_).value; }

  double probability() const noexcept {
    if (const auto* d = std::get_if<Determinate>(&v_)) return d->value;
    return std::get<Indeterminate>(v_).p;
  }

  const std::variant<Determinate, Indeterminate>& kind() const noexcept { return v_; }

  friend bool operator==(const OutcomeStatus&, const OutcomeStatus&) = default;

 private:
  explicit OutcomeStatus(std::variant<Determinate, Indeterminate> v) : v_(v) {}
  std::variant<Determinate, Indeterminate> v_;
};

// ---------------------------------------------------------------------------
// Event structure

struct InitialConditions {
  std::string label;
  std::map<std::string, double> parameters;
};

inline constexpr double kProbabilitySumTolerance = 1e-12;

class EventStructure {
 public:
  const InitialConditions& alpha() const noexcept { return alpha_; }
  const std::vector<std::string>& outcome_space() const noexcept { return labels_; }
  std::span<const double> probabilities() const noexcept { return probs_; }
  std::size_t size() const noexcept { return labels_.size(); }

  const std::string& label(std::size_t index) const { return labels_.at(index); }

  std::size_t index_of(const std::string& label) const {
    const auto it = index_.find(label);
    if (it == index_.end()) throw Error(ErrorKind::UnknownLabel, "'" + label + "'");
    return it->second;
  }

  double probability(std::size_t index) const { return probs_.at(index); }
  double probability(const std::string& label) const { return probs_[index_of(label)]; }

  /// Present when the event was built from exact fractions.
  std::optional<Rational> exact_probability(std::size_t index) const {
    if (exact_.empty()) return std::nullopt;
    return exact_.at(index);
  }

  /// False when some outcome is certain (the event cannot produce surprise).
  bool is_random() const noexcept { return random_; }

  /// Status of an outcome before the event completes.
  OutcomeStatus prior_status(std::size_t index) const {
    if (!exact_.empty()) {
      const Rational& r = exact_.at(index);
      if (r == Rational(0)) return OutcomeStatus::determinate(0);
      if (r == Rational(1)) return OutcomeStatus::determinate(1);
    }
    return OutcomeStatus::from_probability(probs_.at(index));
  }

  /// The process rho: categorical kernel over the outcome space.
  const DiscreteSampler& kernel() const noexcept { return kernel_; }

 private:
  friend EventStructure make_event(InitialConditions, const std::vector<std::pair<std::string, double>>&);
  friend EventStructure make_exact_event(InitialConditions,
                                         const std::vector<std::pair<std::string, Rational>>&);

  void index_labels() {
    for (std::size_t i = 0; i < labels_.size(); ++i) {
      if (!index_.emplace(labels_[i], i).second) {
        throw Error(ErrorKind::DuplicateLabel, "'" + labels_[i] + "'");
      }
    }
    random_ = std::none_of(probs_.begin(), probs_.end(), [](double p) { return p == 1.0; });
    if (!exact_.empty()) {
      random_ = std::none_of(exact_.begin(), exact_.end(), [](const Rational& r) { return r == Rational(1); });
    }
    kernel_ = DiscreteSampler(probs_);
  }

  InitialConditions alpha_;
  std::vector<std::string> labels_;
  std::vector<double> probs_;
  std::vector<Rational> exact_;
  std::unordered_map<std::string, std::size_t> index_;
  DiscreteSampler kernel_;
  bool random_ = true;
};

/// Validates a label -> probability table and builds the event. Label order is kept.
inline EventStructure make_event(InitialConditions alpha,
                                 const std::vector<std::pair<std::string, double>>& probabilities) {
  if (probabilities.empty()) throw Error(ErrorKind::EmptyOutcomeSpace, "no outcomes given");
  EventStructure ev;
  ev.alpha_ = std::move(alpha);
  double sum = 0.0;
  for (const auto& [label, p] : probabilities) {
    if (p < 0.0) throw Error(ErrorKind::NegativeProbability, "'" + label + "' has p=" + std::to_string(p));
    if (!(p <= 1.0)) throw Error(ErrorKind::ProbabilityOutOfRange, "'" + label + "' has p=" + std::to_string(p));
    ev.labels_.push_back(label);
    ev.probs_.push_back(p);
    sum += p;
  }
  if (std::fabs(sum - 1.0) > kProbabilitySumTolerance) {
    std::ostringstream os;
    os.precision(15);
    os << sum;
    throw Error(ErrorKind::ProbabilitySumMismatch, os.str());
  }
  ev.index_labels();
  return ev;
}

/// Same as make_event, but the probabilities are exact and must sum to exactly one.
inline EventStructure make_exact_event(InitialConditions alpha,
                                       const std::vector<std::pair<std::string, Rational>>& probabilities) {
  if (probabilities.empty()) throw Error(ErrorKind::EmptyOutcomeSpace, "no outcomes given");
  EventStructure ev;
  ev.alpha_ = std::move(alpha);
  Rational sum;
  for (const auto& [label, p] : probabilities) {
    if (p < Rational(0)) throw Error(ErrorKind::NegativeProbability, "'" + label + "'");
    if (p > Rational(1)) throw Error(ErrorKind::ProbabilityOutOfRange, "'" + label + "'");
    ev.labels_.push_back(label);
    ev.probs_.push_back(p.to_double());
    ev.exact_.push_back(p);
    sum += p;
  }
  if (sum != Rational(1)) {
    std::ostringstream os;
    os << sum;
    throw Error(ErrorKind::ProbabilitySumMismatch, os.str());
  }
  ev.index_labels();
  return ev;
}

// ---------------------------------------------------------------------------
// Trials and collectives

struct TrialRecord {
  std::uint64_t trial_index = 0;
  /// Completion tick. Trial i occupies ticks [i, i+1) and completes at i+1.
  std::uint64_t t_omega = 0;
  std::size_t realized = 0;
  OutcomeStatus status_before = OutcomeStatus::determinate(0);
  OutcomeStatus status_after = OutcomeStatus::determinate(1);

  friend bool operator==(const TrialRecord&, const TrialRecord&) = default;
};

inline TrialRecord sample_trial(const EventStructure& event, Xoshiro256& stream, std::uint64_t trial_index) {
  const std::size_t realized = event.kernel()(stream);
  return TrialRecord{trial_index, trial_index + 1, realized, event.prior_status(realized),
                     OutcomeStatus::determinate(1)};
}

/// Draws trial `trial_index` from its own sub-stream of `seed`.
inline TrialRecord sample_trial(const EventStructure& event, std::uint64_t seed, std::uint64_t trial_index) {
  auto stream = substream(seed, trial_index);
  return sample_trial(event, stream, trial_index);
}

struct Collective {
  std::shared_ptr<const EventStructure> model;
  std::uint64_t seed = 0;
  std::vector<TrialRecord> records;

  std::size_t size() const noexcept { return records.size(); }
  const std::string& realized_label(std::size_t i) const { return model->label(records.at(i).realized); }
};

/// Runs `n` i.i.d. trials. Large runs are split across threads; each trial uses
/// its own sub-stream so the result is identical to a sequential run.
inline Collective run_collective(std::shared_ptr<const EventStructure> event, std::uint64_t n,
                                 std::uint64_t seed) {
  if (n == 0) throw Error(ErrorKind::ZeroTrials, "a collective needs at least one trial");
  Collective c{std::move(event), seed, {}};
  c.records.resize(n);
  const EventStructure& ev = *c.model;
  auto fill = [&](std::uint64_t begin, std::uint64_t end) {
    for (std::uint64_t i = begin; i < end; ++i) c.records[i] = sample_trial(ev, seed, i);
  };

  constexpr std::uint64_t kParallelThreshold = 1u << 16;
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  if (n < kParallelThreshold || hw == 1) {
    fill(0, n);
    return c;
  }
  const std::uint64_t workers = std::min<std::uint64_t>(hw, 16);
  const std::uint64_t chunk = (n + workers - 1) / workers;
  std::vector<std::jthread> pool;
  for (std::uint64_t w = 0; w < workers; ++w) {
    const std::uint64_t begin = w * chunk;
    const std::uint64_t end = std::min(n, begin + chunk);
    if (begin < end) pool.emplace_back(fill, begin, end);
  }
  return c;
}

inline Collective run_collective(const EventStructure& event, std::uint64_t n, std::uint64_t seed) {
  return run_collective(std::make_shared<const EventStructure>(event), n, seed);
}

/// Status of `label` in the trial `record` at tick `t`.
inline OutcomeStatus status_at(const EventStructure& event, const TrialRecord& record, std::size_t label,
                               std::int64_t t) {
  if (t < 0) throw Error(ErrorKind::InvalidTime, "tick must be non-negative");
  if (label >= event.size()) throw Error(ErrorKind::UnknownLabel, "index " + std::to_string(label));
  if (static_cast<std::uint64_t>(t) < record.t_omega) return event.prior_status(label);
  return OutcomeStatus::determinate(label == record.realized ? 1 : 0);
}

inline OutcomeStatus status_at(const EventStructure& event, const TrialRecord& record, const std::string& label,
                               std::int64_t t) {
  return status_at(event, record, event.index_of(label), t);
}

struct Frequency {
  std::uint64_t count = 0;
  std::uint64_t n = 1;

  double value() const noexcept { return static_cast<double>(count) / static_cast<double>(n); }
  Rational exact() const {
    return Rational(static_cast<std::int64_t>(count), static_cast<std::int64_t>(n));
  }
};

/// Outcome counts over the whole collective, indexed like the outcome space.
inline std::vector<std::uint64_t> outcome_counts(const Collective& c) {
  std::vector<std::uint64_t> counts(c.model->size(), 0);
  for (const auto& r : c.records) ++counts[r.realized];
  return counts;
}

inline Frequency frequency(const Collective& c, std::size_t label) {
  if (c.records.empty()) throw Error(ErrorKind::ZeroTrials, "empty collective");
  if (label >= c.model->size()) throw Error(ErrorKind::UnknownLabel, "index " + std::to_string(label));
  const auto count = static_cast<std::uint64_t>(
      std::count_if(c.records.begin(), c.records.end(), [&](const TrialRecord& r) { return r.realized == label; }));
  return {count, c.records.size()};
}

inline Frequency frequency(const Collective& c, const std::string& label) {
  return frequency(c, c.model->index_of(label));
}

}  // namespace structprob
