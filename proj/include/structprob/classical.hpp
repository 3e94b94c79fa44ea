// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "structprob/error.hpp"
#include "structprob/event.hpp"
#include "structprob/rational.hpp"

namespace structprob::classical {

// ---------------------------------------------------------------------------
// Urn

struct UrnModel {
  std::int64_t reds = 5;
  std::int64_t whites = 5;

  /// Favourable cases over total cases.
  Rational p_red() const { return Rational(reds, reds + whites); }
  Rational p_white() const { return Rational(whites, reds + whites); }
};

inline EventStructure urn_event(const UrnModel& urn) {
  if (urn.reds < 0 || urn.whites < 0 || urn.reds + urn.whites < 1) {
    throw Error(ErrorKind::EmptyUrn, std::to_string(urn.reds) + " red, " + std::to_string(urn.whites) + " white");
  }
  InitialConditions alpha{"rotating urn",
                          {{"reds", static_cast<double>(urn.reds)}, {"whites", static_cast<double>(urn.whites)}}};
  return make_exact_event(std::move(alpha), {{"red", urn.p_red()}, {"white", urn.p_white()}});
}

inline EventStructure urn_event(std::int64_t reds, std::int64_t whites) { return urn_event(UrnModel{reds, whites}); }

// ---------------------------------------------------------------------------
// Roulette

inline constexpr int kRouletteCells = 37;
inline constexpr Rational kCellWidthDeg{360, kRouletteCells};

/// Cell n covers the half-open arc [n*360/37, (n+1)*360/37).
inline int roulette_cell(double angle_deg) {
  if (!(angle_deg >= 0.0 && angle_deg < 360.0)) {
    throw Error(ErrorKind::AngleOutOfRange, std::to_string(angle_deg) + " not in [0,360)");
  }
  // 37 * angle is exact in long double, so the cell edges compare exactly
  const long double scaled = static_cast<long double>(angle_deg) * kRouletteCells;
  int cell = std::clamp(static_cast<int>(scaled / 360.0L), 0, kRouletteCells - 1);
  while (cell + 1 < kRouletteCells && 360.0L * (cell + 1) <= scaled) ++cell;
  while (cell > 0 && 360.0L * cell > scaled) --cell;
  return cell;
}

inline std::string cell_label(int cell) { return "cell_" + std::to_string(cell); }

inline EventStructure roulette_event() {
  std::vector<std::pair<std::string, Rational>> cells;
  cells.reserve(kRouletteCells);
  for (int n = 0; n < kRouletteCells; ++n) cells.emplace_back(cell_label(n), Rational(1, kRouletteCells));
  return make_exact_event({"spinning wheel", {{"cells", kRouletteCells}}}, cells);
}

struct Rotating {
  friend bool operator==(const Rotating&, const Rotating&) = default;
};
struct Stopped {
  int cell = 0;
  friend bool operator==(const Stopped&, const Stopped&) = default;
};

struct RouletteState {
  std::variant<Rotating, Stopped> phase;

  bool rotating() const noexcept { return std::holds_alternative<Rotating>(phase); }

  /// Probability that the ball sits in `cell`: uniform while spinning, a point mass once stopped.
  Rational spatial_probability(int cell) const {
    if (cell < 0 || cell >= kRouletteCells) throw Error(ErrorKind::UnknownLabel, "cell " + std::to_string(cell));
    if (rotating()) return Rational(1, kRouletteCells);
    return std::get<Stopped>(phase).cell == cell ? Rational(1) : Rational(0);
  }
};

/// One spin: the wheel rotates on [0, t_omega) and is stopped from t_omega on.
struct Spin {
  EventStructure event;
  TrialRecord record;

  int stopped_cell() const noexcept { return static_cast<int>(record.realized); }

  RouletteState state_at(std::int64_t t) const {
    if (t < 0) throw Error(ErrorKind::InvalidTime, "tick must be non-negative");
    if (static_cast<std::uint64_t>(t) < record.t_omega) return {Rotating{}};
    return {Stopped{stopped_cell()}};
  }

  OutcomeStatus status_at(int cell, std::int64_t t) const {
    if (cell < 0 || cell >= kRouletteCells) throw Error(ErrorKind::UnknownLabel, "cell " + std::to_string(cell));
    return structprob::status_at(event, record, static_cast<std::size_t>(cell), t);
  }
};

inline Spin spin(std::uint64_t seed, std::uint64_t spin_index = 0) {
  Spin s{roulette_event(), {}};
  s.record = sample_trial(s.event, seed, spin_index);
  return s;
}

}  // namespace structprob::classical
