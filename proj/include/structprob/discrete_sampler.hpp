// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace structprob {

/// Inverse-CDF sampler over a finite set of non-negative weights.
/// Cumulative sums are precomputed; a draw is one binary search.
/// Zero-weight entries are never returned.
class DiscreteSampler {
 public:
  DiscreteSampler() = default;

  explicit DiscreteSampler(std::span<const double> weights) {
    cumulative_.reserve(weights.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      if (!(weights[i] >= 0.0)) throw std::invalid_argument("DiscreteSampler: negative weight");
      acc += weights[i];
      cumulative_.push_back(acc);
      if (weights[i] > 0.0) last_positive_ = i;
    }
    if (!(acc > 0.0)) throw std::invalid_argument("DiscreteSampler: weights sum to zero");
  }

  std::size_t size() const noexcept { return cumulative_.size(); }
  double total() const noexcept { return cumulative_.empty() ? 0.0 : cumulative_.back(); }

  /// Maps u in [0,1) to the first index whose cumulative weight exceeds u * total.
  std::size_t sample(double u) const noexcept {
    const double target = u * total();
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), target);
    const auto idx = static_cast<std::size_t>(it - cumulative_.begin());
    return std::min(idx, last_positive_);
  }

  template <class Stream>
  std::size_t operator()(Stream& stream) const {
    return sample(stream.uniform01());
  }

 private:
  std::vector<double> cumulative_;
  std::size_t last_positive_ = 0;
};

}  // namespace structprob
