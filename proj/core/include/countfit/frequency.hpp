#pragma once

#include <array>
#include <cstdint>
#include <span>

#include "countfit/captions.hpp"

namespace countfit {

/// Per-count sample tallies over a counting set, counts 2..10.
/// n_total is always the sum of all nine entries and must be positive.
struct ClassFrequencyTable {
  std::array<std::int64_t, kCountClasses> n_class{};
  std::int64_t n_total = 0;

  /// Tallies a list of per-sample counts. Throws std::invalid_argument on an
  /// empty list and std::out_of_range on a count outside [2, 10].
  static ClassFrequencyTable from_counts(std::span<const int> counts);

  std::int64_t at(int count) const;

  /// n_modal: the largest class frequency.
  std::int64_t modal_frequency() const;

  bool consistent() const;
};

}  // namespace countfit
