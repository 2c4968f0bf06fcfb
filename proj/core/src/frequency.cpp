#include "countfit/frequency.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>

namespace countfit {

ClassFrequencyTable ClassFrequencyTable::from_counts(std::span<const int> counts) {
  if (counts.empty()) {
    throw std::invalid_argument("ClassFrequencyTable: empty counting set (n_total must be positive)");
  }
  ClassFrequencyTable table;
  for (int count : counts) {
    if (count < kMinCount || count > kMaxCount) {
      throw std::out_of_range("ClassFrequencyTable: count out of range: " + std::to_string(count));
    }
    ++table.n_class[static_cast<std::size_t>(count_to_class(count))];
  }
  table.n_total = static_cast<std::int64_t>(counts.size());
  return table;
}

std::int64_t ClassFrequencyTable::at(int count) const {
  if (count < kMinCount || count > kMaxCount) {
    throw std::out_of_range("ClassFrequencyTable::at: count out of range: " + std::to_string(count));
  }
  return n_class[static_cast<std::size_t>(count_to_class(count))];
}

std::int64_t ClassFrequencyTable::modal_frequency() const {
  return *std::max_element(n_class.begin(), n_class.end());
}

bool ClassFrequencyTable::consistent() const {
  const std::int64_t sum = std::accumulate(n_class.begin(), n_class.end(), std::int64_t{0});
  return sum == n_total && n_total > 0;
}

}  // namespace countfit
