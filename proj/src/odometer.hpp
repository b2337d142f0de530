#pragma once

#include <cstddef>
#include <vector>

namespace lipgrid::detail {

// Advances idx through the inclusive box [lo, hi] with the last axis fastest.
// Returns false after the last index.
template <class T>
bool next_index(std::vector<T>& idx, const std::vector<T>& lo, const std::vector<T>& hi) {
  for (std::size_t k = idx.size(); k-- > 0;) {
    if (idx[k] < hi[k]) {
      ++idx[k];
      return true;
    }
    idx[k] = lo[k];
  }
  return false;
}

}  // namespace lipgrid::detail
