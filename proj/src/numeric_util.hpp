#pragma once

#include <cmath>
#include <cstddef>
#include <span>

namespace geols {

// Pairwise summation; the result depends only on the order of the values.
inline double pairwise_sum(std::span<const double> v) {
  if (v.size() <= 8) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t half = v.size() / 2;
  return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

}  // namespace geols
