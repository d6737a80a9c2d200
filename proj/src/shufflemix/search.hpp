#pragma once

#include <cstdint>

#include "shufflemix/errors.hpp"

namespace shufflemix {

// Smallest t >= 0 with pred(t) true, for pred monotone (false...false true...).
// Doubling to bracket, then bisection.
template <class Pred>
std::uint64_t first_true(Pred&& pred) {
  if (pred(0)) return 0;
  std::uint64_t lo = 0;  // pred(lo) false
  std::uint64_t hi = 1;
  while (!pred(hi)) {
    lo = hi;
    if (hi > (std::uint64_t{1} << 62)) throw CapExceeded("first_true: predicate never holds", static_cast<double>(hi));
    hi *= 2;
  }
  while (hi - lo > 1) {
    const std::uint64_t mid = lo + (hi - lo) / 2;
    (pred(mid) ? hi : lo) = mid;
  }
  return hi;
}

}  // namespace shufflemix
