#pragma once

#include <cstdint>
#include <random>

namespace shufflemix {

// Reproducible random stream keyed by (master_seed, stream_index).
//
// The engine is std::mt19937_64 (whose output sequence is fixed by the
// standard); the seed is a SplitMix64 hash of both keys so neighbouring
// stream indices start from unrelated states. Uniform variates are derived
// here rather than through <random> distributions, whose algorithms are
// implementation-defined.
class RngStream {
 public:
  using result_type = std::uint64_t;

  RngStream(std::uint64_t master_seed, std::uint64_t stream_index);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }
  result_type operator()() { return engine_(); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Uniform on {0, ..., bound - 1}; bound must be positive.
  std::uint64_t uniform_index(std::uint64_t bound);

  std::uint64_t master_seed() const noexcept { return master_seed_; }
  std::uint64_t stream_index() const noexcept { return stream_index_; }

 private:
  std::uint64_t master_seed_;
  std::uint64_t stream_index_;
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

}  // namespace shufflemix
