#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace shufflemix {

// Weight families used as move-to-front examples.
//   a: uniform 1/n
//   b: 2/(n+1) on the first n/2 cards, 2/(n(n+1)) on the rest (n even)
//   c: harmonic, p_j proportional to 1/j
//   d: linear, p_j = 2(n+1-j)/(n(n+1))
enum class WeightFamily { kA, kB, kC, kD };

WeightFamily parse_weight_family(char family);
std::vector<double> example_weights(WeightFamily family, std::size_t n);

// Sum over the n-1 largest weights of (1 - p)^t, evaluated on a descending copy.
double coupon_sum(std::span<const double> sorted_desc, double t);

// Smallest t with sum_{k<n} (1 - p_k)^t <= threshold (weights sorted descending internally).
std::uint64_t tau_u(std::span<const double> weights, double threshold = 0.25);

struct MtfBoundReport {
  std::uint64_t tau_u = 0;
  std::optional<std::uint64_t> tau_0;  // largest t with sum (1-p_j)^{6t} >= 48
  std::uint64_t tau_1 = 0;             // largest t with (1 - p_{n-1})^t > 3/4
  std::uint64_t lower_bound = 0;
  std::int64_t floor = 0;              // ceil(tau_u / 25) - 1
  bool third_rule_ok = false;          // max p <= 1/3
};

MtfBoundReport mtf_lower_bound_time(std::span<const double> weights);

}  // namespace shufflemix
