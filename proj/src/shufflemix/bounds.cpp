#include "shufflemix/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>

#include "shufflemix/errors.hpp"
#include "shufflemix/numeric.hpp"
#include "shufflemix/search.hpp"

namespace shufflemix {

namespace {

constexpr double kNegligible = 1e-300;

std::vector<double> sorted_weights(std::span<const double> weights) {
  if (weights.empty()) throw InvalidArgument("weight vector is empty");
  CompensatedSum total;
  for (double p : weights) {
    if (!(p > 0.0) || !std::isfinite(p)) throw InvalidArgument("weights must be positive and finite");
    total.add(p);
  }
  if (std::fabs(total.value() - 1.0) > 1e-12) throw InvalidArgument("weights do not sum to 1");
  std::vector<double> p(weights.begin(), weights.end());
  std::sort(p.begin(), p.end(), std::greater<>());
  return p;
}

}  // namespace

WeightFamily parse_weight_family(char family) {
  switch (family) {
    case 'a': return WeightFamily::kA;
    case 'b': return WeightFamily::kB;
    case 'c': return WeightFamily::kC;
    case 'd': return WeightFamily::kD;
    default: throw InvalidArgument(std::string("unknown weight family '") + family + "' (expected a, b, c or d)");
  }
}

std::vector<double> example_weights(WeightFamily family, std::size_t n) {
  if (n == 0) throw InvalidArgument("example_weights: n must be at least 1");
  const double nd = static_cast<double>(n);
  std::vector<double> p(n);
  switch (family) {
    case WeightFamily::kA:
      std::fill(p.begin(), p.end(), 1.0 / nd);
      break;
    case WeightFamily::kB:
      if (n % 2 != 0) throw InvalidArgument("example_weights: family b needs an even n");
      for (std::size_t j = 1; j <= n; ++j) p[j - 1] = j <= n / 2 ? 2.0 / (nd + 1.0) : 2.0 / (nd * (nd + 1.0));
      break;
    case WeightFamily::kC: {
      CompensatedSum h;
      for (std::size_t k = n; k >= 1; --k) h.add(1.0 / static_cast<double>(k));
      for (std::size_t j = 1; j <= n; ++j) p[j - 1] = (1.0 / static_cast<double>(j)) / h.value();
      break;
    }
    case WeightFamily::kD:
      for (std::size_t j = 1; j <= n; ++j) p[j - 1] = 2.0 * static_cast<double>(n + 1 - j) / (nd * (nd + 1.0));
      break;
  }
  return p;
}

double coupon_sum(std::span<const double> sorted_desc, double t) {
  CompensatedSum sum;
  // Smallest terms first keeps the compensated sum tight.
  for (std::size_t k = sorted_desc.size() - 1; k-- > 0;) {
    const double term = std::pow(1.0 - sorted_desc[k], t);
    if (term >= kNegligible) sum.add(term);
  }
  return sum.value();
}

std::uint64_t tau_u(std::span<const double> weights, double threshold) {
  const auto p = sorted_weights(weights);
  if (p.size() == 1) return 0;
  return first_true([&](std::uint64_t t) { return coupon_sum(p, static_cast<double>(t)) <= threshold; });
}

MtfBoundReport mtf_lower_bound_time(std::span<const double> weights) {
  const auto p = sorted_weights(weights);
  const std::size_t n = p.size();
  MtfBoundReport r;
  r.third_rule_ok = p.front() <= 1.0 / 3.0;
  r.tau_u = n == 1 ? 0 : first_true([&](std::uint64_t t) { return coupon_sum(p, static_cast<double>(t)) <= 0.25; });
  r.floor = static_cast<std::int64_t>((r.tau_u + 24) / 25) - 1;
  if (n < 2) return r;

  const auto below_48 = [&](std::uint64_t t) { return coupon_sum(p, 6.0 * static_cast<double>(t)) < 48.0; };
  if (!below_48(0)) r.tau_0 = first_true(below_48) - 1;

  const double q = 1.0 - p[n - 2];  // 1 - p_{n-1}
  r.tau_1 = first_true([&](std::uint64_t t) { return !(std::pow(q, static_cast<double>(t)) > 0.75); }) - 1;

  const double crossover = std::log(0.75) / std::log(q);
  r.lower_bound = (r.tau_0 && static_cast<double>(*r.tau_0) >= crossover) ? *r.tau_0 : r.tau_1;
  return r;
}

}  // namespace shufflemix
