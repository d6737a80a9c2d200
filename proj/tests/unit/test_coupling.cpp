#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <map>
#include <numbers>
#include <vector>

#include "oracles.hpp"
#include "shufflemix/bounds.hpp"
#include "shufflemix/coupling.hpp"
#include "shufflemix/deck.hpp"
#include "shufflemix/errors.hpp"
#include "shufflemix/rng.hpp"
#include "shufflemix/shuffle_spec.hpp"

using namespace shufflemix;
using doctest::Approx;

namespace {

std::vector<Card> cards_of(const Deck& d) { return d.by_position(); }

}  // namespace

TEST_CASE("MTF coupling on two cards couples in one step") {
  const ShuffleSpec spec(ShuffleMode::kMoveToFront, {0.8, 0.2});
  for (std::uint64_t s = 0; s < 50; ++s) {
    RngStream rng(1, s);
    const auto r = couple_mtf_from(spec, Deck(2), make_deck(2, DeckOrder::kReversed), rng, 100);
    CHECK(r.T == 1);
    CHECK(r.stayed_coupled);
  }
}

TEST_CASE("equal starts are already coupled") {
  RngStream rng(2, 0);
  const ShuffleSpec spec(ShuffleMode::kMoveToFront, example_weights(WeightFamily::kC, 6));
  CHECK(couple_mtf_from(spec, Deck(6), Deck(6), rng, 100).T == 0);
  CHECK(couple_b2t_from(3, Deck(9), Deck(9), rng, 100).T == 0);
}

TEST_CASE("cap reached surfaces as CapExceeded") {
  RngStream rng(3, 0);
  CHECK_THROWS_AS(couple_b2t_from(2, Deck(20), make_deck(20, DeckOrder::kReversed), rng, 5), CapExceeded);
  const ShuffleSpec spec(ShuffleMode::kMoveToFront, example_weights(WeightFamily::kA, 20));
  CHECK_THROWS_AS(couple_mtf_from(spec, Deck(20), make_deck(20, DeckOrder::kReversed), rng, 3), CapExceeded);
  CHECK_THROWS_AS(couple_b2t_from(1, Deck(5), make_deck(5, DeckOrder::kReversed), rng, 100), InvalidArgument);
}

TEST_CASE("shift_frame") {
  RngStream rng(4, 0);
  const Deck d = random_deck(7, rng);
  CHECK(shift_frame(d, 0) == d);
  CHECK(shift_frame(d, 7) == d);
  CHECK(shift_frame(d, 3) == shift_frame(shift_frame(d, 1), 2));
  // Card at 0-indexed position 2 of 3 moves to 0-indexed position 1.
  const Deck three = Deck::from_positions(std::vector<Card>{2, 3, 1});
  CHECK(shift_frame(three, 1).position_of(1) == 2);
}

TEST_CASE("raw chain seen in the shifted frame equals the windowed dynamics") {
  for (auto [n, k] : {std::pair<std::size_t, std::size_t>{5, 2}, {12, 3}, {30, 5}, {8, 8}}) {
    RngStream rng(5, n);
    Deck x = random_deck(n, rng);
    Deck y = x;
    for (std::uint64_t t = 0; t < 3 * n + 7; ++t) {
      const std::size_t pick = rng.uniform_index(k);
      x.move_to_top(n - k + 1 + pick);
      windowed_step(y, k, t, pick);
      REQUIRE(y == shift_frame(x, t + 1));
    }
  }
}

TEST_CASE("bottom-to-top coupling at n = 6 keeps its structural invariants") {
  for (std::uint64_t s = 0; s < 200; ++s) {
    RngStream rng(6, s);
    const auto r = couple_b2t(6, 2, Deck(6), rng, default_b2t_cap(6, 2));
    CHECK(r.matched_history_ok);
    CHECK(r.stayed_coupled);
  }
  // Fixed seed: the sample is reproducible.
  RngStream a(2024, 0), b(2024, 0);
  CHECK(couple_b2t(6, 2, Deck(6), a, 100000).T == couple_b2t(6, 2, Deck(6), b, 100000).T);
}

TEST_CASE("batches are reproducible and independent of thread count") {
  const auto one = run_b2t_batch(16, 3, Deck(16), 40, 77, 0, 1);
  const auto many = run_b2t_batch(16, 3, Deck(16), 40, 77, 0, 4);
  REQUIRE(one.size() == many.size());
  for (std::size_t i = 0; i < one.size(); ++i) {
    CHECK(one[i].T == many[i].T);
    CHECK(one[i].stream == i);
    CHECK(one[i].seed == 77);
  }
  const ShuffleSpec spec(ShuffleMode::kMoveToFront, example_weights(WeightFamily::kD, 10));
  const auto m1 = run_mtf_batch(spec, Deck(10), 30, 5, 0, 1);
  const auto m3 = run_mtf_batch(spec, Deck(10), 30, 5, 0, 3);
  for (std::size_t i = 0; i < m1.size(); ++i) CHECK(m1[i].T == m3[i].T);
}

TEST_CASE("stationary sampler reproduces the product law, n = 3") {
  const std::vector<double> p = {0.5, 0.3, 0.2};
  const ShuffleSpec spec(ShuffleMode::kMoveToFront, p);
  const auto law = oracle::mtf_product_law(p);
  std::map<oracle::Order, int> counts;
  RngStream rng(7, 0);
  constexpr int kDraws = 60000;
  for (int i = 0; i < kDraws; ++i) {
    const auto c = cards_of(sample_mtf_stationary(spec, rng));
    counts[oracle::Order(c.begin(), c.end())]++;
  }
  for (const auto& [o, pr] : law) CHECK(std::abs(counts[o] / double(kDraws) - pr) <= 4 * std::sqrt(pr * (1 - pr) / kDraws));
}

TEST_CASE("MTF coupling time is dominated by the coupon sum") {
  constexpr std::size_t kSamples = 2000;
  for (std::size_t n : {6u, 10u}) {
    for (auto f : {WeightFamily::kA, WeightFamily::kB, WeightFamily::kC, WeightFamily::kD}) {
      const auto w = example_weights(f, n);
      const ShuffleSpec spec(ShuffleMode::kMoveToFront, w);
      const auto samples = run_mtf_batch(spec, make_deck(n, DeckOrder::kReversed), kSamples, 100 + n, 0);
      auto sorted = w;
      std::sort(sorted.begin(), sorted.end(), std::greater<>());
      const auto t_max = 2 * tau_u(w);
      std::vector<std::uint64_t> grid;
      for (std::uint64_t t = 0; t <= t_max; ++t) grid.push_back(t);
      const auto summary = coupling_quantiles(samples, grid);
      for (const auto& pt : summary.survival) {
        const double bound = coupon_sum(sorted, static_cast<double>(pt.t));
        const double c = std::min(bound, 1.0);
        CHECK(pt.fraction <= bound + 4 * std::sqrt(c * (1 - c) / kSamples));
      }
      for (const auto& s : samples) {
        CHECK(s.matched_history_ok);
        CHECK(s.stayed_coupled);
      }
    }
  }
}

TEST_CASE("MTF uniform n = 8: P(T > tau_u) <= 1/4 + 3 sigma") {
  constexpr std::size_t kSamples = 2000;
  const auto w = example_weights(WeightFamily::kA, 8);
  const ShuffleSpec spec(ShuffleMode::kMoveToFront, w);
  const auto samples = run_mtf_batch(spec, make_deck(8, DeckOrder::kReversed), kSamples, 808, 0);
  const std::vector<std::uint64_t> grid = {tau_u(w)};
  const auto s = coupling_quantiles(samples, grid);
  CHECK(s.survival[0].fraction <= 0.25 + 3 * std::sqrt(0.25 * 0.75 / kSamples));
}

TEST_CASE("bottom-to-top n = 32: survival at the upper-bound value") {
  // Expected at most 0.1; the bound carries a (1 + o(1)) factor that is not small at n = 32.
  const auto samples = run_b2t_batch(32, 2, Deck(32), 300, 32, 0);
  const double bound = b2t_upper_bound_value(32, 2);
  const std::vector<std::uint64_t> grid = {static_cast<std::uint64_t>(bound), static_cast<std::uint64_t>(4 * bound)};
  const auto s = coupling_quantiles(samples, grid);
  CHECK(s.survival[1].fraction <= 0.05);
  CHECK_MESSAGE(s.survival[0].fraction <= 0.1, "survival at 1x bound = " << s.survival[0].fraction);
}

TEST_CASE("coupling_quantiles") {
  const std::vector<std::uint64_t> fives(9, 5);
  const auto a = coupling_quantiles(std::span<const std::uint64_t>(fives));
  CHECK(a.median == 5.0);
  CHECK(a.q95 == 5);
  CHECK(a.mean == 5.0);
  const std::vector<std::uint64_t> four = {3, 1, 4, 2};
  const auto b = coupling_quantiles(std::span<const std::uint64_t>(four));
  CHECK(b.median == 2.5);
  CHECK(b.mean == 2.5);
  CHECK(b.q95 == 4);
  CHECK(b.max == 4);
  const std::vector<std::uint64_t> grid = {0, 2, 4};
  const auto c = coupling_quantiles(std::span<const std::uint64_t>(four), grid);
  REQUIRE(c.survival.size() == 3);
  CHECK(c.survival[0].fraction == 1.0);
  CHECK(c.survival[1].fraction == 0.5);
  CHECK(c.survival[2].fraction == 0.0);
  CHECK(c.survival[1].half_width == Approx(1.96 * std::sqrt(0.25 / 4)));
  const std::vector<std::uint64_t> none;
  CHECK_THROWS_AS(coupling_quantiles(std::span<const std::uint64_t>(none)), InvalidArgument);
  std::vector<std::uint64_t> twenty(20);
  for (std::size_t i = 0; i < 20; ++i) twenty[i] = i + 1;
  CHECK(coupling_quantiles(std::span<const std::uint64_t>(twenty)).q95 == 19);
}

TEST_CASE("cycle statistics") {
  RngStream r1(11, 0);
  const auto k1 = cycle_stats(30, 1, 1000, r1);
  CHECK(k1.displacement_var == 0.0);
  CHECK(k1.displacement_mean == 0.0);
  CHECK(k1.min_duration == 30);

  for (std::size_t k : {2u, 5u}) {
    RngStream rng(12, k);
    constexpr std::uint64_t kCycles = 100000;
    const auto s = cycle_stats(30, k, kCycles, rng);
    const double kk = double(k * (k - 1));
    CHECK(s.displacement_var == Approx(kk).epsilon(0.02));
    CHECK(s.duration_mean == Approx(30.0).epsilon(0.01));
    CHECK(std::abs(s.displacement_mean) <= 3 * std::sqrt(kk / kCycles));
    CHECK(s.max_displacement <= static_cast<std::int64_t>(k) - 1);
    CHECK(s.min_duration >= 30 - k + 1);
  }
}

TEST_CASE("U statistic convention and conditional means") {
  for (std::size_t n : {8u, 10u, 100u}) {
    const auto c = select_u_convention(n);
    CHECK(c.chosen == UConvention::kAtK);
    CHECK(c.max_abs_mean_at_k <= 1e-12);
  }
  CHECK(select_u_convention(8).max_abs_mean_at_k_minus_one > 0.1);
  RngStream rng(13, 0);
  CHECK_THROWS_AS(u_statistic_trace(9, 1, 10, rng), InvalidArgument);
  const auto tr = u_statistic_trace(8, 1, 500, rng);
  CHECK(tr.max_abs_conditional_mean <= 1e-12);
  CHECK(tr.V.size() == 500);
}

TEST_CASE("Var U_t <= t at n = 100") {
  const std::vector<std::uint64_t> checkpoints = {0, 2500, 5000, 10000};
  const auto v = u_stat_variance(100, 10000, checkpoints, 46, 0);
  REQUIRE(v.size() == 4);
  CHECK(v[0].variance == 0.0);
  for (const auto& s : v) {
    CHECK(s.variance <= static_cast<double>(s.t) + 3 * s.variance_se);
    CHECK(s.max_abs_conditional_mean <= 1e-12);
  }
}
