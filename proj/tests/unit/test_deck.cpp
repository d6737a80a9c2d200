#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <map>
#include <set>
#include <vector>

#include "oracles.hpp"
#include "shufflemix/deck.hpp"
#include "shufflemix/errors.hpp"
#include "shufflemix/rng.hpp"
#include "shufflemix/shuffle_spec.hpp"

using namespace shufflemix;

namespace {

std::vector<Card> cards(std::initializer_list<Card> c) { return c; }

Deck deck_of(std::initializer_list<Card> c) {
  const std::vector<Card> v(c);
  return Deck::from_positions(v);
}

}  // namespace

TEST_CASE("make_deck orders") {
  CHECK(make_deck(3, DeckOrder::kIdentity).by_position() == cards({1, 2, 3}));
  CHECK(make_deck(3, DeckOrder::kReversed).by_position() == cards({3, 2, 1}));
  CHECK(make_deck(1, DeckOrder::kReversed).by_position() == cards({1}));
  CHECK_THROWS_AS(make_deck(0, DeckOrder::kIdentity), InvalidArgument);
}

TEST_CASE("apply_move_to_top") {
  CHECK(apply_move_to_top(deck_of({1, 2, 3}), 3).by_position() == cards({3, 1, 2}));
  CHECK(apply_move_to_top(deck_of({1, 2, 3}), 1).by_position() == cards({1, 2, 3}));
  CHECK(apply_move_to_top(deck_of({3, 1, 2}), 2).by_position() == cards({1, 3, 2}));
  CHECK_THROWS_AS(apply_move_to_top(deck_of({1, 2, 3}), 4), InvalidArgument);
  CHECK_THROWS_AS(apply_move_to_top(deck_of({1, 2, 3}), 0), InvalidArgument);
}

TEST_CASE("from_positions rejects non-permutations") {
  CHECK_THROWS_AS(deck_of({1, 1, 3}), InvalidArgument);
  CHECK_THROWS_AS(deck_of({0, 1, 2}), InvalidArgument);
  CHECK_THROWS_AS(deck_of({1, 2, 4}), InvalidArgument);
}

TEST_CASE("circular storage agrees with a plain vector under random moves") {
  RngStream rng(3, 0);
  for (std::size_t n : {1u, 2u, 7u, 64u}) {
    Deck d(n);
    oracle::Order ref(n);
    for (std::size_t i = 0; i < n; ++i) ref[i] = static_cast<int>(i + 1);
    for (int s = 0; s < 5000; ++s) {
      const std::size_t q = 1 + rng.uniform_index(n);
      d.move_to_top(q);
      ref = oracle::move_to_top(ref, q);
      const auto bp = d.by_position();
      REQUIRE(std::equal(bp.begin(), bp.end(), ref.begin()));
      const auto bc = d.by_card();
      for (std::size_t pos = 1; pos <= n; ++pos) REQUIRE(bc[bp[pos - 1] - 1] == pos);
    }
  }
}

TEST_CASE("sample_step point mass at the bottom is deterministic") {
  const ShuffleSpec spec(ShuffleMode::kPositionWeighted, {0.0, 0.0, 1.0});
  RngStream rng(1, 0);
  for (int i = 0; i < 50; ++i) {
    Deck d = deck_of({1, 2, 3});
    const StepResult r = sample_step(spec, d, rng);
    CHECK(d.by_position() == cards({3, 1, 2}));
    CHECK(r.position == 3);
    CHECK(r.card == 3);
  }
}

TEST_CASE("sample_step rejects a size mismatch") {
  const ShuffleSpec spec(ShuffleMode::kMoveToFront, {0.5, 0.5});
  RngStream rng(1, 0);
  Deck d(3);
  CHECK_THROWS_AS(sample_step(spec, d, rng), InvalidArgument);
}

TEST_CASE("one-step law matches enumeration within 4 sd") {
  struct Case {
    ShuffleMode mode;
    std::vector<double> w;
    std::vector<Card> start;
  };
  const std::vector<Case> cases = {
      {ShuffleMode::kMoveToFront, {0.5, 0.5}, {1, 2}},
      {ShuffleMode::kPositionWeighted, {0.0, 0.5, 0.5}, {1, 2, 3}},
      {ShuffleMode::kMoveToFront, {0.1, 0.2, 0.3, 0.4}, {2, 4, 1, 3}},
      {ShuffleMode::kPositionWeighted, {0.05, 0.15, 0.3, 0.5}, {4, 3, 2, 1}},
  };
  constexpr int kDraws = 100000;
  std::uint64_t stream = 0;
  for (const auto& c : cases) {
    const ShuffleSpec spec(c.mode, c.w);
    const oracle::Order start(c.start.begin(), c.start.end());
    const oracle::Law exact = oracle::step({{start, 1.0}}, c.w, c.mode == ShuffleMode::kMoveToFront);
    std::map<oracle::Order, int> counts;
    RngStream rng(2024, stream++);
    for (int i = 0; i < kDraws; ++i) {
      Deck d = Deck::from_positions(c.start);
      sample_step(spec, d, rng);
      const auto bp = d.by_position();
      counts[oracle::Order(bp.begin(), bp.end())]++;
    }
    for (const auto& [o, n] : counts) CHECK(exact.count(o) == 1);
    for (const auto& [o, p] : exact) {
      const double f = static_cast<double>(counts[o]) / kDraws;
      const double sd = std::sqrt(p * (1 - p) / kDraws);
      CHECK(std::abs(f - p) <= 4 * sd + 1e-12);
    }
  }
}

TEST_CASE("MTF on two cards splits evenly over a stream") {
  const ShuffleSpec spec(ShuffleMode::kMoveToFront, {0.5, 0.5});
  RngStream rng(77, 0);
  int swapped = 0;
  constexpr int kDraws = 20000;
  for (int i = 0; i < kDraws; ++i) {
    Deck d(2);
    sample_step(spec, d, rng);
    swapped += d.card_at(1) == 2;
  }
  CHECK(std::abs(swapped / double(kDraws) - 0.5) < 4 * std::sqrt(0.25 / kDraws));
}

TEST_CASE("equal seeds give equal trajectories; other streams differ") {
  const ShuffleSpec spec = ShuffleSpec::bottom_to_top(20, 3);
  auto run = [&](std::uint64_t seed, std::uint64_t stream) {
    RngStream rng(seed, stream);
    Deck d(20);
    std::vector<Card> trace;
    for (int i = 0; i < 500; ++i) trace.push_back(sample_step(spec, d, rng).card);
    return trace;
  };
  CHECK(run(5, 1) == run(5, 1));
  CHECK(run(5, 1) != run(5, 2));
  CHECK(run(5, 1) != run(6, 1));
}

TEST_CASE("permutation closure over all starts for n = 4") {
  const ShuffleSpec spec(ShuffleMode::kPositionWeighted, {0.1, 0.2, 0.3, 0.4});
  RngStream rng(9, 0);
  for (const auto& o : oracle::all_orders(4)) {
    std::vector<Card> c(o.begin(), o.end());
    Deck d = Deck::from_positions(c);
    for (int s = 0; s < 200; ++s) sample_step(spec, d, rng);
    auto bp = d.by_position();
    std::set<Card> seen(bp.begin(), bp.end());
    CHECK(seen.size() == 4);
    CHECK(*seen.begin() == 1);
    CHECK(*seen.rbegin() == 4);
  }
}

TEST_CASE("ShuffleSpec validation and sums") {
  CHECK_THROWS_AS(ShuffleSpec(ShuffleMode::kMoveToFront, {}), InvalidArgument);
  CHECK_THROWS_AS(ShuffleSpec(ShuffleMode::kMoveToFront, {0.5, 0.6}), InvalidArgument);
  CHECK_THROWS_AS(ShuffleSpec(ShuffleMode::kMoveToFront, {-0.1, 1.1}), InvalidArgument);
  const ShuffleSpec s(ShuffleMode::kPositionWeighted, {0.1, 0.2, 0.3, 0.4});
  CHECK(s.below(1) == doctest::Approx(0.0));
  CHECK(s.below(3) == doctest::Approx(0.3));
  CHECK(s.above(2) == doctest::Approx(0.7));
  CHECK(s.above(4) == doctest::Approx(0.0));
  CHECK_FALSE(s.third_rule());
  CHECK(ShuffleSpec(ShuffleMode::kMoveToFront, {0.25, 0.25, 0.25, 0.25}).third_rule());
  const ShuffleSpec b = ShuffleSpec::bottom_to_top(5, 2);
  CHECK(b.weight(4) == doctest::Approx(0.5));
  CHECK(b.weight(3) == 0.0);
  CHECK_THROWS_AS(ShuffleSpec::two_point(5, 5), InvalidArgument);
}

TEST_CASE("RngStream uniform_index stays in range and is roughly uniform") {
  RngStream rng(11, 3);
  std::vector<int> hist(7, 0);
  for (int i = 0; i < 70000; ++i) hist[rng.uniform_index(7)]++;
  for (int h : hist) CHECK(std::abs(h - 10000) < 4 * std::sqrt(10000.0 * 6 / 7));
  CHECK(splitmix64(0) != splitmix64(1));
}
