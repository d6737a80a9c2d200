#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "oracles.hpp"
#include "shufflemix/bounds.hpp"
#include "shufflemix/deck.hpp"
#include "shufflemix/errors.hpp"
#include "shufflemix/exact.hpp"
#include "shufflemix/rng.hpp"
#include "shufflemix/shuffle_spec.hpp"
#include "shufflemix/spectral.hpp"

using namespace shufflemix;
using doctest::Approx;

namespace {

std::vector<double> random_weights(std::size_t n, RngStream& rng) {
  std::vector<double> w(n);
  double s = 0.0;
  for (auto& x : w) s += (x = 0.05 + rng.uniform());
  for (auto& x : w) x /= s;
  return w;
}

PermDistribution to_dist(const oracle::Law& law, std::size_t n) {
  std::vector<double> p(factorial(n), 0.0);
  for (const auto& [o, pr] : law) {
    std::vector<Card> c(o.begin(), o.end());
    p[lehmer_encode(c)] = pr;
  }
  return PermDistribution(n, p);
}

}  // namespace

TEST_CASE("Lehmer code round-trips over S_n") {
  for (std::size_t n = 1; n <= 6; ++n) {
    for (std::uint32_t i = 0; i < factorial(n); ++i) {
      const auto perm = lehmer_decode(i, n);
      REQUIRE(lehmer_encode(perm) == i);
    }
  }
  const std::vector<Card> id = {1, 2, 3, 4};
  const std::vector<Card> rev = {4, 3, 2, 1};
  CHECK(lehmer_encode(id) == 0);
  CHECK(lehmer_encode(rev) == 23);
}

TEST_CASE("mtf_stationary_prob") {
  const ShuffleSpec u(ShuffleMode::kMoveToFront, {1.0 / 3, 1.0 / 3, 1.0 / 3});
  const std::vector<Card> o312 = {3, 1, 2};
  CHECK(mtf_stationary_prob(u, o312) == Approx(1.0 / 6));
  const ShuffleSpec two(ShuffleMode::kMoveToFront, {0.3, 0.7});
  const std::vector<Card> o21 = {2, 1};
  CHECK(mtf_stationary_prob(two, o21) == Approx(0.7));
  const ShuffleSpec three(ShuffleMode::kMoveToFront, {0.5, 0.3, 0.2});
  const std::vector<Card> o213 = {2, 1, 3};
  CHECK(mtf_stationary_prob(three, o213) == Approx(3.0 / 14));
  const std::vector<Card> bad = {1, 1, 3};
  CHECK_THROWS_AS(mtf_stationary_prob(three, bad), InvalidArgument);
}

TEST_CASE("evolve_distribution examples") {
  const ShuffleSpec u2(ShuffleMode::kMoveToFront, {0.5, 0.5});
  const Deck id2(2);
  const auto d0 = evolve_distribution(u2, PermDistribution::point_mass(id2), 0);
  CHECK(d0.at(id2) == 1.0);
  const auto d1 = evolve_distribution(u2, PermDistribution::point_mass(id2), 1);
  CHECK(d1[0] == Approx(0.5));
  CHECK(d1[1] == Approx(0.5));

  const ShuffleSpec p(ShuffleMode::kMoveToFront, {0.5, 0.3, 0.2});
  const auto e = evolve_distribution(p, PermDistribution::point_mass(Deck(3)), 1);
  CHECK(e.at(Deck(3)) == Approx(0.5));
  CHECK(e.at(Deck::from_positions(std::vector<Card>{2, 1, 3})) == Approx(0.3));
  CHECK(e.at(Deck::from_positions(std::vector<Card>{3, 1, 2})) == Approx(0.2));

  const ShuffleSpec big(ShuffleMode::kMoveToFront, std::vector<double>(9, 1.0 / 9));
  CHECK_THROWS_AS(stationary_distribution(big), CapacityError);
}

TEST_CASE("tv_distance examples") {
  const PermDistribution d = PermDistribution::uniform(3);
  CHECK(tv_distance(d, d) == 0.0);
  const PermDistribution pm(2, {1.0, 0.0});
  CHECK(tv_distance(pm, PermDistribution::uniform(2)) == Approx(0.5));
  const PermDistribution a(3, {0.5, 0.3, 0.2, 0.0, 0.0, 0.0});
  const PermDistribution b(3, {0.2, 0.3, 0.5, 0.0, 0.0, 0.0});
  CHECK(tv_distance(a, b) == Approx(0.3));
  CHECK_THROWS_AS(tv_distance(a, PermDistribution::uniform(2)), InvalidArgument);
}

TEST_CASE("tv_distance is a metric on random triples") {
  RngStream rng(41, 0);
  for (int trial = 0; trial < 50; ++trial) {
    const PermDistribution x(4, random_weights(24, rng));
    const PermDistribution y(4, random_weights(24, rng));
    const PermDistribution z(4, random_weights(24, rng));
    const double xy = tv_distance(x, y);
    CHECK(xy >= 0.0);
    CHECK(xy <= 1.0);
    CHECK(xy == Approx(tv_distance(y, x)));
    CHECK(xy <= tv_distance(x, z) + tv_distance(z, y) + 1e-15);
  }
}

TEST_CASE("exact_mixing_time examples") {
  const ShuffleSpec u1(ShuffleMode::kMoveToFront, {1.0});
  CHECK(exact_mixing_time(u1, Deck(1)) == 0);
  const ShuffleSpec u2(ShuffleMode::kMoveToFront, {0.5, 0.5});
  CHECK(exact_mixing_time(u2, make_deck(2, DeckOrder::kReversed)) == 1);
  const auto w3 = example_weights(WeightFamily::kA, 3);
  const ShuffleSpec u3(ShuffleMode::kMoveToFront, w3);
  const auto t3 = exact_mixing_time(u3, make_deck(3, DeckOrder::kReversed));
  CHECK(t3 >= 1);
  CHECK(t3 <= 6);
  CHECK(t3 <= tau_u(w3));
}

TEST_CASE("exact_mixing_time cap carries the last TV") {
  // Deterministic rotation: the chain stays on the 4-cycle through the start, and the
  // stationary law found by iteration is uniform on that cycle, so TV stays at 3/4.
  const ShuffleSpec rot = ShuffleSpec::bottom_to_top(4, 1);
  try {
    exact_mixing_time(rot, Deck(4), 0.25, 50);
    FAIL("expected CapExceeded");
  } catch (const CapExceeded& e) {
    CHECK(e.last_value() == Approx(0.75));
  }
}

TEST_CASE("exact machinery agrees with brute-force powering") {
  RngStream rng(8, 0);
  for (std::size_t n = 2; n <= 5; ++n) {
    for (int trial = 0; trial < 3; ++trial) {
      const auto w = random_weights(n, rng);
      const ShuffleSpec spec(ShuffleMode::kMoveToFront, w);
      oracle::Order start(n);
      for (std::size_t i = 0; i < n; ++i) start[i] = static_cast<int>(n - i);
      CHECK(exact_mixing_time(spec, make_deck(n, DeckOrder::kReversed)) == oracle::mtf_mixing_time(w, start));

      const ShuffleSpec gr(ShuffleMode::kPositionWeighted, w);
      oracle::Law law{{start, 1.0}};
      for (int t = 0; t < 6; ++t) law = oracle::step(law, w, false);
      const auto lib = evolve_distribution(gr, PermDistribution::point_mass(make_deck(n, DeckOrder::kReversed)), 6);
      CHECK(l1_distance(lib, to_dist(law, n)) < 1e-13);
    }
  }
}

TEST_CASE("exact_tv_curve starts at the point-mass distance") {
  const ShuffleSpec u(ShuffleMode::kMoveToFront, example_weights(WeightFamily::kA, 4));
  const auto curve = exact_tv_curve(u, Deck(4), 12);
  REQUIRE(curve.size() == 13);
  CHECK(curve[0] == Approx(1.0 - 1.0 / 24));
  CHECK(curve[12] < curve[0]);
}

TEST_CASE("MTF stationarity from the product formula, n <= 6, families a-d") {
  for (std::size_t n = 2; n <= 6; ++n) {
    for (auto f : {WeightFamily::kA, WeightFamily::kB, WeightFamily::kC, WeightFamily::kD}) {
      if (f == WeightFamily::kB && n % 2) continue;
      const ShuffleSpec spec(ShuffleMode::kMoveToFront, example_weights(f, n));
      const auto pi = stationary_distribution(spec);
      const auto next = TransitionOperator(spec).apply(pi);
      CHECK(l1_distance(pi, next) <= 1e-12);
      double total = 0.0;
      for (double p : pi.probs()) total += p;
      CHECK(total == Approx(1.0).epsilon(1e-12));
      CHECK(l1_distance(pi, to_dist(oracle::mtf_product_law(example_weights(f, n)), n)) < 1e-14);
    }
  }
}

TEST_CASE("position-weighted stationary law is a fixed point") {
  const ShuffleSpec gr(ShuffleMode::kPositionWeighted, {0.1, 0.2, 0.3, 0.4});
  const auto pi = stationary_distribution(gr);
  CHECK(l1_distance(pi, TransitionOperator(gr).apply(pi)) < 1e-12);
  // The two-point shuffle has a periodic structure; the lazy iteration still converges.
  const auto tp = ShuffleSpec::two_point(5, 1);
  const auto pi2 = stationary_distribution(tp);
  CHECK(l1_distance(pi2, TransitionOperator(tp).apply(pi2)) < 1e-12);
}

TEST_CASE("single_card_matrix examples") {
  const SingleCardMatrix m2(ShuffleSpec(ShuffleMode::kPositionWeighted, {0.5, 0.5}));
  for (std::size_t r = 1; r <= 2; ++r)
    for (std::size_t c = 1; c <= 2; ++c) CHECK(m2(r, c) == Approx(0.5));
  const SingleCardMatrix rud(ShuffleSpec(ShuffleMode::kPositionWeighted, {0.0, 0.5, 0.5}));
  const double expect[3][3] = {{0, 1, 0}, {0.5, 0, 0.5}, {0.5, 0, 0.5}};
  for (std::size_t r = 1; r <= 3; ++r)
    for (std::size_t c = 1; c <= 3; ++c) CHECK(rud(r, c) == Approx(expect[r - 1][c - 1]));
  CHECK_THROWS_AS(SingleCardMatrix(ShuffleSpec(ShuffleMode::kMoveToFront, {0.5, 0.5})), InvalidArgument);
}

TEST_CASE("single_card_matrix rows are stochastic and banded") {
  RngStream rng(5, 0);
  for (std::size_t n : {3u, 10u, 40u}) {
    const auto w = random_weights(n, rng);
    const ShuffleSpec spec(ShuffleMode::kPositionWeighted, w);
    const SingleCardMatrix m(spec);
    const auto dense = m.dense();
    for (std::size_t r = 1; r <= n; ++r) {
      double s = 0.0;
      for (std::size_t c = 1; c <= n; ++c) {
        s += dense[(r - 1) * n + c - 1];
        if (c != 1 && c != r && c != r + 1) CHECK(dense[(r - 1) * n + c - 1] == 0.0);
      }
      CHECK(s == Approx(1.0).epsilon(1e-12));
    }
    std::vector<std::complex<double>> x(n);
    for (auto& v : x) v = {rng.uniform(), rng.uniform()};
    const auto y = m.multiply(x);
    for (std::size_t r = 0; r < n; ++r) {
      std::complex<double> acc = 0;
      for (std::size_t c = 0; c < n; ++c) acc += dense[r * n + c] * x[c];
      CHECK(std::abs(acc - y[r]) < 1e-14);
    }
  }
}

TEST_CASE("matrix_spectrum examples") {
  auto close_to = [](const std::vector<std::complex<double>>& spec, std::vector<double> expect) {
    REQUIRE(spec.size() == expect.size());
    for (double e : expect) {
      double best = 1e9;
      for (const auto& z : spec) best = std::min(best, std::abs(z - e));
      CHECK(best < 1e-9);
    }
  };
  close_to(matrix_spectrum(SingleCardMatrix(ShuffleSpec(ShuffleMode::kPositionWeighted, {0.5, 0.5}))), {1.0, 0.0});
  close_to(matrix_spectrum(SingleCardMatrix(ShuffleSpec::bottom_to_top(3, 2))), {1.0, 0.0, -0.5});
  close_to(matrix_spectrum(SingleCardMatrix(ShuffleSpec::bottom_to_top(4, 4))), {1.0, 0.0, 0.25, 0.5});
  const auto s = matrix_spectrum(SingleCardMatrix(ShuffleSpec::bottom_to_top(12, 3)));
  for (std::size_t i = 1; i < s.size(); ++i) CHECK(std::abs(s[i - 1]) >= std::abs(s[i]) - 1e-12);
}

TEST_CASE("bottom-to-top spectrum is the roots of g plus {0, 1/k, ..., (k-2)/k}") {
  for (std::size_t n : {8u, 20u, 45u, 60u}) {
    for (std::size_t k : {2u, 3u, 5u}) {
      const auto spec = matrix_spectrum(SingleCardMatrix(ShuffleSpec::bottom_to_top(n, k)));
      auto expect = oracle::all_roots(oracle::b2t_coeffs(n, k));
      for (std::size_t j = 0; j + 1 < k; ++j) expect.emplace_back(static_cast<double>(j) / static_cast<double>(k));
      REQUIRE(expect.size() == n);
      // Greedy matching is enough: the spectrum has no clusters at this tolerance.
      std::vector<bool> used(n, false);
      for (const auto& e : expect) {
        std::size_t best = n;
        double d = 1e9;
        for (std::size_t i = 0; i < n; ++i)
          if (!used[i] && std::abs(spec[i] - e) < d) d = std::abs(spec[i] - e), best = i;
        CHECK(d < 1e-9);
        used[best] = true;
      }
    }
  }
}

TEST_CASE("Phi_j eigen identity at every state, n = 4, random weights") {
  RngStream rng(20, 0);
  for (int trial = 0; trial < 20; ++trial) {
    const auto w = random_weights(4, rng);
    const ShuffleSpec spec(ShuffleMode::kMoveToFront, w);
    const TransitionOperator op(spec);
    for (std::size_t j : {1u, 3u}) {
      const double gamma = w[j - 1] + w[j];
      auto phi = [&](std::uint32_t state) { return mtf_phi_j(Deck::from_positions(lehmer_decode(state, 4)), w, j); };
      double worst = 0.0;
      for (std::uint32_t s = 0; s < 24; ++s) {
        const double e = op.expectation(s, phi);
        worst = std::max(worst, std::abs(e - (1 - gamma) * phi(s)));
        // Independent enumeration of the same expectation.
        const auto perm = lehmer_decode(s, 4);
        const oracle::Order o(perm.begin(), perm.end());
        double ref = 0.0;
        for (const auto& [next, p] : oracle::step({{o, 1.0}}, w, true)) ref += p * oracle::phi(next, w, static_cast<int>(j));
        CHECK(e == Approx(ref).epsilon(1e-14));
      }
      CHECK(worst <= 1e-12);
    }
  }
}
