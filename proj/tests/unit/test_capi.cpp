#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstring>
#include <string>
#include <vector>

#include "shufflemix/shufflemix.h"

using doctest::Approx;

TEST_CASE("status names and version") {
  CHECK(std::string(sm_status_name(SM_OK)) == "ok");
  CHECK(std::string(sm_status_name(SM_ERR_CAP_EXCEEDED)).size() > 0);
  CHECK(std::strlen(sm_version()) > 0);
}

TEST_CASE("spec and deck handles") {
  sm_spec* spec = nullptr;
  const double w[] = {0.0, 0.0, 1.0};
  REQUIRE(sm_spec_create(SM_POSITION_WEIGHTED, w, 3, &spec) == SM_OK);
  CHECK(sm_spec_size(spec) == 3);
  CHECK(sm_spec_third_rule(spec) == 0);

  sm_deck* deck = nullptr;
  REQUIRE(sm_deck_create(3, 0, &deck) == SM_OK);
  sm_rng* rng = nullptr;
  REQUIRE(sm_rng_create(1, 0, &rng) == SM_OK);
  size_t pos = 0;
  uint32_t card = 0;
  REQUIRE(sm_sample_step(spec, deck, rng, &pos, &card) == SM_OK);
  CHECK(pos == 3);
  CHECK(card == 3);
  uint32_t cards[3];
  REQUIRE(sm_deck_cards(deck, cards, 3) == SM_OK);
  CHECK(cards[0] == 3);
  CHECK(cards[1] == 1);
  CHECK(cards[2] == 2);
  CHECK(sm_deck_move_to_top(deck, 4) == SM_ERR_INVALID_ARGUMENT);
  CHECK(std::string(sm_last_error()).size() > 0);

  sm_rng_destroy(rng);
  sm_deck_destroy(deck);
  sm_spec_destroy(spec);
  sm_spec_destroy(nullptr);
}

TEST_CASE("invalid inputs map to status codes") {
  sm_spec* spec = nullptr;
  const double bad[] = {0.7, 0.7};
  CHECK(sm_spec_create(SM_MOVE_TO_FRONT, bad, 2, &spec) == SM_ERR_INVALID_ARGUMENT);
  CHECK(spec == nullptr);
  sm_lower_bound_report even{};
  CHECK(sm_two_point_lower_bound(100, 2, &even) == SM_ERR_INVALID_ARGUMENT);
  CHECK(std::string(sm_last_error()).find("odd") != std::string::npos);
  CHECK(sm_spec_two_point(10, 10, &spec) == SM_ERR_INVALID_ARGUMENT);
  const uint32_t dup[] = {1, 1, 2};
  sm_deck* deck = nullptr;
  CHECK(sm_deck_from_positions(dup, 3, &deck) == SM_ERR_INVALID_ARGUMENT);

  std::vector<double> w(9, 1.0 / 9);
  REQUIRE(sm_spec_create(SM_MOVE_TO_FRONT, w.data(), 9, &spec) == SM_OK);
  REQUIRE(sm_deck_create(9, 0, &deck) == SM_OK);
  uint64_t t = 0;
  CHECK(sm_exact_mixing_time(spec, deck, 0.25, 100, &t) == SM_ERR_CAPACITY);
  sm_deck_destroy(deck);
  sm_spec_destroy(spec);

  sm_lower_bound_report r{};
  CHECK(sm_b2t_lower_bound(50, 1, &r) == SM_ERR_INVALID_ARGUMENT);
  CHECK(sm_b2t_lower_bound(50, 2, nullptr) == SM_ERR_INVALID_ARGUMENT);
}

TEST_CASE("cap exceeded is reported") {
  sm_deck* deck = nullptr;
  REQUIRE(sm_deck_create(40, 1, &deck) == SM_OK);
  std::vector<sm_coupling_sample> out(2);
  CHECK(sm_couple_b2t_batch(40, 2, deck, 2, 1, 3, 1, out.data()) == SM_ERR_CAP_EXCEEDED);
  sm_deck_destroy(deck);
}

TEST_CASE("exact analysis through the C API") {
  sm_spec* spec = nullptr;
  const double w[] = {0.25, 0.25, 0.25, 0.25};
  REQUIRE(sm_spec_create(SM_MOVE_TO_FRONT, w, 4, &spec) == SM_OK);
  sm_deck* deck = nullptr;
  REQUIRE(sm_deck_create(4, 1, &deck) == SM_OK);
  uint64_t t = 0;
  REQUIRE(sm_exact_mixing_time(spec, deck, 0.25, 1000, &t) == SM_OK);
  sm_mtf_bounds b{};
  REQUIRE(sm_mtf_bounds_compute(w, 4, &b) == SM_OK);
  CHECK(b.tau_u == 9);
  CHECK(b.has_tau_0 == 0);
  CHECK(t <= b.tau_u);
  std::vector<double> curve(t + 1);
  REQUIRE(sm_exact_tv_curve(spec, deck, t, curve.data()) == SM_OK);
  CHECK(curve[t] <= 0.25);
  CHECK(curve[t - 1] > 0.25);
  double defect = 1.0;
  REQUIRE(sm_stationary_defect(spec, &defect) == SM_OK);
  CHECK(defect <= 1e-12);
  double cs = 0;
  REQUIRE(sm_coupon_sum(w, 4, 9, &cs) == SM_OK);
  CHECK(cs == Approx(3 * std::pow(0.75, 9)));
  sm_deck_destroy(deck);
  sm_spec_destroy(spec);

  sm_spec* b2t = nullptr;
  REQUIRE(sm_spec_bottom_to_top(3, 2, &b2t) == SM_OK);
  double mags[3], args[3];
  REQUIRE(sm_single_card_spectrum(b2t, mags, args, 3) == SM_OK);
  CHECK(mags[0] == Approx(1.0));
  CHECK(mags[1] == Approx(0.5));
  CHECK(std::abs(args[1]) == Approx(M_PI));
  sm_spec_destroy(b2t);
}

TEST_CASE("spectral and coupling entry points") {
  sm_lower_bound_report r{};
  REQUIRE(sm_b2t_lower_bound(50, 3, &r) == SM_OK);
  CHECK(r.g_residual <= 1e-13);
  CHECK(r.n == 50);
  double re = 0, im = 0, res = 1;
  REQUIRE(sm_refine_root(SM_BOTTOM_TO_TOP, 50, 3, r.predicted_mag * std::cos(r.predicted_arg),
                         r.predicted_mag * std::sin(r.predicted_arg), 1e-14, &re, &im, &res) == SM_OK);
  CHECK(std::hypot(re, im) == Approx(r.lambda_mag).epsilon(1e-12));

  sm_two_point_stages st{};
  REQUIRE(sm_two_point_stages_compute(100, 3, &st) == SM_OK);
  CHECK(st.f_issued == 1);
  CHECK(st.g_issued == 1);

  sm_deck* deck = nullptr;
  REQUIRE(sm_deck_create(10, 0, &deck) == SM_OK);
  std::vector<sm_coupling_sample> a(20), b(20);
  REQUIRE(sm_couple_b2t_batch(10, 2, deck, 20, 9, 0, 1, a.data()) == SM_OK);
  REQUIRE(sm_couple_b2t_batch(10, 2, deck, 20, 9, 0, 3, b.data()) == SM_OK);
  std::vector<uint64_t> times;
  for (std::size_t i = 0; i < 20; ++i) {
    CHECK(a[i].T == b[i].T);
    CHECK(a[i].matched_history_ok == 1);
    times.push_back(a[i].T);
  }
  sm_coupling_summary sum{};
  REQUIRE(sm_coupling_quantiles(times.data(), times.size(), nullptr, 0, &sum, nullptr) == SM_OK);
  CHECK(sum.count == 20);
  CHECK(sum.max >= sum.q95);
  sm_deck_destroy(deck);

  sm_u_convention conv{};
  REQUIRE(sm_u_convention_check(8, &conv) == SM_OK);
  CHECK(conv.chosen_at_k == 1);

  sm_rng* rng = nullptr;
  REQUIRE(sm_rng_create(4, 0, &rng) == SM_OK);
  sm_cycle_stats cs{};
  REQUIRE(sm_cycle_stats_run(30, 1, 100, rng, &cs) == SM_OK);
  CHECK(cs.displacement_var == 0.0);
  sm_rng_destroy(rng);
}
