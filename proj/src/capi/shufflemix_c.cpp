#include "shufflemix/shufflemix.h"

#include <algorithm>
#include <cmath>
#include <new>
#include <string>
#include <vector>

#include "shufflemix/bounds.hpp"
#include "shufflemix/coupling.hpp"
#include "shufflemix/deck.hpp"
#include "shufflemix/errors.hpp"
#include "shufflemix/exact.hpp"
#include "shufflemix/rng.hpp"
#include "shufflemix/shuffle_spec.hpp"
#include "shufflemix/spectral.hpp"

struct sm_spec {
  shufflemix::ShuffleSpec impl;
};
struct sm_deck {
  shufflemix::Deck impl;
};
struct sm_rng {
  shufflemix::RngStream impl;
};

namespace {

thread_local std::string g_last_error;

sm_status fail(sm_status status, const char* what) {
  g_last_error = what;
  return status;
}

// Runs body, mapping library exceptions onto status codes.
template <class Body>
sm_status guarded(Body&& body) {
  try {
    body();
    g_last_error.clear();
    return SM_OK;
  } catch (const shufflemix::InvalidArgument& e) {
    return fail(SM_ERR_INVALID_ARGUMENT, e.what());
  } catch (const shufflemix::CapacityError& e) {
    return fail(SM_ERR_CAPACITY, e.what());
  } catch (const shufflemix::CapExceeded& e) {
    return fail(SM_ERR_CAP_EXCEEDED, e.what());
  } catch (const shufflemix::NoConvergence& e) {
    return fail(SM_ERR_NO_CONVERGENCE, e.what());
  } catch (const std::bad_alloc&) {
    return fail(SM_ERR_OUT_OF_MEMORY, "out of memory");
  } catch (const std::out_of_range& e) {
    return fail(SM_ERR_INVALID_ARGUMENT, e.what());
  } catch (const std::exception& e) {
    return fail(SM_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(SM_ERR_INTERNAL, "unknown error");
  }
}

void require(bool ok, const char* what) {
  if (!ok) throw shufflemix::InvalidArgument(what);
}

std::span<const double> weights_view(const double* w, size_t n) {
  require(w != nullptr && n > 0, "weights must be a non-empty array");
  return {w, n};
}

void fill_report(const shufflemix::LowerBoundReport& r, sm_lower_bound_report* out) {
  out->n = r.n;
  out->k = r.k;
  out->predicted_mag = std::abs(r.predicted);
  out->predicted_arg = std::arg(r.predicted);
  out->lambda_mag = std::abs(r.lambda);
  out->lambda_arg = std::arg(r.lambda);
  out->gamma = r.gamma;
  out->theta = r.theta;
  out->g_residual = r.g_residual;
  out->newton_iterations = r.newton_iterations;
  out->eigenvector_residual = r.eigenvector_residual;
  out->distance_to_prediction = r.distance_to_prediction;
  out->certificate_issued = r.certificate.issued ? 1 : 0;
  out->certificate_radius = r.certificate.radius;
  out->certificate_delta = r.certificate.delta;
  out->certificate_derivative_lower = r.certificate.derivative_lower;
  out->certified_radius = r.certificate.certified_radius;
  out->phi_s0 = r.phi_s0;
  out->R = r.R;
  out->T = r.T;
  out->formula = r.formula;
  out->gamma_in_band = r.gamma_in_band ? 1 : 0;
}

void fill_sample(const shufflemix::CouplingSample& s, sm_coupling_sample* out) {
  out->T = s.T;
  out->seed = s.seed;
  out->stream = s.stream;
  out->has_touched_all_but_one = s.touched_all_but_one ? 1 : 0;
  out->touched_all_but_one = s.touched_all_but_one.value_or(0);
  out->matched_history_ok = s.matched_history_ok ? 1 : 0;
  out->stayed_coupled = s.stayed_coupled ? 1 : 0;
}

}  // namespace

extern "C" {

const char* sm_version(void) { return "1.0.0"; }

const char* sm_status_name(sm_status status) {
  switch (status) {
    case SM_OK: return "ok";
    case SM_ERR_INVALID_ARGUMENT: return "invalid-argument";
    case SM_ERR_CAPACITY: return "capacity";
    case SM_ERR_CAP_EXCEEDED: return "cap-exceeded";
    case SM_ERR_NO_CONVERGENCE: return "no-convergence";
    case SM_ERR_OUT_OF_MEMORY: return "out-of-memory";
    case SM_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* sm_last_error(void) { return g_last_error.c_str(); }

// ---- specs ----

sm_status sm_spec_create(sm_mode mode, const double* weights, size_t n, sm_spec** out) {
  return guarded([&] {
    require(out != nullptr, "null output handle");
    require(mode == SM_MOVE_TO_FRONT || mode == SM_POSITION_WEIGHTED, "unknown mode");
    const auto w = weights_view(weights, n);
    const auto m = mode == SM_MOVE_TO_FRONT ? shufflemix::ShuffleMode::kMoveToFront
                                            : shufflemix::ShuffleMode::kPositionWeighted;
    *out = new sm_spec{shufflemix::ShuffleSpec(m, std::vector<double>(w.begin(), w.end()))};
  });
}

sm_status sm_spec_bottom_to_top(size_t n, size_t k, sm_spec** out) {
  return guarded([&] {
    require(out != nullptr, "null output handle");
    *out = new sm_spec{shufflemix::ShuffleSpec::bottom_to_top(n, k)};
  });
}

sm_status sm_spec_two_point(size_t n, size_t k, sm_spec** out) {
  return guarded([&] {
    require(out != nullptr, "null output handle");
    *out = new sm_spec{shufflemix::ShuffleSpec::two_point(n, k)};
  });
}

void sm_spec_destroy(sm_spec* spec) { delete spec; }
size_t sm_spec_size(const sm_spec* spec) { return spec ? spec->impl.size() : 0; }
int sm_spec_third_rule(const sm_spec* spec) { return spec && spec->impl.third_rule() ? 1 : 0; }

// ---- decks ----

sm_status sm_deck_create(size_t n, int reversed, sm_deck** out) {
  return guarded([&] {
    require(out != nullptr, "null output handle");
    *out = new sm_deck{shufflemix::make_deck(n, reversed ? shufflemix::DeckOrder::kReversed
                                                          : shufflemix::DeckOrder::kIdentity)};
  });
}

sm_status sm_deck_from_positions(const uint32_t* cards, size_t n, sm_deck** out) {
  return guarded([&] {
    require(out != nullptr && cards != nullptr, "null argument");
    *out = new sm_deck{shufflemix::Deck::from_positions(std::span<const uint32_t>(cards, n))};
  });
}

void sm_deck_destroy(sm_deck* deck) { delete deck; }
size_t sm_deck_size(const sm_deck* deck) { return deck ? deck->impl.size() : 0; }

sm_status sm_deck_card_at(const sm_deck* deck, size_t position, uint32_t* card) {
  return guarded([&] {
    require(deck != nullptr && card != nullptr, "null argument");
    *card = deck->impl.card_at(position);
  });
}

sm_status sm_deck_position_of(const sm_deck* deck, uint32_t card, size_t* position) {
  return guarded([&] {
    require(deck != nullptr && position != nullptr, "null argument");
    *position = deck->impl.position_of(card);
  });
}

sm_status sm_deck_move_to_top(sm_deck* deck, size_t position) {
  return guarded([&] {
    require(deck != nullptr, "null deck");
    deck->impl.move_to_top(position);
  });
}

sm_status sm_deck_cards(const sm_deck* deck, uint32_t* out, size_t n) {
  return guarded([&] {
    require(deck != nullptr && out != nullptr, "null argument");
    require(n == deck->impl.size(), "output length does not match the deck");
    const auto cards = deck->impl.by_position();
    std::copy(cards.begin(), cards.end(), out);
  });
}

// ---- rng ----

sm_status sm_rng_create(uint64_t master_seed, uint64_t stream, sm_rng** out) {
  return guarded([&] {
    require(out != nullptr, "null output handle");
    *out = new sm_rng{shufflemix::RngStream(master_seed, stream)};
  });
}

void sm_rng_destroy(sm_rng* rng) { delete rng; }
uint64_t sm_rng_next(sm_rng* rng) { return rng ? rng->impl() : 0; }

sm_status sm_sample_step(const sm_spec* spec, sm_deck* deck, sm_rng* rng, size_t* position, uint32_t* card) {
  return guarded([&] {
    require(spec && deck && rng, "null argument");
    const auto step = shufflemix::sample_step(spec->impl, deck->impl, rng->impl);
    if (position) *position = step.position;
    if (card) *card = step.card;
  });
}

// ---- exact ----

sm_status sm_exact_mixing_time(const sm_spec* spec, const sm_deck* start, double threshold, uint64_t max_steps,
                               uint64_t* out) {
  return guarded([&] {
    require(spec && start && out, "null argument");
    *out = shufflemix::exact_mixing_time(spec->impl, start->impl, threshold, max_steps);
  });
}

sm_status sm_exact_tv_curve(const sm_spec* spec, const sm_deck* start, uint64_t t_max, double* out) {
  return guarded([&] {
    require(spec && start && out, "null argument");
    const auto curve = shufflemix::exact_tv_curve(spec->impl, start->impl, t_max);
    std::copy(curve.begin(), curve.end(), out);
  });
}

sm_status sm_stationary_defect(const sm_spec* spec, double* out) {
  return guarded([&] {
    require(spec && out, "null argument");
    const auto pi = shufflemix::stationary_distribution(spec->impl);
    const shufflemix::TransitionOperator op(spec->impl);
    *out = shufflemix::l1_distance(op.apply(pi), pi);
  });
}

sm_status sm_single_card_spectrum(const sm_spec* spec, double* mags, double* args, size_t n) {
  return guarded([&] {
    require(spec && mags && args, "null argument");
    require(n == spec->impl.size(), "output length does not match the spec");
    const auto values = shufflemix::matrix_spectrum(shufflemix::SingleCardMatrix(spec->impl));
    for (size_t i = 0; i < n; ++i) {
      mags[i] = std::abs(values[i]);
      args[i] = std::arg(values[i]);
    }
  });
}

// ---- bounds ----

sm_status sm_example_weights(char family, size_t n, double* out) {
  return guarded([&] {
    require(out != nullptr, "null output");
    const auto w = shufflemix::example_weights(shufflemix::parse_weight_family(family), n);
    std::copy(w.begin(), w.end(), out);
  });
}

sm_status sm_mtf_bounds_compute(const double* weights, size_t n, sm_mtf_bounds* out) {
  return guarded([&] {
    require(out != nullptr, "null output");
    const auto r = shufflemix::mtf_lower_bound_time(weights_view(weights, n));
    out->tau_u = r.tau_u;
    out->has_tau_0 = r.tau_0 ? 1 : 0;
    out->tau_0 = r.tau_0.value_or(0);
    out->tau_1 = r.tau_1;
    out->lower_bound = r.lower_bound;
    out->floor_bound = r.floor;
    out->third_rule_ok = r.third_rule_ok ? 1 : 0;
  });
}

sm_status sm_coupon_sum(const double* weights, size_t n, double t, double* out) {
  return guarded([&] {
    require(out != nullptr, "null output");
    const auto w = weights_view(weights, n);
    std::vector<double> sorted(w.begin(), w.end());
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    *out = shufflemix::coupon_sum(sorted, t);
  });
}

sm_status sm_mtf_multi_eigen_T(const double* weights, size_t n, uint64_t* steps, int* satisfiable) {
  return guarded([&] {
    require(steps != nullptr, "null output");
    const auto r = shufflemix::mtf_multi_eigen_T(weights_view(weights, n));
    *steps = r.steps;
    if (satisfiable) *satisfiable = r.satisfiable ? 1 : 0;
  });
}

// ---- spectral ----

sm_status sm_b2t_lower_bound(size_t n, size_t k, sm_lower_bound_report* out) {
  return guarded([&] {
    require(out != nullptr, "null output");
    fill_report(shufflemix::b2t_lower_bound(n, k), out);
  });
}

sm_status sm_two_point_lower_bound(size_t n, size_t k, sm_lower_bound_report* out) {
  return guarded([&] {
    require(out != nullptr, "null output");
    fill_report(shufflemix::two_point_lower_bound(n, k), out);
  });
}

sm_status sm_two_point_stages_compute(size_t n, size_t k, sm_two_point_stages* out) {
  return guarded([&] {
    require(out != nullptr, "null output");
    const auto st = shufflemix::two_point_stages(n, k);
    out->lambda0_re = st.lambda0.real();
    out->lambda0_im = st.lambda0.imag();
    out->lambda1_re = st.lambda1.real();
    out->lambda1_im = st.lambda1.imag();
    out->lambda2_re = st.lambda2.real();
    out->lambda2_im = st.lambda2.imag();
    out->f_issued = st.f_certificate.issued ? 1 : 0;
    out->f_certified_radius = st.f_certificate.certified_radius;
    out->g_issued = st.g_certificate.issued ? 1 : 0;
    out->g_certified_radius = st.g_certificate.certified_radius;
    out->predicted_shift = st.predicted_shift;
  });
}

sm_status sm_refine_root(sm_family family, size_t n, size_t k, double start_re, double start_im, double tol,
                         double* root_re, double* root_im, double* residual) {
  return guarded([&] {
    require(root_re && root_im, "null output");
    const auto cp = family == SM_TWO_POINT ? shufflemix::CharPoly::two_point(n, k)
                                           : shufflemix::CharPoly::bottom_to_top(n, k);
    const auto root = shufflemix::newton_refine(cp, {start_re, start_im}, tol);
    *root_re = root.lambda.real();
    *root_im = root.lambda.imag();
    if (residual) *residual = root.residual;
  });
}

// ---- couplings ----

sm_status sm_couple_b2t_batch(size_t n, size_t k, const sm_deck* start, size_t samples, uint64_t master_seed,
                              uint64_t cap, unsigned threads, sm_coupling_sample* out) {
  return guarded([&] {
    require(start && out, "null argument");
    const uint64_t c = cap != 0 ? cap : shufflemix::default_b2t_cap(n, k);
    const auto batch = shufflemix::run_b2t_batch(n, k, start->impl, samples, master_seed, c, threads);
    for (size_t i = 0; i < batch.size(); ++i) fill_sample(batch[i], out + i);
  });
}

sm_status sm_couple_mtf_batch(const sm_spec* spec, const sm_deck* start, size_t samples, uint64_t master_seed,
                              uint64_t cap, unsigned threads, sm_coupling_sample* out) {
  return guarded([&] {
    require(spec && start && out, "null argument");
    const uint64_t c = cap != 0 ? cap : shufflemix::default_mtf_cap(spec->impl);
    const auto batch = shufflemix::run_mtf_batch(spec->impl, start->impl, samples, master_seed, c, threads);
    for (size_t i = 0; i < batch.size(); ++i) fill_sample(batch[i], out + i);
  });
}

sm_status sm_b2t_upper_bound(size_t n, size_t k, double* out) {
  return guarded([&] {
    require(out != nullptr, "null output");
    *out = shufflemix::b2t_upper_bound_value(n, k);
  });
}

sm_status sm_coupling_quantiles(const uint64_t* times, size_t count, const uint64_t* grid, size_t grid_len,
                                sm_coupling_summary* summary, sm_survival_point* survival) {
  return guarded([&] {
    require(times && summary, "null argument");
    require(grid_len == 0 || (grid && survival), "grid and survival output must both be given");
    const auto s = shufflemix::coupling_quantiles(std::span<const uint64_t>(times, count),
                                                  std::span<const uint64_t>(grid, grid_len));
    summary->count = s.count;
    summary->mean = s.mean;
    summary->median = s.median;
    summary->q95 = s.q95;
    summary->max = s.max;
    for (size_t i = 0; i < grid_len; ++i) survival[i] = {s.survival[i].t, s.survival[i].fraction, s.survival[i].half_width};
  });
}

sm_status sm_cycle_stats_run(size_t n, size_t k, uint64_t cycles, sm_rng* rng, sm_cycle_stats* out) {
  return guarded([&] {
    require(rng && out, "null argument");
    const auto s = shufflemix::cycle_stats(n, k, cycles, rng->impl);
    out->cycles = s.cycles;
    out->displacement_mean = s.displacement_mean;
    out->displacement_var = s.displacement_var;
    out->duration_mean = s.duration_mean;
    out->duration_var = s.duration_var;
    out->max_displacement = s.max_displacement;
    out->min_duration = s.min_duration;
  });
}

sm_status sm_u_convention_check(size_t n, sm_u_convention* out) {
  return guarded([&] {
    require(out != nullptr, "null output");
    const auto c = shufflemix::select_u_convention(n);
    out->chosen_at_k = c.chosen == shufflemix::UConvention::kAtK ? 1 : 0;
    out->max_abs_mean_at_k = c.max_abs_mean_at_k;
    out->max_abs_mean_at_k_minus_one = c.max_abs_mean_at_k_minus_one;
  });
}

sm_status sm_u_stat_variance(size_t n, size_t traces, const uint64_t* checkpoints, size_t checkpoint_count,
                             uint64_t master_seed, unsigned threads, sm_u_variance* out) {
  return guarded([&] {
    require(checkpoints && out, "null argument");
    const auto v = shufflemix::u_stat_variance(n, traces, std::span<const uint64_t>(checkpoints, checkpoint_count),
                                               master_seed, threads);
    for (size_t i = 0; i < v.size(); ++i)
      out[i] = {v[i].t, v[i].mean, v[i].variance, v[i].variance_se, v[i].max_abs_conditional_mean};
  });
}

}  // extern "C"
