#include "presets.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <vector>

#include "shufflemix/shufflemix.h"

namespace shufflemix::cli {
namespace {

constexpr double kPi = std::numbers::pi;

void call(sm_status st, const std::string& what) {
  if (st == SM_OK) return;
  const std::string msg = what + ": " + sm_last_error();
  if (st == SM_ERR_INVALID_ARGUMENT || st == SM_ERR_CAPACITY) throw ConfigError(msg);
  throw RunError(msg + " (" + sm_status_name(st) + ")");
}

struct SpecDeleter {
  void operator()(sm_spec* s) const { sm_spec_destroy(s); }
};
struct DeckDeleter {
  void operator()(sm_deck* d) const { sm_deck_destroy(d); }
};
struct RngDeleter {
  void operator()(sm_rng* r) const { sm_rng_destroy(r); }
};
using SpecPtr = std::unique_ptr<sm_spec, SpecDeleter>;
using DeckPtr = std::unique_ptr<sm_deck, DeckDeleter>;

SpecPtr make_spec(sm_mode mode, const std::vector<double>& w) {
  sm_spec* s = nullptr;
  call(sm_spec_create(mode, w.data(), w.size(), &s), "spec");
  return SpecPtr(s);
}

DeckPtr make_deck(std::size_t n, bool reversed) {
  sm_deck* d = nullptr;
  call(sm_deck_create(n, reversed ? 1 : 0, &d), "deck");
  return DeckPtr(d);
}

std::vector<double> weights(char family, std::size_t n) {
  std::vector<double> w(n);
  call(sm_example_weights(family, n, w.data()), std::string("weights for family ") + family);
  return w;
}

std::vector<std::size_t> sizes(const std::optional<std::size_t>& given, std::vector<std::size_t> defaults) {
  return given ? std::vector<std::size_t>{*given} : defaults;
}

std::vector<char> families(const ExperimentConfig& cfg, std::vector<char> defaults) {
  return cfg.family ? std::vector<char>{*cfg.family} : defaults;
}

std::string row_id(std::size_t n, std::size_t k) { return "n=" + fmt(std::uint64_t{n}) + ",k=" + fmt(std::uint64_t{k}); }
std::string row_id(std::size_t n, char f) { return "n=" + fmt(std::uint64_t{n}) + ",family=" + std::string(1, f); }

// --- theorem-3-1 ------------------------------------------------------------------

Report theorem_3_1(const ExperimentConfig& cfg) {
  Report rep("theorem-3-1");
  rep.set_header({"n", "family", "third_rule", "tau_u", "tau_0", "tau_1", "lower_bound", "floor", "exact_mixing_time",
                  "upper_ok", "lower_ok", "lower_asserted", "status"});
  if (cfg.n && (*cfg.n < 2 || *cfg.n > 8)) throw ConfigError("theorem-3-1 runs exact enumeration: need 2 <= n <= 8");
  if (cfg.family == 'b' && cfg.n && *cfg.n % 2) throw ConfigError("family b needs even n");
  for (std::size_t n : sizes(cfg.n, {4, 5, 6, 7})) {
    for (char f : families(cfg, {'a', 'b', 'c', 'd'})) {
      if (f == 'b' && n % 2) continue;
      const auto w = weights(f, n);
      sm_mtf_bounds b{};
      call(sm_mtf_bounds_compute(w.data(), n, &b), "bounds");
      const auto spec = make_spec(SM_MOVE_TO_FRONT, w);
      const auto start = make_deck(n, true);
      std::uint64_t exact = 0;
      call(sm_exact_mixing_time(spec.get(), start.get(), 0.25, 1'000'000, &exact), "exact mixing time");
      const bool upper = exact <= b.tau_u;
      const bool lower = b.lower_bound <= exact && b.floor_bound <= static_cast<std::int64_t>(exact);
      const bool asserted = b.third_rule_ok != 0;
      const bool ok = upper && (!asserted || lower);
      rep.check(upper, row_id(n, f) + ": exact > tau_u");
      if (asserted) rep.check(lower, row_id(n, f) + ": lower bound > exact");
      rep.add_row({fmt(std::uint64_t{n}), std::string(1, f), fmt_bool(b.third_rule_ok), fmt(b.tau_u),
                   b.has_tau_0 ? fmt(b.tau_0) : "none", fmt(b.tau_1), fmt(b.lower_bound), fmt(b.floor_bound),
                   fmt(exact), fmt_bool(upper), fmt_bool(lower), fmt_bool(asserted), ok ? "pass" : "fail"});
    }
  }
  rep.add_summary("start", "reversed deck");
  rep.add_summary("threshold", "0.25");
  return rep;
}

// --- tau-u -------------------------------------------------------------------------

Report tau_u_table(const ExperimentConfig& cfg) {
  Report rep("tau-u");
  rep.set_header({"n", "family", "tau_u", "tau_0", "tau_1", "lower_bound", "floor", "multi_eigen_T", "third_rule",
                  "scale", "tau_u_over_scale", "status"});
  if (cfg.family == 'b' && cfg.n && *cfg.n % 2) throw ConfigError("family b needs even n");
  for (std::size_t n : sizes(cfg.n, {4, 10, 100, 1000, 10000})) {
    for (char f : families(cfg, {'a', 'b', 'c', 'd'})) {
      if (f == 'b' && n % 2) continue;
      const auto w = weights(f, n);
      sm_mtf_bounds b{};
      call(sm_mtf_bounds_compute(w.data(), n, &b), "bounds");
      std::uint64_t multi = 0;
      call(sm_mtf_multi_eigen_T(w.data(), n, &multi, nullptr), "multi-eigenvector bound");
      const double nd = static_cast<double>(n);
      const double ln = std::log(nd);
      std::string scale = "n log n";
      double denom = nd * ln;
      if (f == 'c') scale = "n (log n)^2", denom = nd * ln * ln;
      if (f == 'd') scale = "n^2", denom = nd * nd;
      const double ratio = static_cast<double>(b.tau_u) / denom;
      bool ok = b.lower_bound <= b.tau_u && b.floor_bound <= static_cast<std::int64_t>(b.tau_u);
      rep.check(ok, row_id(n, f) + ": lower bound exceeds tau_u");
      if (n == 10000 && f == 'c') {
        const bool in = ratio >= 0.5 && ratio <= 1.5;
        rep.check(in, row_id(n, f) + ": tau_u / n(log n)^2 outside [0.5, 1.5]");
        ok = ok && in;
      }
      if (n == 10000 && f == 'd') {
        const bool in = ratio >= 0.1 && ratio <= 1.0;
        rep.check(in, row_id(n, f) + ": tau_u / n^2 outside [0.1, 1.0]");
        ok = ok && in;
      }
      rep.add_row({fmt(std::uint64_t{n}), std::string(1, f), fmt(b.tau_u), b.has_tau_0 ? fmt(b.tau_0) : "none",
                   fmt(b.tau_1), fmt(b.lower_bound), fmt(b.floor_bound), fmt(multi), fmt_bool(b.third_rule_ok), scale,
                   fmt(ratio), ok ? "pass" : "fail"});
    }
  }
  return rep;
}

// --- spectral ------------------------------------------------------------------------

Report spectral_b2t(const ExperimentConfig& cfg) {
  Report rep("spectral-b2t");
  rep.set_header({"n", "k", "lambda_mag", "lambda_arg", "predicted_mag", "predicted_arg", "gamma", "theta",
                  "gamma_over_leading", "distance_to_prediction", "distance_over_k3_n4", "g_residual",
                  "eigenvector_residual", "certificate_issued", "certificate_radius", "certified_radius", "phi_s0",
                  "R", "T", "formula", "T_over_formula", "status"});
  if (cfg.k && *cfg.k < 2) throw ConfigError("spectral-b2t needs k >= 2 (k = 1 is a deterministic rotation)");
  for (std::size_t n : sizes(cfg.n, {30, 50, 100, 200})) {
    for (std::size_t k : sizes(cfg.k, {2, 3, 5})) {
      if (k > n) throw ConfigError("k must not exceed n");
      sm_lower_bound_report r{};
      call(sm_b2t_lower_bound(n, k, &r), "bottom-to-top lower bound at " + row_id(n, k));
      const double nd = static_cast<double>(n);
      const double kd = static_cast<double>(k);
      const double leading = 2.0 * kPi * kPi * kd * (kd - 1.0) / (nd * nd * nd);
      const bool root_ok = r.g_residual <= 1e-13;
      const bool vec_ok = r.eigenvector_residual <= 1e-10;
      rep.check(root_ok, row_id(n, k) + ": |g| > 1e-13");
      rep.check(vec_ok, row_id(n, k) + ": eigenvector residual > 1e-10");
      rep.add_row({fmt(std::uint64_t{n}), fmt(std::uint64_t{k}), fmt(r.lambda_mag), fmt(r.lambda_arg),
                   fmt(r.predicted_mag), fmt(r.predicted_arg), fmt(r.gamma), fmt(r.theta), fmt(r.gamma / leading),
                   fmt(r.distance_to_prediction), fmt(r.distance_to_prediction * nd * nd * nd * nd / (kd * kd * kd)),
                   fmt(r.g_residual), fmt(r.eigenvector_residual), fmt_bool(r.certificate_issued),
                   fmt(r.certificate_radius), fmt(r.certified_radius), fmt(r.phi_s0), fmt(r.R), fmt(r.T),
                   fmt(r.formula), fmt(r.T / r.formula), root_ok && vec_ok ? "pass" : "fail"});
    }
  }
  rep.add_summary("a", "0.5");
  rep.add_summary("m_cards", "floor(n/2)");
  return rep;
}

Report spectral_two_point(const ExperimentConfig& cfg) {
  Report rep("spectral-two-point");
  rep.set_header({"n", "k", "lambda_mag", "lambda_arg", "gamma", "theta", "gamma_lo", "gamma_hi", "gamma_in_band",
                  "g_residual", "eigenvector_residual", "f_certificate_issued", "f_certified_radius",
                  "g_certificate_issued", "g_certified_radius", "stage1_distance", "stage2_distance",
                  "predicted_shift", "phi_s0", "R", "T", "formula", "T_over_formula", "status"});
  if (cfg.k && *cfg.k % 2 == 0)
    throw ConfigError("two-point family needs odd k: with even k the characteristic equation has a parity obstruction");
  for (std::size_t n : sizes(cfg.n, {1000})) {
    for (std::size_t k : sizes(cfg.k, {1, 3, 5})) {
      if (k >= n) throw ConfigError("two-point family needs k < n");
      sm_lower_bound_report r{};
      call(sm_two_point_lower_bound(n, k, &r), "two-point lower bound at " + row_id(n, k));
      sm_two_point_stages st{};
      call(sm_two_point_stages_compute(n, k, &st), "two-point stages at " + row_id(n, k));
      const double nd = static_cast<double>(n);
      const double kd = static_cast<double>(k);
      const double scale = 2.0 * kPi * kPi * kd / (nd * nd * nd);
      const double d01 = std::hypot(st.lambda1_re - st.lambda0_re, st.lambda1_im - st.lambda0_im);
      const double d12 = std::hypot(st.lambda2_re - st.lambda1_re, st.lambda2_im - st.lambda1_im);
      const bool root_ok = r.g_residual <= 1e-13;
      const bool vec_ok = r.eigenvector_residual <= 1e-10;
      const bool band = r.gamma_in_band != 0;
      rep.check(root_ok, row_id(n, k) + ": |g| > 1e-13");
      rep.check(vec_ok, row_id(n, k) + ": eigenvector residual > 1e-10");
      rep.check(band, row_id(n, k) + ": gamma outside the band");
      rep.add_row({fmt(std::uint64_t{n}), fmt(std::uint64_t{k}), fmt(r.lambda_mag), fmt(r.lambda_arg), fmt(r.gamma),
                   fmt(r.theta), fmt(0.5 * scale * (kd - 1.0)), fmt(1.5 * scale * (kd + 1.0)), fmt_bool(band),
                   fmt(r.g_residual), fmt(r.eigenvector_residual), fmt_bool(st.f_issued), fmt(st.f_certified_radius),
                   fmt_bool(st.g_issued), fmt(st.g_certified_radius), fmt(d01), fmt(d12), fmt(st.predicted_shift),
                   fmt(r.phi_s0), fmt(r.R), fmt(r.T), fmt(r.formula), fmt(r.T / r.formula),
                   root_ok && vec_ok && band ? "pass" : "fail"});
    }
    // Half-deck experiment: root near (1 - log 2 / n) e^{i 3w/4}; no pass/fail.
    // Largest odd k <= n/2.
    const std::size_t half = (n / 2) % 2 == 1 ? n / 2 : n / 2 - 1;
    if (!cfg.k && half >= 1 && half < n) {
      const double nd = static_cast<double>(n);
      const double w = 2.0 * kPi / nd;
      double re = 0.0, im = 0.0, res = 0.0;
      const double mag0 = 1.0 - std::log(2.0) / nd;
      if (sm_refine_root(SM_TWO_POINT, n, half, mag0 * std::cos(0.75 * w), mag0 * std::sin(0.75 * w), 1e-13, &re, &im,
                         &res) == SM_OK) {
        const double gamma = 1.0 - std::hypot(re, im);
        rep.add_summary("half_deck.n", fmt(std::uint64_t{n}));
        rep.add_summary("half_deck.k", fmt(std::uint64_t{half}));
        rep.add_summary("half_deck.residual", fmt(res));
        rep.add_summary("half_deck.gamma_times_n_over_log2", fmt(gamma * nd / std::log(2.0)));
        rep.add_summary("half_deck.theta_over_w", fmt(std::atan2(im, re) / w));
      } else {
        rep.add_summary("half_deck.note", std::string("no root found: ") + sm_last_error());
      }
    }
  }
  rep.add_summary("a", "0.5");
  rep.add_summary("gamma_band", "[0.5 * 2 pi^2 k (k-1) / n^3, 1.5 * 2 pi^2 k (k+1) / n^3]");
  return rep;
}

// --- couplings -------------------------------------------------------------------------

std::vector<std::uint64_t> times_of(const std::vector<sm_coupling_sample>& s) {
  std::vector<std::uint64_t> t;
  for (const auto& x : s) t.push_back(x.T);
  return t;
}

Report couple_b2t(const ExperimentConfig& cfg) {
  Report rep("couple-b2t");
  const std::size_t n = cfg.n.value_or(32);
  const std::size_t k = cfg.k.value_or(2);
  const std::size_t samples = cfg.samples.value_or(300);
  if (k < 2 || k > n) throw ConfigError("couple-b2t needs 2 <= k <= n");
  double bound = 0.0;
  call(sm_b2t_upper_bound(n, k, &bound), "upper bound");
  const auto start = make_deck(n, false);
  std::vector<sm_coupling_sample> s(samples);
  call(sm_couple_b2t_batch(n, k, start.get(), samples, *cfg.seed, cfg.cap.value_or(0), cfg.threads.value_or(0),
                           s.data()),
       "bottom-to-top coupling");
  const auto times = times_of(s);
  std::vector<std::uint64_t> grid;
  const std::vector<double> multiples = {0.1, 0.25, 0.5, 0.75, 1.0, 1.5, 2.0, 3.0, 4.0};
  for (double m : multiples) grid.push_back(static_cast<std::uint64_t>(std::floor(m * bound)));
  std::vector<sm_survival_point> surv(grid.size());
  sm_coupling_summary sum{};
  call(sm_coupling_quantiles(times.data(), times.size(), grid.data(), grid.size(), &sum, surv.data()), "quantiles");

  rep.set_header({"t", "t_over_bound", "survival", "half_width"});
  for (std::size_t i = 0; i < grid.size(); ++i)
    rep.add_row({fmt(surv[i].t), fmt(multiples[i]), fmt(surv[i].fraction), fmt(surv[i].half_width)});

  const double nd = static_cast<double>(n);
  const double kd = static_cast<double>(k);
  const double lower = nd * nd * nd * std::log(nd) / (4.0 * kPi * kPi * kd * (kd - 1.0));
  const bool history = std::all_of(s.begin(), s.end(), [](const auto& x) { return x.matched_history_ok != 0; });
  const bool stayed = std::all_of(s.begin(), s.end(), [](const auto& x) { return x.stayed_coupled != 0; });
  const double surv4 = surv.back().fraction;
  rep.check(history, "matched-set history violated in some sample");
  rep.check(stayed, "decks separated after coupling in some sample");
  rep.check(surv4 <= 0.05, "P(T > 4 * upper bound) > 0.05");
  rep.check(sum.median >= 0.5 * lower, "median T below half the lower-bound value");

  rep.add_summary("n", fmt(std::uint64_t{n}));
  rep.add_summary("k", fmt(std::uint64_t{k}));
  rep.add_summary("samples", fmt(std::uint64_t{samples}));
  rep.add_summary("seed", fmt(*cfg.seed));
  rep.add_summary("mean", fmt(sum.mean));
  rep.add_summary("median", fmt(sum.median));
  rep.add_summary("q95", fmt(sum.q95));
  rep.add_summary("max", fmt(sum.max));
  rep.add_summary("upper_bound", fmt(bound));
  rep.add_summary("lower_bound_value", fmt(lower));
  rep.add_summary("survival_at_bound", fmt(surv[4].fraction));
  rep.add_summary("survival_at_4x_bound", fmt(surv4));
  rep.add_summary("matched_history_ok", fmt_bool(history));
  rep.add_summary("stayed_coupled", fmt_bool(stayed));
  return rep;
}

Report couple_mtf(const ExperimentConfig& cfg) {
  Report rep("couple-mtf");
  const std::size_t n = cfg.n.value_or(8);
  const char f = cfg.family.value_or('a');
  const std::size_t samples = cfg.samples.value_or(2000);
  const auto w = weights(f, n);
  sm_mtf_bounds b{};
  call(sm_mtf_bounds_compute(w.data(), n, &b), "bounds");
  const auto spec = make_spec(SM_MOVE_TO_FRONT, w);
  const auto start = make_deck(n, true);
  std::vector<sm_coupling_sample> s(samples);
  call(sm_couple_mtf_batch(spec.get(), start.get(), samples, *cfg.seed, cfg.cap.value_or(0), cfg.threads.value_or(0),
                           s.data()),
       "move-to-front coupling");
  const auto times = times_of(s);
  std::vector<std::uint64_t> grid;
  for (std::uint64_t t = 0; t <= 2 * b.tau_u; ++t) grid.push_back(t);
  std::vector<sm_survival_point> surv(grid.size());
  sm_coupling_summary sum{};
  call(sm_coupling_quantiles(times.data(), times.size(), grid.data(), grid.size(), &sum, surv.data()), "quantiles");

  rep.set_header({"t", "survival", "half_width", "coupon_bound", "within_bound"});
  const double N = static_cast<double>(samples);
  bool all_within = true;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double cb = 0.0;
    call(sm_coupon_sum(w.data(), n, static_cast<double>(grid[i]), &cb), "coupon sum");
    const double capped = std::min(cb, 1.0);
    const double sigma = std::sqrt(capped * (1.0 - capped) / N);
    const bool within = surv[i].fraction <= cb + 4.0 * sigma;
    all_within = all_within && within;
    if (!within) rep.check(false, "t=" + fmt(grid[i]) + ": survival above the coupon bound");
    rep.add_row({fmt(grid[i]), fmt(surv[i].fraction), fmt(surv[i].half_width), fmt(cb), fmt_bool(within)});
  }
  if (all_within) rep.check(true, "survival within the coupon bound");
  const double at_tau = surv[b.tau_u].fraction;
  const double sigma_tau = std::sqrt(0.25 * 0.75 / N);
  rep.check(at_tau <= 0.25 + 3.0 * sigma_tau, "P(T > tau_u) > 1/4 + 3 sigma");
  const bool history = std::all_of(s.begin(), s.end(), [](const auto& x) { return x.matched_history_ok != 0; });
  const bool stayed = std::all_of(s.begin(), s.end(), [](const auto& x) { return x.stayed_coupled != 0; });
  rep.check(history, "coupling time after all-but-one-touched time in some sample");
  rep.check(stayed, "decks separated after coupling in some sample");

  rep.add_summary("n", fmt(std::uint64_t{n}));
  rep.add_summary("family", std::string(1, f));
  rep.add_summary("samples", fmt(std::uint64_t{samples}));
  rep.add_summary("seed", fmt(*cfg.seed));
  rep.add_summary("tau_u", fmt(b.tau_u));
  rep.add_summary("survival_at_tau_u", fmt(at_tau));
  rep.add_summary("mean", fmt(sum.mean));
  rep.add_summary("median", fmt(sum.median));
  rep.add_summary("q95", fmt(sum.q95));
  rep.add_summary("matched_history_ok", fmt_bool(history));
  return rep;
}

// --- u-stat -------------------------------------------------------------------------------

Report u_stat(const ExperimentConfig& cfg) {
  Report rep("u-stat");
  const std::size_t n = cfg.n.value_or(100);
  const std::size_t traces = cfg.samples.value_or(10000);
  const std::uint64_t horizon = cfg.horizon.value_or(10000);
  if (n % 2 != 0 || n < 4) throw ConfigError("u-stat needs even n >= 4");
  if (traces < 2) throw ConfigError("u-stat needs at least two traces (samples)");
  sm_u_convention conv{};
  call(sm_u_convention_check(n, &conv), "U convention");
  std::vector<std::uint64_t> checkpoints;
  for (std::uint64_t i = 0; i <= 10; ++i) checkpoints.push_back(horizon * i / 10);
  std::vector<sm_u_variance> v(checkpoints.size());
  call(sm_u_stat_variance(n, traces, checkpoints.data(), checkpoints.size(), *cfg.seed, cfg.threads.value_or(0),
                          v.data()),
       "U variance");
  rep.set_header({"t", "mean", "variance", "variance_se", "variance_limit", "ok"});
  for (const auto& x : v) {
    const double limit = static_cast<double>(x.t) + 3.0 * x.variance_se;
    const bool ok = x.variance <= limit;
    rep.check(ok, "t=" + fmt(x.t) + ": sample Var U_t exceeds t + 3 se");
    rep.add_row({fmt(x.t), fmt(x.mean), fmt(x.variance), fmt(x.variance_se), fmt(limit), fmt_bool(ok)});
  }
  const double worst_mean = std::min(conv.max_abs_mean_at_k, conv.max_abs_mean_at_k_minus_one);
  rep.check(worst_mean <= 1e-12, "no U convention has mean-zero increments");
  rep.check(v.back().max_abs_conditional_mean <= 1e-12, "nonzero conditional mean of V along a trace");
  rep.add_summary("n", fmt(std::uint64_t{n}));
  rep.add_summary("k", fmt(std::uint64_t{n / 2}));
  rep.add_summary("traces", fmt(std::uint64_t{traces}));
  rep.add_summary("seed", fmt(*cfg.seed));
  rep.add_summary("convention", conv.chosen_at_k ? "U = Z + (Z - k)_+ - t mod k" : "U = Z + (Z - k + 1)_+ - t mod k");
  rep.add_summary("max_abs_mean_at_k", fmt(conv.max_abs_mean_at_k));
  rep.add_summary("max_abs_mean_at_k_minus_one", fmt(conv.max_abs_mean_at_k_minus_one));
  return rep;
}

// --- open-k09n ------------------------------------------------------------------------------

Report open_k09n(const ExperimentConfig& cfg) {
  Report rep("open-k09n");
  rep.set_exploratory();
  const std::size_t n = cfg.n.value_or(10);
  if (n > 512) throw ConfigError("open-k09n computes dense single-card spectra: need n <= 512");
  rep.set_header({"n", "k", "k_over_n", "second_mag", "second_arg", "single_card_gap", "exact_mixing_time"});
  std::size_t best_k = n;
  double best_gap = -1.0;
  for (std::size_t k = 1; k <= n; ++k) {
    sm_spec* raw = nullptr;
    call(sm_spec_bottom_to_top(n, k, &raw), "spec");
    const SpecPtr spec(raw);
    std::vector<double> mags(n), args(n);
    call(sm_single_card_spectrum(spec.get(), mags.data(), args.data(), n), "spectrum");
    const double second = n > 1 ? mags[1] : 0.0;
    const double gap = 1.0 - second;
    if (gap > best_gap) best_gap = gap, best_k = k;
    std::string exact = "";
    if (n <= 7 && k >= 2) {
      const auto start = make_deck(n, false);
      std::uint64_t t = 0;
      call(sm_exact_mixing_time(spec.get(), start.get(), 0.25, 1'000'000, &t), "exact mixing time");
      exact = fmt(t);
    }
    rep.add_row({fmt(std::uint64_t{n}), fmt(std::uint64_t{k}), fmt(static_cast<double>(k) / static_cast<double>(n)),
                 fmt(second), fmt(n > 1 ? args[1] : 0.0), fmt(gap), exact});
  }
  rep.add_summary("n", fmt(std::uint64_t{n}));
  rep.add_summary("k_nearest_0.9n", fmt(static_cast<std::uint64_t>(std::lround(0.9 * static_cast<double>(n)))));
  rep.add_summary("k_with_largest_single_card_gap", fmt(std::uint64_t{best_k}));
  return rep;
}

}  // namespace

Report run_preset(const ExperimentConfig& cfg) {
  validate(cfg);
  const std::string& p = cfg.preset;
  Report rep = p == "theorem-3-1"          ? theorem_3_1(cfg)
               : p == "tau-u"              ? tau_u_table(cfg)
               : p == "spectral-b2t"       ? spectral_b2t(cfg)
               : p == "spectral-two-point" ? spectral_two_point(cfg)
               : p == "couple-b2t"         ? couple_b2t(cfg)
               : p == "couple-mtf"         ? couple_mtf(cfg)
               : p == "u-stat"             ? u_stat(cfg)
               : p == "open-k09n"          ? open_k09n(cfg)
                                           : throw ConfigError("unknown preset '" + p + "'");
  for (auto& [k, v] : cfg.describe()) rep.add_summary(k, v);
  return rep;
}

}  // namespace shufflemix::cli
