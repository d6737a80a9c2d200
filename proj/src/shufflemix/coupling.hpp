#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "shufflemix/deck.hpp"
#include "shufflemix/rng.hpp"
#include "shufflemix/shuffle_spec.hpp"

namespace shufflemix {

struct CouplingSample {
  std::uint64_t T = 0;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  std::optional<std::uint64_t> touched_all_but_one;  // move-to-front only
  bool matched_history_ok = true;
  bool stayed_coupled = true;  // X_t = Y_t for the 100 steps after T
};

// Steps simulated past T to confirm the decks stay equal.
inline constexpr std::uint64_t kCouplingTail = 100;

// --- move-to-front --------------------------------------------------------------

// Draws a deck from the move-to-front stationary law: the top card with law p,
// then the next from the renormalised remainder, and so on.
Deck sample_mtf_stationary(const ShuffleSpec& spec, RngStream& rng);

// Same card moved to the top in both decks. matched_history_ok records that
// the decks agreed no later than the first time all but one card had been touched.
CouplingSample couple_mtf_from(const ShuffleSpec& spec, Deck x, Deck y, RngStream& rng, std::uint64_t cap);
// Partner deck drawn from the stationary law.
CouplingSample couple_mtf(const ShuffleSpec& spec, const Deck& x0, RngStream& rng, std::uint64_t cap);
std::uint64_t default_mtf_cap(const ShuffleSpec& spec);

// --- bottom-to-top ----------------------------------------------------------------

// Y(c) = (X(c) - t) mod n in 0-indexed positions.
Deck shift_frame(const Deck& deck, std::uint64_t t);

// One step of the dynamics seen in the shifted frame at time t: the card at
// 0-indexed position (n - k + pick - t) mod n moves to (n - 1 - t) mod n and the
// window cards after it move back one. pick in [0, k).
void windowed_step(Deck& y, std::size_t k, std::uint64_t t, std::size_t pick);

// Coupling for uniform picks among the bottom k positions. The first deck picks
// uniformly; a card at the bottom of both decks is picked in both; otherwise the
// second deck picks uniformly among its bottom cards that are not at the bottom of
// the first (ordered by position). Runs in the raw frame: agreement of the two
// decks does not depend on the frame.
//
// matched_history_ok: a card picked while at the bottom of both decks is matched
// afterwards, and a card that has been so picked is matched whenever it re-enters
// the bottom region.
CouplingSample couple_b2t_from(std::size_t k, Deck x, Deck y, RngStream& rng, std::uint64_t cap);
// Partner deck uniform on S_n.
CouplingSample couple_b2t(std::size_t n, std::size_t k, const Deck& x0, RngStream& rng, std::uint64_t cap);
// n^3 log n / (pi^2 k (k-1)).
double b2t_upper_bound_value(std::size_t n, std::size_t k);
std::uint64_t default_b2t_cap(std::size_t n, std::size_t k);

// Samples on streams 0..samples-1 of master_seed, in stream order. cap = 0 uses
// the default cap; threads = 0 uses the hardware concurrency.
std::vector<CouplingSample> run_mtf_batch(const ShuffleSpec& spec, const Deck& x0, std::size_t samples,
                                          std::uint64_t master_seed, std::uint64_t cap, unsigned threads = 0);
std::vector<CouplingSample> run_b2t_batch(std::size_t n, std::size_t k, const Deck& x0, std::size_t samples,
                                          std::uint64_t master_seed, std::uint64_t cap, unsigned threads = 0);

// --- single-card cycles ------------------------------------------------------------

struct CycleStats {
  std::size_t n = 0;
  std::size_t k = 0;
  std::uint64_t cycles = 0;
  double displacement_mean = 0.0;
  double displacement_var = 0.0;
  double duration_mean = 0.0;
  double duration_var = 0.0;
  std::int64_t max_displacement = 0;
  std::uint64_t min_duration = 0;
};

// Follows one card of the bottom-to-top chain from one pick to the next,
// `cycles` times. Displacement is the change of its shifted-frame position.
CycleStats cycle_stats(std::size_t n, std::size_t k, std::uint64_t cycles, RngStream& rng);

// --- U statistic (picks at positions n/2 and n, weight 1/2 each) ---------------------

// Which positive part enters U = Z + (Z - c)_+ - t (mod k), k = n/2, Z 0-indexed.
enum class UConvention { kAtK, kAtKMinusOne };

struct UConventionCheck {
  UConvention chosen = UConvention::kAtK;
  double max_abs_mean_at_k = 0.0;
  double max_abs_mean_at_k_minus_one = 0.0;
};

// Exhaustive two-branch enumeration of E[V | Z] at every Z for both conventions.
UConventionCheck select_u_convention(std::size_t n);

// U increment from position z to z_next, centred into (-k/2, k/2].
int u_increment(std::size_t z, std::size_t z_next, std::size_t k, UConvention conv);

struct UStatTrace {
  std::size_t n = 0;
  std::size_t k = 0;
  UConvention convention = UConvention::kAtK;
  std::vector<std::uint32_t> Z;
  std::vector<std::int64_t> U;  // unwrapped: U_0 + sum of V
  std::vector<int> V;
  double max_abs_conditional_mean = 0.0;
};

// Follows the card with the given label (starting at position card - 1) for t_max steps.
UStatTrace u_statistic_trace(std::size_t n, std::size_t card, std::uint64_t t_max, RngStream& rng);

struct UVarianceSummary {
  std::size_t traces = 0;
  std::uint64_t t = 0;
  double mean = 0.0;
  double variance = 0.0;
  double variance_se = 0.0;
  double max_abs_conditional_mean = 0.0;
};

// Var(U_t - U_0) at each checkpoint t (nondecreasing) over `traces` independent
// traces from the top card.
std::vector<UVarianceSummary> u_stat_variance(std::size_t n, std::size_t traces,
                                              std::span<const std::uint64_t> checkpoints, std::uint64_t master_seed,
                                              unsigned threads = 0);

// --- summaries ------------------------------------------------------------------------

struct SurvivalPoint {
  std::uint64_t t = 0;
  double fraction = 0.0;    // share of samples with T > t
  double half_width = 0.0;  // 1.96 sqrt(f (1 - f) / N)
};

struct CouplingSummary {
  std::size_t count = 0;
  double mean = 0.0;
  double median = 0.0;  // mid-rank for even counts
  std::uint64_t q95 = 0;  // nearest rank ceil(0.95 N)
  std::uint64_t max = 0;
  std::vector<SurvivalPoint> survival;
};

// grid empty: 20 evenly spaced points up to the largest T.
CouplingSummary coupling_quantiles(std::span<const std::uint64_t> times, std::span<const std::uint64_t> grid = {});
CouplingSummary coupling_quantiles(std::span<const CouplingSample> samples, std::span<const std::uint64_t> grid = {});

}  // namespace shufflemix
