#include "shufflemix/coupling.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <thread>

#include "shufflemix/bounds.hpp"
#include "shufflemix/errors.hpp"

namespace shufflemix {
namespace {

unsigned worker_count(unsigned requested, std::size_t jobs) {
  unsigned t = requested != 0 ? requested : std::max(1u, std::thread::hardware_concurrency());
  return static_cast<unsigned>(std::min<std::size_t>(t, std::max<std::size_t>(jobs, 1)));
}

// Runs job(i) for i in [0, count) on a pool of threads.
template <class Job>
void parallel_for(std::size_t count, unsigned threads, Job&& job) {
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  auto worker = [&] {
    for (std::size_t i = next++; i < count && !failed; i = next++) {
      try {
        job(i);
      } catch (...) {
        if (!failed.exchange(true)) failure = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  const unsigned n = worker_count(threads, count);
  for (unsigned w = 1; w < n; ++w) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace

// --- move-to-front -----------------------------------------------------------------

Deck sample_mtf_stationary(const ShuffleSpec& spec, RngStream& rng) {
  if (spec.mode() != ShuffleMode::kMoveToFront) throw InvalidArgument("stationary sampling needs a move-to-front spec");
  const std::size_t n = spec.size();
  std::vector<Card> remaining(n);
  for (std::size_t i = 0; i < n; ++i) remaining[i] = static_cast<Card>(i + 1);
  std::vector<Card> order;
  order.reserve(n);
  while (!remaining.empty()) {
    double total = 0.0;
    for (Card c : remaining) total += spec.weight(c);
    const double u = rng.uniform() * total;
    double acc = 0.0;
    std::size_t pick = remaining.size() - 1;
    for (std::size_t i = 0; i < remaining.size(); ++i) {
      acc += spec.weight(remaining[i]);
      if (u < acc) {
        pick = i;
        break;
      }
    }
    order.push_back(remaining[pick]);
    remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(pick));
  }
  return Deck::from_positions(order);
}

CouplingSample couple_mtf_from(const ShuffleSpec& spec, Deck x, Deck y, RngStream& rng, std::uint64_t cap) {
  if (spec.mode() != ShuffleMode::kMoveToFront) throw InvalidArgument("couple_mtf needs a move-to-front spec");
  const std::size_t n = spec.size();
  if (x.size() != n || y.size() != n) throw InvalidArgument("deck size does not match the spec");

  CouplingSample out;
  out.seed = rng.master_seed();
  out.stream = rng.stream_index();
  std::vector<char> touched(n + 1, 0);
  std::size_t touched_count = 0;
  std::optional<std::uint64_t> T;
  if (n <= 1) out.touched_all_but_one = 0;

  for (std::uint64_t t = 0;; ++t) {
    const bool equal = x == y;
    if (!T && equal) T = t;
    if (T && !equal) out.stayed_coupled = false;
    if (!out.touched_all_but_one && touched_count + 1 >= n) out.touched_all_but_one = t;
    if (T && out.touched_all_but_one && t >= *T + kCouplingTail) break;
    if (t >= cap && (!T || !out.touched_all_but_one))
      throw CapExceeded("move-to-front coupling hit the step cap", static_cast<double>(t));
    const Card c = static_cast<Card>(spec.sample(rng));
    x.move_to_top(x.position_of(c));
    y.move_to_top(y.position_of(c));
    if (!touched[c]) {
      touched[c] = 1;
      ++touched_count;
    }
  }
  out.T = *T;
  out.matched_history_ok = out.T <= *out.touched_all_but_one;
  return out;
}

CouplingSample couple_mtf(const ShuffleSpec& spec, const Deck& x0, RngStream& rng, std::uint64_t cap) {
  Deck y0 = sample_mtf_stationary(spec, rng);
  return couple_mtf_from(spec, x0, std::move(y0), rng, cap);
}

std::uint64_t default_mtf_cap(const ShuffleSpec& spec) {
  return 100 * tau_u(spec.weights()) + 100 * spec.size();
}

// --- bottom-to-top ----------------------------------------------------------------------

Deck shift_frame(const Deck& deck, std::uint64_t t) {
  const std::size_t n = deck.size();
  const std::size_t back = static_cast<std::size_t>(t % n);
  std::vector<Card> out(n);
  for (Position p = 1; p <= n; ++p) out[(p - 1 + n - back) % n] = deck.card_at(p);
  return Deck::from_positions(out);
}

void windowed_step(Deck& y, std::size_t k, std::uint64_t t, std::size_t pick) {
  const std::size_t n = y.size();
  if (k < 1 || k > n || pick >= k) throw InvalidArgument("windowed_step needs 1 <= k <= n and pick < k");
  const std::size_t back = static_cast<std::size_t>(t % n);
  const std::size_t start = (n - k + pick + n - back) % n;
  std::vector<Card> cards = y.by_position();
  const Card picked = cards[start];
  for (std::size_t j = 0; j + 1 < k - pick; ++j) cards[(start + j) % n] = cards[(start + j + 1) % n];
  cards[(n - 1 + n - back) % n] = picked;
  y = Deck::from_positions(cards);
}

CouplingSample couple_b2t_from(std::size_t k, Deck x, Deck y, RngStream& rng, std::uint64_t cap) {
  const std::size_t n = x.size();
  if (y.size() != n) throw InvalidArgument("decks differ in size");
  if (k < 2 || k > n) throw InvalidArgument("bottom-to-top coupling needs 2 <= k <= n");

  CouplingSample out;
  out.seed = rng.master_seed();
  out.stream = rng.stream_index();
  const Position bottom = n - k + 1;
  std::size_t mismatch = 0;
  for (Card c = 1; c <= n; ++c) mismatch += x.position_of(c) != y.position_of(c);

  std::vector<char> settled(n + 1, 0);
  std::vector<std::uint64_t> stamp(n + 1, 0);
  std::vector<Card> region;
  region.reserve(2 * k);
  std::optional<std::uint64_t> T;

  for (std::uint64_t t = 0;; ++t) {
    if (!T && mismatch == 0) T = t;
    if (T && mismatch != 0) out.stayed_coupled = false;
    if (T && t >= *T + kCouplingTail) break;
    if (!T && t >= cap) throw CapExceeded("bottom-to-top coupling hit the step cap", static_cast<double>(t));

    // Only cards at the bottom of either deck can change matched status.
    region.clear();
    for (Position p = bottom; p <= n; ++p) {
      for (const Card c : {x.card_at(p), y.card_at(p)}) {
        if (stamp[c] == t + 1) continue;
        stamp[c] = t + 1;
        region.push_back(c);
        mismatch -= x.position_of(c) != y.position_of(c);
      }
    }
    if (bottom > 1) {
      const Card ex = x.card_at(bottom - 1);
      const Card ey = y.card_at(bottom - 1);
      if ((settled[ex] || settled[ey]) && ex != ey) out.matched_history_ok = false;
    }

    const Position qx = bottom + static_cast<Position>(rng.uniform_index(k));
    const Card c = x.card_at(qx);
    const bool shared = y.position_of(c) >= bottom;
    Card cy = c;
    if (!shared) {
      std::size_t count = 0;
      for (Position p = bottom; p <= n; ++p) count += x.position_of(y.card_at(p)) < bottom;
      std::size_t j = static_cast<std::size_t>(rng.uniform_index(count));
      for (Position p = bottom; p <= n; ++p) {
        const Card d = y.card_at(p);
        if (x.position_of(d) < bottom && j-- == 0) {
          cy = d;
          break;
        }
      }
    }
    x.move_to_top(qx);
    y.move_to_top(y.position_of(cy));
    if (shared) {
      settled[c] = 1;
      if (x.position_of(c) != y.position_of(c)) out.matched_history_ok = false;
    }
    for (const Card d : region) mismatch += x.position_of(d) != y.position_of(d);
  }
  out.T = *T;
  return out;
}

CouplingSample couple_b2t(std::size_t n, std::size_t k, const Deck& x0, RngStream& rng, std::uint64_t cap) {
  if (x0.size() != n) throw InvalidArgument("deck size does not match n");
  Deck y0 = random_deck(n, rng);
  return couple_b2t_from(k, x0, std::move(y0), rng, cap);
}

double b2t_upper_bound_value(std::size_t n, std::size_t k) {
  if (k < 2 || k > n) throw InvalidArgument("bottom-to-top bound needs 2 <= k <= n");
  const double nd = static_cast<double>(n);
  const double kd = static_cast<double>(k);
  return nd * nd * nd * std::log(nd) / (std::numbers::pi * std::numbers::pi * kd * (kd - 1.0));
}

std::uint64_t default_b2t_cap(std::size_t n, std::size_t k) {
  return static_cast<std::uint64_t>(std::ceil(100.0 * b2t_upper_bound_value(n, k))) + 100 * n;
}

std::vector<CouplingSample> run_mtf_batch(const ShuffleSpec& spec, const Deck& x0, std::size_t samples,
                                          std::uint64_t master_seed, std::uint64_t cap, unsigned threads) {
  if (cap == 0) cap = default_mtf_cap(spec);
  std::vector<std::optional<CouplingSample>> slots(samples);
  parallel_for(samples, threads, [&](std::size_t i) {
    RngStream rng(master_seed, i);
    slots[i] = couple_mtf(spec, x0, rng, cap);
  });
  std::vector<CouplingSample> out;
  out.reserve(samples);
  for (auto& s : slots) out.push_back(*s);
  return out;
}

std::vector<CouplingSample> run_b2t_batch(std::size_t n, std::size_t k, const Deck& x0, std::size_t samples,
                                          std::uint64_t master_seed, std::uint64_t cap, unsigned threads) {
  if (cap == 0) cap = default_b2t_cap(n, k);
  std::vector<std::optional<CouplingSample>> slots(samples);
  parallel_for(samples, threads, [&](std::size_t i) {
    RngStream rng(master_seed, i);
    slots[i] = couple_b2t(n, k, x0, rng, cap);
  });
  std::vector<CouplingSample> out;
  out.reserve(samples);
  for (auto& s : slots) out.push_back(*s);
  return out;
}

// --- cycles --------------------------------------------------------------------------------

CycleStats cycle_stats(std::size_t n, std::size_t k, std::uint64_t cycles, RngStream& rng) {
  if (k < 1 || k > n) throw InvalidArgument("cycle_stats needs 1 <= k <= n");
  if (cycles == 0) throw InvalidArgument("cycle_stats needs at least one cycle");
  CycleStats st;
  st.n = n;
  st.k = k;
  st.cycles = cycles;
  st.min_duration = ~std::uint64_t{0};
  st.max_displacement = std::numeric_limits<std::int64_t>::min();
  // Welford accumulators.
  double dm = 0.0, d2 = 0.0, um = 0.0, u2 = 0.0;
  const std::size_t bottom = n - k + 1;
  for (std::uint64_t c = 1; c <= cycles; ++c) {
    // Card has just been moved to the top.
    std::size_t pos = 1;
    std::uint64_t duration = 0;
    for (;;) {
      ++duration;
      const std::size_t q = bottom + static_cast<std::size_t>(rng.uniform_index(k));
      if (q == pos) break;
      if (q > pos) ++pos;
    }
    // Shifted position falls by the duration (mod n): displacement k - G.
    const std::int64_t g = static_cast<std::int64_t>(duration) - static_cast<std::int64_t>(n - k);
    const std::int64_t disp = static_cast<std::int64_t>(k) - g;
    st.max_displacement = std::max(st.max_displacement, disp);
    st.min_duration = std::min(st.min_duration, duration);
    const double cd = static_cast<double>(c);
    const double delta_d = static_cast<double>(disp) - dm;
    dm += delta_d / cd;
    d2 += delta_d * (static_cast<double>(disp) - dm);
    const double delta_u = static_cast<double>(duration) - um;
    um += delta_u / cd;
    u2 += delta_u * (static_cast<double>(duration) - um);
  }
  const double denom = cycles > 1 ? static_cast<double>(cycles - 1) : 1.0;
  st.displacement_mean = dm;
  st.displacement_var = d2 / denom;
  st.duration_mean = um;
  st.duration_var = u2 / denom;
  return st;
}

// --- U statistic ---------------------------------------------------------------------------

namespace {

std::size_t u_next(std::size_t z, std::size_t q) { return z == q ? 0 : (z < q ? z + 1 : z); }

std::size_t u_raw(std::size_t z, std::size_t k, UConvention conv) {
  const std::size_t c = conv == UConvention::kAtK ? k : k - 1;
  return z + (z > c ? z - c : 0);
}

double conditional_mean(std::size_t z, std::size_t n, UConvention conv) {
  const std::size_t k = n / 2;
  return 0.5 * (u_increment(z, u_next(z, k - 1), k, conv) + u_increment(z, u_next(z, n - 1), k, conv));
}

void require_even(std::size_t n) {
  if (n < 4 || n % 2 != 0) throw InvalidArgument("U statistic needs even n >= 4");
}

}  // namespace

int u_increment(std::size_t z, std::size_t z_next, std::size_t k, UConvention conv) {
  const auto kk = static_cast<std::int64_t>(k);
  std::int64_t d = static_cast<std::int64_t>(u_raw(z_next, k, conv)) - static_cast<std::int64_t>(u_raw(z, k, conv)) - 1;
  d %= kk;
  if (d < 0) d += kk;
  if (2 * d > kk) d -= kk;
  return static_cast<int>(d);
}

UConventionCheck select_u_convention(std::size_t n) {
  require_even(n);
  UConventionCheck out;
  for (std::size_t z = 0; z < n; ++z) {
    out.max_abs_mean_at_k = std::max(out.max_abs_mean_at_k, std::abs(conditional_mean(z, n, UConvention::kAtK)));
    out.max_abs_mean_at_k_minus_one =
        std::max(out.max_abs_mean_at_k_minus_one, std::abs(conditional_mean(z, n, UConvention::kAtKMinusOne)));
  }
  out.chosen = out.max_abs_mean_at_k <= out.max_abs_mean_at_k_minus_one ? UConvention::kAtK : UConvention::kAtKMinusOne;
  return out;
}

UStatTrace u_statistic_trace(std::size_t n, std::size_t card, std::uint64_t t_max, RngStream& rng) {
  require_even(n);
  if (card < 1 || card > n) throw InvalidArgument("card label out of range");
  UStatTrace tr;
  tr.n = n;
  tr.k = n / 2;
  tr.convention = select_u_convention(n).chosen;
  std::size_t z = card - 1;
  std::int64_t u = static_cast<std::int64_t>(u_raw(z, tr.k, tr.convention));
  tr.Z.push_back(static_cast<std::uint32_t>(z));
  tr.U.push_back(u);
  for (std::uint64_t t = 0; t < t_max; ++t) {
    tr.max_abs_conditional_mean = std::max(tr.max_abs_conditional_mean, std::abs(conditional_mean(z, n, tr.convention)));
    const std::size_t q = rng.uniform_index(2) == 0 ? tr.k - 1 : n - 1;
    const std::size_t z_next = u_next(z, q);
    const int v = u_increment(z, z_next, tr.k, tr.convention);
    u += v;
    z = z_next;
    tr.V.push_back(v);
    tr.Z.push_back(static_cast<std::uint32_t>(z));
    tr.U.push_back(u);
  }
  return tr;
}

std::vector<UVarianceSummary> u_stat_variance(std::size_t n, std::size_t traces,
                                              std::span<const std::uint64_t> checkpoints, std::uint64_t master_seed,
                                              unsigned threads) {
  require_even(n);
  if (traces < 2) throw InvalidArgument("variance needs at least two traces");
  if (checkpoints.empty() || !std::is_sorted(checkpoints.begin(), checkpoints.end()))
    throw InvalidArgument("checkpoints must be nonempty and nondecreasing");
  const std::size_t k = n / 2;
  const std::size_t points = checkpoints.size();
  const UConvention conv = select_u_convention(n).chosen;
  std::vector<double> cond(n);
  for (std::size_t z = 0; z < n; ++z) cond[z] = std::abs(conditional_mean(z, n, conv));

  // drift[i * points + c]: U at checkpoint c minus U_0 on trace i.
  std::vector<std::int64_t> drift(traces * points);
  std::vector<double> worst(traces, 0.0);
  parallel_for(traces, threads, [&](std::size_t i) {
    RngStream rng(master_seed, i);
    std::size_t z = 0;
    std::int64_t u = 0;
    double w = 0.0;
    std::uint64_t s = 0;
    for (std::size_t c = 0; c < points; ++c) {
      for (; s < checkpoints[c]; ++s) {
        w = std::max(w, cond[z]);
        const std::size_t z_next = u_next(z, rng.uniform_index(2) == 0 ? k - 1 : n - 1);
        u += u_increment(z, z_next, k, conv);
        z = z_next;
      }
      drift[i * points + c] = u;
    }
    worst[i] = w;
  });

  const double N = static_cast<double>(traces);
  const double worst_all = *std::max_element(worst.begin(), worst.end());
  std::vector<UVarianceSummary> out;
  for (std::size_t c = 0; c < points; ++c) {
    UVarianceSummary s;
    s.traces = traces;
    s.t = checkpoints[c];
    double mean = 0.0;
    for (std::size_t i = 0; i < traces; ++i) mean += static_cast<double>(drift[i * points + c]);
    mean /= N;
    double m2 = 0.0, m4 = 0.0;
    for (std::size_t i = 0; i < traces; ++i) {
      const double e = static_cast<double>(drift[i * points + c]) - mean;
      m2 += e * e;
      m4 += e * e * e * e;
    }
    m2 /= N;
    m4 /= N;
    s.mean = mean;
    s.variance = m2 * N / (N - 1.0);
    // Large-sample standard error of the sample variance.
    s.variance_se = std::sqrt(std::max(0.0, (m4 - m2 * m2 * (N - 3.0) / (N - 1.0)) / N));
    s.max_abs_conditional_mean = worst_all;
    out.push_back(s);
  }
  return out;
}

// --- summaries ------------------------------------------------------------------------------

CouplingSummary coupling_quantiles(std::span<const std::uint64_t> times, std::span<const std::uint64_t> grid) {
  if (times.empty()) throw InvalidArgument("coupling_quantiles needs at least one sample");
  std::vector<std::uint64_t> sorted(times.begin(), times.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t N = sorted.size();
  CouplingSummary s;
  s.count = N;
  double sum = 0.0;
  for (auto v : sorted) sum += static_cast<double>(v);
  s.mean = sum / static_cast<double>(N);
  s.median = N % 2 == 1 ? static_cast<double>(sorted[N / 2])
                        : 0.5 * (static_cast<double>(sorted[N / 2 - 1]) + static_cast<double>(sorted[N / 2]));
  const auto rank = static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(N)));
  s.q95 = sorted[std::max<std::size_t>(rank, 1) - 1];
  s.max = sorted.back();

  std::vector<std::uint64_t> points(grid.begin(), grid.end());
  if (points.empty()) {
    for (std::uint64_t i = 0; i <= 20; ++i) points.push_back(s.max * i / 20);
    points.erase(std::unique(points.begin(), points.end()), points.end());
  }
  for (std::uint64_t t : points) {
    const auto above = static_cast<double>(sorted.end() - std::upper_bound(sorted.begin(), sorted.end(), t));
    const double f = above / static_cast<double>(N);
    s.survival.push_back({t, f, 1.96 * std::sqrt(f * (1.0 - f) / static_cast<double>(N))});
  }
  return s;
}

CouplingSummary coupling_quantiles(std::span<const CouplingSample> samples, std::span<const std::uint64_t> grid) {
  std::vector<std::uint64_t> times;
  times.reserve(samples.size());
  for (const auto& s : samples) times.push_back(s.T);
  return coupling_quantiles(times, grid);
}

}  // namespace shufflemix
