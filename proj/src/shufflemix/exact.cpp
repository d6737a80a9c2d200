#include "shufflemix/exact.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <string>

#include "shufflemix/errors.hpp"
#include "shufflemix/numeric.hpp"

namespace shufflemix {

namespace {

void require_exact_size(std::size_t n, const char* what) {
  if (n == 0) throw InvalidArgument(std::string(what) + ": n must be at least 1");
  if (n > kMaxExactCards) {
    throw CapacityError(std::string(what) + ": n = " + std::to_string(n) + " exceeds the exact-state limit of " +
                        std::to_string(kMaxExactCards) + " cards");
  }
}

void require_permutation(std::span<const Card> order) {
  const std::size_t n = order.size();
  std::vector<bool> seen(n + 1, false);
  for (Card c : order) {
    if (c < 1 || c > n || seen[c]) throw InvalidArgument("order is not a permutation of 1.." + std::to_string(n));
    seen[c] = true;
  }
}

}  // namespace

std::uint64_t factorial(std::size_t n) {
  std::uint64_t f = 1;
  for (std::size_t i = 2; i <= n; ++i) f *= i;
  return f;
}

std::uint32_t lehmer_encode(std::span<const Card> by_position) {
  const std::size_t n = by_position.size();
  std::uint64_t rank = 0;
  for (std::size_t i = 0; i < n; ++i) {
    std::uint64_t smaller_after = 0;
    for (std::size_t j = i + 1; j < n; ++j) smaller_after += by_position[j] < by_position[i];
    rank = rank * (n - i) + smaller_after;
  }
  return static_cast<std::uint32_t>(rank);
}

std::vector<Card> lehmer_decode(std::uint32_t index, std::size_t n) {
  std::vector<Card> digits(n);
  std::uint64_t rest = index;
  for (std::size_t i = n; i-- > 0;) {
    const std::size_t radix = n - i;
    digits[i] = static_cast<Card>(rest % radix);
    rest /= radix;
  }
  if (rest != 0) throw InvalidArgument("lehmer_decode: index out of range for n = " + std::to_string(n));
  std::vector<Card> pool(n);
  for (std::size_t i = 0; i < n; ++i) pool[i] = static_cast<Card>(i + 1);
  std::vector<Card> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = pool[digits[i]];
    pool.erase(pool.begin() + digits[i]);
  }
  return out;
}

// --- PermDistribution -------------------------------------------------------

PermDistribution::PermDistribution(std::size_t n, std::vector<double> probs) : n_(n), probs_(std::move(probs)) {
  require_exact_size(n, "PermDistribution");
  if (probs_.size() != factorial(n)) throw InvalidArgument("PermDistribution: expected n! entries");
  CompensatedSum total;
  for (double p : probs_) {
    if (!(p >= 0.0)) throw InvalidArgument("PermDistribution: negative or NaN entry");
    total.add(p);
  }
  if (std::fabs(total.value() - 1.0) > 1e-10) {
    throw InvalidArgument("PermDistribution: entries sum to " + std::to_string(total.value()));
  }
}

PermDistribution PermDistribution::point_mass(const Deck& deck) {
  require_exact_size(deck.size(), "PermDistribution");
  std::vector<double> p(factorial(deck.size()), 0.0);
  const auto cards = deck.by_position();
  p[lehmer_encode(cards)] = 1.0;
  return PermDistribution(deck.size(), std::move(p));
}

PermDistribution PermDistribution::uniform(std::size_t n) {
  require_exact_size(n, "PermDistribution");
  const std::uint64_t states = factorial(n);
  return PermDistribution(n, std::vector<double>(states, 1.0 / static_cast<double>(states)));
}

double PermDistribution::at(const Deck& deck) const {
  if (deck.size() != n_) throw InvalidArgument("PermDistribution::at: size mismatch");
  const auto cards = deck.by_position();
  return probs_[lehmer_encode(cards)];
}

// --- TransitionOperator -----------------------------------------------------

TransitionOperator::TransitionOperator(const ShuffleSpec& spec) : n_(spec.size()) {
  require_exact_size(n_, "TransitionOperator");
  const std::uint64_t states = factorial(n_);
  succ_.resize(states * n_);
  prob_.resize(states * n_);
  std::vector<Card> moved(n_);
  for (std::uint32_t s = 0; s < states; ++s) {
    const auto cards = lehmer_decode(s, n_);
    for (std::size_t q = 0; q < n_; ++q) {
      moved[0] = cards[q];
      std::copy(cards.begin(), cards.begin() + q, moved.begin() + 1);
      std::copy(cards.begin() + q + 1, cards.end(), moved.begin() + q + 1);
      const std::size_t e = s * n_ + q;
      succ_[e] = lehmer_encode(moved);
      prob_[e] = spec.mode() == ShuffleMode::kMoveToFront ? spec.weight(cards[q]) : spec.weight(q + 1);
    }
  }
}

PermDistribution TransitionOperator::apply(const PermDistribution& dist) const {
  if (dist.cards() != n_) throw InvalidArgument("TransitionOperator::apply: size mismatch");
  const auto in = dist.probs();
  std::vector<double> out(in.size(), 0.0);
  for (std::size_t s = 0; s < in.size(); ++s) {
    const double mass = in[s];
    if (mass == 0.0) continue;
    for (std::size_t q = 0; q < n_; ++q) {
      const std::size_t e = s * n_ + q;
      out[succ_[e]] += mass * prob_[e];
    }
  }
  return PermDistribution(n_, std::move(out));
}

// --- stationary laws --------------------------------------------------------

double mtf_stationary_prob(const ShuffleSpec& spec, std::span<const Card> order) {
  if (spec.mode() != ShuffleMode::kMoveToFront) throw InvalidArgument("mtf_stationary_prob: spec is not move-to-front");
  if (order.size() != spec.size()) throw InvalidArgument("mtf_stationary_prob: order has the wrong length");
  require_permutation(order);
  double prob = 1.0;
  CompensatedSum used;
  // The last factor is p_{c_n} / p_{c_n} = 1 and is skipped.
  for (std::size_t j = 0; j + 1 < order.size(); ++j) {
    const double p = spec.weight(order[j]);
    prob *= p / (1.0 - used.value());
    used.add(p);
  }
  return prob;
}

PermDistribution mtf_stationary(const ShuffleSpec& spec) {
  require_exact_size(spec.size(), "mtf_stationary");
  const std::uint64_t states = factorial(spec.size());
  std::vector<double> p(states);
  for (std::uint32_t s = 0; s < states; ++s) p[s] = mtf_stationary_prob(spec, lehmer_decode(s, spec.size()));
  return PermDistribution(spec.size(), std::move(p));
}

PermDistribution stationary_distribution(const ShuffleSpec& spec) {
  if (spec.mode() == ShuffleMode::kMoveToFront) return mtf_stationary(spec);

  constexpr double kTolerance = 1e-13;
  constexpr std::uint64_t kMaxSweeps = 1'000'000;
  const TransitionOperator op(spec);
  PermDistribution cur = PermDistribution::point_mass(Deck(spec.size()));
  // The lazy operator (I + P) / 2 has the same fixed points and is aperiodic.
  for (std::uint64_t sweep = 0; sweep < kMaxSweeps; ++sweep) {
    const PermDistribution stepped = op.apply(cur);
    std::vector<double> next(cur.states());
    double diff = 0.0;
    for (std::size_t s = 0; s < next.size(); ++s) {
      next[s] = 0.5 * (cur[s] + stepped[s]);
      diff += std::fabs(next[s] - cur[s]);
    }
    cur = PermDistribution(spec.size(), std::move(next));
    if (diff <= kTolerance) return cur;
  }
  throw CapExceeded("stationary_distribution: fixed-point iteration did not converge", kTolerance);
}

PermDistribution evolve_distribution(const ShuffleSpec& spec, const PermDistribution& dist, std::uint64_t steps) {
  if (dist.cards() != spec.size()) throw InvalidArgument("evolve_distribution: size mismatch");
  require_exact_size(spec.size(), "evolve_distribution");
  if (steps == 0) return dist;
  const TransitionOperator op(spec);
  PermDistribution cur = dist;
  for (std::uint64_t t = 0; t < steps; ++t) cur = op.apply(cur);
  return cur;
}

double l1_distance(const PermDistribution& mu, const PermDistribution& nu) {
  if (mu.cards() != nu.cards()) throw InvalidArgument("distance: distributions over different S_n");
  CompensatedSum sum;
  for (std::size_t s = 0; s < mu.states(); ++s) sum.add(std::fabs(mu[s] - nu[s]));
  return sum.value();
}

double tv_distance(const PermDistribution& mu, const PermDistribution& nu) {
  return std::clamp(0.5 * l1_distance(mu, nu), 0.0, 1.0);
}

std::uint64_t exact_mixing_time(const ShuffleSpec& spec, const Deck& s0, double threshold, std::uint64_t max_steps) {
  if (s0.size() != spec.size()) throw InvalidArgument("exact_mixing_time: deck and spec sizes differ");
  require_exact_size(spec.size(), "exact_mixing_time");
  const PermDistribution pi = stationary_distribution(spec);
  const TransitionOperator op(spec);
  PermDistribution cur = PermDistribution::point_mass(s0);
  // TV need not be monotone for non-reversible chains, so scan forward from 0.
  for (std::uint64_t t = 0;; ++t) {
    const double tv = tv_distance(cur, pi);
    if (tv <= threshold) return t;
    if (t == max_steps) {
      throw CapExceeded("exact_mixing_time: TV still " + std::to_string(tv) + " after " + std::to_string(t) +
                            " steps",
                        tv);
    }
    cur = op.apply(cur);
  }
}

std::vector<double> exact_tv_curve(const ShuffleSpec& spec, const Deck& s0, std::uint64_t t_max) {
  if (s0.size() != spec.size()) throw InvalidArgument("exact_tv_curve: deck and spec sizes differ");
  require_exact_size(spec.size(), "exact_tv_curve");
  const PermDistribution pi = stationary_distribution(spec);
  const TransitionOperator op(spec);
  PermDistribution cur = PermDistribution::point_mass(s0);
  std::vector<double> curve;
  curve.reserve(t_max + 1);
  for (std::uint64_t t = 0; t <= t_max; ++t) {
    curve.push_back(tv_distance(cur, pi));
    if (t < t_max) cur = op.apply(cur);
  }
  return curve;
}

// --- single-card chain ------------------------------------------------------

SingleCardMatrix::SingleCardMatrix(const ShuffleSpec& spec) {
  if (spec.mode() != ShuffleMode::kPositionWeighted) {
    throw InvalidArgument("single_card_matrix: single-card motion is defined for position-weighted shuffles only");
  }
  const std::size_t n = spec.size();
  top_.resize(n);
  stay_.resize(n);
  down_.resize(n);
  for (std::size_t k = 1; k <= n; ++k) {
    top_[k - 1] = spec.weight(k);
    stay_[k - 1] = spec.below(k);
    down_[k - 1] = k < n ? spec.above(k) : 0.0;
  }
}

double SingleCardMatrix::operator()(std::size_t row, std::size_t col) const {
  const std::size_t n = size();
  if (row < 1 || row > n || col < 1 || col > n) throw InvalidArgument("SingleCardMatrix: index out of range");
  double v = 0.0;
  if (col == 1) v += top_[row - 1];
  if (col == row) v += stay_[row - 1];
  if (col == row + 1) v += down_[row - 1];
  return v;
}

std::vector<std::complex<double>> SingleCardMatrix::multiply(std::span<const std::complex<double>> x) const {
  const std::size_t n = size();
  if (x.size() != n) throw InvalidArgument("SingleCardMatrix::multiply: dimension mismatch");
  std::vector<std::complex<double>> y(n);
  for (std::size_t r = 0; r < n; ++r) {
    y[r] = top_[r] * x[0] + stay_[r] * x[r];
    if (r + 1 < n) y[r] += down_[r] * x[r + 1];
  }
  return y;
}

std::vector<double> SingleCardMatrix::dense() const {
  const std::size_t n = size();
  std::vector<double> a(n * n, 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    a[r * n] += top_[r];
    a[r * n + r] += stay_[r];
    if (r + 1 < n) a[r * n + r + 1] += down_[r];
  }
  return a;
}

SingleCardMatrix single_card_matrix(const ShuffleSpec& spec) { return SingleCardMatrix(spec); }

std::vector<std::complex<double>> matrix_spectrum(const SingleCardMatrix& m) {
  const std::size_t n = m.size();
  if (n > kMaxDenseSpectrum) {
    throw CapacityError("matrix_spectrum: n = " + std::to_string(n) + " exceeds the dense limit of " +
                        std::to_string(kMaxDenseSpectrum));
  }
  const auto a = m.dense();
  Eigen::MatrixXd dense(n, n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) dense(r, c) = a[r * n + c];
  Eigen::EigenSolver<Eigen::MatrixXd> solver(dense, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) throw NoConvergence("matrix_spectrum: eigen-decomposition failed", {}, 0.0);
  std::vector<std::complex<double>> values(n);
  for (std::size_t i = 0; i < n; ++i) values[i] = solver.eigenvalues()[static_cast<Eigen::Index>(i)];
  std::sort(values.begin(), values.end(), [](auto a, auto b) {
    if (std::abs(a) != std::abs(b)) return std::abs(a) > std::abs(b);
    return std::arg(a) < std::arg(b);
  });
  return values;
}

}  // namespace shufflemix
