#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "shufflemix/deck.hpp"
#include "shufflemix/shuffle_spec.hpp"

namespace shufflemix {

// Largest deck handled by the full-state machinery (8! = 40320 states).
inline constexpr std::size_t kMaxExactCards = 8;

std::uint64_t factorial(std::size_t n);

// Lexicographic rank of a permutation of 1..n (factorial number system).
std::uint32_t lehmer_encode(std::span<const Card> by_position);
std::vector<Card> lehmer_decode(std::uint32_t index, std::size_t n);

// Probability vector over S_n indexed by Lehmer rank.
class PermDistribution {
 public:
  PermDistribution(std::size_t n, std::vector<double> probs);

  static PermDistribution point_mass(const Deck& deck);
  static PermDistribution uniform(std::size_t n);

  std::size_t cards() const noexcept { return n_; }
  std::size_t states() const noexcept { return probs_.size(); }
  std::span<const double> probs() const noexcept { return probs_; }
  double operator[](std::size_t index) const { return probs_[index]; }
  double at(const Deck& deck) const;

 private:
  std::size_t n_;
  std::vector<double> probs_;
};

// Exact one-step operator on S_n, stored sparsely: n successors per state.
class TransitionOperator {
 public:
  explicit TransitionOperator(const ShuffleSpec& spec);

  std::size_t cards() const noexcept { return n_; }
  PermDistribution apply(const PermDistribution& dist) const;
  // Sum over the n successors of state of prob * f(successor).
  template <class F>
  auto expectation(std::uint32_t state, F&& f) const {
    using R = decltype(f(std::uint32_t{}));
    R acc{};
    for (std::size_t q = 0; q < n_; ++q) {
      const std::size_t e = state * n_ + q;
      if (prob_[e] != 0.0) acc += prob_[e] * f(succ_[e]);
    }
    return acc;
  }

 private:
  std::size_t n_;
  std::vector<std::uint32_t> succ_;  // succ_[s*n + q]: state after moving position q+1 to the top
  std::vector<double> prob_;
};

// Stationary probability of the deck order (c_1, ..., c_n) under move-to-front.
double mtf_stationary_prob(const ShuffleSpec& spec, std::span<const Card> order);
PermDistribution mtf_stationary(const ShuffleSpec& spec);

// Stationary law: product formula for move-to-front; fixed-point iteration of
// the lazy exact operator (tolerance 1e-13 in l1, at most 10^6 sweeps) otherwise.
PermDistribution stationary_distribution(const ShuffleSpec& spec);

PermDistribution evolve_distribution(const ShuffleSpec& spec, const PermDistribution& dist, std::uint64_t steps);

double tv_distance(const PermDistribution& mu, const PermDistribution& nu);
double l1_distance(const PermDistribution& mu, const PermDistribution& nu);

// Smallest t with TV(P(X_t), pi) <= threshold, found by forward iteration from s0.
// Throws CapExceeded (carrying the last TV) if t would pass max_steps.
std::uint64_t exact_mixing_time(const ShuffleSpec& spec, const Deck& s0, double threshold = 0.25,
                                std::uint64_t max_steps = 1'000'000);

// TV distance to stationarity at t = 0..t_max.
std::vector<double> exact_tv_curve(const ShuffleSpec& spec, const Deck& s0, std::uint64_t t_max);

// Transition matrix of one card's position under a position-weighted shuffle.
// Row k has p_k at column 1, m_k at column k and M_k at column k+1.
class SingleCardMatrix {
 public:
  explicit SingleCardMatrix(const ShuffleSpec& spec);

  std::size_t size() const noexcept { return top_.size(); }
  // Entry at (row, col), both 1-based.
  double operator()(std::size_t row, std::size_t col) const;
  // (A x)_r for r = 1..n, computed from the three nonzero bands.
  std::vector<std::complex<double>> multiply(std::span<const std::complex<double>> x) const;
  std::vector<double> dense() const;  // row-major n*n

 private:
  std::vector<double> top_;   // p_k
  std::vector<double> stay_;  // m_k
  std::vector<double> down_;  // M_k (0 for the last row)
};

SingleCardMatrix single_card_matrix(const ShuffleSpec& spec);

// Largest size accepted by matrix_spectrum.
inline constexpr std::size_t kMaxDenseSpectrum = 512;

// All n eigenvalues of the single-card matrix (dense eigen-decomposition),
// sorted by decreasing modulus then argument.
std::vector<std::complex<double>> matrix_spectrum(const SingleCardMatrix& m);

}  // namespace shufflemix
