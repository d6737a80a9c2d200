#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "shufflemix/deck.hpp"
#include "shufflemix/exact.hpp"
#include "shufflemix/rng.hpp"
#include "shufflemix/shuffle_spec.hpp"

namespace shufflemix {

using cplx = std::complex<double>;

// Characteristic equations of the single-card chain.
//   kBottomToTop:           g(z) = z^{n-k+1} - ((k-1)/k) z^{n-k} - 1/k
//   kTwoPoint:              g(z) = (2z - 1)^k (2 z^{n-k} - 1) - 1      (k odd)
//   kTwoPointIntermediate:  f(z) = z^{n+k} - z^{2k}/2 - 1/2
//   kGeneric:               any polynomial given by coefficients
enum class CharFamily { kBottomToTop, kTwoPoint, kTwoPointIntermediate, kGeneric };

class CharPoly {
 public:
  static CharPoly bottom_to_top(std::size_t n, std::size_t k);
  static CharPoly two_point(std::size_t n, std::size_t k);
  static CharPoly two_point_intermediate(std::size_t n, std::size_t k);
  // Bottom-to-top equation in the rotated variable z = lambda e^{-iw}, w = 2 pi / n:
  //   z^{n-k+1} - ((k-1)/k) e^{-iw} z^{n-k} - (1/k) e^{i(k-1)w}.
  // family() is kBottomToTop with rotated() true.
  static CharPoly bottom_to_top_rotated(std::size_t n, std::size_t k);
  // coefficients[j] multiplies z^j.
  static CharPoly from_coefficients(std::vector<cplx> coefficients);

  CharFamily family() const noexcept { return family_; }
  std::size_t n() const noexcept { return n_; }
  std::size_t k() const noexcept { return k_; }
  std::size_t degree() const noexcept { return degree_; }
  bool rotated() const noexcept { return phase_ != cplx{1.0}; }

  cplx value(cplx z) const;
  cplx derivative(cplx z) const;
  // Same, evaluated at z = exp(s). Powers z^j become exp(j s), which keeps
  // full relative accuracy for |z| close to 1 and large j.
  cplx value_at_log(cplx s) const;
  cplx derivative_at_log(cplx s) const;

  // Upper bound on |g''(z)| over the closed disc |z - center| <= radius,
  // from termwise modulus bounds.
  double second_derivative_bound(cplx center, double radius) const;

  // Lower bound on |g'(z)| over the same disc. The closed families factor g' and
  // bound each factor's modulus from below; kGeneric uses |g'(center)| - radius * sup|g''|.
  double derivative_lower_bound(cplx center, double radius) const;

  // Dense coefficients, index j multiplies z^j.
  std::vector<cplx> coefficients() const;

 private:
  CharPoly(CharFamily family, std::size_t n, std::size_t k) : family_(family), n_(n), k_(k) {}

  CharFamily family_;
  std::size_t n_ = 0;
  std::size_t k_ = 0;
  std::size_t degree_ = 0;
  cplx phase_ = 1.0;  // e^{-iw} for the rotated bottom-to-top equation
  // Sparse representation for every family except kTwoPoint.
  std::vector<std::pair<std::size_t, cplx>> terms_;
};

// Closed-form eigenvalue guesses with w = 2 pi / n:
//   bottom-to-top: (1 - C(k,2) w^2 / n) e^{iw};  two-point: (1 - k^2 w^2 / (2n)) e^{iw}.
cplx predicted_eigenvalue(CharFamily family, std::size_t n, std::size_t k);
// log of the prediction, -log1p(-gamma0) free of cancellation.
cplx predicted_log_eigenvalue(CharFamily family, std::size_t n, std::size_t k);

struct RefinedRoot {
  cplx lambda;
  cplx log_lambda;  // lambda = exp(log_lambda)
  double residual;  // |g(lambda)|
  int iterations;

  double gamma() const;  // 1 - |lambda|
  double theta() const;  // arg(lambda)
};

// Newton iteration on s = log z. Throws NoConvergence carrying the best iterate.
RefinedRoot newton_refine(const CharPoly& cp, cplx z_start, double tol = 1e-14, int max_iter = 60);

// Newton from the predicted eigenvalue; on failure retries from 8 starts on a
// circle of radius 2 * gamma0 around the prediction.
RefinedRoot refine_from_predictor(const CharPoly& cp, double tol);

// Zero-existence certificate: delta = |g(z0)|, M = derivative_lower_bound(z0, r). Issued iff M > 0 and delta / M <= r; then g has a zero within
// delta / M of z0 (rigorous up to floating-point rounding).
struct RootCertificate {
  bool issued = false;
  double radius = 0.0;
  double delta = 0.0;
  double derivative_lower = 0.0;
  double certified_radius = 0.0;  // delta / M, +inf when M <= 0
};

RootCertificate certify_root(const CharPoly& cp, cplx z0, double radius);

std::vector<cplx> build_eigenvector(CharFamily family, std::size_t n, std::size_t k, cplx lambda);
std::vector<cplx> build_eigenvector_log(CharFamily family, std::size_t n, std::size_t k, cplx log_lambda);

// max |(A x - lambda x)_r| after scaling x to unit max-norm.
double verify_eigenpair(const SingleCardMatrix& m, cplx lambda, std::span<const cplx> x);

struct ComplexEigenpair {
  cplx lambda;
  double gamma = 0.0;
  double theta = 0.0;
  std::vector<cplx> eigenvector;
  double residual = 0.0;
  std::optional<double> certificate_radius;
};

ComplexEigenpair make_eigenpair(const SingleCardMatrix& m, const RefinedRoot& root, std::vector<cplx> eigenvector);

// Bound R on max_s E|e^{-i theta} Phi(X_{t+1}) - Phi(X_t)|^2 for Phi = sum over cards
// 1..m_cards of x at the card's position.
//
// kAnalytic: per branch (position q picked), cards above q move down one, the card at q
// goes to the top and cards below q stay; each card contributes at most
// |e^{-i theta} x_dest - x_src|, the m largest contributions are summed, and the
// worst branch is squared.
// kEmpirical: the exact one-step conditional expectation at `samples` uniformly
// random states, maximised.
enum class RMode { kAnalytic, kEmpirical };

double estimate_R_analytic(const ShuffleSpec& spec, const ComplexEigenpair& pair, std::size_t m_cards);
double estimate_R_empirical(const ShuffleSpec& spec, const ComplexEigenpair& pair, std::size_t m_cards,
                            std::size_t samples, RngStream& rng);
double estimate_R(const ShuffleSpec& spec, const ComplexEigenpair& pair, std::size_t m_cards, RMode mode,
                  std::size_t samples = 0, RngStream* rng = nullptr);

// Phi(deck) = sum over cards 1..m_cards of x[position - 1].
cplx card_sum_statistic(const Deck& deck, std::span<const cplx> x, std::size_t m_cards);

struct WilsonParams {
  double phi_s0_mag = 0.0;
  double gamma = 0.0;  // in (0, 1/2]
  double theta = 0.0;  // in [0, pi]; does not enter T
  double R = 0.0;
  double a = 0.5;      // in (0, 1)
};

// T = (log|Phi(s0)| - (1/2) log(4R / (gamma a))) / (-log(1 - gamma)), clamped at 0.
double wilson_T(const WilsonParams& params);

struct LowerBoundReport {
  CharFamily family = CharFamily::kBottomToTop;
  std::size_t n = 0;
  std::size_t k = 0;
  cplx predicted;
  cplx lambda;
  double gamma = 0.0;
  double theta = 0.0;
  double g_residual = 0.0;
  int newton_iterations = 0;
  double eigenvector_residual = 0.0;
  double distance_to_prediction = 0.0;
  RootCertificate certificate;
  double phi_s0 = 0.0;
  double R = 0.0;
  double T = 0.0;
  double formula = 0.0;  // n^3 log n / (4 pi^2 k (k -/+ 1))
  bool gamma_in_band = true;
  std::string diagnostic;
};

LowerBoundReport b2t_lower_bound(std::size_t n, std::size_t k);
LowerBoundReport two_point_lower_bound(std::size_t n, std::size_t k);

// Two-stage root argument for the two-point family: a root lambda1 of the
// intermediate f near the prediction lambda0, then a root lambda2 of g near lambda1.
struct TwoPointStages {
  cplx lambda0;
  cplx lambda1;
  cplx lambda2;
  RootCertificate f_certificate;  // around lambda0
  RootCertificate g_certificate;  // around lambda1
  double predicted_shift = 0.0;   // k w^2 / (2n)
};

TwoPointStages two_point_stages(std::size_t n, std::size_t k);

// --- move-to-front test functions ------------------------------------------

// Cards are paired (1,2), (3,4), ... in the labelling of p.
// +p_j/(p_j+p_{j+1}) when card j+1 is above card j, else -p_{j+1}/(p_j+p_{j+1}). j odd.
double mtf_phi_j(const Deck& deck, std::span<const double> p, std::size_t j);

struct MultiEigenBound {
  std::uint64_t steps = 0;      // largest t with sum_{j odd} (1 - gamma_j)^{2t} >= 24, or 0
  bool satisfiable = false;     // false when even t = 0 fails
  bool dropped_last_card = false;
};

MultiEigenBound mtf_multi_eigen_T(std::span<const double> weights);

// a_j proportional to (1 - gamma_j)^t over odd j, normalised to a unit vector.
std::vector<double> mtf_optimal_weights(std::span<const double> weights, std::uint64_t t);

}  // namespace shufflemix
