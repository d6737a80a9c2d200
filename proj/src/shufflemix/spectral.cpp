#include "shufflemix/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "shufflemix/errors.hpp"
#include "shufflemix/numeric.hpp"
#include "shufflemix/search.hpp"

namespace shufflemix {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// z^j given s = log z, in polar form.
cplx pow_log(cplx s, std::size_t j) {
  if (j == 0) return 1.0;
  const double jd = static_cast<double>(j);
  return std::polar(std::exp(jd * s.real()), jd * s.imag());
}

// b^j in polar form, with 0^0 = 1.
cplx pow_polar(cplx b, std::size_t j) {
  if (j == 0) return 1.0;
  if (b == cplx{}) return 0.0;
  const double jd = static_cast<double>(j);
  return std::polar(std::pow(std::abs(b), jd), jd * std::arg(b));
}

double pow_real(double b, long j) { return j <= 0 ? 1.0 : std::pow(b, static_cast<double>(j)); }

double binom2(std::size_t k) { return 0.5 * static_cast<double>(k) * static_cast<double>(k - 1); }

double omega(std::size_t n) { return kTwoPi / static_cast<double>(n); }

void require_family(CharFamily family) {
  if (family != CharFamily::kBottomToTop && family != CharFamily::kTwoPoint)
    throw InvalidArgument("only the bottom-to-top and two-point families have closed forms");
}

}  // namespace

// --- CharPoly ------------------------------------------------------------

CharPoly CharPoly::bottom_to_top(std::size_t n, std::size_t k) {
  if (k < 1 || k > n) throw InvalidArgument("bottom-to-top needs 1 <= k <= n");
  CharPoly cp(CharFamily::kBottomToTop, n, k);
  const double kd = static_cast<double>(k);
  cp.degree_ = n - k + 1;
  cp.terms_ = {{n - k + 1, 1.0}, {n - k, -(kd - 1.0) / kd}, {0, -1.0 / kd}};
  return cp;
}

CharPoly CharPoly::bottom_to_top_rotated(std::size_t n, std::size_t k) {
  if (k < 1 || k > n) throw InvalidArgument("bottom-to-top needs 1 <= k <= n");
  CharPoly cp(CharFamily::kBottomToTop, n, k);
  const double kd = static_cast<double>(k);
  const double w = omega(n);
  cp.degree_ = n - k + 1;
  cp.phase_ = std::polar(1.0, -w);
  cp.terms_ = {{n - k + 1, 1.0},
               {n - k, -(kd - 1.0) / kd * std::polar(1.0, -w)},
               {0, -1.0 / kd * std::polar(1.0, (kd - 1.0) * w)}};
  return cp;
}

CharPoly CharPoly::two_point(std::size_t n, std::size_t k) {
  if (k < 1 || k >= n) throw InvalidArgument("two-point needs 1 <= k < n");
  if (k % 2 == 0) throw InvalidArgument("two-point characteristic equation needs odd k (parity obstruction)");
  CharPoly cp(CharFamily::kTwoPoint, n, k);
  cp.degree_ = n;
  return cp;
}

CharPoly CharPoly::two_point_intermediate(std::size_t n, std::size_t k) {
  if (k < 1 || k >= n) throw InvalidArgument("two-point needs 1 <= k < n");
  CharPoly cp(CharFamily::kTwoPointIntermediate, n, k);
  cp.degree_ = n + k;
  cp.terms_ = {{n + k, 1.0}, {2 * k, -0.5}, {0, -0.5}};
  return cp;
}

CharPoly CharPoly::from_coefficients(std::vector<cplx> coefficients) {
  while (!coefficients.empty() && coefficients.back() == cplx{}) coefficients.pop_back();
  if (coefficients.empty()) throw InvalidArgument("zero polynomial");
  CharPoly cp(CharFamily::kGeneric, 0, 0);
  cp.degree_ = coefficients.size() - 1;
  for (std::size_t j = 0; j < coefficients.size(); ++j)
    if (coefficients[j] != cplx{}) cp.terms_.emplace_back(j, coefficients[j]);
  return cp;
}

namespace {

// Shared evaluators; pw(j) returns z^j.
template <class Pow>
cplx eval_two_point(std::size_t n, std::size_t k, Pow&& pw) {
  const cplx base = 2.0 * pw(1) - 1.0;
  const cplx a = pow_polar(base, k);
  const cplx b = 2.0 * pw(n - k) - 1.0;
  return a * b - 1.0;
}

template <class Pow>
cplx deriv_two_point(std::size_t n, std::size_t k, Pow&& pw) {
  const std::size_t m = n - k;
  const cplx base = 2.0 * pw(1) - 1.0;
  const cplx b = 2.0 * pw(m) - 1.0;
  const cplx da = 2.0 * static_cast<double>(k) * pow_polar(base, k - 1);
  const cplx db = 2.0 * static_cast<double>(m) * pw(m - 1);
  return da * b + pow_polar(base, k) * db;
}

}  // namespace

cplx CharPoly::value(cplx z) const {
  auto pw = [z](std::size_t j) -> cplx {
    if (j == 0) return 1.0;
    if (z == cplx{}) return 0.0;
    return pow_log(std::log(z), j);
  };
  if (family_ == CharFamily::kTwoPoint) return eval_two_point(n_, k_, pw);
  CompensatedSum re, im;
  for (const auto& [j, c] : terms_) {
    const cplx t = c * pw(j);
    re.add(t.real());
    im.add(t.imag());
  }
  return {re.value(), im.value()};
}

cplx CharPoly::derivative(cplx z) const {
  auto pw = [z](std::size_t j) -> cplx {
    if (j == 0) return 1.0;
    if (z == cplx{}) return 0.0;
    return pow_log(std::log(z), j);
  };
  if (family_ == CharFamily::kTwoPoint) return deriv_two_point(n_, k_, pw);
  cplx sum = 0.0;
  for (const auto& [j, c] : terms_)
    if (j > 0) sum += static_cast<double>(j) * c * pw(j - 1);
  return sum;
}

cplx CharPoly::value_at_log(cplx s) const {
  auto pw = [s](std::size_t j) { return pow_log(s, j); };
  if (family_ == CharFamily::kTwoPoint) return eval_two_point(n_, k_, pw);
  CompensatedSum re, im;
  for (const auto& [j, c] : terms_) {
    const cplx t = c * pw(j);
    re.add(t.real());
    im.add(t.imag());
  }
  return {re.value(), im.value()};
}

cplx CharPoly::derivative_at_log(cplx s) const {
  auto pw = [s](std::size_t j) { return pow_log(s, j); };
  if (family_ == CharFamily::kTwoPoint) return deriv_two_point(n_, k_, pw);
  cplx sum = 0.0;
  for (const auto& [j, c] : terms_)
    if (j > 0) sum += static_cast<double>(j) * c * pw(j - 1);
  return sum;
}

double CharPoly::second_derivative_bound(cplx center, double radius) const {
  const double rho = std::abs(center) + radius;
  if (family_ == CharFamily::kTwoPoint) {
    // g = A B - 1 with A = (2z-1)^k, B = 2 z^m - 1.
    const long k = static_cast<long>(k_);
    const long m = static_cast<long>(n_ - k_);
    const double sigma = std::abs(2.0 * center - 1.0) + 2.0 * radius;
    const double kd = static_cast<double>(k);
    const double md = static_cast<double>(m);
    const double a0 = pow_real(sigma, k);
    const double a1 = 2.0 * kd * pow_real(sigma, k - 1);
    const double a2 = k >= 2 ? 4.0 * kd * (kd - 1.0) * pow_real(sigma, k - 2) : 0.0;
    const double b0 = 2.0 * pow_real(rho, m) + 1.0;
    const double b1 = 2.0 * md * pow_real(rho, m - 1);
    const double b2 = m >= 2 ? 2.0 * md * (md - 1.0) * pow_real(rho, m - 2) : 0.0;
    return a2 * b0 + 2.0 * a1 * b1 + a0 * b2;
  }
  double bound = 0.0;
  for (const auto& [j, c] : terms_) {
    if (j < 2) continue;
    const double jd = static_cast<double>(j);
    bound += std::abs(c) * jd * (jd - 1.0) * pow_real(rho, static_cast<long>(j) - 2);
  }
  return bound;
}

double CharPoly::derivative_lower_bound(cplx center, double radius) const {
  const double inner = std::max(0.0, std::abs(center) - radius);
  const double nd = static_cast<double>(n_);
  const double kd = static_cast<double>(k_);
  switch (family_) {
    case CharFamily::kBottomToTop: {
      // g' = z^{n-k-1} ((n-k+1) z - ((n-k)(k-1)/k) phase)
      if (k_ == n_) return 1.0;
      const double a = nd - kd + 1.0;
      const cplx c = (nd - kd) * (kd - 1.0) / kd * phase_;
      const double lin = std::abs(a * center - c) - a * radius;
      return lin <= 0.0 ? 0.0 : pow_real(inner, static_cast<long>(n_ - k_) - 1) * lin;
    }
    case CharFamily::kTwoPoint: {
      // g' = (2z-1)^{k-1} (z^{m-1} (4n z - 2m) - 2k), m = n - k
      const double md = nd - kd;
      const double base = std::abs(2.0 * center - 1.0) - 2.0 * radius;
      const double lin = std::abs(4.0 * nd * center - 2.0 * md) - 4.0 * nd * radius;
      if (base <= 0.0 || lin <= 0.0) return 0.0;
      const double bracket = pow_real(inner, static_cast<long>(n_ - k_) - 1) * lin - 2.0 * kd;
      return bracket <= 0.0 ? 0.0 : pow_real(base, static_cast<long>(k_) - 1) * bracket;
    }
    case CharFamily::kTwoPointIntermediate: {
      // f' = z^{2k-1} ((n+k) z^{n-k} - k)
      const double bracket = (nd + kd) * pow_real(inner, static_cast<long>(n_ - k_)) - kd;
      return bracket <= 0.0 ? 0.0 : pow_real(inner, 2 * static_cast<long>(k_) - 1) * bracket;
    }
    case CharFamily::kGeneric:
      break;
  }
  return std::max(0.0, std::abs(derivative(center)) - radius * second_derivative_bound(center, radius));
}

std::vector<cplx> CharPoly::coefficients() const {
  std::vector<cplx> out(degree_ + 1, 0.0);
  if (family_ == CharFamily::kTwoPoint) {
    // (2z-1)^k expanded by the binomial theorem, times (2 z^m - 1), minus 1.
    const std::size_t m = n_ - k_;
    std::vector<double> a(k_ + 1, 0.0);
    a[0] = 1.0;
    for (std::size_t step = 0; step < k_; ++step)
      for (std::size_t i = step + 2; i-- > 0;) a[i] = -a[i] + (i > 0 ? 2.0 * a[i - 1] : 0.0);
    for (std::size_t i = 0; i <= k_; ++i) {
      out[i + m] += 2.0 * a[i];
      out[i] -= a[i];
    }
    out[0] -= 1.0;
    return out;
  }
  for (const auto& [j, c] : terms_) out[j] += c;
  return out;
}

// --- predictors and Newton -----------------------------------------------

cplx predicted_log_eigenvalue(CharFamily family, std::size_t n, std::size_t k) {
  require_family(family);
  if (n < 2 || k < 1) throw InvalidArgument("predictor needs n >= 2 and k >= 1");
  const double w = omega(n);
  const double kd = static_cast<double>(k);
  const double gamma0 = family == CharFamily::kBottomToTop ? binom2(k) * w * w / static_cast<double>(n)
                                                           : kd * kd * w * w / (2.0 * static_cast<double>(n));
  if (gamma0 >= 1.0) throw InvalidArgument("predicted gamma is not below 1; k is too large for this n");
  return {std::log1p(-gamma0), w};
}

cplx predicted_eigenvalue(CharFamily family, std::size_t n, std::size_t k) {
  return std::exp(predicted_log_eigenvalue(family, n, k));
}

double RefinedRoot::gamma() const { return -std::expm1(log_lambda.real()); }
double RefinedRoot::theta() const { return log_lambda.imag(); }

namespace {

RefinedRoot newton_log(const CharPoly& cp, cplx s, double tol, int max_iter) {
  cplx best_s = s;
  double best_res = std::numeric_limits<double>::infinity();
  for (int it = 0; it <= max_iter; ++it) {
    const cplx g = cp.value_at_log(s);
    const double res = std::abs(g);
    if (!std::isfinite(res)) break;
    if (res < best_res) {
      best_res = res;
      best_s = s;
    }
    if (res <= tol) {
      const cplx wrapped{s.real(), std::remainder(s.imag(), kTwoPi)};
      return {std::exp(wrapped), wrapped, res, it};
    }
    if (it == max_iter) break;
    const cplx dg = cp.derivative_at_log(s) * std::exp(s);
    if (dg == cplx{} || !std::isfinite(std::abs(dg))) break;
    s -= g / dg;
  }
  std::ostringstream msg;
  msg << "Newton did not reach |g| <= " << tol << " in " << max_iter << " iterations (best |g| = " << best_res
      << ")";
  throw NoConvergence(msg.str(), std::exp(best_s), best_res);
}

}  // namespace

RefinedRoot newton_refine(const CharPoly& cp, cplx z_start, double tol, int max_iter) {
  if (z_start == cplx{}) throw InvalidArgument("Newton start must be nonzero (iteration runs on log z)");
  if (!(tol > 0.0) || max_iter < 1) throw InvalidArgument("Newton needs tol > 0 and max_iter >= 1");
  if (cp.derivative(z_start) == cplx{}) throw InvalidArgument("g'(z_start) = 0");
  return newton_log(cp, std::log(z_start), tol, max_iter);
}

RefinedRoot refine_from_predictor(const CharPoly& cp, double tol) {
  cplx s0 = predicted_log_eigenvalue(cp.family(), cp.n(), cp.k());
  if (cp.rotated()) s0 -= cplx(0.0, omega(cp.n()));
  try {
    return newton_log(cp, s0, tol, 60);
  } catch (const NoConvergence& first) {
    const cplx z0 = std::exp(s0);
    double radius = 2.0 * -std::expm1(s0.real());
    if (radius == 0.0) radius = 1.0 / (static_cast<double>(cp.n()) * static_cast<double>(cp.n()));
    for (int j = 0; j < 8; ++j) {
      const cplx start = z0 + std::polar(radius, kTwoPi * j / 8.0);
      try {
        return newton_log(cp, std::log(start), tol, 60);
      } catch (const NoConvergence&) {
      }
    }
    throw;
  }
}

RootCertificate certify_root(const CharPoly& cp, cplx z0, double radius) {
  if (!(radius > 0.0) || !std::isfinite(radius)) throw InvalidArgument("certificate radius must be positive");
  RootCertificate c;
  c.radius = radius;
  c.delta = std::abs(cp.value(z0));
  c.derivative_lower = cp.derivative_lower_bound(z0, radius);
  c.certified_radius = c.derivative_lower > 0.0 ? c.delta / c.derivative_lower
                                                : std::numeric_limits<double>::infinity();
  c.issued = c.derivative_lower > 0.0 && c.certified_radius <= radius;
  return c;
}

// --- eigenvectors ----------------------------------------------------------

std::vector<cplx> build_eigenvector_log(CharFamily family, std::size_t n, std::size_t k, cplx s) {
  require_family(family);
  if (k < 1 || k > n) throw InvalidArgument("eigenvector needs 1 <= k <= n");
  std::vector<cplx> x(n);
  if (family == CharFamily::kBottomToTop) {
    for (std::size_t j = 0; j <= n - k; ++j) x[j] = pow_log(s, j);
    for (std::size_t j = n - k + 1; j < n; ++j) x[j] = x[n - k];
    return x;
  }
  if (k >= n) throw InvalidArgument("two-point eigenvector needs k < n");
  const std::size_t m = n - k;
  for (std::size_t j = 0; j < m; ++j) x[j] = pow_log(s, j);
  x[m] = 2.0 * pow_log(s, m) - 1.0;
  const cplx factor = 2.0 * std::exp(s) - 1.0;
  for (std::size_t i = 1; i < k; ++i) x[m + i] = pow_polar(factor, i) * x[m];
  return x;
}

std::vector<cplx> build_eigenvector(CharFamily family, std::size_t n, std::size_t k, cplx lambda) {
  if (lambda == cplx{}) {
    // Only entries with exponent 0 survive.
    require_family(family);
    std::vector<cplx> x(n, 0.0);
    if (n == 0) return x;
    x[0] = 1.0;
    if (family == CharFamily::kBottomToTop && k == n) std::fill(x.begin(), x.end(), cplx{1.0});
    if (family == CharFamily::kTwoPoint) {
      if (k >= n) throw InvalidArgument("two-point eigenvector needs k < n");
      const std::size_t m = n - k;
      x[m] = -1.0;
      for (std::size_t i = 1; i < k; ++i) x[m + i] = -x[m + i - 1];
    }
    return x;
  }
  return build_eigenvector_log(family, n, k, std::log(lambda));
}

double verify_eigenpair(const SingleCardMatrix& m, cplx lambda, std::span<const cplx> x) {
  if (x.size() != m.size()) throw InvalidArgument("eigenvector length does not match the matrix");
  double scale = 0.0;
  for (const cplx& v : x) scale = std::max(scale, std::abs(v));
  if (scale == 0.0) throw InvalidArgument("zero eigenvector");
  std::vector<cplx> unit(x.begin(), x.end());
  for (cplx& v : unit) v /= scale;
  const std::vector<cplx> ax = m.multiply(unit);
  double res = 0.0;
  for (std::size_t r = 0; r < unit.size(); ++r) res = std::max(res, std::abs(ax[r] - lambda * unit[r]));
  return res;
}

ComplexEigenpair make_eigenpair(const SingleCardMatrix& m, const RefinedRoot& root, std::vector<cplx> eigenvector) {
  if (std::abs(root.lambda) > 1.0 + 1e-12) throw InvalidArgument("eigenvalue modulus exceeds 1");
  ComplexEigenpair pair;
  pair.lambda = root.lambda;
  pair.gamma = root.gamma();
  pair.theta = std::arg(root.lambda);
  pair.residual = verify_eigenpair(m, root.lambda, eigenvector);
  pair.eigenvector = std::move(eigenvector);
  return pair;
}

// --- R ------------------------------------------------------------------------

double estimate_R_analytic(const ShuffleSpec& spec, const ComplexEigenpair& pair, std::size_t m_cards) {
  const std::size_t n = spec.size();
  if (spec.mode() != ShuffleMode::kPositionWeighted) throw InvalidArgument("R is defined for position-weighted shuffles");
  if (pair.eigenvector.size() != n) throw InvalidArgument("eigenvector length does not match the spec");
  if (m_cards > n) throw InvalidArgument("m_cards exceeds the deck size");
  if (m_cards == 0) return 0.0;
  const std::vector<cplx>& x = pair.eigenvector;
  const cplx rot = std::polar(1.0, -pair.theta);
  // Contributions not depending on q: moving down one, or staying put.
  std::vector<double> down(n), stay(n);
  for (std::size_t r = 0; r < n; ++r) {
    down[r] = r + 1 < n ? std::abs(rot * x[r + 1] - x[r]) : 0.0;
    stay[r] = std::abs(rot * x[r] - x[r]);
  }
  double worst = 0.0;
  std::vector<double> a(n);
  for (std::size_t q = 0; q < n; ++q) {
    if (spec.weights()[q] <= 0.0) continue;
    for (std::size_t r = 0; r < n; ++r) a[r] = r < q ? down[r] : (r == q ? std::abs(rot * x[0] - x[q]) : stay[r]);
    std::nth_element(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(m_cards - 1), a.end(), std::greater<>());
    double sum = 0.0;
    for (std::size_t i = 0; i < m_cards; ++i) sum += a[i];
    worst = std::max(worst, sum);
  }
  return worst * worst;
}

double estimate_R_empirical(const ShuffleSpec& spec, const ComplexEigenpair& pair, std::size_t m_cards,
                            std::size_t samples, RngStream& rng) {
  const std::size_t n = spec.size();
  if (spec.mode() != ShuffleMode::kPositionWeighted) throw InvalidArgument("R is defined for position-weighted shuffles");
  if (pair.eigenvector.size() != n) throw InvalidArgument("eigenvector length does not match the spec");
  if (m_cards > n) throw InvalidArgument("m_cards exceeds the deck size");
  if (samples == 0) throw InvalidArgument("empirical R needs at least one sample");
  const std::vector<cplx>& x = pair.eigenvector;
  const cplx rot = std::polar(1.0, -pair.theta);
  double worst = 0.0;
  std::vector<cplx> down_prefix(n + 1), stay_suffix(n + 1);
  std::vector<char> tracked(n);
  for (std::size_t s = 0; s < samples; ++s) {
    const Deck deck = random_deck(n, rng);
    for (std::size_t r = 0; r < n; ++r) tracked[r] = deck.card_at(r + 1) <= m_cards;
    down_prefix[0] = 0.0;
    for (std::size_t r = 0; r < n; ++r)
      down_prefix[r + 1] = down_prefix[r] + (tracked[r] && r + 1 < n ? rot * x[r + 1] - x[r] : cplx{});
    stay_suffix[n] = 0.0;
    for (std::size_t r = n; r-- > 0;) stay_suffix[r] = stay_suffix[r + 1] + (tracked[r] ? rot * x[r] - x[r] : cplx{});
    double expectation = 0.0;
    for (std::size_t q = 0; q < n; ++q) {
      const double p = spec.weights()[q];
      if (p <= 0.0) continue;
      const cplx d = down_prefix[q] + (tracked[q] ? rot * x[0] - x[q] : cplx{}) + stay_suffix[q + 1];
      expectation += p * std::norm(d);
    }
    worst = std::max(worst, expectation);
  }
  return worst;
}

double estimate_R(const ShuffleSpec& spec, const ComplexEigenpair& pair, std::size_t m_cards, RMode mode,
                  std::size_t samples, RngStream* rng) {
  if (mode == RMode::kAnalytic) return estimate_R_analytic(spec, pair, m_cards);
  if (rng == nullptr) throw InvalidArgument("empirical R needs a random stream");
  return estimate_R_empirical(spec, pair, m_cards, samples, *rng);
}

cplx card_sum_statistic(const Deck& deck, std::span<const cplx> x, std::size_t m_cards) {
  if (x.size() != deck.size() || m_cards > deck.size()) throw InvalidArgument("statistic size mismatch");
  cplx sum = 0.0;
  for (Card c = 1; c <= m_cards; ++c) sum += x[deck.position_of(c) - 1];
  return sum;
}

// --- Wilson bound ----------------------------------------------------------

double wilson_T(const WilsonParams& p) {
  if (!(p.gamma > 0.0 && p.gamma <= 0.5)) throw InvalidArgument("gamma must lie in (0, 1/2]");
  if (!(p.a > 0.0 && p.a < 1.0)) throw InvalidArgument("a must lie in (0, 1)");
  if (!(p.phi_s0_mag > 0.0) || !std::isfinite(p.phi_s0_mag)) throw InvalidArgument("|Phi(s0)| must be positive");
  if (!(p.R >= 0.0) || !std::isfinite(p.R)) throw InvalidArgument("R must be finite and nonnegative");
  if (p.R == 0.0) return std::numeric_limits<double>::infinity();
  const double num = std::log(p.phi_s0_mag) - 0.5 * std::log(4.0 * p.R / (p.gamma * p.a));
  return std::max(0.0, num / -std::log1p(-p.gamma));
}

namespace {

LowerBoundReport run_pipeline(CharFamily family, std::size_t n, std::size_t k) {
  const bool b2t = family == CharFamily::kBottomToTop;
  const CharPoly cp = b2t ? CharPoly::bottom_to_top(n, k) : CharPoly::two_point(n, k);
  const ShuffleSpec spec = b2t ? ShuffleSpec::bottom_to_top(n, k) : ShuffleSpec::two_point(n, k);
  const double w = omega(n);
  const double nd = static_cast<double>(n);
  const double kd = static_cast<double>(k);

  LowerBoundReport rep;
  rep.family = family;
  rep.n = n;
  rep.k = k;
  rep.predicted = predicted_eigenvalue(family, n, k);

  const RefinedRoot root = refine_from_predictor(cp, 1e-14);
  rep.lambda = root.lambda;
  rep.g_residual = root.residual;
  rep.newton_iterations = root.iterations;
  rep.distance_to_prediction = std::abs(root.lambda - rep.predicted);

  const double r = b2t ? binom2(k) * w * w / (2.0 * nd) : kd * w * w / nd;
  rep.certificate = certify_root(cp, rep.predicted, r);

  const SingleCardMatrix m(spec);
  ComplexEigenpair pair = make_eigenpair(m, root, build_eigenvector_log(family, n, k, root.log_lambda));
  const RootCertificate own = certify_root(cp, root.lambda, r);
  if (own.issued) pair.certificate_radius = own.certified_radius;
  rep.gamma = pair.gamma;
  rep.theta = pair.theta;
  rep.eigenvector_residual = pair.residual;

  const std::size_t m_cards = n / 2;
  rep.R = estimate_R_analytic(spec, pair, m_cards);
  cplx phi = 0.0;
  for (std::size_t j = 0; j < m_cards; ++j) phi += pair.eigenvector[j];
  rep.phi_s0 = std::abs(phi);
  rep.T = wilson_T({rep.phi_s0, rep.gamma, rep.theta, rep.R, 0.5});
  rep.formula = nd * nd * nd * std::log(nd) /
                (4.0 * std::numbers::pi * std::numbers::pi * kd * (b2t ? kd - 1.0 : kd + 1.0));

  if (!b2t) {
    const double scale = 2.0 * std::numbers::pi * std::numbers::pi * kd / (nd * nd * nd);
    const double lo = 0.5 * scale * (kd - 1.0);
    const double hi = 1.5 * scale * (kd + 1.0);
    rep.gamma_in_band = rep.gamma >= lo && rep.gamma <= hi;
    if (!rep.gamma_in_band) {
      std::ostringstream msg;
      msg << "gamma " << rep.gamma << " outside [" << lo << ", " << hi << "]";
      rep.diagnostic = msg.str();
    }
  }
  return rep;
}

}  // namespace

LowerBoundReport b2t_lower_bound(std::size_t n, std::size_t k) {
  if (k < 2) throw InvalidArgument("bottom-to-top lower bound needs k >= 2 (k = 1 never mixes)");
  if (k > n) throw InvalidArgument("bottom-to-top needs k <= n");
  return run_pipeline(CharFamily::kBottomToTop, n, k);
}

LowerBoundReport two_point_lower_bound(std::size_t n, std::size_t k) {
  if (k % 2 == 0) throw InvalidArgument("two-point lower bound needs odd k (parity obstruction)");
  return run_pipeline(CharFamily::kTwoPoint, n, k);
}

TwoPointStages two_point_stages(std::size_t n, std::size_t k) {
  const CharPoly f = CharPoly::two_point_intermediate(n, k);
  const CharPoly g = CharPoly::two_point(n, k);
  const double w = omega(n);
  const double nd = static_cast<double>(n);
  const double kd = static_cast<double>(k);
  TwoPointStages st;
  st.lambda0 = predicted_eigenvalue(CharFamily::kTwoPoint, n, k);
  st.f_certificate = certify_root(f, st.lambda0, kd * kd * w * w / (4.0 * nd));
  st.lambda1 = newton_refine(f, st.lambda0).lambda;
  st.g_certificate = certify_root(g, st.lambda1, kd * w * w / nd);
  st.lambda2 = newton_refine(g, st.lambda1).lambda;
  st.predicted_shift = kd * w * w / (2.0 * nd);
  return st;
}

// --- move-to-front statistics -----------------------------------------------

double mtf_phi_j(const Deck& deck, std::span<const double> p, std::size_t j) {
  if (j % 2 == 0) throw InvalidArgument("Phi_j needs odd j");
  if (j < 1 || j + 1 > deck.size() || p.size() != deck.size()) throw InvalidArgument("Phi_j index out of range");
  const double pj = p[j - 1];
  const double pk = p[j];
  const double g = pj + pk;
  const bool above = deck.position_of(static_cast<Card>(j + 1)) < deck.position_of(static_cast<Card>(j));
  return above ? pj / g : -pk / g;
}

namespace {

std::vector<double> pair_gammas(std::span<const double> w) {
  std::vector<double> out;
  for (std::size_t j = 0; j + 1 < w.size(); j += 2) out.push_back(w[j] + w[j + 1]);
  return out;
}

double pair_sum(const std::vector<double>& gammas, std::uint64_t t) {
  CompensatedSum s;
  for (double g : gammas) s.add(std::pow(1.0 - g, 2.0 * static_cast<double>(t)));
  return s.value();
}

}  // namespace

MultiEigenBound mtf_multi_eigen_T(std::span<const double> weights) {
  MultiEigenBound out;
  out.dropped_last_card = weights.size() % 2 == 1;
  const std::vector<double> gammas = pair_gammas(weights);
  if (pair_sum(gammas, 0) < 24.0) return out;
  out.satisfiable = true;
  out.steps = first_true([&](std::uint64_t t) { return pair_sum(gammas, t) < 24.0; }) - 1;
  return out;
}

std::vector<double> mtf_optimal_weights(std::span<const double> weights, std::uint64_t t) {
  const std::vector<double> gammas = pair_gammas(weights);
  if (gammas.empty()) throw InvalidArgument("need at least two cards");
  std::vector<double> a(gammas.size());
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = std::pow(1.0 - gammas[i], static_cast<double>(t));
  const double norm = std::sqrt(std::inner_product(a.begin(), a.end(), a.begin(), 0.0));
  if (norm == 0.0) throw InvalidArgument("all pair weights vanish at this t");
  for (double& v : a) v /= norm;
  return a;
}

}  // namespace shufflemix
