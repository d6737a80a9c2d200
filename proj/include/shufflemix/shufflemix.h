/* C interface to the shufflemix library.
 *
 * Every fallible call returns an sm_status; on failure sm_last_error() gives a
 * message for the calling thread. Handles are opaque and owned by the caller,
 * who releases them with the matching _destroy function (NULL is accepted).
 * Positions and card labels are 1-based.
 */
#ifndef SHUFFLEMIX_H
#define SHUFFLEMIX_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define SM_API __declspec(dllexport)
#else
#define SM_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sm_status {
  SM_OK = 0,
  SM_ERR_INVALID_ARGUMENT = 1,
  SM_ERR_CAPACITY = 2,       /* state space or dense matrix too large */
  SM_ERR_CAP_EXCEEDED = 3,   /* step cap reached before the stopping rule */
  SM_ERR_NO_CONVERGENCE = 4,
  SM_ERR_OUT_OF_MEMORY = 5,
  SM_ERR_INTERNAL = 6
} sm_status;

typedef enum sm_mode { SM_MOVE_TO_FRONT = 0, SM_POSITION_WEIGHTED = 1 } sm_mode;
typedef enum sm_family { SM_BOTTOM_TO_TOP = 0, SM_TWO_POINT = 1 } sm_family;

typedef struct sm_spec sm_spec;
typedef struct sm_deck sm_deck;
typedef struct sm_rng sm_rng;

SM_API const char* sm_version(void);
SM_API const char* sm_status_name(sm_status status);
/* Message of the last failed call on this thread ("" if none). */
SM_API const char* sm_last_error(void);

/* ---- shuffle specs ---- */
SM_API sm_status sm_spec_create(sm_mode mode, const double* weights, size_t n, sm_spec** out);
SM_API sm_status sm_spec_bottom_to_top(size_t n, size_t k, sm_spec** out);
SM_API sm_status sm_spec_two_point(size_t n, size_t k, sm_spec** out);
SM_API void sm_spec_destroy(sm_spec* spec);
SM_API size_t sm_spec_size(const sm_spec* spec);
/* 1 when every weight is at most 1/3. */
SM_API int sm_spec_third_rule(const sm_spec* spec);

/* ---- decks ---- */
SM_API sm_status sm_deck_create(size_t n, int reversed, sm_deck** out);
/* cards[i] is the card at position i + 1. */
SM_API sm_status sm_deck_from_positions(const uint32_t* cards, size_t n, sm_deck** out);
SM_API void sm_deck_destroy(sm_deck* deck);
SM_API size_t sm_deck_size(const sm_deck* deck);
SM_API sm_status sm_deck_card_at(const sm_deck* deck, size_t position, uint32_t* card);
SM_API sm_status sm_deck_position_of(const sm_deck* deck, uint32_t card, size_t* position);
SM_API sm_status sm_deck_move_to_top(sm_deck* deck, size_t position);
/* Writes n cards, top first. */
SM_API sm_status sm_deck_cards(const sm_deck* deck, uint32_t* out, size_t n);

/* ---- random streams ---- */
SM_API sm_status sm_rng_create(uint64_t master_seed, uint64_t stream, sm_rng** out);
SM_API void sm_rng_destroy(sm_rng* rng);
SM_API uint64_t sm_rng_next(sm_rng* rng);

/* One shuffle step; reports the moved card and its position before the move. */
SM_API sm_status sm_sample_step(const sm_spec* spec, sm_deck* deck, sm_rng* rng, size_t* position, uint32_t* card);

/* ---- exact analysis (n <= 8) ---- */
SM_API sm_status sm_exact_mixing_time(const sm_spec* spec, const sm_deck* start, double threshold, uint64_t max_steps,
                                      uint64_t* out);
/* TV distance to stationarity for t = 0..t_max; out holds t_max + 1 values. */
SM_API sm_status sm_exact_tv_curve(const sm_spec* spec, const sm_deck* start, uint64_t t_max, double* out);
/* || pi P - pi ||_1 for the stationary law (move-to-front product formula or
 * the numerically converged law of a position-weighted spec). */
SM_API sm_status sm_stationary_defect(const sm_spec* spec, double* out);
/* Eigenvalues of the single-card chain, sorted by decreasing modulus; n <= 512.
 * mags and args hold n values each. */
SM_API sm_status sm_single_card_spectrum(const sm_spec* spec, double* mags, double* args, size_t n);

/* ---- coupon-collector bounds (move-to-front) ---- */
typedef struct sm_mtf_bounds {
  uint64_t tau_u;
  int has_tau_0;
  uint64_t tau_0;
  uint64_t tau_1;
  uint64_t lower_bound;
  int64_t floor_bound; /* ceil(tau_u / 25) - 1 */
  int third_rule_ok;
} sm_mtf_bounds;

/* family is one of 'a', 'b', 'c', 'd'; out holds n weights. */
SM_API sm_status sm_example_weights(char family, size_t n, double* out);
SM_API sm_status sm_mtf_bounds_compute(const double* weights, size_t n, sm_mtf_bounds* out);
/* sum over the n - 1 largest weights of (1 - p)^t. */
SM_API sm_status sm_coupon_sum(const double* weights, size_t n, double t, double* out);
SM_API sm_status sm_mtf_multi_eigen_T(const double* weights, size_t n, uint64_t* steps, int* satisfiable);

/* ---- spectral lower bounds ---- */
typedef struct sm_lower_bound_report {
  size_t n;
  size_t k;
  double predicted_mag;
  double predicted_arg;
  double lambda_mag;
  double lambda_arg;
  double gamma;
  double theta;
  double g_residual;
  int newton_iterations;
  double eigenvector_residual;
  double distance_to_prediction;
  int certificate_issued; /* disc about the prediction */
  double certificate_radius;
  double certificate_delta;
  double certificate_derivative_lower;
  double certified_radius;
  double phi_s0;
  double R;
  double T;
  double formula;
  int gamma_in_band;
} sm_lower_bound_report;

SM_API sm_status sm_b2t_lower_bound(size_t n, size_t k, sm_lower_bound_report* out);
SM_API sm_status sm_two_point_lower_bound(size_t n, size_t k, sm_lower_bound_report* out);

typedef struct sm_two_point_stages {
  double lambda0_re, lambda0_im;
  double lambda1_re, lambda1_im;
  double lambda2_re, lambda2_im;
  int f_issued;
  double f_certified_radius;
  int g_issued;
  double g_certified_radius;
  double predicted_shift;
} sm_two_point_stages;

SM_API sm_status sm_two_point_stages_compute(size_t n, size_t k, sm_two_point_stages* out);

/* Newton on the family's characteristic equation from (start_re, start_im). */
SM_API sm_status sm_refine_root(sm_family family, size_t n, size_t k, double start_re, double start_im, double tol,
                                double* root_re, double* root_im, double* residual);

/* ---- couplings ---- */
typedef struct sm_coupling_sample {
  uint64_t T;
  uint64_t seed;
  uint64_t stream;
  int has_touched_all_but_one;
  uint64_t touched_all_but_one;
  int matched_history_ok;
  int stayed_coupled;
} sm_coupling_sample;

/* cap = 0 selects the default (100 times the theoretical bound). threads = 0
 * uses all cores. out holds `samples` entries in stream order. */
SM_API sm_status sm_couple_b2t_batch(size_t n, size_t k, const sm_deck* start, size_t samples, uint64_t master_seed,
                                     uint64_t cap, unsigned threads, sm_coupling_sample* out);
SM_API sm_status sm_couple_mtf_batch(const sm_spec* spec, const sm_deck* start, size_t samples, uint64_t master_seed,
                                     uint64_t cap, unsigned threads, sm_coupling_sample* out);
/* n^3 log n / (pi^2 k (k - 1)). */
SM_API sm_status sm_b2t_upper_bound(size_t n, size_t k, double* out);

typedef struct sm_survival_point {
  uint64_t t;
  double fraction;
  double half_width;
} sm_survival_point;

typedef struct sm_coupling_summary {
  size_t count;
  double mean;
  double median;
  uint64_t q95;
  uint64_t max;
} sm_coupling_summary;

/* survival holds grid_len points; grid_len may be 0. */
SM_API sm_status sm_coupling_quantiles(const uint64_t* times, size_t count, const uint64_t* grid, size_t grid_len,
                                       sm_coupling_summary* summary, sm_survival_point* survival);

typedef struct sm_cycle_stats {
  uint64_t cycles;
  double displacement_mean;
  double displacement_var;
  double duration_mean;
  double duration_var;
  int64_t max_displacement;
  uint64_t min_duration;
} sm_cycle_stats;

SM_API sm_status sm_cycle_stats_run(size_t n, size_t k, uint64_t cycles, sm_rng* rng, sm_cycle_stats* out);

typedef struct sm_u_convention {
  int chosen_at_k; /* 1: U uses (Z - k)_+, 0: (Z - (k - 1))_+ */
  double max_abs_mean_at_k;
  double max_abs_mean_at_k_minus_one;
} sm_u_convention;

SM_API sm_status sm_u_convention_check(size_t n, sm_u_convention* out);

typedef struct sm_u_variance {
  uint64_t t;
  double mean;
  double variance;
  double variance_se;
  double max_abs_conditional_mean;
} sm_u_variance;

/* One entry per checkpoint, all from the same traces. */
SM_API sm_status sm_u_stat_variance(size_t n, size_t traces, const uint64_t* checkpoints, size_t checkpoint_count,
                                    uint64_t master_seed, unsigned threads, sm_u_variance* out);

#ifdef __cplusplus
}
#endif

#endif /* SHUFFLEMIX_H */
