/*
 * C interface of the divide-and-discard set-membership observer.
 *
 * Every function that can fail returns a ddo_status; DDO_OK is 0.  On
 * failure a human-readable message is kept per thread and can be read
 * with ddo_last_error() until the next failing call.  Objects are owned
 * by the caller and released with the matching _free function; _free
 * accepts NULL.
 *
 * Array arguments are plain double buffers.  Boxes are passed as two
 * buffers lo[] and hi[] of the state dimension; matrices are row-major.
 */

#ifndef DDO_DDO_H
#define DDO_DDO_H

#include <stdint.h>

#if defined(_WIN32)
#define DDO_API __declspec(dllexport)
#else
#define DDO_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ddo_status {
  DDO_OK = 0,
  DDO_ERR_INVALID_ARGUMENT = 1,
  DDO_ERR_DIMENSION_MISMATCH = 2,
  DDO_ERR_EMPTY_SET = 3,
  DDO_ERR_DIVISOR_CONTAINS_ZERO = 4,
  DDO_ERR_NEGATIVE_DOMAIN = 5,
  DDO_ERR_ZERO_COEFFICIENT = 6,
  DDO_ERR_NONPOSITIVE_SCALE = 7,
  DDO_ERR_ZERO_WIDTH_SPLIT = 8,
  DDO_ERR_INCONSISTENT_MEASUREMENTS = 9,
  DDO_ERR_DOMAIN_VIOLATION = 10,
  DDO_ERR_INITIAL_STATE_OUTSIDE_X0 = 11,
  DDO_ERR_NONPOSITIVE_METRIC = 12,
  DDO_ERR_INTERNAL = 13
} ddo_status;

typedef struct ddo_model ddo_model;
typedef struct ddo_truth ddo_truth;
typedef struct ddo_observer ddo_observer;
typedef struct ddo_directions ddo_directions;

/* Stable name of a status value, e.g. "DDO_ERR_EMPTY_SET". */
DDO_API const char* ddo_status_name(ddo_status status);

/* Message of the last failure on the calling thread; empty string if none. */
DDO_API const char* ddo_last_error(void);

/* ---- benchmark models ---------------------------------------------- */

/* Van der Pol oscillator with the built-in uncertainty sets. */
DDO_API ddo_status ddo_vdp_model_create(double mu, double h, ddo_model** out);

typedef struct ddo_tank_params {
  int n;                  /* number of tanks, >= 2 */
  double h;               /* step size */
  double g;               /* gravity */
  const double* kappa;    /* n outflow constants, NULL = 0.015 everywhere */
  double u_level;         /* nominal inflow per channel */
  double level_floor;     /* minimum level accepted by the jacobian */
  const int* inflow;      /* 1-based inflow tanks, NULL = built-in layout */
  int inflow_count;
  const int* measured;    /* 1-based measured tanks, NULL = built-in layout */
  int measured_count;
} ddo_tank_params;

/* Fills the defaults: n = 30, h = 0.5, g = 9.81, u_level = 0.1,
 * level_floor = 1e-6, built-in kappa and tank layouts. */
DDO_API void ddo_tank_params_init(ddo_tank_params* params);

DDO_API ddo_status ddo_tank_model_create(const ddo_tank_params* params, ddo_model** out);

/* Scales the disturbance and noise bounds about their centers. */
DDO_API ddo_status ddo_model_scale_uncertainty(ddo_model* model, double w_factor,
                                               double v_factor);

DDO_API void ddo_model_free(ddo_model* model);

DDO_API int ddo_model_state_dim(const ddo_model* model);
DDO_API int ddo_model_input_dim(const ddo_model* model);
DDO_API int ddo_model_measurement_dim(const ddo_model* model);

/* Initial state bounds; lo and hi must hold state_dim doubles. */
DDO_API ddo_status ddo_model_initial_box(const ddo_model* model, double* lo, double* hi);

/* ---- ground-truth simulation ---------------------------------------- */

/* Simulates `horizon` steps with seeded uniform disturbance and noise.
 * x0 may be NULL (center of the initial bounds); inputs may be NULL
 * (nominal input each step) or hold horizon * input_dim doubles,
 * row-major. */
DDO_API ddo_status ddo_truth_create(const ddo_model* model, const double* x0,
                                    const double* inputs, int horizon, uint64_t seed,
                                    ddo_truth** out);
DDO_API void ddo_truth_free(ddo_truth* truth);

DDO_API int ddo_truth_horizon(const ddo_truth* truth);

/* k in [0, horizon] for states/measurements, [0, horizon) for inputs. */
DDO_API ddo_status ddo_truth_state(const ddo_truth* truth, int k, double* out);
DDO_API ddo_status ddo_truth_measurement(const ddo_truth* truth, int k, double* out);
DDO_API ddo_status ddo_truth_input(const ddo_truth* truth, int k, double* out);

/* ---- observer -------------------------------------------------------- */

typedef struct ddo_observer_config {
  int m_max;             /* box budget per step, >= 1 */
  int i_max;             /* Gauss-Seidel sweeps per box, >= 1 */
  int k_split;           /* bins of the splitting heuristic */
  int k_prune;           /* bins of the pruning heuristic */
  int rigorous;          /* nonzero = outward-rounded interval arithmetic */
  const double* scaling; /* per-dimension width scales, NULL = from X0 */
} ddo_observer_config;

/* Fills the defaults: m_max = 1, i_max = 5, k_split = k_prune = 20,
 * fast rounding, scaling from the initial bounds. */
DDO_API void ddo_observer_config_init(ddo_observer_config* config);

DDO_API ddo_status ddo_observer_create(const ddo_model* model,
                                       const ddo_observer_config* config,
                                       ddo_observer** out);
DDO_API void ddo_observer_free(ddo_observer* observer);

/* Contracts the initial bounds against the first measurement y0 (length
 * measurement_dim). */
DDO_API ddo_status ddo_observer_init(ddo_observer* observer, const double* y0);

/* Advances one step with input u (length input_dim, NULL allowed when the
 * model has no inputs) and the next measurement. */
DDO_API ddo_status ddo_observer_step(ddo_observer* observer, const double* u,
                                     const double* y_next);

/* Number of boxes in the current collection; negative before init. */
DDO_API int ddo_observer_box_count(const ddo_observer* observer);

/* Steps taken so far (0 right after init); negative before init. */
DDO_API int ddo_observer_current_step(const ddo_observer* observer);

/* Bounds of one box of the collection; buffers hold state_dim doubles. */
DDO_API ddo_status ddo_observer_box(const ddo_observer* observer, int index, double* lo,
                                    double* hi);

/* Interval hull of the collection. */
DDO_API ddo_status ddo_observer_hull(const ddo_observer* observer, double* lo, double* hi);

/* Sets *out to 1 when the point lies in some box of the collection. */
DDO_API ddo_status ddo_observer_contains(const ddo_observer* observer, const double* x,
                                         int* out);

/* Support function of the collection union in the given direction. */
DDO_API ddo_status ddo_observer_support(const ddo_observer* observer,
                                        const double* direction, double* out);

/* vol(hull)^(1/n) of the current collection. */
DDO_API ddo_status ddo_observer_hull_volume_term(const ddo_observer* observer, double* out);

/* Mean two-sided support width over a direction set. */
DDO_API ddo_status ddo_observer_width_term(const ddo_observer* observer,
                                           const ddo_directions* directions, double* out);

/* ---- evaluation metrics ---------------------------------------------- */

/* `count` seeded unit directions in the given dimension. */
DDO_API ddo_status ddo_directions_create(int dim, int count, uint64_t seed,
                                         ddo_directions** out);
DDO_API void ddo_directions_free(ddo_directions* directions);

DDO_API int ddo_directions_count(const ddo_directions* directions);

/* Copies direction `index` into out (dim doubles). */
DDO_API ddo_status ddo_directions_get(const ddo_directions* directions, int index,
                                      double* out);

/* Divides values[0..count) by their minimum in place; all must be > 0. */
DDO_API ddo_status ddo_normalize(double* values, int count);

#ifdef __cplusplus
}
#endif

#endif /* DDO_DDO_H */
