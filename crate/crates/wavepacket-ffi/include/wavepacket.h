#ifndef WAVEPACKET_H
#define WAVEPACKET_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Branch selector for branch products: 0 incident, 1 reflected,
 * 2 transmitted.
 */
#define WP_BRANCH_INCIDENT 0

#define WP_BRANCH_REFLECTED 1

#define WP_BRANCH_TRANSMITTED 2

/**
 * Waist mode: 0 = time minimum, 1 = fixed distance past the boundary.
 */
#define WP_WAIST_TIME_MINIMUM 0

#define WP_WAIST_FIXED_DISTANCE 1

/**
 * Status codes returned by every entry point.
 */
typedef enum WpStatus {
  WP_STATUS_OK = 0,
  WP_STATUS_INVALID_ARGUMENT = 1,
  WP_STATUS_DOMAIN_ERROR = 2,
  WP_STATUS_NUMERICAL = 3,
  WP_STATUS_NULL_POINTER = 4,
} WpStatus;

/**
 * Opaque numeric table (sweeps, correlation curves).
 */
typedef struct WpTable WpTable;

/**
 * Position/momentum moment summary.
 */
typedef struct WpMoments {
  double mean_x;
  double mean_p;
  double delta_x;
  double delta_p;
  double product;
  double norm;
} WpMoments;

/**
 * Complex scattering amplitudes of one stationary solution.
 */
typedef struct WpScatterSolution {
  double k;
  double k_prime_re;
  double k_prime_im;
  double b_minus_re;
  double b_minus_im;
  double a_plus_re;
  double a_plus_im;
  double a_minus_re;
  double a_minus_im;
  double c_plus_re;
  double c_plus_im;
  double boundary_residual;
} WpScatterSolution;

/**
 * Mean-free-path coherence parameters.
 */
typedef struct WpCoherence {
  double l;
  double gamma_packet;
  double delta_p;
  double delta_e;
  double tau;
} WpCoherence;

/**
 * Width-state bundle for the transformation maps.
 */
typedef struct WpWidthState {
  double p0_l;
  double delta_p_l;
  double delta_p_t;
  double delta_x_l;
  double delta_x_t;
  double mass;
  double energy;
} WpWidthState;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static C string.
 */
const char *wp_version(void);

/**
 * Static description of a status code.
 */
const char *wp_status_message(enum WpStatus status);

/**
 * Moments of a (possibly Hermite-modulated) Gaussian packet at time `t`.
 *
 * # Safety
 * `out` must point to a writable `WpMoments`.
 */
enum WpStatus wp_packet_moments(double gamma,
                                double p0,
                                double x0,
                                uint32_t m_order,
                                double mass,
                                double hbar,
                                double t,
                                struct WpMoments *out);

/**
 * Numerical dx*dp of the order-m Hermite packet.
 *
 * # Safety
 * `out` must point to a writable f64.
 */
enum WpStatus wp_hermite_uncertainty_product(uint32_t m_order,
                                             double gamma,
                                             double hbar,
                                             double *out);

/**
 * Step amplitudes at incident wavenumber `k`; the step offset `v0` sits on
 * the incident side.
 *
 * # Safety
 * `out` must point to a writable `WpScatterSolution`.
 */
enum WpStatus wp_step_amplitudes(double k,
                                 double v0,
                                 double mass,
                                 double hbar,
                                 struct WpScatterSolution *out);

/**
 * Barrier amplitudes at total energy `energy` for the well of depth `v0`
 * and width `a`.
 *
 * # Safety
 * `out` must point to a writable `WpScatterSolution`.
 */
enum WpStatus wp_barrier_amplitudes(double energy,
                                    double v0,
                                    double a,
                                    double mass,
                                    double hbar,
                                    struct WpScatterSolution *out);

/**
 * Uncertainty product of one scattering branch for a step potential.
 * `mode` selects the waist convention (`WP_WAIST_*`).
 *
 * # Safety
 * The three out-pointers must be writable.
 */
enum WpStatus wp_step_branch_product(double k0,
                                     double sigma_k,
                                     uintptr_t n_points,
                                     double v0,
                                     int32_t branch,
                                     int32_t mode,
                                     double distance,
                                     double mass,
                                     double hbar,
                                     double *out_delta_x,
                                     double *out_delta_p,
                                     double *out_product);

/**
 * Step-depth sweep; returns an opaque 3-column table
 * (v0_over_e0, product_reflected, product_transmitted), products in
 * units of hbar/2.
 *
 * # Safety
 * `ratios` must point to `n_ratios` readable f64; `out` receives an owned
 * handle that must be released with [`wp_table_free`].
 */
enum WpStatus wp_sweep_step_depth(double k0,
                                  double sigma_k,
                                  uintptr_t n_points,
                                  const double *ratios,
                                  uintptr_t n_ratios,
                                  double mass,
                                  double hbar,
                                  struct WpTable **out);

/**
 * Barrier-width sweep; 3-column table (a, product_reflected,
 * product_transmitted), products in units of hbar/2.
 *
 * # Safety
 * `widths` must point to `n_widths` readable f64; `out` receives an owned
 * handle that must be released with [`wp_table_free`].
 */
enum WpStatus wp_sweep_barrier_width(double k0,
                                     double sigma_k,
                                     uintptr_t n_points,
                                     double v0,
                                     const double *widths,
                                     uintptr_t n_widths,
                                     double mass,
                                     double hbar,
                                     struct WpTable **out);

/**
 * Number of rows in a table handle.
 *
 * # Safety
 * `table` must be a live handle from this library.
 */
uintptr_t wp_table_rows(const struct WpTable *table);

/**
 * Number of columns in a table handle.
 *
 * # Safety
 * `table` must be a live handle from this library.
 */
uintptr_t wp_table_columns(const struct WpTable *table);

/**
 * Fetch one cell of a table handle.
 *
 * # Safety
 * `table` must be a live handle; `out` must be writable.
 */
enum WpStatus wp_table_get(const struct WpTable *table,
                           uintptr_t row,
                           uintptr_t column,
                           double *out);

/**
 * Release a table handle. Passing NULL is a no-op.
 *
 * # Safety
 * `table` must be NULL or an owned handle not freed before.
 */
void wp_table_free(struct WpTable *table);

/**
 * Thomson cross section in m^2.
 */
double wp_sigma_thomson(void);

/**
 * Rutherford cross section in m^2.
 *
 * # Safety
 * `out` must be writable.
 */
enum WpStatus wp_sigma_rutherford(double temperature, double coulomb_log, double *out);

/**
 * Mean free path 1/(sigma n).
 *
 * # Safety
 * `out` must be writable.
 */
enum WpStatus wp_mean_free_path(double sigma, double n, double *out);

/**
 * Coherence parameters from a mean free path and speed.
 *
 * # Safety
 * `out` must point to a writable `WpCoherence`.
 */
enum WpStatus wp_coherence_from_path(double l, double v, double hbar, struct WpCoherence *out);

/**
 * Boost a width state along its longitudinal axis.
 *
 * # Safety
 * `state` must be readable and `out` writable.
 */
enum WpStatus wp_lorentz_boost(const struct WpWidthState *state,
                               double beta,
                               double c,
                               double hbar,
                               struct WpWidthState *out);

/**
 * Nonrelativistic potential step on a width state.
 *
 * # Safety
 * `state` must be readable and `out` writable.
 */
enum WpStatus wp_add_potential_nonrel(const struct WpWidthState *state,
                                      double v0,
                                      double c,
                                      struct WpWidthState *out);

/**
 * Relativistic potential step on a width state.
 *
 * # Safety
 * `state` must be readable and `out` writable.
 */
enum WpStatus wp_add_potential_rel(const struct WpWidthState *state,
                                   double v0,
                                   double c,
                                   struct WpWidthState *out);

/**
 * Massless scale transformation on a width state.
 *
 * # Safety
 * `state` must be readable and `out` writable.
 */
enum WpStatus wp_scale_transform(const struct WpWidthState *state,
                                 double lambda,
                                 double c,
                                 struct WpWidthState *out);

/**
 * Electron metal-to-vacuum interface crossing.
 *
 * # Safety
 * `state` must be readable and `out` writable.
 */
enum WpStatus wp_cross_electron_interface(const struct WpWidthState *state,
                                          double e0,
                                          double m_eff,
                                          double m0,
                                          double c,
                                          double hbar,
                                          struct WpWidthState *out);

/**
 * Light medium-to-vacuum crossing; `rho > 0` adds absorption and fills the
 * lifetime and energy-width outputs (NULL-able).
 *
 * # Safety
 * `state` must be readable and `out` writable; the lifetime pointers may
 * be NULL.
 */
enum WpStatus wp_cross_light_interface(const struct WpWidthState *state,
                                       double mu_r,
                                       double eps_r,
                                       double rho,
                                       double c,
                                       double hbar,
                                       double eps0,
                                       struct WpWidthState *out,
                                       double *out_lifetime,
                                       double *out_energy_width);

/**
 * Decay correlation of an isotropic Gaussian source at shift
 * (dx, dy, dz); `eps_e <= 0` disables the energy regulator (the
 * three-body form).
 *
 * # Safety
 * `out` must be writable.
 */
enum WpStatus wp_decay_correlation(double sigma,
                                   double dx,
                                   double dy,
                                   double dz,
                                   double eps_e,
                                   double *out);

/**
 * Collision correlation of two isotropic Gaussian sources.
 *
 * # Safety
 * `out` must be writable.
 */
enum WpStatus wp_collision_correlation(double sigma_a,
                                       double sigma_b,
                                       double dx,
                                       double dy,
                                       double dz,
                                       double *out);

/**
 * Thermal photon correlation curve at temperature `t_kelvin`, sampled on
 * `n_samples` points of [0, delta_max] (units of k_B T). Returns a
 * 2-column table (delta, c_value) and writes the fitted Gaussian width.
 *
 * # Safety
 * `out_table` receives an owned handle (release with [`wp_table_free`]);
 * `out_width` may be NULL.
 */
enum WpStatus wp_thermal_correlation_curve(double t_kelvin,
                                           double delta_max,
                                           uintptr_t n_samples,
                                           double radial_cutoff,
                                           struct WpTable **out_table,
                                           double *out_width);

/**
 * Root-sum-square accumulation of independent momentum spreads.
 *
 * # Safety
 * `spreads` must point to `n` readable f64; `out` must be writable.
 */
enum WpStatus wp_total_momentum_spread(const double *spreads, uintptr_t n, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* WAVEPACKET_H */
