#ifndef FESHBACH_H
#define FESHBACH_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum FbStatus {
  FB_STATUS_OK = 0,
  FB_STATUS_NULL_POINTER = 1,
  FB_STATUS_INVALID_ARGUMENT = 2,
  FB_STATUS_DOMAIN = 3,
  FB_STATUS_CONVERGENCE = 4,
  FB_STATUS_COLLAPSE = 5,
  FB_STATUS_BRACKET = 6,
  FB_STATUS_NUMERICAL = 7,
  FB_STATUS_IO = 8,
  FB_STATUS_PANIC = 9,
} FbStatus;

typedef enum FbProtocolKind {
  FB_PROTOCOL_KIND_STA = 0,
  FB_PROTOCOL_KIND_TRA = 1,
} FbProtocolKind;

/**
 * Shortcut or reference ramp between two interaction strengths.
 */
typedef struct FbProtocol FbProtocol;

/**
 * Grid, time step and relaxation settings for the GPE solver.
 */
typedef struct FbSolver FbSolver;

/**
 * Condensate wave function together with the interaction it relaxed at.
 */
typedef struct FbWaveFunction FbWaveFunction;

typedef struct FbScaleFactor {
  double a;
  double a_dot;
  double a_ddot;
} FbScaleFactor;

typedef struct FbStrokeResult {
  double w_irr;
  double fidelity;
  double e_final;
  double e_target;
  /**
   * 1 if the condensate collapsed during the stroke.
   */
  int32_t collapsed;
  /**
   * NaN unless `collapsed`.
   */
  double collapse_time;
} FbStrokeResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread, or NULL. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *fb_last_error_message(void);

enum FbStatus fb_chemical_potential(double n, double g, uint32_t dim, double *mu);

enum FbStatus fb_tf_energy(double n, double g, uint32_t dim, double *e);

enum FbStatus fb_adiabatic_efficiency(double g_i, double g_f, uint32_t dim, double *eta);

/**
 * `ln Delta(t_f)` for the shortcut ramp.
 */
enum FbStatus fb_log_growth_factor(double g_i,
                                   double g_f,
                                   double n,
                                   uint32_t dim,
                                   double t_f,
                                   double *log_delta);

enum FbStatus fb_min_stroke_time(double g_i,
                                 double g_f,
                                 double n,
                                 uint32_t dim,
                                 double delta_crit,
                                 double *t_f_min);

enum FbStatus fb_protocol_new(double g_i,
                              double g_f,
                              double t_f,
                              uint32_t dim,
                              enum FbProtocolKind kind,
                              struct FbProtocol **handle);

void fb_protocol_free(struct FbProtocol *handle);

enum FbStatus fb_protocol_scale_factor(const struct FbProtocol *handle,
                                       double t,
                                       struct FbScaleFactor *result);

enum FbStatus fb_protocol_interaction(const struct FbProtocol *handle, double t, double *g);

enum FbStatus fb_protocol_rescaled_time(const struct FbProtocol *handle, double t, double *tau);

/**
 * Solver on an explicit grid. `points == 0` or `extent <= 0` selects the
 * default for that parameter; `dt <= 0` selects the grid's default step.
 */
enum FbStatus fb_solver_new(uint32_t dim,
                            double extent,
                            size_t points,
                            double dt,
                            struct FbSolver **handle);

/**
 * Solver on the default grid, enlarged to hold condensates up to `mu_max`.
 */
enum FbStatus fb_solver_for_condensate(uint32_t dim, double mu_max, struct FbSolver **handle);

void fb_solver_free(struct FbSolver *handle);

enum FbStatus fb_solver_time_step(const struct FbSolver *handle, double *dt);

enum FbStatus fb_ground_state(const struct FbSolver *solver,
                              double n,
                              double g,
                              struct FbWaveFunction **handle);

void fb_wavefunction_free(struct FbWaveFunction *handle);

/**
 * Number of stored grid values.
 */
enum FbStatus fb_wavefunction_len(const struct FbWaveFunction *handle, size_t *len);

enum FbStatus fb_wavefunction_norm(const struct FbWaveFunction *handle, double *norm);

/**
 * Copies the stored values (`r psi` on radial grids) into `re` and `im`,
 * each of capacity `len`, which must equal [`fb_wavefunction_len`].
 */
enum FbStatus fb_wavefunction_values(const struct FbWaveFunction *handle,
                                     double *re,
                                     double *im,
                                     size_t len);

/**
 * Energy of the wave function at interaction `g`.
 */
enum FbStatus fb_energy(const struct FbWaveFunction *handle, double g, double *e);

enum FbStatus fb_fidelity(const struct FbWaveFunction *a,
                          const struct FbWaveFunction *b,
                          double *f);

/**
 * Propagates `initial` under the chosen ramp to `target.g` in time `t_f`
 * and reports the end-of-stroke observables against `target`.
 */
enum FbStatus fb_run_stroke(const struct FbSolver *solver,
                            const struct FbWaveFunction *initial,
                            const struct FbWaveFunction *target,
                            double t_f,
                            enum FbProtocolKind kind,
                            struct FbStrokeResult *result);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FESHBACH_H */
