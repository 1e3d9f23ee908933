#ifndef HERALD_H
#define HERALD_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result code of every fallible call.
typedef enum HeraldStatus {
  HERALD_STATUS_OK = 0,
  HERALD_STATUS_NULL_POINTER = 1,
  HERALD_STATUS_DOMAIN = 2,
  HERALD_STATUS_UNDEFINED_POSTERIOR = 3,
  HERALD_STATUS_UNDEFINED_CONDITIONING = 4,
  HERALD_STATUS_DELAY_OUT_OF_RANGE = 5,
  HERALD_STATUS_NOT_UNIMODAL = 6,
  HERALD_STATUS_INVALID_ARGUMENT = 7,
  HERALD_STATUS_IO = 8,
  HERALD_STATUS_PANIC = 9,
} HeraldStatus;

typedef enum HeraldKind {
  HERALD_KIND_BOSE_EINSTEIN = 0,
  HERALD_KIND_POISSON = 1,
} HeraldKind;

// Opaque source configuration.
typedef struct HeraldConfig HeraldConfig;

// Opaque finished simulation run.
typedef struct HeraldSimulation HeraldSimulation;

typedef struct HeraldSourceComparison {
  double faint_laser;
  double conventional_unheralded;
  double conventional_heralded;
  double multiplexed_heralded;
} HeraldSourceComparison;

typedef struct HeraldLossBudget {
  double net_transmittance;
  double net_loss;
} HeraldLossBudget;

// One Monte Carlo estimate. `name` stays valid until the owning
// simulation is freed. `defined` is false when the denominator is zero,
// in which case `estimate` and `standard_error` are NaN.
typedef struct HeraldEstimate {
  const char *name;
  uint32_t delay;
  uint64_t numerator;
  uint64_t denominator;
  bool defined;
  double estimate;
  double standard_error;
} HeraldEstimate;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Static description of a status code. Never null.
const char *herald_status_message(enum HeraldStatus status);

// Message of the last failed call on this thread, empty if none. Valid
// until the next failing call on the same thread.
const char *herald_last_error(void);

// # Safety
// `out` must be null or valid for a pointer write.
enum HeraldStatus herald_config_new(double nbar,
                                    double eta,
                                    uint32_t num_delays,
                                    enum HeraldKind kind,
                                    struct HeraldConfig **out);

// # Safety
// `cfg` must be null or a handle from [`herald_config_new`] not yet freed.
void herald_config_free(struct HeraldConfig *cfg);

// Probability of no trigger in any delay.
//
// # Safety
// `cfg` must be a live handle; `out` must be valid for a write.
enum HeraldStatus herald_no_trigger_prob(const struct HeraldConfig *cfg, double *out);

// Unconditional probability of exactly one photon in total.
//
// # Safety
// `cfg` must be a live handle; `out` must be valid for a write.
enum HeraldStatus herald_single_photon_prob(const struct HeraldConfig *cfg, double *out);

// Probability of exactly one photon given some trigger.
//
// # Safety
// `cfg` must be a live handle; `out` must be valid for a write.
enum HeraldStatus herald_single_photon_prob_given_trigger(const struct HeraldConfig *cfg,
                                                          double *out);

// Probability of a single photon given the first trigger at delay `delay`
// (1-based).
//
// # Safety
// `cfg` must be a live handle; `out` must be valid for a write.
enum HeraldStatus herald_certification(const struct HeraldConfig *cfg, uint32_t delay, double *out);

// Probability that the first trigger occurs at delay `delay` (1-based).
//
// # Safety
// `cfg` must be a live handle; `out` must be valid for a write.
enum HeraldStatus herald_delay_fire_prob(const struct HeraldConfig *cfg,
                                         uint32_t delay,
                                         double *out);

// Mean photon number maximising the single-photon probability.
//
// # Safety
// `out` must be valid for a write.
enum HeraldStatus herald_optimal_mean(double eta,
                                      uint32_t num_delays,
                                      enum HeraldKind kind,
                                      double *out);

// # Safety
// `out` must be valid for a write.
enum HeraldStatus herald_source_comparison(double nbar,
                                           double eta,
                                           uint32_t num_delays,
                                           struct HeraldSourceComparison *out);

// Net transmittance and loss of `len` surfaces in series.
//
// # Safety
// `transmittances` must point to `len` readable doubles (or be null with
// `len == 0`); `out` must be valid for a write.
enum HeraldStatus herald_loss_budget(const double *transmittances,
                                     size_t len,
                                     struct HeraldLossBudget *out);

// Run the delay-multiplexed Monte Carlo.
//
// # Safety
// `cfg` must be a live handle; `out` must be valid for a pointer write.
enum HeraldStatus herald_simulate_delay(const struct HeraldConfig *cfg,
                                        uint64_t trials,
                                        uint64_t seed,
                                        struct HeraldSimulation **out);

// Run the switched-array Monte Carlo.
//
// # Safety
// `cfg` must be a live handle; `out` must be valid for a pointer write.
enum HeraldStatus herald_simulate_array(const struct HeraldConfig *cfg,
                                        uint64_t trials,
                                        uint64_t seed,
                                        double switch_transmittance,
                                        double output_transmittance,
                                        struct HeraldSimulation **out);

// Number of estimates in a run, 0 for null.
//
// # Safety
// `sim` must be null or a live handle.
size_t herald_simulation_len(const struct HeraldSimulation *sim);

// # Safety
// `sim` must be a live handle; `out` must be valid for a write.
enum HeraldStatus herald_simulation_get(const struct HeraldSimulation *sim,
                                        size_t index,
                                        struct HeraldEstimate *out);

// # Safety
// `sim` must be null or a handle not yet freed.
void herald_simulation_free(struct HeraldSimulation *sim);

// Analytic sweep with default grids for `target` ("fig3a", "fig3b",
// "fig4", "fig5"), written as CSV into a new string.
//
// # Safety
// `target` must be a NUL-terminated string; `out` must be valid for a
// pointer write. Free the result with [`herald_string_free`].
enum HeraldStatus herald_sweep_csv(const char *target, enum HeraldKind kind, char **out);

// # Safety
// `s` must be null or a string returned by this library, not yet freed.
void herald_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HERALD_H */
