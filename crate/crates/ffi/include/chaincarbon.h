#ifndef CHAINCARBON_H
#define CHAINCARBON_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes. Zero is success.
 */
typedef enum CcStatus {
  CC_STATUS_OK = 0,
  CC_STATUS_NULL_POINTER = 1,
  CC_STATUS_INVALID_ARGUMENT = 2,
  CC_STATUS_IO = 3,
  CC_STATUS_DATA = 4,
  CC_STATUS_ZERO_RETURN = 5,
  CC_STATUS_NON_CONVERGENCE = 6,
  CC_STATUS_INSUFFICIENT_DATA = 7,
  CC_STATUS_FIT_DIVERGENCE = 8,
  CC_STATUS_PANIC = 9,
} CcStatus;

/**
 * Reference hardware for `cc_pos_scenario_default`.
 */
typedef enum CcHardware {
  /**
   * Low-power single-board host (lower bound).
   */
  CC_HARDWARE_LOW_POWER = 0,
  /**
   * Rack server (upper bound).
   */
  CC_HARDWARE_SERVER = 1,
} CcHardware;

typedef struct CcCountryTable CcCountryTable;

typedef struct CcPosScenario CcPosScenario;

typedef struct CcTrajectory CcTrajectory;

typedef struct CcWeightedFactors {
  double electricity_price_usd_per_kwh;
  double internet_price_usd_per_month;
  double emission_factor_kgco2_per_kwh;
} CcWeightedFactors;

typedef struct CcPosParams {
  double total_stake;
  double stake_per_validator;
  double token_price;
  double reward_constant;
  double depreciation_years;
  struct CcWeightedFactors weighted;
} CcPosParams;

typedef struct CcPosResult {
  double validator_count;
  double annual_return_per_validator;
  double staker_annual_cost;
  double validators_per_node;
  double node_count;
  double annual_energy_twh;
  double annual_carbon_mtco2;
} CcPosResult;

typedef struct CcSimOutcome {
  uint64_t node_count;
  double validators_assigned;
  double total_energy_twh;
  bool converged;
  uint64_t steps_used;
} CcSimOutcome;

typedef struct CcLogisticParams {
  double k;
  double p0;
  double r0;
  int32_t t0_year;
} CcLogisticParams;

typedef struct CcLogisticFit {
  struct CcLogisticParams params;
  double residual_ss;
  uint32_t iterations;
} CcLogisticFit;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the last error message on this thread into `buf` (NUL-terminated,
 * truncated to `len`). Returns the full message length excluding the NUL.
 */
size_t cc_last_error_message(char *buf, size_t len);

/**
 * Lower-bound energy of one day, MWh.
 */
enum CcStatus cc_pow_lower_daily_energy(double hash_rate_ghs,
                                        double efficiency_j_per_mh,
                                        double *out_mwh);

/**
 * Upper-bound energy of one day, MWh. Rewards are in tokens, prices in USD
 * per token and USD/kWh.
 */
enum CcStatus cc_pow_upper_daily_energy(double block_reward,
                                        double tx_fees,
                                        double uncle_reward,
                                        double uncle_incl_reward,
                                        double market_price_usd,
                                        double electricity_price_usd_per_kwh,
                                        double *out_mwh);

/**
 * Loads a country profile CSV.
 */
enum CcStatus cc_country_table_load(const char *path, struct CcCountryTable **out_table);

size_t cc_country_table_len(const struct CcCountryTable *table);

enum CcStatus cc_country_table_weighted(const struct CcCountryTable *table,
                                        struct CcWeightedFactors *out_factors);

void cc_country_table_free(struct CcCountryTable *table);

/**
 * Writes the reference staking parameters to `out_params`.
 */
enum CcStatus cc_pos_params_default(struct CcPosParams *out_params);

/**
 * Reference parameters with one of the two reference hosts.
 */
struct CcPosScenario *cc_pos_scenario_default(enum CcHardware hardware);

/**
 * Scenario with custom parameters and host hardware.
 */
enum CcStatus cc_pos_scenario_new(const struct CcPosParams *params,
                                  double hardware_power_w,
                                  double hardware_price_usd,
                                  struct CcPosScenario **out_scenario);

enum CcStatus cc_pos_scenario_params(const struct CcPosScenario *scenario,
                                     struct CcPosParams *out_params);

/**
 * Replaces the parameters, keeping the hardware.
 */
enum CcStatus cc_pos_scenario_set_params(struct CcPosScenario *scenario,
                                         const struct CcPosParams *params);

void cc_pos_scenario_free(struct CcPosScenario *scenario);

enum CcStatus cc_pos_model(const struct CcPosScenario *scenario, struct CcPosResult *out_result);

/**
 * Node count from the single-expression form of the model.
 */
enum CcStatus cc_pos_closed_form_node_count(const struct CcPosScenario *scenario,
                                            double *out_nodes);

/**
 * Agent-based entry simulation. Zero `entry_batch` or `max_steps` selects
 * the defaults.
 */
enum CcStatus cc_equilibrium_simulate(const struct CcPosScenario *scenario,
                                      uint64_t seed,
                                      uint64_t entry_batch,
                                      uint64_t max_steps,
                                      struct CcSimOutcome *out_outcome);

/**
 * Transaction growth parameters for the Bitcoin network.
 */
struct CcLogisticParams cc_logistic_bitcoin_default(void);

/**
 * Logistic value `t` years after `t0_year`.
 */
enum CcStatus cc_logistic_value(const struct CcLogisticParams *params, double t, double *out_value);

/**
 * Fits P0 and r0 to `len` (year, transactions) pairs for a fixed `k`.
 */
enum CcStatus cc_fit_logistic(const int32_t *years,
                              const double *transactions,
                              size_t len,
                              double k,
                              struct CcLogisticFit *out_fit);

/**
 * Emissions growing with transaction volume along a logistic curve.
 */
enum CcStatus cc_project_logistic(double baseline_annual_mtco2,
                                  double baseline_tx,
                                  const struct CcLogisticParams *params,
                                  int32_t start_year,
                                  uint32_t horizon_years,
                                  struct CcTrajectory **out_trajectory);

/**
 * Emissions following the `quantile` adoption curve of the CSV at
 * `curves_path`, `years_since_introduction` years into adoption.
 */
enum CcStatus cc_project_adoption(const char *curves_path,
                                  double quantile,
                                  uint32_t years_since_introduction,
                                  double baseline_annual_mtco2,
                                  double current_fraction,
                                  int32_t start_year,
                                  uint32_t horizon_years,
                                  struct CcTrajectory **out_trajectory);

size_t cc_trajectory_len(const struct CcTrajectory *trajectory);

int32_t cc_trajectory_start_year(const struct CcTrajectory *trajectory);

/**
 * Copies annual emissions (MtCO₂) into `buf`, which must hold
 * `cc_trajectory_len` values.
 */
enum CcStatus cc_trajectory_annual(const struct CcTrajectory *trajectory, double *buf, size_t len);

/**
 * Copies cumulative emissions (GtCO₂) into `buf`.
 */
enum CcStatus cc_trajectory_cumulative(const struct CcTrajectory *trajectory,
                                       double *buf,
                                       size_t len);

/**
 * First year in which `lambda` (°C per GtCO₂) times cumulative emissions
 * reaches `threshold_c`. `out_found` is false when it never does.
 */
enum CcStatus cc_trajectory_crossing_year(const struct CcTrajectory *trajectory,
                                          double lambda,
                                          double threshold_c,
                                          bool *out_found,
                                          int32_t *out_year);

void cc_trajectory_free(struct CcTrajectory *trajectory);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CHAINCARBON_H */
