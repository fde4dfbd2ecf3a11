// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef CJT_CJT_H
#define CJT_CJT_H

/*
 * C interface to the coordinated multi-point beamforming library.
 *
 * Objects are opaque and owned by the caller once returned; release them with
 * the matching *_free function. Every fallible call returns a cjt_status and
 * leaves a human-readable message retrievable through cjt_last_error() on the
 * calling thread. Indices in this interface are 0-based.
 */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(CJT_BUILDING_LIBRARY)
#    define CJT_API __declspec(dllexport)
#  else
#    define CJT_API __declspec(dllimport)
#  endif
#else
#  define CJT_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum cjt_status {
    CJT_OK = 0,
    CJT_ERR_INVALID_ARGUMENT = 1,
    CJT_ERR_CONFIG = 2,
    CJT_ERR_NUMERICAL = 3,
    CJT_ERR_INFEASIBLE = 4,
    CJT_ERR_IO = 5
} cjt_status;

typedef enum cjt_scheme {
    CJT_SCHEME_ZF = 0,
    CJT_SCHEME_CENTRALIZED = 1,
    CJT_SCHEME_DECENTRALIZED = 2
} cjt_scheme;

typedef struct cjt_scenario cjt_scenario;
typedef struct cjt_trial cjt_trial;

typedef struct cjt_scenario_info {
    int n_bs;
    int n_tx;
    int n_ue;
    int n_pairs;
    double snr_db;
    uint64_t seed;
} cjt_scenario_info;

typedef struct cjt_record {
    uint64_t seed;
    int n_tx;
    cjt_scheme scheme;
    double total_power_w;
    double sum_rate_bps_hz;
    int feasible;
    int solver_iters;
} cjt_record;

typedef struct cjt_exchange {
    cjt_scheme scheme;
    uint64_t bytes_per_coherence_block;
    uint64_t bytes_per_stationarity_period;
    uint64_t blocks_per_period;
} cjt_exchange;

CJT_API const char* cjt_version(void);
/* Message of the last failed call on this thread; empty after success. */
CJT_API const char* cjt_last_error(void);
CJT_API const char* cjt_scheme_name(cjt_scheme scheme);

CJT_API cjt_status cjt_scenario_load(const char* path, cjt_scenario** out);
CJT_API cjt_status cjt_scenario_from_string(const char* text, cjt_scenario** out);
CJT_API void cjt_scenario_free(cjt_scenario* scenario);
CJT_API cjt_status cjt_scenario_set_n_tx(cjt_scenario* scenario, int n_tx);
CJT_API cjt_status cjt_scenario_get_info(const cjt_scenario* scenario, cjt_scenario_info* out);

/* One Monte Carlo trial: all three schemes on the same channel draw. */
CJT_API cjt_status cjt_run_trial(const cjt_scenario* scenario, uint64_t seed, cjt_trial** out);
CJT_API void cjt_trial_free(cjt_trial* trial);
CJT_API cjt_status cjt_trial_record(const cjt_trial* trial, cjt_scheme scheme, cjt_record* out);
/* Failure reason of an infeasible scheme, or "" when feasible. */
CJT_API const char* cjt_trial_note(const cjt_trial* trial, cjt_scheme scheme);

/*
 * Array getters copy up to `capacity` values into `out` and always store the
 * full length in `*len`. Pass out = NULL to query the length.
 */
CJT_API cjt_status cjt_trial_per_bs_power(const cjt_trial* trial, cjt_scheme scheme, double* out, size_t capacity,
                                          size_t* len);
CJT_API cjt_status cjt_trial_sinr_pair(const cjt_trial* trial, cjt_scheme scheme, double* out, size_t capacity,
                                       size_t* len);
CJT_API cjt_status cjt_trial_sinr_ue(const cjt_trial* trial, cjt_scheme scheme, double* out, size_t capacity,
                                     size_t* len);

/* Power-versus-antennas sweep as CSV text. Free the result with cjt_free_string(). */
CJT_API cjt_status cjt_sweep(const cjt_scenario* scenario, const int* n_tx, size_t n_tx_len, int trials,
                             uint64_t seed, int threads, char** csv_out);
/* Same, written to `path` and flushed after every antenna count. */
CJT_API cjt_status cjt_sweep_to_file(const cjt_scenario* scenario, const int* n_tx, size_t n_tx_len, int trials,
                                     uint64_t seed, int threads, const char* path);
CJT_API void cjt_free_string(char* s);

/* Backhaul bytes per BS. */
CJT_API cjt_status cjt_exchange_cost(const cjt_scenario* scenario, cjt_scheme scheme, uint64_t blocks_per_period,
                                     cjt_exchange* out);

/* Binary dump of the trial's channel draw. */
CJT_API cjt_status cjt_dump_channels(const cjt_scenario* scenario, uint64_t seed, const char* path);

#ifdef __cplusplus
}
#endif

#endif
