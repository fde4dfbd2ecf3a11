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

#include "cjt/cjt.h"

#include "config.hpp"
#include "error.hpp"
#include "harness.hpp"
#include "scenario.hpp"

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <new>
#include <sstream>
#include <string>

struct cjt_scenario {
    cjt::ScenarioConfig config;
};

struct cjt_trial {
    cjt::TrialRecords records;
};

namespace {

thread_local std::string g_last_error;

cjt_status fail(cjt_status s, const char* msg) {
    g_last_error = msg;
    return s;
}

template <class F>
cjt_status guarded(F&& f) {
    try {
        f();
        g_last_error.clear();
        return CJT_OK;
    } catch (const cjt::ConfigError& e) {
        return fail(CJT_ERR_CONFIG, e.what());
    } catch (const cjt::InfeasibleError& e) {
        return fail(CJT_ERR_INFEASIBLE, e.what());
    } catch (const cjt::NumericalError& e) {
        return fail(CJT_ERR_NUMERICAL, e.what());
    } catch (const std::bad_alloc&) {
        return fail(CJT_ERR_NUMERICAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(CJT_ERR_NUMERICAL, e.what());
    } catch (...) {
        return fail(CJT_ERR_NUMERICAL, "unknown error");
    }
}

bool valid_scheme(cjt_scheme s) {
    return s == CJT_SCHEME_ZF || s == CJT_SCHEME_CENTRALIZED || s == CJT_SCHEME_DECENTRALIZED;
}

const cjt::TrialRecord& record_of(const cjt_trial* t, cjt_scheme s) {
    return t->records[static_cast<std::size_t>(s)];
}

cjt_status copy_array(const std::vector<double>& v, double* out, size_t capacity, size_t* len) {
    if (!len) return fail(CJT_ERR_INVALID_ARGUMENT, "len must not be NULL");
    *len = v.size();
    if (out) std::memcpy(out, v.data(), std::min(capacity, v.size()) * sizeof(double));
    g_last_error.clear();
    return CJT_OK;
}

cjt_status new_scenario(cjt::ScenarioConfig cfg, cjt_scenario** out) {
    cfg.topology();
    *out = new cjt_scenario{std::move(cfg)};
    return CJT_OK;
}

} // namespace

extern "C" {

const char* cjt_version(void) { return "0.1.0"; }

const char* cjt_last_error(void) { return g_last_error.c_str(); }

const char* cjt_scheme_name(cjt_scheme scheme) {
    if (!valid_scheme(scheme)) return "unknown";
    return cjt::to_string(static_cast<cjt::Scheme>(scheme));
}

cjt_status cjt_scenario_load(const char* path, cjt_scenario** out) {
    if (!path || !out) return fail(CJT_ERR_INVALID_ARGUMENT, "NULL argument");
    *out = nullptr;
    return guarded([&] { new_scenario(cjt::load_config(path), out); });
}

cjt_status cjt_scenario_from_string(const char* text, cjt_scenario** out) {
    if (!text || !out) return fail(CJT_ERR_INVALID_ARGUMENT, "NULL argument");
    *out = nullptr;
    return guarded([&] { new_scenario(cjt::parse_config(text), out); });
}

void cjt_scenario_free(cjt_scenario* scenario) { delete scenario; }

cjt_status cjt_scenario_set_n_tx(cjt_scenario* scenario, int n_tx) {
    if (!scenario) return fail(CJT_ERR_INVALID_ARGUMENT, "NULL scenario");
    if (n_tx < 1) return fail(CJT_ERR_CONFIG, "n_tx must be >= 1");
    scenario->config.n_tx = n_tx;
    g_last_error.clear();
    return CJT_OK;
}

cjt_status cjt_scenario_get_info(const cjt_scenario* scenario, cjt_scenario_info* out) {
    if (!scenario || !out) return fail(CJT_ERR_INVALID_ARGUMENT, "NULL argument");
    return guarded([&] {
        const auto& c = scenario->config;
        out->n_bs = c.n_bs;
        out->n_tx = c.n_tx;
        out->n_ue = c.n_ue;
        out->n_pairs = c.topology().n_pairs();
        out->snr_db = c.snr_db;
        out->seed = c.seed;
    });
}

cjt_status cjt_run_trial(const cjt_scenario* scenario, uint64_t seed, cjt_trial** out) {
    if (!scenario || !out) return fail(CJT_ERR_INVALID_ARGUMENT, "NULL argument");
    *out = nullptr;
    return guarded([&] { *out = new cjt_trial{cjt::run_trial(scenario->config, seed)}; });
}

void cjt_trial_free(cjt_trial* trial) { delete trial; }

cjt_status cjt_trial_record(const cjt_trial* trial, cjt_scheme scheme, cjt_record* out) {
    if (!trial || !out) return fail(CJT_ERR_INVALID_ARGUMENT, "NULL argument");
    if (!valid_scheme(scheme)) return fail(CJT_ERR_INVALID_ARGUMENT, "unknown scheme");
    const auto& r = record_of(trial, scheme);
    out->seed = r.seed;
    out->n_tx = r.n_tx;
    out->scheme = scheme;
    out->total_power_w = r.total_power_w;
    out->sum_rate_bps_hz = r.sum_rate_bps_hz;
    out->feasible = r.feasible ? 1 : 0;
    out->solver_iters = r.solver_iters;
    g_last_error.clear();
    return CJT_OK;
}

const char* cjt_trial_note(const cjt_trial* trial, cjt_scheme scheme) {
    if (!trial || !valid_scheme(scheme)) return "";
    return record_of(trial, scheme).note.c_str();
}

cjt_status cjt_trial_per_bs_power(const cjt_trial* trial, cjt_scheme scheme, double* out, size_t capacity,
                                  size_t* len) {
    if (!trial || !valid_scheme(scheme)) return fail(CJT_ERR_INVALID_ARGUMENT, "bad trial or scheme");
    return copy_array(record_of(trial, scheme).per_bs_power_w, out, capacity, len);
}

cjt_status cjt_trial_sinr_pair(const cjt_trial* trial, cjt_scheme scheme, double* out, size_t capacity,
                               size_t* len) {
    if (!trial || !valid_scheme(scheme)) return fail(CJT_ERR_INVALID_ARGUMENT, "bad trial or scheme");
    return copy_array(record_of(trial, scheme).sinr_pair, out, capacity, len);
}

cjt_status cjt_trial_sinr_ue(const cjt_trial* trial, cjt_scheme scheme, double* out, size_t capacity, size_t* len) {
    if (!trial || !valid_scheme(scheme)) return fail(CJT_ERR_INVALID_ARGUMENT, "bad trial or scheme");
    return copy_array(record_of(trial, scheme).sinr_orig, out, capacity, len);
}

cjt_status cjt_sweep(const cjt_scenario* scenario, const int* n_tx, size_t n_tx_len, int trials, uint64_t seed,
                     int threads, char** csv_out) {
    if (!scenario || !n_tx || !csv_out) return fail(CJT_ERR_INVALID_ARGUMENT, "NULL argument");
    *csv_out = nullptr;
    return guarded([&] {
        std::ostringstream os;
        cjt::sweep_antennas(scenario->config, std::vector<int>(n_tx, n_tx + n_tx_len), trials, seed, os,
                            cjt::SweepOptions{threads});
        const std::string s = os.str();
        char* buf = static_cast<char*>(std::malloc(s.size() + 1));
        if (!buf) throw std::bad_alloc();
        std::memcpy(buf, s.c_str(), s.size() + 1);
        *csv_out = buf;
    });
}

cjt_status cjt_sweep_to_file(const cjt_scenario* scenario, const int* n_tx, size_t n_tx_len, int trials,
                             uint64_t seed, int threads, const char* path) {
    if (!scenario || !n_tx || !path) return fail(CJT_ERR_INVALID_ARGUMENT, "NULL argument");
    std::ofstream os(path, std::ios::binary);
    if (!os) return fail(CJT_ERR_IO, (std::string("cannot open '") + path + "' for writing").c_str());
    return guarded([&] {
        cjt::sweep_antennas(scenario->config, std::vector<int>(n_tx, n_tx + n_tx_len), trials, seed, os,
                            cjt::SweepOptions{threads});
        if (!os) throw std::runtime_error("write failed");
    });
}

void cjt_free_string(char* s) { std::free(s); }

cjt_status cjt_exchange_cost(const cjt_scenario* scenario, cjt_scheme scheme, uint64_t blocks_per_period,
                             cjt_exchange* out) {
    if (!scenario || !out) return fail(CJT_ERR_INVALID_ARGUMENT, "NULL argument");
    if (!valid_scheme(scheme)) return fail(CJT_ERR_INVALID_ARGUMENT, "unknown scheme");
    return guarded([&] {
        const auto c =
            cjt::exchange_cost(scenario->config.topology(), static_cast<cjt::Scheme>(scheme), blocks_per_period);
        out->scheme = scheme;
        out->bytes_per_coherence_block = c.bytes_per_coherence_block;
        out->bytes_per_stationarity_period = c.bytes_per_stationarity_period;
        out->blocks_per_period = c.blocks_per_period;
    });
}

cjt_status cjt_dump_channels(const cjt_scenario* scenario, uint64_t seed, const char* path) {
    if (!scenario || !path) return fail(CJT_ERR_INVALID_ARGUMENT, "NULL argument");
    return guarded([&] {
        const auto& c = scenario->config;
        const auto topo = c.topology();
        const auto cov = cjt::synth_covariances(topo, c.channel, cjt::derive_seed(seed, cjt::kCovarianceStream));
        cjt::write_channel_dump(path, cjt::draw_channels(cov, cjt::derive_seed(seed, cjt::kFadingStream)));
    });
}

} // extern "C"
