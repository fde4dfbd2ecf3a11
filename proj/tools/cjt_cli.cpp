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

#include <CLI11.hpp>

#include <cinttypes>
#include <cstdio>
#include <string>
#include <vector>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

int exit_code(cjt_status s) {
    switch (s) {
    case CJT_OK: return kExitOk;
    case CJT_ERR_INVALID_ARGUMENT:
    case CJT_ERR_CONFIG:
    case CJT_ERR_IO: return kExitConfig;
    case CJT_ERR_NUMERICAL:
    case CJT_ERR_INFEASIBLE: return kExitNumerical;
    }
    return kExitNumerical;
}

int report(cjt_status s) {
    std::fprintf(stderr, "cjt: %s\n", cjt_last_error());
    return exit_code(s);
}

struct ScenarioHandle {
    cjt_scenario* p = nullptr;
    ~ScenarioHandle() { cjt_scenario_free(p); }
};

struct TrialHandle {
    cjt_trial* p = nullptr;
    ~TrialHandle() { cjt_trial_free(p); }
};

void print_array(const char* label, const cjt_trial* t, cjt_scheme s,
                 cjt_status (*get)(const cjt_trial*, cjt_scheme, double*, size_t, size_t*)) {
    size_t n = 0;
    get(t, s, nullptr, 0, &n);
    std::vector<double> v(n);
    get(t, s, v.data(), v.size(), &n);
    std::printf("  %s:", label);
    for (double x : v) std::printf(" %.17g", x);
    std::printf("\n");
}

int cmd_run(const std::string& config, const uint64_t* seed, const std::string& dump) {
    ScenarioHandle sc;
    if (auto s = cjt_scenario_load(config.c_str(), &sc.p)) return report(s);
    cjt_scenario_info info{};
    if (auto s = cjt_scenario_get_info(sc.p, &info)) return report(s);
    const uint64_t sd = seed ? *seed : info.seed;

    if (!dump.empty())
        if (auto s = cjt_dump_channels(sc.p, sd, dump.c_str())) return report(s);

    TrialHandle tr;
    if (auto s = cjt_run_trial(sc.p, sd, &tr.p)) return report(s);
    std::printf("seed %" PRIu64 ", n_bs %d, n_tx %d, n_ue %d\n", sd, info.n_bs, info.n_tx, info.n_ue);
    for (cjt_scheme sch : {CJT_SCHEME_ZF, CJT_SCHEME_CENTRALIZED, CJT_SCHEME_DECENTRALIZED}) {
        cjt_record r{};
        cjt_trial_record(tr.p, sch, &r);
        std::printf("%s: feasible %d", cjt_scheme_name(sch), r.feasible);
        if (r.feasible) {
            std::printf(", total_power_w %.17g, sum_rate_bps_hz %.17g, iterations %d\n", r.total_power_w,
                        r.sum_rate_bps_hz, r.solver_iters);
            print_array("per_bs_power_w", tr.p, sch, cjt_trial_per_bs_power);
            print_array("sinr_pair", tr.p, sch, cjt_trial_sinr_pair);
            print_array("sinr_ue", tr.p, sch, cjt_trial_sinr_ue);
        } else {
            std::printf(" (%s)\n", cjt_trial_note(tr.p, sch));
        }
    }
    return kExitOk;
}

int cmd_sweep(const std::string& config, const std::vector<int>& ntx, int trials, uint64_t seed,
              const std::string& out, int threads) {
    ScenarioHandle sc;
    if (auto s = cjt_scenario_load(config.c_str(), &sc.p)) return report(s);
    if (out.empty() || out == "-") {
        char* csv = nullptr;
        if (auto s = cjt_sweep(sc.p, ntx.data(), ntx.size(), trials, seed, threads, &csv)) return report(s);
        std::fputs(csv, stdout);
        cjt_free_string(csv);
        return kExitOk;
    }
    if (auto s = cjt_sweep_to_file(sc.p, ntx.data(), ntx.size(), trials, seed, threads, out.c_str()))
        return report(s);
    return kExitOk;
}

int cmd_exchange(const std::string& config, uint64_t blocks) {
    ScenarioHandle sc;
    if (auto s = cjt_scenario_load(config.c_str(), &sc.p)) return report(s);
    cjt_scenario_info info{};
    if (auto s = cjt_scenario_get_info(sc.p, &info)) return report(s);
    std::printf("scheme,bytes_per_block_per_bs,bytes_per_period_per_bs,blocks_per_period,bytes_per_period_total\n");
    for (cjt_scheme sch : {CJT_SCHEME_CENTRALIZED, CJT_SCHEME_DECENTRALIZED, CJT_SCHEME_ZF}) {
        cjt_exchange e{};
        if (auto s = cjt_exchange_cost(sc.p, sch, blocks, &e)) return report(s);
        std::printf("%s,%" PRIu64 ",%" PRIu64 ",%" PRIu64 ",%" PRIu64 "\n", cjt_scheme_name(sch),
                    e.bytes_per_coherence_block, e.bytes_per_stationarity_period, e.blocks_per_period,
                    e.bytes_per_stationarity_period * static_cast<uint64_t>(info.n_bs));
    }
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Coordinated multi-point beamforming simulator"};
    app.require_subcommand(1);
    app.set_version_flag("--version", cjt_version());

    std::string config;
    uint64_t seed = 0;
    std::string dump;
    auto* run = app.add_subcommand("run", "single trial, all schemes on one channel draw");
    run->add_option("--config", config, "scenario file")->required();
    auto* run_seed = run->add_option("--seed", seed, "trial seed (default: run.seed)");
    run->add_option("--dump-channels", dump, "write the channel draw to this binary file");

    std::vector<int> ntx{16, 32, 48, 64};
    int trials = 50;
    std::string out;
    int threads = 1;
    auto* sweep = app.add_subcommand("sweep", "power versus antenna count");
    sweep->add_option("--config", config, "scenario file")->required();
    sweep->add_option("--ntx", ntx, "comma-separated antenna counts")->delimiter(',');
    sweep->add_option("--trials", trials, "trials per antenna count")->check(CLI::PositiveNumber);
    sweep->add_option("--seed", seed, "sweep seed")->required();
    sweep->add_option("--out", out, "CSV path ('-' for stdout)");
    sweep->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);

    uint64_t blocks = 1000;
    auto* exchange = app.add_subcommand("exchange", "backhaul cost per scheme");
    exchange->add_option("--config", config, "scenario file")->required();
    exchange->add_option("--blocks", blocks, "coherence blocks per stationarity period")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitConfig;
    }

    if (*run) return cmd_run(config, *run_seed ? &seed : nullptr, dump);
    if (*sweep) return cmd_sweep(config, ntx, trials, seed, out, threads);
    return cmd_exchange(config, blocks);
}
