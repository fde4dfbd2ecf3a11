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

#pragma once

// Monte Carlo trials comparing the three precoding schemes on shared draws.

#include "config.hpp"
#include "duality.hpp"
#include "local_problem.hpp"
#include "types.hpp"
#include "zf.hpp"

#include <array>
#include <cstdint>
#include <ostream>
#include <string>

namespace cjt {

enum class Scheme { zf, centralized, decentralized };

const char* to_string(Scheme s);
Scheme parse_scheme(const std::string& name);

struct TrialRecord {
    std::uint64_t seed = 0;
    int n_tx = 0;
    Scheme scheme = Scheme::zf;
    double total_power_w = 0.0;
    std::vector<double> per_bs_power_w;
    std::vector<double> sinr_pair; ///< per flat pair
    std::vector<double> sinr_orig; ///< per UE
    double sum_rate_bps_hz = 0.0;
    bool feasible = false;
    int solver_iters = 0;
    std::string note; ///< failure reason when not feasible
};

/// zf, centralized, decentralized; all on the same draw and targets.
using TrialRecords = std::array<TrialRecord, 3>;

TrialRecords run_trial(const ScenarioConfig& config, std::uint64_t seed);

struct DecentralizedResult {
    PrecoderSet precoders;
    std::vector<LocalStatus> status; ///< per BS
    std::vector<double> objective;   ///< per BS
    int iterations = 0;
    bool feasible = false;
};

/// Solve every per-BS subproblem under the given budget.
DecentralizedResult decentralized_precoders(const ChannelSet& channels, const Topology& topo,
                                            const SinrTargets& targets, const InterferenceBudget& budget,
                                            double sigma2, const SocpSettings& settings = {});

struct ExchangeCost {
    Scheme scheme = Scheme::zf;
    std::uint64_t bytes_per_coherence_block = 0;  ///< per BS
    std::uint64_t bytes_per_stationarity_period = 0; ///< per BS
    std::uint64_t blocks_per_period = 1;
};

/// Backhaul bytes per BS, one complex scalar = 16 bytes.
ExchangeCost exchange_cost(const Topology& topo, Scheme scheme, std::uint64_t blocks_per_period);

struct SweepOptions {
    int threads = 1;
};

/**
 * Power-versus-antennas sweep. Trial k at every antenna count uses seed
 * derive_seed(seed, k), so UE drops are shared across the antenna counts.
 * Writes the CSV to `os` and flushes after each antenna count.
 */
void sweep_antennas(const ScenarioConfig& config, const std::vector<int>& n_tx_list, int n_trials,
                    std::uint64_t seed, std::ostream& os, const SweepOptions& opts = {});

std::string format_double(double v);

} // namespace cjt
