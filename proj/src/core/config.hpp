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

#include "scenario.hpp"

#include <cstdint>
#include <string>

namespace cjt {

/**
 * Scenario description. On disk it is INI-style text: `[topology]` with
 * n_bs, n_tx, n_ue, serving_pattern; `[channel]` with rho, pathloss_exp,
 * cell_radius_m, ref_loss_db; `[noise]` with snr_db; `[run]` with seed.
 * Dotted keys such as `topology.n_bs = 3` outside any section are accepted
 * as well.
 */
struct ScenarioConfig {
    int n_bs = 3;
    int n_tx = 64;
    int n_ue = 12;
    std::string serving_pattern = "overlap";
    ChannelModel channel{};
    double snr_db = 20.0;
    std::uint64_t seed = 1;
    double total_power_w = 10.0;

    Topology topology() const { return build_topology(n_bs, n_tx, n_ue, serving_pattern); }
};

ScenarioConfig parse_config(const std::string& text);
ScenarioConfig load_config(const std::string& path);

} // namespace cjt
