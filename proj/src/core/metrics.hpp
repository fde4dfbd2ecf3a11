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

#include "types.hpp"

namespace cjt {

/// Per flat pair: |h_ip^H w_ip|^2 over all other streams' power at UE i plus noise.
std::vector<double> pair_sinr(const ChannelSet& channels, const PrecoderSet& precoders, double sigma2,
                              const Topology& topo);

/// Per UE: coherent sum over the serving BSs, coherent per-stream interference.
std::vector<double> ue_sinr(const ChannelSet& channels, const PrecoderSet& precoders, double sigma2,
                            const Topology& topo);

struct Metrics {
    std::vector<double> sinr_pair;
    std::vector<double> sinr_orig;
    double sum_rate = 0.0; ///< bit/s/Hz
};

Metrics evaluate_metrics(const ChannelSet& channels, const PrecoderSet& precoders, double sigma2,
                         const Topology& topo);

} // namespace cjt
