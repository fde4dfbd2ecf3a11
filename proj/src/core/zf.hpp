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

// Zero-forcing baseline and the SINR targets derived from it.

#include "types.hpp"

namespace cjt {

struct ZfConfig {
    double total_power = 10.0; ///< Watts
};

/**
 * Per-BS zero forcing: w_ip is the minimum-norm vector with h_ip^H w_ip = 1
 * and h_jp^H w_ip = 0 for every other UE j whose channel to p is nonzero.
 * Throws InfeasibleError when a BS's constraint system is rank deficient.
 */
PrecoderSet zf_precoders(const ChannelSet& channels, const Topology& topo);

PrecoderSet normalize_total_power(const PrecoderSet& precoders, const ZfConfig& cfg = {});

/// Per-pair SINR of the given precoders, used as the target for the other schemes.
SinrTargets extract_targets(const ChannelSet& channels, const PrecoderSet& precoders, double sigma2,
                            const Topology& topo);

} // namespace cjt
