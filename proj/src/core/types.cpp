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

#include "types.hpp"

#include "error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace cjt {

Topology::Topology(int n_bs, int n_tx, int n_ue, std::vector<std::vector<int>> serving)
    : n_bs_(n_bs), n_tx_(n_tx), n_ue_(n_ue), serving_(std::move(serving)) {
    if (n_bs < 1 || n_tx < 1 || n_ue < 1) throw ConfigError("topology needs n_bs, n_tx, n_ue >= 1");
    if (static_cast<int>(serving_.size()) != n_bs)
        throw ConfigError("serving map must have one entry per BS");

    coop_.assign(static_cast<std::size_t>(n_ue), {});
    for (int p = 0; p < n_bs; ++p) {
        auto& set = serving_[static_cast<std::size_t>(p)];
        std::sort(set.begin(), set.end());
        set.erase(std::unique(set.begin(), set.end()), set.end());
        if (set.empty()) throw ConfigError("BS " + std::to_string(p + 1) + " serves no UE");
        for (int i : set) {
            if (i < 0 || i >= n_ue) throw ConfigError("UE index " + std::to_string(i + 1) + " out of range");
            coop_[static_cast<std::size_t>(i)].push_back(p);
        }
    }
    for (int i = 0; i < n_ue; ++i)
        if (coop_[static_cast<std::size_t>(i)].empty())
            throw ConfigError("UE " + std::to_string(i + 1) + " has no serving BS");

    index_.assign(static_cast<std::size_t>(n_ue) * static_cast<std::size_t>(n_bs), -1);
    for (int p = 0; p < n_bs; ++p)
        for (int i : serving_[static_cast<std::size_t>(p)]) {
            index_[static_cast<std::size_t>(i) * static_cast<std::size_t>(n_bs) + static_cast<std::size_t>(p)] =
                static_cast<int>(pairs_.size());
            pairs_.push_back({p, i});
        }
}

Topology Topology::with_n_tx(int n_tx) const {
    return Topology(n_bs_, n_tx, n_ue_, serving_);
}

double PrecoderSet::total_power() const {
    double acc = 0.0;
    for (const auto& v : w) acc += v.squaredNorm();
    return acc;
}

std::vector<double> PrecoderSet::per_bs_power(const Topology& topo) const {
    std::vector<double> out(static_cast<std::size_t>(topo.n_bs()), 0.0);
    for (int k = 0; k < topo.n_pairs(); ++k)
        out[static_cast<std::size_t>(topo.pair(k).bs)] += w[static_cast<std::size_t>(k)].squaredNorm();
    return out;
}

double InterferenceBudget::tau(const Topology& topo, int i, int q) const {
    if (!topo.serves(q, i)) throw ConfigError("tau requested for a non-serving BS");
    return leak(i, q);
}

double InterferenceBudget::eps(const Topology& topo, int i, int q) const {
    if (topo.serves(q, i)) throw ConfigError("eps requested for a serving BS");
    return leak(i, q);
}

} // namespace cjt
