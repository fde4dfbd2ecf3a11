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

#include "metrics.hpp"

#include "error.hpp"

#include <cmath>

namespace cjt {

namespace {

void check(const ChannelSet& channels, const PrecoderSet& precoders, double sigma2, const Topology& topo) {
    if (channels.n_ue != topo.n_ue() || channels.n_bs != topo.n_bs() || channels.n_tx != topo.n_tx())
        throw ConfigError("channel set does not match topology");
    if (static_cast<int>(precoders.w.size()) != topo.n_pairs()) throw ConfigError("one precoder per pair required");
    if (!(sigma2 > 0.0)) throw ConfigError("noise power must be positive");
}

} // namespace

std::vector<double> pair_sinr(const ChannelSet& channels, const PrecoderSet& precoders, double sigma2,
                              const Topology& topo) {
    check(channels, precoders, sigma2, topo);
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(topo.n_pairs()));
    for (const auto& [p, i] : topo.pairs()) {
        double interf = sigma2;
        for (int q = 0; q < topo.n_bs(); ++q)
            for (int j : topo.served(q))
                if (j != i) interf += std::norm(channels.at(i, q).dot(precoders.at(topo, q, j)));
        out.push_back(std::norm(channels.at(i, p).dot(precoders.at(topo, p, i))) / interf);
    }
    return out;
}

std::vector<double> ue_sinr(const ChannelSet& channels, const PrecoderSet& precoders, double sigma2,
                            const Topology& topo) {
    check(channels, precoders, sigma2, topo);
    auto coherent = [&](int i, int j) {
        cplx acc = 0.0;
        for (int q : topo.serving_bs(j)) acc += channels.at(i, q).dot(precoders.at(topo, q, j));
        return acc;
    };
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(topo.n_ue()));
    for (int i = 0; i < topo.n_ue(); ++i) {
        double interf = sigma2;
        for (int j = 0; j < topo.n_ue(); ++j)
            if (j != i) interf += std::norm(coherent(i, j));
        out.push_back(std::norm(coherent(i, i)) / interf);
    }
    return out;
}

Metrics evaluate_metrics(const ChannelSet& channels, const PrecoderSet& precoders, double sigma2,
                         const Topology& topo) {
    Metrics m;
    m.sinr_pair = pair_sinr(channels, precoders, sigma2, topo);
    m.sinr_orig = ue_sinr(channels, precoders, sigma2, topo);
    for (double g : m.sinr_orig) m.sum_rate += std::log2(1.0 + g);
    return m;
}

} // namespace cjt
