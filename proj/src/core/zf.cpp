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

#include "zf.hpp"

#include "error.hpp"
#include "metrics.hpp"

#include <Eigen/QR>

#include <cmath>

namespace cjt {

PrecoderSet zf_precoders(const ChannelSet& channels, const Topology& topo) {
    if (channels.n_ue != topo.n_ue() || channels.n_bs != topo.n_bs() || channels.n_tx != topo.n_tx())
        throw ConfigError("channel set does not match topology");
    const int n = topo.n_tx();
    PrecoderSet out;
    out.w.resize(static_cast<std::size_t>(topo.n_pairs()));

    for (int p = 0; p < topo.n_bs(); ++p) {
        std::vector<int> active;
        for (int k = 0; k < topo.n_ue(); ++k)
            if (channels.at(k, p).squaredNorm() > 0.0) active.push_back(k);
        for (int i : topo.served(p))
            if (channels.at(i, p).squaredNorm() == 0.0)
                throw InfeasibleError("zero forcing: served UE " + std::to_string(i + 1) + " has no channel to BS " +
                                      std::to_string(p + 1));
        const int m = static_cast<int>(active.size());
        if (m > n)
            throw InfeasibleError("zero forcing at BS " + std::to_string(p + 1) + ": " + std::to_string(m) +
                                  " constraints for " + std::to_string(n) + " antennas");

        CMat c(n, m);
        for (int k = 0; k < m; ++k) c.col(k) = channels.at(active[static_cast<std::size_t>(k)], p);
        // C = Q R; C^H w = e  =>  w = Q R^{-H} e
        const Eigen::HouseholderQR<CMat> qr(c);
        const CMat r = qr.matrixQR().topRows(m).triangularView<Eigen::Upper>();
        const double rmax = r.diagonal().cwiseAbs().maxCoeff();
        if (!(r.diagonal().cwiseAbs().minCoeff() > 1e-12 * rmax))
            throw InfeasibleError("zero forcing at BS " + std::to_string(p + 1) + ": rank-deficient channels");
        const CMat q = qr.householderQ() * CMat::Identity(n, m);

        for (int i : topo.served(p)) {
            CVec e = CVec::Zero(m);
            for (int k = 0; k < m; ++k)
                if (active[static_cast<std::size_t>(k)] == i) e(k) = 1.0;
            const CVec y = r.adjoint().triangularView<Eigen::Lower>().solve(e);
            out.w[static_cast<std::size_t>(topo.pair_index(p, i))] = q * y;
        }
    }
    return out;
}

PrecoderSet normalize_total_power(const PrecoderSet& precoders, const ZfConfig& cfg) {
    if (!(cfg.total_power > 0.0)) throw ConfigError("total power must be positive");
    const double total = precoders.total_power();
    if (!(total > 0.0) || !std::isfinite(total)) throw NumericalError("cannot normalize a zero precoder set");
    const double s = std::sqrt(cfg.total_power / total);
    PrecoderSet out = precoders;
    for (auto& w : out.w) w *= s;
    return out;
}

SinrTargets extract_targets(const ChannelSet& channels, const PrecoderSet& precoders, double sigma2,
                            const Topology& topo) {
    return SinrTargets{pair_sinr(channels, precoders, sigma2, topo)};
}

} // namespace cjt
