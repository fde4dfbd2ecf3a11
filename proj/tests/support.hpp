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

#include "deteq.hpp"
#include "duality.hpp"
#include "local_problem.hpp"
#include "scenario.hpp"
#include "types.hpp"
#include "zf.hpp"

#include <cmath>
#include <cstdint>
#include <random>
#include <string>

namespace cjt::test {

inline double rel(double a, double b) {
    return std::abs(a - b) / std::max(std::abs(b), 1e-300);
}

inline CVec random_cvec(int n, std::mt19937_64& rng, double scale = 1.0) {
    std::normal_distribution<double> d(0.0, std::sqrt(0.5) * scale);
    CVec v(n);
    for (int k = 0; k < n; ++k) v(k) = cplx(d(rng), d(rng));
    return v;
}

/// One network draw with ZF-derived targets, the harness pipeline without the solvers.
struct Instance {
    Topology topo;
    CovarianceSet cov;
    ChannelSet ch;
    double sigma2 = 0.0;
    PrecoderSet zf;
    SinrTargets targets;
};

inline Instance make_instance(int n_bs, int n_tx, int n_ue, const std::string& pattern, std::uint64_t seed,
                              double snr_db = 20.0) {
    Instance in;
    in.topo = build_topology(n_bs, n_tx, n_ue, pattern);
    in.cov = synth_covariances(in.topo, ChannelModel{}, derive_seed(seed, kCovarianceStream));
    in.ch = draw_channels(in.cov, derive_seed(seed, kFadingStream));
    in.sigma2 = calibrate_noise(in.ch, in.topo, snr_db).sigma2;
    in.zf = normalize_total_power(zf_precoders(in.ch, in.topo));
    in.targets = extract_targets(in.ch, in.zf, in.sigma2, in.topo);
    return in;
}

/// Channel set holding arbitrary vectors (row i * n_bs + p).
inline ChannelSet make_channels(int n_ue, int n_bs, const std::vector<CVec>& h) {
    ChannelSet ch;
    ch.n_ue = n_ue;
    ch.n_bs = n_bs;
    ch.n_tx = static_cast<int>(h.front().size());
    ch.h = h;
    return ch;
}

/// Single-cell problem without caps, unit spatial covariance.
inline LocalProblem single_cell(int n_tx, int n_ue, std::mt19937_64& rng, double gamma_scale = 1.0) {
    LocalProblem lp;
    std::uniform_real_distribution<double> u(0.5, 2.0);
    for (int k = 0; k < n_ue; ++k) {
        lp.channels.push_back(random_cvec(n_tx, rng));
        lp.served.push_back(k);
        lp.gamma.push_back(gamma_scale * u(rng));
        lp.incoming.push_back(0.1 * u(rng));
        lp.caps.push_back(kNoCap);
    }
    return lp;
}

} // namespace cjt::test
