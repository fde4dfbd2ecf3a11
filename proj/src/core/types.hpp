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

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <vector>

namespace cjt {

using cplx = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;
using RVec = Eigen::VectorXd;
using RMat = Eigen::MatrixXd;

/// A (serving BS, served UE) link. All indices are zero-based.
struct Pair {
    int bs;
    int ue;
    bool operator==(const Pair&) const = default;
};

/**
 * Network layout: which BS serves which UE.
 *
 * Pairs are flattened BS-major and, inside a BS, in the order of its served
 * set. That flat order indexes every per-pair container in the library
 * (targets, multipliers, scaling factors, precoders, coupling matrices).
 */
class Topology {
public:
    Topology() = default;
    Topology(int n_bs, int n_tx, int n_ue, std::vector<std::vector<int>> serving);

    int n_bs() const { return n_bs_; }
    int n_tx() const { return n_tx_; }
    int n_ue() const { return n_ue_; }
    int n_pairs() const { return static_cast<int>(pairs_.size()); }

    /// Served set of BS `p`, ascending.
    const std::vector<int>& served(int p) const { return serving_[static_cast<std::size_t>(p)]; }
    /// Serving set of UE `i`, ascending.
    const std::vector<int>& serving_bs(int i) const { return coop_[static_cast<std::size_t>(i)]; }
    const std::vector<std::vector<int>>& serving_map() const { return serving_; }
    const std::vector<std::vector<int>>& coop_map() const { return coop_; }

    bool serves(int p, int i) const { return pair_index(p, i) >= 0; }
    /// Flat index of (p, i), or -1 when p does not serve i.
    int pair_index(int p, int i) const {
        return index_[static_cast<std::size_t>(i) * static_cast<std::size_t>(n_bs_) +
                      static_cast<std::size_t>(p)];
    }
    const Pair& pair(int k) const { return pairs_[static_cast<std::size_t>(k)]; }
    const std::vector<Pair>& pairs() const { return pairs_; }

    /// Copy of this layout with a different antenna count.
    Topology with_n_tx(int n_tx) const;

private:
    int n_bs_ = 0;
    int n_tx_ = 0;
    int n_ue_ = 0;
    std::vector<std::vector<int>> serving_;
    std::vector<std::vector<int>> coop_;
    std::vector<Pair> pairs_;
    std::vector<int> index_;
};

/// Per-link covariance matrices, pathloss included. Indexed (ue, bs).
struct CovarianceSet {
    int n_ue = 0;
    int n_bs = 0;
    int n_tx = 0;
    std::vector<CMat> theta;
    std::vector<double> beta; ///< large-scale gain of each link

    const CMat& at(int i, int p) const { return theta[flat(i, p)]; }
    CMat& at(int i, int p) { return theta[flat(i, p)]; }
    std::size_t flat(int i, int p) const {
        return static_cast<std::size_t>(i) * static_cast<std::size_t>(n_bs) +
               static_cast<std::size_t>(p);
    }
};

/// Instantaneous channel vectors h_ip. Indexed (ue, bs).
struct ChannelSet {
    int n_ue = 0;
    int n_bs = 0;
    int n_tx = 0;
    std::vector<CVec> h;

    const CVec& at(int i, int p) const { return h[flat(i, p)]; }
    CVec& at(int i, int p) { return h[flat(i, p)]; }
    std::size_t flat(int i, int p) const {
        return static_cast<std::size_t>(i) * static_cast<std::size_t>(n_bs) +
               static_cast<std::size_t>(p);
    }
};

struct NoiseSpec {
    double sigma2 = 1.0;
    double snr_db = 0.0;
};

/// Linear SINR target per flat pair.
struct SinrTargets {
    std::vector<double> gamma;

    double at(const Topology& topo, int p, int i) const {
        return gamma[static_cast<std::size_t>(topo.pair_index(p, i))];
    }
};

/// One precoding vector per flat pair.
struct PrecoderSet {
    std::vector<CVec> w;

    double total_power() const;
    std::vector<double> per_bs_power(const Topology& topo) const;
    const CVec& at(const Topology& topo, int p, int i) const {
        return w[static_cast<std::size_t>(topo.pair_index(p, i))];
    }
};

/**
 * Interference caps tau/eps in one (ue, bs) table.
 *
 * Entry (i, q) is tau_iq when q serves i and eps_iq otherwise, so the two
 * index domains never overlap. NaN marks an entry that was never filled.
 */
struct InterferenceBudget {
    RMat leak;

    double tau(const Topology& topo, int i, int q) const;
    double eps(const Topology& topo, int i, int q) const;
    double at(int i, int q) const { return leak(i, q); }
};

} // namespace cjt
