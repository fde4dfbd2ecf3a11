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

#include <cstdint>
#include <string>
#include <string_view>

namespace cjt {

/**
 * Serving-set patterns understood by build_topology():
 *
 *   overlap   BS p serves UE chunks p and p+1, chunk = n_ue / (n_bs + 1).
 *             With 3 BSs and 20 UEs: {1..10}, {6..15}, {11..20}.
 *   disjoint  contiguous blocks, one BS per UE (no joint transmission).
 *   full      every BS serves every UE.
 *   single    one BS serving all UEs (requires n_bs == 1).
 *   explicit  1-based ranges per BS separated by ';', e.g. "1-10;6-15;11-20".
 */
std::vector<std::vector<int>> parse_serving_pattern(std::string_view pattern, int n_bs, int n_ue);

Topology build_topology(int n_bs, int n_tx, int n_ue, std::string_view serving_pattern);

struct ChannelModel {
    double rho = 0.5;            ///< exponential correlation coefficient
    double pathloss_exp = 3.76;
    double cell_radius_m = 250.0;
    double ref_loss_db = 128.1;  ///< loss at 1 km
};

/// R(rho)[m][n] = rho^|m-n|.
RMat exponential_correlation(int n_tx, double rho);

/// Log-distance large-scale gain (linear) at `distance_m`.
double pathloss_gain(const ChannelModel& model, double distance_m);

/// theta[i][p] = beta_ip * R(rho) with UEs dropped around their serving BSs.
CovarianceSet synth_covariances(const Topology& topo, const ChannelModel& model, std::uint64_t seed);

/// h_ip = theta_ip^{1/2} z_ip with z_ip ~ CN(0, I).
ChannelSet draw_channels(const CovarianceSet& cov, std::uint64_t seed);

/// Noise power from the geometric mean of the served-link channel gains.
NoiseSpec calibrate_noise(const ChannelSet& channels, const Topology& topo, double snr_db);

/// Principal square root of a Hermitian PSD matrix; negative eigenvalues are
/// clamped to zero. Throws NumericalError when the input is materially
/// non-Hermitian or indefinite.
CMat hermitian_sqrt(const CMat& theta);

/// Independent stream seed derived from a trial seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

inline constexpr std::uint64_t kCovarianceStream = 0x636f76ULL;
inline constexpr std::uint64_t kFadingStream = 0x666164ULL;

/**
 * Binary channel dump: u32 rows, u32 cols (little-endian), then row-major
 * interleaved real/imag float64. Row i * n_bs + p holds h_ip.
 */
void write_channel_dump(const std::string& path, const ChannelSet& channels);
ChannelSet read_channel_dump(const std::string& path, int n_bs);

} // namespace cjt
