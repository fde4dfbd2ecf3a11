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

// Centralized power-minimising joint-transmission precoder via
// uplink-downlink duality. Needs the instantaneous channels of every link.

#include "types.hpp"

#include <span>
#include <string>

namespace cjt {

struct FixedPointOptions {
    double tol = 1e-8;
    int max_iter = 500;
};

struct LambdaSolution {
    std::vector<double> lambda; ///< per flat pair
    int iterations = 0;
    double residual = 0.0;      ///< max relative fixed-point residual at exit
};

/// Per-UE aggregate multiplier: sum of lambda over the UE's serving BSs.
std::vector<double> aggregate_multipliers(const Topology& topo, std::span<const double> per_pair);

/**
 * Virtual-uplink multipliers: lambda_ip = gamma_ip / (h_ip^H A_{p,-i}^{-1} h_ip)
 * with A_{p,-i} = N_T I + sum_{j != i} Lambda_j h_jp h_jp^H.
 *
 * Starts from gamma_ip N_T / |h_ip|^2. Throws InfeasibleError when the
 * iterates diverge and NumericalError when max_iter is exhausted.
 */
LambdaSolution solve_lambda_fixed_point(const ChannelSet& channels, const SinrTargets& targets,
                                        const Topology& topo, const FixedPointOptions& opts = {});

/// Max over pairs of |lambda - T(lambda)| / lambda.
double lambda_residual(const ChannelSet& channels, const SinrTargets& targets, const Topology& topo,
                       std::span<const double> lambda);

/// Unnormalised dual directions A_{p,-i}^{-1} h_ip, one per flat pair.
std::vector<CVec> dual_directions(const ChannelSet& channels, std::span<const double> lambda,
                                  const Topology& topo);

/// Square coupling matrix indexed by flat pairs (row: the constrained link).
struct CouplingMatrix {
    RMat f;
};

CouplingMatrix coupling_matrix(const ChannelSet& channels, std::span<const CVec> what,
                               const SinrTargets& targets, const Topology& topo);

/// Solves F delta = N_T sigma^2 1. Throws InfeasibleError on any delta <= 0.
std::vector<double> scaling_factors(const CouplingMatrix& coupling, double sigma2, int n_tx);

/// w_ip = sqrt(delta_ip / N_T) what_ip.
PrecoderSet centralized_precoders(std::span<const CVec> what, std::span<const double> delta, int n_tx);

/// Exact leakage tau/eps implied by the duality solution.
InterferenceBudget interference_terms(const ChannelSet& channels, std::span<const CVec> what,
                                      std::span<const double> delta, const Topology& topo);

struct CentralizedSolution {
    LambdaSolution lambda;
    std::vector<CVec> what;
    CouplingMatrix coupling;
    std::vector<double> delta;
    PrecoderSet precoders;
    InterferenceBudget budget;
};

CentralizedSolution solve_centralized(const ChannelSet& channels, const SinrTargets& targets,
                                      const Topology& topo, double sigma2, const FixedPointOptions& opts = {});

/// Debug dump: "row,col,value" lines for F followed by "index,value" for delta.
void write_coupling_csv(const std::string& path, const CouplingMatrix& coupling, std::span<const double> delta);

} // namespace cjt
