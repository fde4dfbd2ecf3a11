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

// Large-system deterministic equivalents of the duality quantities. Every
// function here reads covariance matrices and SINR targets only; no
// instantaneous channel ever enters.

#include "types.hpp"

#include <string>

namespace cjt {

struct DeOptions {
    double tol = 1e-8;
    int max_iter = 1000;
};

struct DeMoments {
    RMat m_bar;                     ///< (ue, bs), every UE at every BS
    std::vector<double> lambda_bar; ///< per flat pair
    int iterations = 0;
    double residual = 0.0;
};

/**
 * Joint fixed point of
 *   m_ip  = Tr(Theta_ip (sum_j c_j Theta_jp / (1 + c_j m_jp) + N_T I)^{-1}),
 *   lambda_ip = gamma_ip / m_ip,
 * where c_j sums lambda over UE j's serving BSs. Plain substitution from
 * m_ip = Tr(Theta_ip) / N_T.
 */
DeMoments solve_de_fixed_point(const CovarianceSet& cov, const SinrTargets& targets, const Topology& topo,
                               const DeOptions& opts = {});

/// Max relative residual of the moment equations at (m_bar, lambda_bar).
double de_residual(const CovarianceSet& cov, const Topology& topo, const DeMoments& m);

/// T_q = ((1/N_T) sum_k c_k Theta_kq / (1 + c_k m_kq) + I)^{-1}.
CMat de_resolvent(const CovarianceSet& cov, const DeMoments& m, const Topology& topo, int q);

/**
 * Per-BS second-order quantities.
 *
 * `cross(i, jj)` approximates |what_jq^H h_iq|^2 for every UE i and the jj-th
 * served UE j of BS q: (1/N_T) m'_{j,i,q} / (1 + c_i m_iq)^2.
 */
struct DeBsTerms {
    CMat t_mat;
    RMat l_mat;       ///< n_ue x n_ue
    RMat m_prime;     ///< column i holds m'_{., i, q}
    RMat cross;       ///< n_ue x |U_q|
    double spectral_radius = 0.0;
};

DeBsTerms de_bs_terms(const CovarianceSet& cov, const DeMoments& m, const Topology& topo, int q);

struct DeState {
    DeMoments moments;
    std::vector<DeBsTerms> bs;
    RMat f_bar;
    std::vector<double> delta_bar;
};

/// Coupling matrix from the per-BS terms; same layout as the exact one.
RMat de_coupling(const DeMoments& m, const std::vector<DeBsTerms>& bs, const SinrTargets& targets,
                 const Topology& topo);

/// Solves F_bar delta = N_T sigma^2 1; InfeasibleError on delta <= 0.
std::vector<double> de_scaling(const RMat& f_bar, double sigma2, int n_tx);

/// Approximated tau/eps from the DE coupling rows and scaling factors.
InterferenceBudget de_interference(const std::vector<DeBsTerms>& bs, const std::vector<double>& delta_bar,
                                   const Topology& topo);

/// Whole pipeline: moments, per-BS terms, coupling, scaling factors.
DeState solve_de(const CovarianceSet& cov, const SinrTargets& targets, const Topology& topo, double sigma2,
                 const DeOptions& opts = {});

/// Diagnostics: "ue,bs,m_bar,lambda_bar" (lambda_bar empty for unserved links).
void write_de_csv(const std::string& path, const DeMoments& m, const Topology& topo);

} // namespace cjt
