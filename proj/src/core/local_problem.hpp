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

// Per-BS power minimisation once the inter-cell interference is pinned by a
// budget. Each BS only needs its own channels to every UE.

#include "socp.hpp"
#include "types.hpp"

#include <limits>
#include <ostream>

namespace cjt {

inline constexpr double kNoCap = std::numeric_limits<double>::infinity();

struct LocalProblem {
    int bs = 0;
    std::vector<CVec> channels;   ///< h_ip for every UE i
    std::vector<int> served;      ///< U_p
    std::vector<double> gamma;    ///< per served UE
    std::vector<double> incoming; ///< per served UE: budgeted interference + noise
    std::vector<double> caps;     ///< per UE: tau_ip (served) or eps_ip; kNoCap when absent
};

LocalProblem build_subproblem(const ChannelSet& channels, const Topology& topo, int p, const SinrTargets& targets,
                              const InterferenceBudget& budget, double sigma2);

enum class LocalStatus { optimal, infeasible, max_iter, numerical };

const char* to_string(LocalStatus s);

struct LocalSolution {
    std::vector<CVec> w; ///< per served UE
    LocalStatus status = LocalStatus::numerical;
    double objective = 0.0;
    double kkt_gap = 0.0;
    int iterations = 0;
    double certificate = 0.0;
};

LocalSolution solve_subproblem(const LocalProblem& problem, const SocpSettings& settings = {});

/// Build the real-valued cone program actually handed to the solver.
ConeProgram local_cone_program(const LocalProblem& problem);

/**
 * Independent cross-check for problems without binding caps: virtual uplink
 * power iteration from zero, receive-filter directions, then downlink powers
 * from the linear SINR-equality system. Reports `infeasible` when the uplink
 * powers diverge.
 */
LocalSolution dual_oracle_single_cell(const LocalProblem& problem, double tol = 1e-12, int max_iter = 20000);

/// Per served UE: |h^H w_i|^2 / gamma - (intra-cell interference + incoming).
std::vector<double> sinr_slack(const LocalProblem& problem, const std::vector<CVec>& w);
/// Per UE: leakage caused by this BS toward it minus its cap (0 when uncapped).
std::vector<double> cap_slack(const LocalProblem& problem, const std::vector<CVec>& w);

void write_local_problem(std::ostream& os, const LocalProblem& problem);

} // namespace cjt
