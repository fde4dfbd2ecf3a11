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

// Dense primal-dual interior-point solver for second-order cone programs
//
//     minimize    c'x
//     subject to  h - G x = s,   s in K = K_1 x ... x K_N,
//
// where every K_k = {(t, u) : |u|_2 <= t} is a Lorentz cone. The iteration
// runs on the homogeneous self-dual embedding, so infeasible and unbounded
// programs end with a certificate instead of diverging. Search directions
// use Nesterov-Todd scaling and a Mehrotra predictor-corrector; the reduced
// KKT system is solved through dense normal equations with iterative
// refinement. Intended for the small programs produced by local_problem.

#include "types.hpp"

#include <ostream>
#include <vector>

namespace cjt {

struct ConeProgram {
    RMat g;
    RVec h;
    RVec c;
    std::vector<int> cones; ///< Lorentz cone sizes, summing to g.rows()
};

struct SocpSettings {
    double feastol = 1e-8;
    double abstol = 1e-12;
    double reltol = 1e-7;
    int max_iter = 100;
    double step = 0.99;
};

enum class ConeStatus { optimal, primal_infeasible, dual_infeasible, max_iter, numerical };

const char* to_string(ConeStatus s);

struct ConeSolution {
    RVec x;
    RVec s;
    RVec z;
    ConeStatus status = ConeStatus::numerical;
    int iterations = 0;
    double pcost = 0.0;
    double dcost = 0.0;
    double gap = 0.0;
    double relgap = 0.0;
    double pres = 0.0;
    double dres = 0.0;
    /// Residual of the infeasibility certificate when one is reported.
    double certificate = 0.0;
};

ConeSolution solve_socp(const ConeProgram& prog, const SocpSettings& settings = {});

/// Plain-text triplet dump ("G i j v", "h i v", "c j v", "cone k dim").
void write_cone_program(std::ostream& os, const ConeProgram& prog);

namespace detail {

/// Nesterov-Todd scaling of one Lorentz cone: W z = W^{-1} s = lambda.
struct NtScaling {
    double eta = 1.0;
    double a = 1.0;
    RVec q;

    RVec apply(const RVec& v) const;
    RVec apply_inverse(const RVec& v) const;
};

/// Fails (returns false) when s or z is not strictly inside the cone.
bool nt_scaling(const RVec& s, const RVec& z, NtScaling& out);

/// Jordan product u o v of the Lorentz cone.
RVec jordan_product(const RVec& u, const RVec& v);
/// Solves lambda o x = d.
RVec jordan_divide(const RVec& lambda, const RVec& d);

} // namespace detail

} // namespace cjt
