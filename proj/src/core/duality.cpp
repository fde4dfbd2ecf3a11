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

#include "duality.hpp"

#include "error.hpp"

#include <Eigen/Cholesky>
#include <Eigen/LU>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

namespace cjt {

namespace {

void check_inputs(const ChannelSet& channels, const SinrTargets& targets, const Topology& topo) {
    if (channels.n_ue != topo.n_ue() || channels.n_bs != topo.n_bs() || channels.n_tx != topo.n_tx())
        throw ConfigError("channel set does not match topology");
    if (static_cast<int>(targets.gamma.size()) != topo.n_pairs())
        throw ConfigError("one SINR target per served pair required");
    for (double g : targets.gamma)
        if (!(g > 0.0) || !std::isfinite(g)) throw ConfigError("SINR targets must be positive and finite");
}

// N_T I + sum_j Lambda_j h_jp h_jp^H over every UE.
CMat uplink_matrix(const ChannelSet& channels, const Topology& topo, int p, std::span<const double> agg) {
    const int n = topo.n_tx();
    CMat a = CMat::Identity(n, n) * static_cast<double>(n);
    for (int j = 0; j < topo.n_ue(); ++j) {
        const double lj = agg[static_cast<std::size_t>(j)];
        if (lj == 0.0) continue;
        const CVec& h = channels.at(j, p);
        a.selfadjointView<Eigen::Lower>().rankUpdate(h, lj);
    }
    return a.selfadjointView<Eigen::Lower>();
}

// One substitution sweep: returns T(lambda).
std::vector<double> lambda_map(const ChannelSet& channels, const SinrTargets& targets, const Topology& topo,
                               std::span<const double> lambda) {
    const auto agg = aggregate_multipliers(topo, lambda);
    std::vector<double> next(lambda.size());
    for (int p = 0; p < topo.n_bs(); ++p) {
        const Eigen::LLT<CMat> llt(uplink_matrix(channels, topo, p, agg));
        if (llt.info() != Eigen::Success) throw NumericalError("uplink resolvent factorization failed");
        for (int i : topo.served(p)) {
            const CVec& h = channels.at(i, p);
            // Remove UE i's own term by a rank-1 downdate of the quadratic form.
            const double a = h.dot(llt.solve(h)).real();
            const double li = agg[static_cast<std::size_t>(i)];
            double quad = a / (1.0 - li * a);
            if (!(1.0 - li * a > 1e-8)) {
                CMat ai = llt.reconstructedMatrix();
                ai.noalias() -= li * h * h.adjoint();
                quad = h.dot(ai.llt().solve(h)).real();
            }
            const int k = topo.pair_index(p, i);
            next[static_cast<std::size_t>(k)] = targets.gamma[static_cast<std::size_t>(k)] / quad;
        }
    }
    return next;
}

double max_relative_change(std::span<const double> a, std::span<const double> b) {
    double r = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) r = std::max(r, std::abs(a[k] - b[k]) / std::abs(a[k]));
    return r;
}

} // namespace

std::vector<double> aggregate_multipliers(const Topology& topo, std::span<const double> per_pair) {
    std::vector<double> agg(static_cast<std::size_t>(topo.n_ue()), 0.0);
    for (int k = 0; k < topo.n_pairs(); ++k)
        agg[static_cast<std::size_t>(topo.pair(k).ue)] += per_pair[static_cast<std::size_t>(k)];
    return agg;
}

LambdaSolution solve_lambda_fixed_point(const ChannelSet& channels, const SinrTargets& targets,
                                        const Topology& topo, const FixedPointOptions& opts) {
    check_inputs(channels, targets, topo);
    if (!(opts.tol > 0.0)) throw ConfigError("fixed-point tolerance must be positive");

    LambdaSolution sol;
    sol.lambda.resize(static_cast<std::size_t>(topo.n_pairs()));
    for (int k = 0; k < topo.n_pairs(); ++k) {
        const auto [p, i] = topo.pair(k);
        const double g = channels.at(i, p).squaredNorm();
        if (!(g > 0.0)) throw InfeasibleError("served link with zero channel");
        sol.lambda[static_cast<std::size_t>(k)] = targets.gamma[static_cast<std::size_t>(k)] * topo.n_tx() / g;
    }
    // The start is the interference-free lower bound and the iterates increase
    // monotonically from it, so a huge growth ratio means divergence.
    const std::vector<double> start = sol.lambda;
    constexpr double kDivergence = 1e12;

    for (int it = 1; it <= opts.max_iter; ++it) {
        auto next = lambda_map(channels, targets, topo, sol.lambda);
        for (std::size_t k = 0; k < next.size(); ++k)
            if (!std::isfinite(next[k]) || next[k] <= 0.0 || next[k] > kDivergence * start[k])
                throw InfeasibleError("uplink multipliers diverge; SINR targets infeasible");
        const double change = max_relative_change(sol.lambda, next);
        sol.lambda = std::move(next);
        sol.iterations = it;
        if (change <= opts.tol) {
            sol.residual = lambda_residual(channels, targets, topo, sol.lambda);
            if (sol.residual <= opts.tol) return sol;
        }
    }
    sol.residual = lambda_residual(channels, targets, topo, sol.lambda);
    throw NumericalError("uplink multiplier iteration did not converge", sol.residual);
}

double lambda_residual(const ChannelSet& channels, const SinrTargets& targets, const Topology& topo,
                       std::span<const double> lambda) {
    const auto next = lambda_map(channels, targets, topo, lambda);
    return max_relative_change(lambda, next);
}

std::vector<CVec> dual_directions(const ChannelSet& channels, std::span<const double> lambda,
                                  const Topology& topo) {
    const auto agg = aggregate_multipliers(topo, lambda);
    std::vector<CVec> what(static_cast<std::size_t>(topo.n_pairs()));
    for (int p = 0; p < topo.n_bs(); ++p) {
        const CMat a = uplink_matrix(channels, topo, p, agg);
        for (int i : topo.served(p)) {
            const CVec& h = channels.at(i, p);
            CMat ai = a;
            ai.noalias() -= agg[static_cast<std::size_t>(i)] * h * h.adjoint();
            const Eigen::LLT<CMat> llt(ai);
            if (llt.info() != Eigen::Success) throw NumericalError("dual direction solve failed");
            what[static_cast<std::size_t>(topo.pair_index(p, i))] = llt.solve(h);
        }
    }
    return what;
}

CouplingMatrix coupling_matrix(const ChannelSet& channels, std::span<const CVec> what,
                               const SinrTargets& targets, const Topology& topo) {
    const int n = topo.n_pairs();
    CouplingMatrix c{RMat::Zero(n, n)};
    for (int r = 0; r < n; ++r) {
        const auto [p, i] = topo.pair(r);
        for (int col = 0; col < n; ++col) {
            const auto [q, j] = topo.pair(col);
            const CVec& w = what[static_cast<std::size_t>(col)];
            if (col == r) {
                c.f(r, col) = std::norm(w.dot(channels.at(i, p))) / targets.gamma[static_cast<std::size_t>(r)];
            } else if (j != i) {
                c.f(r, col) = -std::norm(w.dot(channels.at(i, q)));
            }
        }
    }
    return c;
}

std::vector<double> scaling_factors(const CouplingMatrix& coupling, double sigma2, int n_tx) {
    const auto n = coupling.f.rows();
    if (n == 0) return {};
    const Eigen::PartialPivLU<RMat> lu(coupling.f);
    if (!(lu.rcond() > 1e-15)) throw NumericalError("coupling matrix is singular", lu.rcond());
    const RVec rhs = RVec::Constant(n, n_tx * sigma2);
    RVec delta = lu.solve(rhs);
    // One refinement step keeps the residual at roundoff level.
    delta += lu.solve(rhs - coupling.f * delta);
    for (Eigen::Index k = 0; k < n; ++k)
        if (!(delta(k) > 0.0)) throw InfeasibleError("non-positive scaling factor; SINR targets infeasible");
    return {delta.data(), delta.data() + n};
}

PrecoderSet centralized_precoders(std::span<const CVec> what, std::span<const double> delta, int n_tx) {
    if (what.size() != delta.size()) throw ConfigError("directions and scaling factors differ in size");
    PrecoderSet out;
    out.w.reserve(what.size());
    for (std::size_t k = 0; k < what.size(); ++k) {
        if (delta[k] < 0.0) throw InfeasibleError("negative scaling factor");
        out.w.push_back(std::sqrt(delta[k] / n_tx) * what[k]);
    }
    return out;
}

InterferenceBudget interference_terms(const ChannelSet& channels, std::span<const CVec> what,
                                      std::span<const double> delta, const Topology& topo) {
    InterferenceBudget b{RMat::Zero(topo.n_ue(), topo.n_bs())};
    const double inv_n = 1.0 / topo.n_tx();
    for (int q = 0; q < topo.n_bs(); ++q)
        for (int i = 0; i < topo.n_ue(); ++i) {
            const CVec& h = channels.at(i, q);
            double acc = 0.0;
            for (int j : topo.served(q)) {
                if (j == i) continue;
                const int k = topo.pair_index(q, j);
                acc += inv_n * delta[static_cast<std::size_t>(k)] * std::norm(h.dot(what[static_cast<std::size_t>(k)]));
            }
            b.leak(i, q) = acc;
        }
    return b;
}

CentralizedSolution solve_centralized(const ChannelSet& channels, const SinrTargets& targets,
                                      const Topology& topo, double sigma2, const FixedPointOptions& opts) {
    if (!(sigma2 > 0.0)) throw ConfigError("noise power must be positive");
    CentralizedSolution s;
    s.lambda = solve_lambda_fixed_point(channels, targets, topo, opts);
    s.what = dual_directions(channels, s.lambda.lambda, topo);
    s.coupling = coupling_matrix(channels, s.what, targets, topo);
    s.delta = scaling_factors(s.coupling, sigma2, topo.n_tx());
    s.precoders = centralized_precoders(s.what, s.delta, topo.n_tx());
    s.budget = interference_terms(channels, s.what, s.delta, topo);
    return s;
}

void write_coupling_csv(const std::string& path, const CouplingMatrix& coupling, std::span<const double> delta) {
    std::ofstream os(path);
    if (!os) throw ConfigError("cannot open '" + path + "' for writing");
    char buf[64];
    os << "row,col,f\n";
    for (Eigen::Index r = 0; r < coupling.f.rows(); ++r)
        for (Eigen::Index c = 0; c < coupling.f.cols(); ++c) {
            std::snprintf(buf, sizeof buf, "%.17g", coupling.f(r, c));
            os << r << ',' << c << ',' << buf << '\n';
        }
    os << "index,delta\n";
    for (std::size_t k = 0; k < delta.size(); ++k) {
        std::snprintf(buf, sizeof buf, "%.17g", delta[k]);
        os << k << ',' << buf << '\n';
    }
}

} // namespace cjt
