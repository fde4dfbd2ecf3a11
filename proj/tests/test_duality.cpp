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
#include "metrics.hpp"
#include "support.hpp"

#include <doctest.h>

#include <random>

using namespace cjt;
using test::rel;

namespace {

Topology one_cell(int n_tx, int n_ue) { return build_topology(1, n_tx, n_ue, "single"); }

} // namespace

TEST_CASE("single UE: closed forms") {
    std::mt19937_64 rng(3);
    const int n = 6;
    const CVec h = test::random_cvec(n, rng);
    const Topology t = one_cell(n, 1);
    const ChannelSet ch = test::make_channels(1, 1, {h});
    const double gamma = 3.0;
    const double sigma2 = 0.02;
    const CentralizedSolution s = solve_centralized(ch, SinrTargets{{gamma}}, t, sigma2);

    CHECK(rel(s.lambda.lambda[0], gamma * n / h.squaredNorm()) < 1e-12);
    // unnormalized direction h / N
    CHECK((s.what[0] - h / static_cast<double>(n)).norm() < 1e-14 * h.norm());
    const double h4 = h.squaredNorm() * h.squaredNorm();
    CHECK(rel(s.coupling.f(0, 0), h4 / (n * n * gamma)) < 1e-12);
    CHECK(rel(s.delta[0], n * n * n * sigma2 * gamma / h4) < 1e-12);
    CHECK(rel(s.precoders.total_power(), gamma * sigma2 / h.squaredNorm()) < 1e-12);
    // direction is matched filtering
    const CVec w = s.precoders.w[0];
    CHECK(std::norm(h.dot(w)) == doctest::Approx(h.squaredNorm() * w.squaredNorm()).epsilon(1e-12));
    CHECK(s.budget.leak(0, 0) == 0.0);
}

TEST_CASE("two UEs at one BS: scalar fixed-point oracle") {
    std::mt19937_64 rng(11);
    const int n = 4;
    const CVec h1 = test::random_cvec(n, rng);
    const CVec h2 = test::random_cvec(n, rng);
    const double g1 = 2.0, g2 = 0.7, sigma2 = 0.05;

    // q_i = h_i^H (N I + lambda_j h_j h_j^H)^{-1} h_i by Sherman-Morrison,
    // iterated in plain scalars.
    const double n1 = h1.squaredNorm(), n2 = h2.squaredNorm(), c12 = std::norm(h1.dot(h2));
    double l1 = g1 * n / n1, l2 = g2 * n / n2;
    for (int it = 0; it < 10000; ++it) {
        const double q1 = (n1 - l2 * c12 / (n + l2 * n2)) / n;
        const double q2 = (n2 - l1 * c12 / (n + l1 * n1)) / n;
        l1 = g1 / q1;
        l2 = g2 / q2;
    }
    // Directions and the 2x2 power system by hand.
    const CVec u1 = ((n * CMat::Identity(n, n) + l2 * h2 * h2.adjoint()).inverse() * h1).normalized();
    const CVec u2 = ((n * CMat::Identity(n, n) + l1 * h1 * h1.adjoint()).inverse() * h2).normalized();
    const double a11 = std::norm(h1.dot(u1)) / g1, a22 = std::norm(h2.dot(u2)) / g2;
    const double a12 = -std::norm(h1.dot(u2)), a21 = -std::norm(h2.dot(u1));
    const double det = a11 * a22 - a12 * a21;
    const double p1 = sigma2 * (a22 - a12) / det, p2 = sigma2 * (a11 - a21) / det;

    const CentralizedSolution s =
        solve_centralized(test::make_channels(2, 1, {h1, h2}), SinrTargets{{g1, g2}}, one_cell(n, 2), sigma2);
    CHECK(rel(s.lambda.lambda[0], l1) < 1e-7);
    CHECK(rel(s.lambda.lambda[1], l2) < 1e-7);
    CHECK(rel(s.precoders.w[0].squaredNorm(), p1) < 1e-6);
    CHECK(rel(s.precoders.w[1].squaredNorm(), p2) < 1e-6);
}

TEST_CASE("orthogonal UEs decouple") {
    const int n = 4;
    CVec h1 = CVec::Zero(n), h2 = CVec::Zero(n);
    h1(0) = cplx(1.0, 1.0);
    h2(2) = cplx(0.0, 2.0);
    h2(3) = 0.5;
    const double sigma2 = 0.1;
    const CentralizedSolution s =
        solve_centralized(test::make_channels(2, 1, {h1, h2}), SinrTargets{{4.0, 9.0}}, one_cell(n, 2), sigma2);
    CHECK(rel(s.precoders.total_power(), 4.0 * sigma2 / h1.squaredNorm() + 9.0 * sigma2 / h2.squaredNorm()) <
          1e-10);
    CHECK(s.lambda.iterations <= 3);
}

TEST_CASE("SINR targets are met with equality") {
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
        const char* pattern = seed % 3 == 0 ? "overlap" : (seed % 3 == 1 ? "full" : "disjoint");
        const test::Instance in = test::make_instance(3, 16, 8, pattern, seed);
        const CentralizedSolution s = solve_centralized(in.ch, in.targets, in.topo, in.sigma2);
        const auto got = pair_sinr(in.ch, s.precoders, in.sigma2, in.topo);
        for (std::size_t k = 0; k < got.size(); ++k) CHECK(rel(got[k], in.targets.gamma[k]) < 1e-6);
        CHECK(s.lambda.residual <= 1e-8);
        CHECK(lambda_residual(in.ch, in.targets, in.topo, s.lambda.lambda) <= 1e-8);
    }
}

TEST_CASE("interference terms match the precoders") {
    const test::Instance in = test::make_instance(3, 16, 8, "overlap", 42);
    const CentralizedSolution s = solve_centralized(in.ch, in.targets, in.topo, in.sigma2);
    for (int q = 0; q < 3; ++q)
        for (int i = 0; i < 8; ++i) {
            double leak = 0.0;
            for (int j : in.topo.served(q))
                if (j != i) leak += std::norm(in.ch.at(i, q).dot(s.precoders.at(in.topo, q, j)));
            CHECK(s.budget.leak(i, q) == doctest::Approx(leak).epsilon(1e-10));
            if (in.topo.serves(q, i))
                CHECK(s.budget.tau(in.topo, i, q) == s.budget.leak(i, q));
            else
                CHECK(s.budget.eps(in.topo, i, q) == s.budget.leak(i, q));
        }
    CHECK_THROWS_AS(s.budget.tau(in.topo, 0, 2), ConfigError);
    CHECK_THROWS_AS(s.budget.eps(in.topo, 0, 0), ConfigError);
}

TEST_CASE("optimal power never exceeds zero forcing") {
    for (std::uint64_t seed = 100; seed < 110; ++seed) {
        const test::Instance in = test::make_instance(3, 16, 8, "overlap", seed);
        const CentralizedSolution s = solve_centralized(in.ch, in.targets, in.topo, in.sigma2);
        CHECK(s.precoders.total_power() <= in.zf.total_power() * (1.0 + 1e-9));
    }
}

TEST_CASE("power grows with the targets") {
    const test::Instance in = test::make_instance(3, 16, 8, "overlap", 5);
    double last = 0.0;
    for (double f : {0.25, 0.5, 1.0, 1.5}) {
        SinrTargets t = in.targets;
        for (auto& g : t.gamma) g *= f;
        const double p = solve_centralized(in.ch, t, in.topo, in.sigma2).precoders.total_power();
        CHECK(p > last);
        last = p;
    }
}

TEST_CASE("power scales linearly with the noise") {
    const test::Instance in = test::make_instance(3, 16, 8, "full", 6);
    const double a = solve_centralized(in.ch, in.targets, in.topo, in.sigma2).precoders.total_power();
    const double b = solve_centralized(in.ch, in.targets, in.topo, 4.0 * in.sigma2).precoders.total_power();
    CHECK(rel(b, 4.0 * a) < 1e-10);
}

TEST_CASE("infeasible and malformed inputs") {
    const int n = 1;
    CVec h = CVec::Ones(n);
    const ChannelSet ch = test::make_channels(2, 1, {h, h});
    CHECK_THROWS_AS(solve_centralized(ch, SinrTargets{{2.0, 2.0}}, one_cell(n, 2), 0.1), InfeasibleError);
    CHECK_THROWS_AS(solve_centralized(ch, SinrTargets{{1.0}}, one_cell(n, 2), 0.1), ConfigError);
    CHECK_THROWS_AS(solve_centralized(ch, SinrTargets{{-1.0, 1.0}}, one_cell(n, 2), 0.1), ConfigError);
    CHECK_THROWS_AS(solve_centralized(ch, SinrTargets{{0.1, 0.1}}, one_cell(n, 2), 0.0), ConfigError);
    const ChannelSet zero = test::make_channels(1, 1, {CVec::Zero(2)});
    CHECK_THROWS_AS(solve_centralized(zero, SinrTargets{{1.0}}, one_cell(2, 1), 0.1), InfeasibleError);

    CHECK_THROWS_AS(scaling_factors(CouplingMatrix{RMat::Ones(2, 2)}, 1.0, 2), NumericalError);
    RMat neg(2, 2);
    neg << 1.0, -2.0, -2.0, 1.0;
    CHECK_THROWS_AS(scaling_factors(CouplingMatrix{neg}, 1.0, 2), InfeasibleError);
}

TEST_CASE("non-convergence is a numerical failure") {
    const test::Instance in = test::make_instance(3, 16, 8, "overlap", 8);
    FixedPointOptions o;
    o.max_iter = 1;
    try {
        solve_centralized(in.ch, in.targets, in.topo, in.sigma2, o);
        FAIL("expected NumericalError");
    } catch (const NumericalError& e) {
        CHECK(e.residual() > 0.0);
    }
}
