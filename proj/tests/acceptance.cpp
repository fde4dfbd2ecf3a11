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

// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include "config.hpp"
#include "deteq.hpp"
#include "duality.hpp"
#include "harness.hpp"
#include "local_problem.hpp"
#include "metrics.hpp"
#include "scenario.hpp"
#include "support.hpp"
#include "zf.hpp"

#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>

using namespace cjt;
using test::rel;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, double a) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

ScenarioConfig desk(int n_tx) {
    ScenarioConfig c;
    c.n_bs = 3;
    c.n_ue = 12;
    c.n_tx = n_tx;
    return c;
}

test::Instance desk_instance(int n_tx, std::uint64_t seed) {
    return test::make_instance(3, n_tx, 12, "overlap", seed);
}

Outcome decomposition() {
    double worst = 0.0;
    for (std::uint64_t k = 0; k < 20; ++k) {
        const test::Instance in = desk_instance(32, derive_seed(101, k));
        const CentralizedSolution cs = solve_centralized(in.ch, in.targets, in.topo, in.sigma2);
        const DecentralizedResult dr = decentralized_precoders(in.ch, in.topo, in.targets, cs.budget, in.sigma2);
        if (!dr.feasible) return {false, "subproblem not solved to optimality on instance " + std::to_string(k)};
        double sum = 0.0;
        for (double o : dr.objective) sum += o;
        worst = std::max(worst, rel(sum, cs.precoders.total_power()));
    }
    return {worst <= 1e-4, "max relative difference " + fmt("%.3g", worst) + " over 20 instances (limit 1e-4)"};
}

Outcome tightness() {
    double worst = 0.0;
    int count = 0;
    const char* patterns[] = {"overlap", "full", "disjoint"};
    for (int n_tx : {16, 32, 64})
        for (std::uint64_t k = 0; k < 5; ++k) {
            const test::Instance in =
                test::make_instance(3, n_tx, 12, patterns[k % 3], derive_seed(202, k * 100 + n_tx));
            const CentralizedSolution cs = solve_centralized(in.ch, in.targets, in.topo, in.sigma2);
            const auto got = pair_sinr(in.ch, cs.precoders, in.sigma2, in.topo);
            for (std::size_t j = 0; j < got.size(); ++j) worst = std::max(worst, rel(got[j], in.targets.gamma[j]));
            ++count;
        }
    return {worst <= 1e-6,
            "max |SINR/target - 1| = " + fmt("%.3g", worst) + " over " + std::to_string(count) + " instances"};
}

Outcome single_user() {
    std::mt19937_64 rng(303);
    std::uniform_real_distribution<double> u(0.1, 10.0);
    double worst = 0.0;
    for (int n : {1, 2, 4, 8, 16, 64}) {
        const CVec h = test::random_cvec(n, rng);
        const double gamma = u(rng), sigma2 = 0.01 * u(rng);
        const double expect = gamma * sigma2 / h.squaredNorm();

        LocalProblem lp;
        lp.channels = {h};
        lp.served = {0};
        lp.gamma = {gamma};
        lp.incoming = {sigma2};
        lp.caps = {kNoCap};
        const LocalSolution s = solve_subproblem(lp);
        const LocalSolution o = dual_oracle_single_cell(lp);
        const CentralizedSolution c = solve_centralized(test::make_channels(1, 1, {h}), SinrTargets{{gamma}},
                                                        build_topology(1, n, 1, "single"), sigma2);
        if (s.status != LocalStatus::optimal || o.status != LocalStatus::optimal)
            return {false, "solver or oracle failed at N_T = " + std::to_string(n)};
        worst = std::max({worst, rel(s.objective, expect), rel(o.objective, expect),
                          rel(c.precoders.total_power(), expect)});
    }
    return {worst <= 1e-6, "max relative error " + fmt("%.3g", worst) + " (solver, duality, oracle; limit 1e-6)"};
}

bool non_increasing(const std::vector<double>& v) {
    int inversions = 0;
    for (std::size_t k = 1; k < v.size(); ++k)
        if (v[k] > v[k - 1]) {
            ++inversions;
            if (v[k] > 1.05 * v[k - 1]) return false;
        }
    return inversions <= 1;
}

Outcome de_convergence() {
    std::vector<double> el, ef, et;
    for (int n : {16, 32, 64}) {
        const Topology t = build_topology(3, n, 12, "overlap");
        const CovarianceSet cov = synth_covariances(t, ChannelModel{}, derive_seed(404, kCovarianceStream));
        constexpr int kDraws = 50;
        double a = 0.0, b = 0.0, c = 0.0;
        for (int d = 0; d < kDraws; ++d) {
            const ChannelSet ch = draw_channels(cov, derive_seed(405, static_cast<std::uint64_t>(d)));
            const double sigma2 = calibrate_noise(ch, t, 20.0).sigma2;
            const SinrTargets tg = extract_targets(ch, normalize_total_power(zf_precoders(ch, t)), sigma2, t);
            const CentralizedSolution cs = solve_centralized(ch, tg, t, sigma2);
            const DeState de = solve_de(cov, tg, t, sigma2);
            const InterferenceBudget bd = de_interference(de.bs, de.delta_bar, t);

            double wl = 0.0;
            for (std::size_t k = 0; k < tg.gamma.size(); ++k)
                wl = std::max(wl, rel(de.moments.lambda_bar[k], cs.lambda.lambda[k]));
            const double diag = cs.coupling.f.diagonal().cwiseAbs().mean();
            double wt = 0.0;
            for (const auto& [p, i] : t.pairs()) wt += rel(bd.leak(i, p), cs.budget.leak(i, p));
            a += wl / kDraws;
            b += (cs.coupling.f - de.f_bar).cwiseAbs().maxCoeff() / diag / kDraws;
            c += wt / t.n_pairs() / kDraws;
        }
        el.push_back(a);
        ef.push_back(b);
        et.push_back(c);
    }
    auto row = [](const char* name, const std::vector<double>& v) {
        std::string s = std::string(name) + " ";
        for (std::size_t k = 0; k < v.size(); ++k) s += (k ? "/" : "") + fmt("%.4g", v[k]);
        return s;
    };
    const bool ok = non_increasing(el) && non_increasing(ef) && non_increasing(et);
    return {ok, "N_T 16/32/64: " + row("lambda", el) + ", " + row("F", ef) + ", " + row("tau", et)};
}

std::vector<std::string> split(const std::string& s, char d) {
    std::vector<std::string> out;
    std::istringstream is(s);
    for (std::string f; std::getline(is, f, d);) out.push_back(f);
    return out;
}

Outcome power_gap() {
    std::ostringstream os;
    sweep_antennas(desk(64), {16, 64}, 50, 1, os);
    double gap16 = -1.0, gap64 = -1.0, excess64 = -1.0, cen64 = 0.0;
    double infeasible = 0.0;
    for (const auto& line : split(os.str(), '\n')) {
        const auto f = split(line, ',');
        if (f.size() != 7 || f[0] == "n_tx") continue;
        if (f[1] == "centralized" && f[0] == "64") cen64 = std::stod(f[3]);
        if (f[1] != "decentralized") continue;
        infeasible = std::max(infeasible, std::stod(f[6]));
        (f[0] == "16" ? gap16 : gap64) = std::stod(f[5]);
        if (f[0] == "64") excess64 = std::stod(f[3]);
    }
    excess64 = 100.0 * (excess64 - cen64) / cen64;
    const bool ok = gap64 >= 0.0 && excess64 <= 15.0 && gap64 <= 15.0 && gap64 <= gap16;
    return {ok, "decentralized gap " + fmt("%.3g", gap16) + "% at N_T=16, " + fmt("%.3g", gap64) +
                    "% at N_T=64 (mean-power excess " + fmt("%.3g", excess64) + "%), infeasible rate " +
                    fmt("%.3g", infeasible)};
}

Outcome zf_dominance() {
    int violations = 0;
    double worst = 0.0;
    const int counts[] = {16, 32, 48, 64};
    for (std::uint64_t k = 0; k < 100; ++k) {
        const test::Instance in = desk_instance(counts[k % 4], derive_seed(606, k));
        const CentralizedSolution cs = solve_centralized(in.ch, in.targets, in.topo, in.sigma2);
        const double ratio = cs.precoders.total_power() / in.zf.total_power();
        worst = std::max(worst, ratio);
        if (ratio > 1.0) ++violations;
    }
    return {violations == 0, std::to_string(violations) + " violations in 100 trials, max optimal/ZF power ratio " +
                                 fmt("%.4f", worst)};
}

Outcome oracle_agreement() {
    std::mt19937_64 rng(707);
    std::uniform_int_distribution<int> users(2, 6);
    double worst = 0.0;
    for (int k = 0; k < 20; ++k) {
        const LocalProblem lp = test::single_cell(8, users(rng), rng);
        const LocalSolution s = solve_subproblem(lp);
        const LocalSolution o = dual_oracle_single_cell(lp);
        if (s.status != LocalStatus::optimal || o.status != LocalStatus::optimal)
            return {false, "instance " + std::to_string(k) + ": " + to_string(s.status) + " / " + to_string(o.status)};
        worst = std::max(worst, rel(s.objective, o.objective));
    }
    return {worst <= 1e-4, "max relative objective difference " + fmt("%.3g", worst) + " over 20 instances"};
}

Outcome exchange() {
    const Topology t = build_topology(3, 64, 20, "overlap");
    const auto c = exchange_cost(t, Scheme::centralized, 1000);
    const auto d = exchange_cost(t, Scheme::decentralized, 1000);
    const bool ok = c.bytes_per_coherence_block == 20480 && d.bytes_per_stationarity_period == 665600 &&
                    c.bytes_per_stationarity_period == 20480000 &&
                    d.bytes_per_stationarity_period < c.bytes_per_stationarity_period;
    return {ok, std::to_string(c.bytes_per_coherence_block) + " B/block, " +
                    std::to_string(d.bytes_per_stationarity_period) + " B/period vs " +
                    std::to_string(c.bytes_per_stationarity_period) + " B/period"};
}

std::string slurp(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

Outcome determinism() {
    std::ofstream("acceptance_desk.ini") << "[topology]\nn_bs = 3\nn_ue = 12\nserving_pattern = overlap\n";
    const std::string base = std::string(CJT_CLI_PATH) + " sweep --config acceptance_desk.ini --ntx 16,32 "
                                                         "--trials 5 --seed 909 --out ";
    for (const char* out : {"acceptance_a.csv", "acceptance_b.csv"}) {
        const int st = std::system((base + out).c_str());
        if (!WIFEXITED(st) || WEXITSTATUS(st) != 0) return {false, "sweep exited abnormally"};
    }
    const std::string a = slurp("acceptance_a.csv");
    const std::string b = slurp("acceptance_b.csv");
    std::remove("acceptance_desk.ini");
    std::remove("acceptance_a.csv");
    std::remove("acceptance_b.csv");
    return {!a.empty() && a == b, std::to_string(a.size()) + " bytes, " + (a == b ? "identical" : "different")};
}

} // namespace

int main() {
    struct Criterion {
        const char* name;
        std::function<Outcome()> run;
    };
    const Criterion criteria[] = {
        {"decomposition equivalence with exact budgets", decomposition},
        {"duality tightness", tightness},
        {"single-user closed form", single_user},
        {"deterministic-equivalent convergence", de_convergence},
        {"end-to-end power gap", power_gap},
        {"zero-forcing dominance", zf_dominance},
        {"solver cross-validation", oracle_agreement},
        {"exchange accounting", exchange},
        {"sweep determinism", determinism},
    };
    int failed = 0;
    int index = 0;
    for (const auto& c : criteria) {
        ++index;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("[%s] %d %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", index, c.name, o.detail.c_str(), secs);
        std::fflush(stdout);
        if (!o.pass) ++failed;
    }
    std::printf("%d/%d criteria passed\n", index - failed, index);
    return failed ? 1 : 0;
}
