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

#include "config.hpp"
#include "error.hpp"
#include "harness.hpp"
#include "support.hpp"

#include <doctest.h>

#include <sstream>

using namespace cjt;
using test::rel;

namespace {

ScenarioConfig small_config(int n_tx = 16) {
    ScenarioConfig c;
    c.n_bs = 3;
    c.n_ue = 8;
    c.n_tx = n_tx;
    return c;
}

std::vector<std::string> lines(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream is(s);
    for (std::string l; std::getline(is, l);) out.push_back(l);
    return out;
}

std::vector<std::string> fields(const std::string& l) {
    std::vector<std::string> out;
    std::istringstream is(l);
    for (std::string f; std::getline(is, f, ',');) out.push_back(f);
    return out;
}

} // namespace

TEST_CASE("one trial, three schemes") {
    const TrialRecords r = run_trial(small_config(), 5);
    CHECK(r[0].scheme == Scheme::zf);
    CHECK(r[1].scheme == Scheme::centralized);
    CHECK(r[2].scheme == Scheme::decentralized);
    for (const auto& rec : r) {
        REQUIRE(rec.feasible);
        CHECK(rec.seed == 5);
        CHECK(rec.n_tx == 16);
        double sum = 0.0;
        for (double p : rec.per_bs_power_w) sum += p;
        CHECK(rel(sum, rec.total_power_w) < 1e-9);
        double rate = 0.0;
        for (double g : rec.sinr_orig) rate += std::log2(1.0 + g);
        CHECK(rel(rate, rec.sum_rate_bps_hz) < 1e-12);
        CHECK(rec.sinr_pair.size() == 12);
        CHECK(rec.sinr_orig.size() == 8);
    }
    CHECK(rel(r[0].total_power_w, 10.0) < 1e-12);
    CHECK(r[1].total_power_w <= r[0].total_power_w * (1.0 + 1e-6));
    CHECK(r[1].solver_iters > 0);
    // rate-matched on the per-link SINRs
    for (std::size_t k = 0; k < r[0].sinr_pair.size(); ++k) CHECK(rel(r[1].sinr_pair[k], r[0].sinr_pair[k]) < 1e-5);
}

TEST_CASE("trials are deterministic in the seed") {
    const TrialRecords a = run_trial(small_config(), 9);
    const TrialRecords b = run_trial(small_config(), 9);
    const TrialRecords c = run_trial(small_config(), 10);
    for (std::size_t s = 0; s < 3; ++s) {
        CHECK(a[s].total_power_w == b[s].total_power_w);
        CHECK(a[s].sinr_orig == b[s].sinr_orig);
    }
    CHECK(a[1].total_power_w != c[1].total_power_w);
}

TEST_CASE("decentralized power lies between the optimum and the baseline on average") {
    double c = 0.0, d = 0.0;
    for (std::uint64_t s = 0; s < 6; ++s) {
        const TrialRecords r = run_trial(small_config(32), derive_seed(3, s));
        REQUIRE(r[2].feasible);
        c += r[1].total_power_w;
        d += r[2].total_power_w;
    }
    CHECK(c <= d);
    CHECK(d <= 1.15 * c);
}

TEST_CASE("too few antennas for zero forcing") {
    CHECK_THROWS_AS(run_trial(small_config(4), 1), InfeasibleError);
}

TEST_CASE("exchange accounting") {
    const Topology t = build_topology(3, 64, 20, "overlap");
    const ExchangeCost c = exchange_cost(t, Scheme::centralized, 1000);
    CHECK(c.bytes_per_coherence_block == 20480);
    CHECK(c.bytes_per_stationarity_period == 20480000);
    const ExchangeCost d = exchange_cost(t, Scheme::decentralized, 1000);
    CHECK(d.bytes_per_stationarity_period == 665600);
    CHECK(d.bytes_per_coherence_block == 0);
    CHECK(d.bytes_per_stationarity_period < c.bytes_per_stationarity_period);
    CHECK(exchange_cost(t, Scheme::zf, 7).bytes_per_stationarity_period == 7 * 20480);
    CHECK(exchange_cost(t, Scheme::decentralized, 1).bytes_per_stationarity_period == 665600);
    CHECK_THROWS_AS(exchange_cost(t, Scheme::centralized, 0), ConfigError);
}

TEST_CASE("scheme names") {
    for (Scheme s : {Scheme::zf, Scheme::centralized, Scheme::decentralized}) CHECK(parse_scheme(to_string(s)) == s);
    CHECK_THROWS_AS(parse_scheme("dpc"), ConfigError);
}

TEST_CASE("sweep CSV") {
    std::ostringstream os;
    sweep_antennas(small_config(), {32, 16}, 3, 4, os);
    const auto l = lines(os.str());
    REQUIRE(l.size() == 7);
    CHECK(l[0] == "n_tx,scheme,trials,mean_power_w,std_power_w,mean_gap_pct,infeasible_rate");
    const char* order[] = {"centralized", "decentralized", "zf"};
    for (int r = 0; r < 6; ++r) {
        const auto f = fields(l[static_cast<std::size_t>(r + 1)]);
        REQUIRE(f.size() == 7);
        CHECK(f[0] == (r < 3 ? "16" : "32"));
        CHECK(f[1] == order[r % 3]);
        CHECK(f[2] == "3");
        if (f[1] == "centralized") CHECK(f[5] == "0");
        if (f[1] == "zf") CHECK(std::stod(f[3]) == doctest::Approx(10.0).epsilon(1e-12));
        CHECK(std::stod(f[4]) >= 0.0);
        CHECK(std::stod(f[6]) >= 0.0);
    }
    // 17 significant digits
    CHECK(fields(l[1])[3].size() >= 17);

    std::ostringstream again, threaded;
    sweep_antennas(small_config(), {32, 16}, 3, 4, again);
    sweep_antennas(small_config(), {16, 32}, 3, 4, threaded, SweepOptions{3});
    CHECK(again.str() == os.str());
    CHECK(threaded.str() == os.str());

    std::ostringstream bad;
    CHECK_THROWS_AS(sweep_antennas(small_config(), {16}, 0, 1, bad), ConfigError);
    CHECK_THROWS_AS(sweep_antennas(small_config(), {}, 1, 1, bad), ConfigError);
}

TEST_CASE("number formatting") {
    CHECK(format_double(0.1) == "0.10000000000000001");
    CHECK(format_double(10.0) == "10");
    CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
}
