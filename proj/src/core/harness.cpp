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

#include "harness.hpp"

#include "deteq.hpp"
#include "error.hpp"
#include "metrics.hpp"
#include "scenario.hpp"
#include "zf.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

namespace cjt {

const char* to_string(Scheme s) {
    switch (s) {
    case Scheme::zf: return "zf";
    case Scheme::centralized: return "centralized";
    case Scheme::decentralized: return "decentralized";
    }
    return "unknown";
}

Scheme parse_scheme(const std::string& name) {
    if (name == "zf") return Scheme::zf;
    if (name == "centralized") return Scheme::centralized;
    if (name == "decentralized") return Scheme::decentralized;
    throw ConfigError("unknown scheme '" + name + "'");
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

DecentralizedResult decentralized_precoders(const ChannelSet& channels, const Topology& topo,
                                            const SinrTargets& targets, const InterferenceBudget& budget,
                                            double sigma2, const SocpSettings& settings) {
    DecentralizedResult out;
    out.precoders.w.assign(static_cast<std::size_t>(topo.n_pairs()), CVec::Zero(topo.n_tx()));
    out.feasible = true;
    for (int p = 0; p < topo.n_bs(); ++p) {
        const LocalProblem lp = build_subproblem(channels, topo, p, targets, budget, sigma2);
        const LocalSolution sol = solve_subproblem(lp, settings);
        out.status.push_back(sol.status);
        out.objective.push_back(sol.objective);
        out.iterations += sol.iterations;
        if (sol.status != LocalStatus::optimal) {
            out.feasible = false;
            continue;
        }
        for (std::size_t a = 0; a < lp.served.size(); ++a)
            out.precoders.w[static_cast<std::size_t>(topo.pair_index(p, lp.served[a]))] = sol.w[a];
    }
    return out;
}

namespace {

void fill(TrialRecord& r, const ChannelSet& ch, const PrecoderSet& w, double sigma2, const Topology& topo) {
    r.total_power_w = w.total_power();
    r.per_bs_power_w = w.per_bs_power(topo);
    const Metrics m = evaluate_metrics(ch, w, sigma2, topo);
    r.sinr_pair = m.sinr_pair;
    r.sinr_orig = m.sinr_orig;
    r.sum_rate_bps_hz = m.sum_rate;
}

} // namespace

TrialRecords run_trial(const ScenarioConfig& config, std::uint64_t seed) {
    const Topology topo = config.topology();
    const CovarianceSet cov = synth_covariances(topo, config.channel, derive_seed(seed, kCovarianceStream));
    const ChannelSet ch = draw_channels(cov, derive_seed(seed, kFadingStream));
    const double sigma2 = calibrate_noise(ch, topo, config.snr_db).sigma2;

    TrialRecords rec;
    for (int s = 0; s < 3; ++s) {
        rec[static_cast<std::size_t>(s)].seed = seed;
        rec[static_cast<std::size_t>(s)].n_tx = topo.n_tx();
        rec[static_cast<std::size_t>(s)].scheme = static_cast<Scheme>(s);
    }

    const PrecoderSet zf = normalize_total_power(zf_precoders(ch, topo), ZfConfig{config.total_power_w});
    fill(rec[0], ch, zf, sigma2, topo);
    rec[0].feasible = true;
    const SinrTargets targets = extract_targets(ch, zf, sigma2, topo);

    try {
        const CentralizedSolution cs = solve_centralized(ch, targets, topo, sigma2);
        fill(rec[1], ch, cs.precoders, sigma2, topo);
        rec[1].feasible = true;
        rec[1].solver_iters = cs.lambda.iterations;
    } catch (const InfeasibleError& e) {
        rec[1].note = e.what();
    } catch (const NumericalError& e) {
        rec[1].note = e.what();
    }

    try {
        const DeState de = solve_de(cov, targets, topo, sigma2);
        const InterferenceBudget budget = de_interference(de.bs, de.delta_bar, topo);
        const DecentralizedResult dr = decentralized_precoders(ch, topo, targets, budget, sigma2);
        rec[2].solver_iters = de.moments.iterations + dr.iterations;
        if (dr.feasible) {
            fill(rec[2], ch, dr.precoders, sigma2, topo);
            rec[2].feasible = true;
        } else {
            for (std::size_t p = 0; p < dr.status.size(); ++p)
                if (dr.status[p] != LocalStatus::optimal) {
                    rec[2].note = std::string("BS ") + std::to_string(p + 1) + " subproblem " + to_string(dr.status[p]);
                    break;
                }
        }
    } catch (const InfeasibleError& e) {
        rec[2].note = e.what();
    } catch (const NumericalError& e) {
        rec[2].note = e.what();
    }
    return rec;
}

ExchangeCost exchange_cost(const Topology& topo, Scheme scheme, std::uint64_t blocks_per_period) {
    if (blocks_per_period < 1) throw ConfigError("blocks per period must be >= 1");
    const auto nc = static_cast<std::uint64_t>(topo.n_ue());
    const auto nt = static_cast<std::uint64_t>(topo.n_tx());
    constexpr std::uint64_t kScalar = 16;
    ExchangeCost c;
    c.scheme = scheme;
    c.blocks_per_period = blocks_per_period;
    if (scheme == Scheme::decentralized) {
        c.bytes_per_coherence_block = 0;
        c.bytes_per_stationarity_period = nc * (nt * (nt + 1) / 2) * kScalar;
    } else {
        c.bytes_per_coherence_block = nc * nt * kScalar;
        c.bytes_per_stationarity_period = c.bytes_per_coherence_block * blocks_per_period;
    }
    return c;
}

namespace {

struct Accumulator {
    std::vector<double> power;
    std::vector<double> gap;
    int infeasible = 0;
};

} // namespace

void sweep_antennas(const ScenarioConfig& config, const std::vector<int>& n_tx_list, int n_trials,
                    std::uint64_t seed, std::ostream& os, const SweepOptions& opts) {
    if (n_trials < 1) throw ConfigError("trials must be >= 1");
    if (n_tx_list.empty()) throw ConfigError("empty antenna list");
    std::vector<int> sorted = n_tx_list;
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    os << "n_tx,scheme,trials,mean_power_w,std_power_w,mean_gap_pct,infeasible_rate\n";

    for (int n_tx : sorted) {
        if (n_tx < 1) throw ConfigError("antenna counts must be >= 1");
        ScenarioConfig cfg = config;
        cfg.n_tx = n_tx;

        std::vector<TrialRecords> results(static_cast<std::size_t>(n_trials));
        const int nthreads = std::max(1, std::min(opts.threads, n_trials));
        auto work = [&](int w) {
            for (int k = w; k < n_trials; k += nthreads)
                results[static_cast<std::size_t>(k)] =
                    run_trial(cfg, derive_seed(seed, static_cast<std::uint64_t>(k)));
        };
        if (nthreads == 1) {
            work(0);
        } else {
            std::vector<std::thread> pool;
            std::exception_ptr err;
            std::mutex mu;
            for (int w = 0; w < nthreads; ++w)
                pool.emplace_back([&, w] {
                    try {
                        work(w);
                    } catch (...) {
                        const std::lock_guard<std::mutex> lock(mu);
                        if (!err) err = std::current_exception();
                    }
                });
            for (auto& t : pool) t.join();
            if (err) std::rethrow_exception(err);
        }

        std::array<Accumulator, 3> acc;
        for (const auto& r : results) {
            bool all = true;
            for (std::size_t s = 0; s < 3; ++s) {
                if (!r[s].feasible) {
                    ++acc[s].infeasible;
                    all = false;
                }
            }
            if (!all) continue;
            const double ref = r[1].total_power_w;
            for (std::size_t s = 0; s < 3; ++s) {
                acc[s].power.push_back(r[s].total_power_w);
                acc[s].gap.push_back(100.0 * (r[s].total_power_w - ref) / ref);
            }
        }

        // Alphabetical scheme order.
        for (Scheme s : {Scheme::centralized, Scheme::decentralized, Scheme::zf}) {
            const auto& a = acc[static_cast<std::size_t>(s)];
            const auto n = static_cast<double>(a.power.size());
            double mean = std::numeric_limits<double>::quiet_NaN();
            double sd = std::numeric_limits<double>::quiet_NaN();
            double gap = std::numeric_limits<double>::quiet_NaN();
            if (!a.power.empty()) {
                mean = 0.0;
                gap = 0.0;
                for (std::size_t k = 0; k < a.power.size(); ++k) {
                    mean += a.power[k];
                    gap += a.gap[k];
                }
                mean /= n;
                gap /= n;
                sd = 0.0;
                if (a.power.size() > 1) {
                    for (double v : a.power) sd += (v - mean) * (v - mean);
                    sd = std::sqrt(sd / (n - 1.0));
                }
            }
            if (s == Scheme::centralized && !a.power.empty()) gap = 0.0;
            os << n_tx << ',' << to_string(s) << ',' << n_trials << ',' << format_double(mean) << ','
               << format_double(sd) << ',' << format_double(gap) << ','
               << format_double(static_cast<double>(a.infeasible) / n_trials) << '\n';
        }
        os.flush();
    }
}

} // namespace cjt
