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

#include "scenario.hpp"

#include "error.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>

namespace cjt {

namespace {

int parse_int(std::string_view s) {
    while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
    while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
    int v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        throw ConfigError("serving pattern: bad UE index '" + std::string(s) + "'");
    return v;
}

std::vector<std::vector<int>> parse_explicit(std::string_view pattern, int n_bs) {
    std::vector<std::vector<int>> sets;
    std::size_t start = 0;
    while (start <= pattern.size()) {
        const auto end = std::min(pattern.find(';', start), pattern.size());
        const auto group = pattern.substr(start, end - start);
        std::vector<int> set;
        std::size_t gs = 0;
        while (gs <= group.size()) {
            const auto ge = std::min(group.find(',', gs), group.size());
            const auto item = group.substr(gs, ge - gs);
            if (const auto dash = item.find('-'); dash != std::string_view::npos) {
                const int lo = parse_int(item.substr(0, dash));
                const int hi = parse_int(item.substr(dash + 1));
                if (hi < lo) throw ConfigError("serving pattern: empty range");
                for (int u = lo; u <= hi; ++u) set.push_back(u - 1);
            } else if (item.find_first_not_of(' ') != std::string_view::npos) {
                set.push_back(parse_int(item) - 1);
            }
            gs = ge + 1;
        }
        sets.push_back(std::move(set));
        start = end + 1;
    }
    if (static_cast<int>(sets.size()) != n_bs)
        throw ConfigError("serving pattern lists " + std::to_string(sets.size()) + " sets for " +
                          std::to_string(n_bs) + " BSs");
    return sets;
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

struct Point {
    double x;
    double y;
};

std::vector<Point> bs_sites(int n_bs, double cell_radius) {
    std::vector<Point> sites(static_cast<std::size_t>(n_bs), Point{0.0, 0.0});
    if (n_bs == 1) return sites;
    // Neighbouring sites sit one hexagonal inter-site distance apart.
    const double isd = std::sqrt(3.0) * cell_radius;
    const double ring = isd / (2.0 * std::sin(std::numbers::pi / n_bs));
    for (int p = 0; p < n_bs; ++p) {
        const double a = 2.0 * std::numbers::pi * p / n_bs;
        sites[static_cast<std::size_t>(p)] = {ring * std::cos(a), ring * std::sin(a)};
    }
    return sites;
}

void put_u32(std::ostream& os, std::uint32_t v) {
    const unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                                static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
    os.write(reinterpret_cast<const char*>(b), 4);
}

void put_f64(std::ostream& os, double d) {
    const auto v = std::bit_cast<std::uint64_t>(d);
    unsigned char b[8];
    for (int k = 0; k < 8; ++k) b[k] = static_cast<unsigned char>(v >> (8 * k));
    os.write(reinterpret_cast<const char*>(b), 8);
}

std::uint64_t get_le(std::istream& is, int bytes) {
    unsigned char b[8] = {};
    if (!is.read(reinterpret_cast<char*>(b), bytes)) throw ConfigError("channel dump truncated");
    std::uint64_t v = 0;
    for (int k = bytes - 1; k >= 0; --k) v = (v << 8) | b[k];
    return v;
}

} // namespace

std::vector<std::vector<int>> parse_serving_pattern(std::string_view pattern, int n_bs, int n_ue) {
    if (n_bs < 1 || n_ue < 1) throw ConfigError("topology needs n_bs >= 1 and n_ue >= 1");
    std::vector<std::vector<int>> sets(static_cast<std::size_t>(n_bs));
    if (pattern == "overlap") {
        if (n_ue % (n_bs + 1) != 0)
            throw ConfigError("overlap pattern needs n_ue divisible by n_bs + 1");
        const int chunk = n_ue / (n_bs + 1);
        for (int p = 0; p < n_bs; ++p)
            for (int i = p * chunk; i < (p + 2) * chunk; ++i) sets[static_cast<std::size_t>(p)].push_back(i);
    } else if (pattern == "disjoint") {
        for (int i = 0; i < n_ue; ++i)
            sets[static_cast<std::size_t>(static_cast<long>(i) * n_bs / n_ue)].push_back(i);
    } else if (pattern == "full" || pattern == "single") {
        if (pattern == "single" && n_bs != 1) throw ConfigError("single pattern needs n_bs == 1");
        for (auto& s : sets)
            for (int i = 0; i < n_ue; ++i) s.push_back(i);
    } else {
        sets = parse_explicit(pattern, n_bs);
    }
    return sets;
}

Topology build_topology(int n_bs, int n_tx, int n_ue, std::string_view serving_pattern) {
    return Topology(n_bs, n_tx, n_ue, parse_serving_pattern(serving_pattern, n_bs, n_ue));
}

RMat exponential_correlation(int n_tx, double rho) {
    if (!(rho >= 0.0 && rho < 1.0)) throw ConfigError("channel.rho must lie in [0, 1)");
    RMat r(n_tx, n_tx);
    for (int m = 0; m < n_tx; ++m)
        for (int n = 0; n < n_tx; ++n) r(m, n) = std::pow(rho, std::abs(m - n));
    return r;
}

double pathloss_gain(const ChannelModel& model, double distance_m) {
    const double pl_db = model.ref_loss_db + 10.0 * model.pathloss_exp * std::log10(distance_m / 1000.0);
    return std::pow(10.0, -pl_db / 10.0);
}

CovarianceSet synth_covariances(const Topology& topo, const ChannelModel& model, std::uint64_t seed) {
    if (!(model.cell_radius_m > 0.0)) throw ConfigError("channel.cell_radius_m must be positive");
    const RMat r = exponential_correlation(topo.n_tx(), model.rho);
    const auto sites = bs_sites(topo.n_bs(), model.cell_radius_m);
    const double min_dist = std::min(10.0, 0.5 * model.cell_radius_m);

    std::mt19937_64 rng(derive_seed(seed, kCovarianceStream));
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    CovarianceSet cov;
    cov.n_ue = topo.n_ue();
    cov.n_bs = topo.n_bs();
    cov.n_tx = topo.n_tx();
    cov.theta.resize(static_cast<std::size_t>(cov.n_ue * cov.n_bs));
    cov.beta.resize(cov.theta.size());

    for (int i = 0; i < topo.n_ue(); ++i) {
        // Single-served UEs land anywhere in their cell, jointly served UEs
        // around the centroid of their serving sites (the shared cell edge).
        const auto& serving = topo.serving_bs(i);
        Point centre{0.0, 0.0};
        for (int p : serving) {
            centre.x += sites[static_cast<std::size_t>(p)].x;
            centre.y += sites[static_cast<std::size_t>(p)].y;
        }
        centre.x /= static_cast<double>(serving.size());
        centre.y /= static_cast<double>(serving.size());
        const double radius = serving.size() == 1 ? model.cell_radius_m : 0.5 * model.cell_radius_m;

        Point ue{};
        for (;;) {
            const double rr = radius * std::sqrt(unit(rng));
            const double a = 2.0 * std::numbers::pi * unit(rng);
            ue = {centre.x + rr * std::cos(a), centre.y + rr * std::sin(a)};
            bool ok = true;
            for (const auto& s : sites) ok = ok && std::hypot(ue.x - s.x, ue.y - s.y) >= min_dist;
            if (ok) break;
        }
        for (int p = 0; p < topo.n_bs(); ++p) {
            const auto& s = sites[static_cast<std::size_t>(p)];
            const double beta = pathloss_gain(model, std::hypot(ue.x - s.x, ue.y - s.y));
            cov.beta[cov.flat(i, p)] = beta;
            cov.at(i, p) = (beta * r).cast<cplx>();
        }
    }
    return cov;
}

CMat hermitian_sqrt(const CMat& theta) {
    const double scale = theta.cwiseAbs().maxCoeff();
    if (scale == 0.0) return CMat::Zero(theta.rows(), theta.cols());
    if ((theta - theta.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw NumericalError("covariance is not Hermitian");

    const RVec diag = theta.diagonal().real();
    if ((theta - CMat(theta.diagonal().asDiagonal())).cwiseAbs().maxCoeff() == 0.0) {
        if (diag.minCoeff() < -1e-10 * diag.maxCoeff())
            throw NumericalError("covariance is not positive semidefinite");
        return diag.cwiseMax(0.0).cwiseSqrt().cast<cplx>().asDiagonal();
    }

    Eigen::SelfAdjointEigenSolver<CMat> eig(theta);
    if (eig.info() != Eigen::Success) throw NumericalError("eigendecomposition failed");
    const RVec& ev = eig.eigenvalues();
    if (ev.minCoeff() < -1e-10 * std::max(ev.maxCoeff(), 0.0))
        throw NumericalError("covariance is not positive semidefinite", ev.minCoeff());
    const RVec root = ev.cwiseMax(0.0).cwiseSqrt();
    return eig.eigenvectors() * root.cast<cplx>().asDiagonal() * eig.eigenvectors().adjoint();
}

ChannelSet draw_channels(const CovarianceSet& cov, std::uint64_t seed) {
    std::mt19937_64 rng(derive_seed(seed, kFadingStream));
    std::normal_distribution<double> normal(0.0, std::sqrt(0.5));

    ChannelSet ch;
    ch.n_ue = cov.n_ue;
    ch.n_bs = cov.n_bs;
    ch.n_tx = cov.n_tx;
    ch.h.resize(cov.theta.size());
    for (std::size_t k = 0; k < cov.theta.size(); ++k) {
        CVec z(cov.n_tx);
        for (int m = 0; m < cov.n_tx; ++m) {
            const double re = normal(rng);
            const double im = normal(rng);
            z(m) = cplx(re, im);
        }
        ch.h[k] = hermitian_sqrt(cov.theta[k]) * z;
    }
    return ch;
}

NoiseSpec calibrate_noise(const ChannelSet& channels, const Topology& topo, double snr_db) {
    double acc = 0.0;
    for (const auto& [p, i] : topo.pairs()) {
        const double g = channels.at(i, p).squaredNorm();
        if (!(g > 0.0)) throw NumericalError("served channel has zero gain; noise calibration undefined");
        acc += std::log10(g);
    }
    const double mean_log = acc / topo.n_pairs();
    return NoiseSpec{std::pow(10.0, mean_log) * std::pow(10.0, -snr_db / 10.0), snr_db};
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    return splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x5851f42d4c957f2dULL));
}

void write_channel_dump(const std::string& path, const ChannelSet& channels) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ConfigError("cannot open '" + path + "' for writing");
    put_u32(os, static_cast<std::uint32_t>(channels.h.size()));
    put_u32(os, static_cast<std::uint32_t>(channels.n_tx));
    for (const auto& h : channels.h)
        for (int m = 0; m < channels.n_tx; ++m) {
            put_f64(os, h(m).real());
            put_f64(os, h(m).imag());
        }
    if (!os) throw ConfigError("write to '" + path + "' failed");
}

ChannelSet read_channel_dump(const std::string& path, int n_bs) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ConfigError("cannot open '" + path + "'");
    const auto rows = static_cast<int>(get_le(is, 4));
    const auto cols = static_cast<int>(get_le(is, 4));
    if (n_bs < 1 || rows % n_bs != 0) throw ConfigError("channel dump rows not a multiple of n_bs");
    ChannelSet ch;
    ch.n_bs = n_bs;
    ch.n_ue = rows / n_bs;
    ch.n_tx = cols;
    ch.h.assign(static_cast<std::size_t>(rows), CVec(cols));
    for (auto& h : ch.h)
        for (int m = 0; m < cols; ++m) {
            const double re = std::bit_cast<double>(get_le(is, 8));
            const double im = std::bit_cast<double>(get_le(is, 8));
            h(m) = cplx(re, im);
        }
    return ch;
}

} // namespace cjt
