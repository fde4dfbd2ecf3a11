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

#include "deteq.hpp"

#include "duality.hpp"
#include "error.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

namespace cjt {

namespace {

void check_inputs(const CovarianceSet& cov, const SinrTargets& targets, const Topology& topo) {
    if (cov.n_ue != topo.n_ue() || cov.n_bs != topo.n_bs() || cov.n_tx != topo.n_tx())
        throw ConfigError("covariance set does not match topology");
    if (static_cast<int>(targets.gamma.size()) != topo.n_pairs())
        throw ConfigError("one SINR target per served pair required");
    for (double g : targets.gamma)
        if (!(g > 0.0) || !std::isfinite(g)) throw ConfigError("SINR targets must be positive and finite");
}

// Re Tr(A B) without forming the product.
double trace_product(const CMat& a, const CMat& b) {
    return a.cwiseProduct(b.transpose()).sum().real();
}

std::vector<double> multipliers(const SinrTargets& targets, const Topology& topo, const RMat& m_bar) {
    std::vector<double> lambda(static_cast<std::size_t>(topo.n_pairs()));
    for (int k = 0; k < topo.n_pairs(); ++k) {
        const auto [p, i] = topo.pair(k);
        lambda[static_cast<std::size_t>(k)] = targets.gamma[static_cast<std::size_t>(k)] / m_bar(i, p);
    }
    return lambda;
}

// Right-hand side of the moment equations for every (ue, bs).
RMat moment_map(const CovarianceSet& cov, const Topology& topo, const RMat& m_bar, std::span<const double> lambda) {
    const auto agg = aggregate_multipliers(topo, lambda);
    const int n = topo.n_tx();
    RMat next(topo.n_ue(), topo.n_bs());
    for (int p = 0; p < topo.n_bs(); ++p) {
        CMat x = CMat::Identity(n, n) * static_cast<double>(n);
        for (int j = 0; j < topo.n_ue(); ++j) {
            const double c = agg[static_cast<std::size_t>(j)];
            x += (c / (1.0 + c * m_bar(j, p))) * cov.at(j, p);
        }
        const Eigen::LLT<CMat> llt(x);
        if (llt.info() != Eigen::Success) throw NumericalError("moment resolvent factorization failed");
        const CMat xinv = llt.solve(CMat::Identity(n, n));
        for (int i = 0; i < topo.n_ue(); ++i) next(i, p) = trace_product(cov.at(i, p), xinv);
    }
    return next;
}

double relative_gap(const RMat& a, const RMat& b) {
    double r = 0.0;
    for (Eigen::Index k = 0; k < a.size(); ++k) {
        const double d = std::abs(a(k) - b(k));
        if (d == 0.0) continue;
        r = std::max(r, d / std::max(std::abs(a(k)), std::abs(b(k))));
    }
    return r;
}

} // namespace

DeMoments solve_de_fixed_point(const CovarianceSet& cov, const SinrTargets& targets, const Topology& topo,
                               const DeOptions& opts) {
    check_inputs(cov, targets, topo);
    if (!(opts.tol > 0.0)) throw ConfigError("DE tolerance must be positive");

    DeMoments m;
    m.m_bar.resize(topo.n_ue(), topo.n_bs());
    for (int i = 0; i < topo.n_ue(); ++i)
        for (int p = 0; p < topo.n_bs(); ++p) m.m_bar(i, p) = cov.at(i, p).trace().real() / topo.n_tx();
    for (const auto& [p, i] : topo.pairs())
        if (!(m.m_bar(i, p) > 0.0)) throw NumericalError("served link with zero covariance");

    for (int it = 1; it <= opts.max_iter; ++it) {
        m.lambda_bar = multipliers(targets, topo, m.m_bar);
        RMat next = moment_map(cov, topo, m.m_bar, m.lambda_bar);
        for (const auto& [p, i] : topo.pairs())
            if (!(next(i, p) > 0.0) || !std::isfinite(next(i, p)))
                throw NumericalError("non-positive DE moment encountered");
        const double change = relative_gap(m.m_bar, next);
        m.m_bar = std::move(next);
        m.iterations = it;
        if (change <= opts.tol) {
            m.lambda_bar = multipliers(targets, topo, m.m_bar);
            m.residual = de_residual(cov, topo, m);
            if (m.residual <= opts.tol) return m;
        }
    }
    m.lambda_bar = multipliers(targets, topo, m.m_bar);
    m.residual = de_residual(cov, topo, m);
    throw NumericalError("DE fixed point did not converge", m.residual);
}

double de_residual(const CovarianceSet& cov, const Topology& topo, const DeMoments& m) {
    return relative_gap(m.m_bar, moment_map(cov, topo, m.m_bar, m.lambda_bar));
}

CMat de_resolvent(const CovarianceSet& cov, const DeMoments& m, const Topology& topo, int q) {
    const auto agg = aggregate_multipliers(topo, m.lambda_bar);
    const int n = topo.n_tx();
    CMat x = CMat::Identity(n, n);
    for (int k = 0; k < topo.n_ue(); ++k) {
        const double c = agg[static_cast<std::size_t>(k)];
        x += (c / (n * (1.0 + c * m.m_bar(k, q)))) * cov.at(k, q);
    }
    const Eigen::LLT<CMat> llt(x);
    if (llt.info() != Eigen::Success) throw NumericalError("T_q factorization failed");
    CMat t = llt.solve(CMat::Identity(n, n));
    return (0.5 * (t + t.adjoint())).eval();
}

DeBsTerms de_bs_terms(const CovarianceSet& cov, const DeMoments& m, const Topology& topo, int q) {
    const int n = topo.n_tx();
    const int nu = topo.n_ue();
    const auto agg = aggregate_multipliers(topo, m.lambda_bar);

    DeBsTerms out;
    out.t_mat = de_resolvent(cov, m, topo, q);

    // s(h, l) = (1/N_T) Tr(Theta_hq T Theta_lq T), via vec(T Theta_h) . vec((T Theta_l)^T).
    CMat rows(nu, static_cast<Eigen::Index>(n) * n);
    CMat cols(static_cast<Eigen::Index>(n) * n, nu);
    for (int k = 0; k < nu; ++k) {
        const CMat pk = out.t_mat * cov.at(k, q);
        rows.row(k) = Eigen::Map<const CVec>(pk.data(), pk.size()).transpose();
        const CMat pkt = pk.transpose();
        cols.col(k) = Eigen::Map<const CVec>(pkt.data(), pkt.size());
    }
    const RMat s = (rows * cols).real() / static_cast<double>(n);

    out.l_mat.resize(nu, nu);
    for (int l = 0; l < nu; ++l) {
        const double c = agg[static_cast<std::size_t>(l)];
        const double d = 1.0 + c * m.m_bar(l, q);
        out.l_mat.col(l) = s.col(l) * (c * c / (n * d * d));
    }

    const Eigen::EigenSolver<RMat> eig(out.l_mat, false);
    out.spectral_radius = eig.eigenvalues().cwiseAbs().maxCoeff();
    if (!(out.spectral_radius < 1.0))
        throw InfeasibleError("DE derivative system invalid: spectral radius " +
                              std::to_string(out.spectral_radius) + " >= 1 at BS " + std::to_string(q + 1));

    const Eigen::PartialPivLU<RMat> lu(RMat::Identity(nu, nu) - out.l_mat);
    out.m_prime = lu.solve(s);

    const auto& served = topo.served(q);
    out.cross.resize(nu, static_cast<Eigen::Index>(served.size()));
    for (int i = 0; i < nu; ++i) {
        const double c = agg[static_cast<std::size_t>(i)];
        const double d = 1.0 + c * m.m_bar(i, q);
        for (std::size_t jj = 0; jj < served.size(); ++jj)
            out.cross(i, static_cast<Eigen::Index>(jj)) = out.m_prime(served[jj], i) / (n * d * d);
    }
    return out;
}

RMat de_coupling(const DeMoments& m, const std::vector<DeBsTerms>& bs, const SinrTargets& targets,
                 const Topology& topo) {
    const int np = topo.n_pairs();
    RMat f = RMat::Zero(np, np);
    for (int r = 0; r < np; ++r) {
        const auto [p, i] = topo.pair(r);
        for (int c = 0; c < np; ++c) {
            const auto [q, j] = topo.pair(c);
            if (c == r) {
                f(r, c) = m.m_bar(i, p) * m.m_bar(i, p) / targets.gamma[static_cast<std::size_t>(r)];
            } else if (j != i) {
                const auto& served = topo.served(q);
                const auto jj = std::find(served.begin(), served.end(), j) - served.begin();
                f(r, c) = -bs[static_cast<std::size_t>(q)].cross(i, jj);
            }
        }
    }
    return f;
}

std::vector<double> de_scaling(const RMat& f_bar, double sigma2, int n_tx) {
    return scaling_factors(CouplingMatrix{f_bar}, sigma2, n_tx);
}

InterferenceBudget de_interference(const std::vector<DeBsTerms>& bs, const std::vector<double>& delta_bar,
                                   const Topology& topo) {
    InterferenceBudget b{RMat::Zero(topo.n_ue(), topo.n_bs())};
    const double inv_n = 1.0 / topo.n_tx();
    for (int q = 0; q < topo.n_bs(); ++q) {
        const auto& served = topo.served(q);
        const auto& cross = bs[static_cast<std::size_t>(q)].cross;
        for (int i = 0; i < topo.n_ue(); ++i) {
            double acc = 0.0;
            double mag = 0.0;
            for (std::size_t jj = 0; jj < served.size(); ++jj) {
                if (served[jj] == i) continue;
                const double term =
                    inv_n * delta_bar[static_cast<std::size_t>(topo.pair_index(q, served[jj]))] *
                    cross(i, static_cast<Eigen::Index>(jj));
                acc += term;
                mag += std::abs(term);
            }
            if (acc < -1e-12 * mag)
                throw NumericalError("negative DE interference at UE " + std::to_string(i + 1) + ", BS " +
                                     std::to_string(q + 1));
            b.leak(i, q) = std::max(acc, 0.0);
        }
    }
    return b;
}

DeState solve_de(const CovarianceSet& cov, const SinrTargets& targets, const Topology& topo, double sigma2,
                 const DeOptions& opts) {
    DeState st;
    st.moments = solve_de_fixed_point(cov, targets, topo, opts);
    st.bs.reserve(static_cast<std::size_t>(topo.n_bs()));
    for (int q = 0; q < topo.n_bs(); ++q) st.bs.push_back(de_bs_terms(cov, st.moments, topo, q));
    st.f_bar = de_coupling(st.moments, st.bs, targets, topo);
    st.delta_bar = de_scaling(st.f_bar, sigma2, topo.n_tx());
    return st;
}

void write_de_csv(const std::string& path, const DeMoments& m, const Topology& topo) {
    std::ofstream os(path);
    if (!os) throw ConfigError("cannot open '" + path + "' for writing");
    os << "ue,bs,m_bar,lambda_bar\n";
    char buf[64];
    for (int i = 0; i < topo.n_ue(); ++i)
        for (int p = 0; p < topo.n_bs(); ++p) {
            std::snprintf(buf, sizeof buf, "%.17g", m.m_bar(i, p));
            os << i + 1 << ',' << p + 1 << ',' << buf << ',';
            if (const int k = topo.pair_index(p, i); k >= 0) {
                std::snprintf(buf, sizeof buf, "%.17g", m.lambda_bar[static_cast<std::size_t>(k)]);
                os << buf;
            }
            os << '\n';
        }
}

} // namespace cjt
