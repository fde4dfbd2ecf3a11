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

#include "local_problem.hpp"

#include "error.hpp"

#include <Eigen/Cholesky>
#include <Eigen/LU>
#include <Eigen/SVD>

#include <cmath>
#include <numeric>

namespace cjt {

const char* to_string(LocalStatus s) {
    switch (s) {
    case LocalStatus::optimal: return "optimal";
    case LocalStatus::infeasible: return "infeasible";
    case LocalStatus::max_iter: return "max_iter";
    case LocalStatus::numerical: return "numerical";
    }
    return "unknown";
}

LocalProblem build_subproblem(const ChannelSet& channels, const Topology& topo, int p, const SinrTargets& targets,
                              const InterferenceBudget& budget, double sigma2) {
    if (p < 0 || p >= topo.n_bs()) throw ConfigError("BS index out of range");
    if (budget.leak.rows() != topo.n_ue() || budget.leak.cols() != topo.n_bs())
        throw ConfigError("interference budget does not match topology");
    if (!(sigma2 > 0.0)) throw ConfigError("noise power must be positive");

    LocalProblem lp;
    lp.bs = p;
    lp.served = topo.served(p);
    for (int i = 0; i < topo.n_ue(); ++i) lp.channels.push_back(channels.at(i, p));
    for (int i = 0; i < topo.n_ue(); ++i) {
        const double cap = budget.leak(i, p);
        if (std::isnan(cap)) throw ConfigError("missing budget entry for UE " + std::to_string(i + 1));
        lp.caps.push_back(cap);
    }
    for (int i : lp.served) {
        lp.gamma.push_back(targets.at(topo, p, i));
        // tau from the UE's other serving BSs plus eps from every non-serving
        // BS: exactly the row of the budget table without column p.
        double c = sigma2;
        for (int q = 0; q < topo.n_bs(); ++q) {
            if (q == p) continue;
            const double v = budget.leak(i, q);
            if (std::isnan(v))
                throw ConfigError("missing budget entry (UE " + std::to_string(i + 1) + ", BS " +
                                  std::to_string(q + 1) + ")");
            c += v;
        }
        lp.incoming.push_back(c);
    }
    return lp;
}

namespace {

void validate(const LocalProblem& lp) {
    const auto k = lp.served.size();
    if (lp.gamma.size() != k || lp.incoming.size() != k) throw ConfigError("local problem: ragged served data");
    if (lp.caps.size() != lp.channels.size()) throw ConfigError("local problem: one cap per UE required");
    if (lp.channels.empty()) throw ConfigError("local problem without channels");
    for (std::size_t a = 0; a < k; ++a) {
        if (lp.served[a] < 0 || lp.served[a] >= static_cast<int>(lp.channels.size()))
            throw ConfigError("local problem: served UE out of range");
        if (!(lp.gamma[a] > 0.0)) throw ConfigError("local problem: SINR targets must be positive");
        if (!(lp.incoming[a] > 0.0)) throw ConfigError("local problem: incoming interference-plus-noise must be > 0");
    }
    for (double c : lp.caps)
        if (std::isnan(c) || c < 0.0) throw ConfigError("local problem: caps must be >= 0");
}

// Orthonormal basis of the column span of `m` (empty matrix when m == 0).
CMat range_basis(const CMat& m) {
    if (m.cols() == 0) return CMat(m.rows(), 0);
    const Eigen::JacobiSVD<CMat> svd(m, Eigen::ComputeThinU);
    const RVec& sv = svd.singularValues();
    const double tol = 1e-13 * std::max(sv.size() ? sv(0) : 0.0, std::numeric_limits<double>::min());
    Eigen::Index r = 0;
    while (r < sv.size() && sv(r) > tol) ++r;
    return svd.matrixU().leftCols(r);
}

// Orthonormal basis of the orthogonal complement of the span of `m`.
CMat null_basis(const CMat& m, int n) {
    if (m.cols() == 0) return CMat::Identity(n, n);
    const Eigen::JacobiSVD<CMat> svd(m, Eigen::ComputeFullU);
    const RVec& sv = svd.singularValues();
    const double tol = 1e-13 * std::max(sv(0), std::numeric_limits<double>::min());
    Eigen::Index r = 0;
    while (r < sv.size() && sv(r) > tol) ++r;
    return svd.matrixU().rightCols(n - r);
}

// Reduced coordinates: stream j lives in span(basis[j]). Each basis spans the
// channels seen through the nulling constraints imposed by zero caps, which
// loses nothing because power outside that span is wasted.
struct Reduction {
    std::vector<CMat> basis;
    std::vector<int> offset; ///< real-variable offset of each stream
    int n_var = 1;
};

Reduction reduce(const LocalProblem& lp) {
    const int n = static_cast<int>(lp.channels.front().size());
    const int nu = static_cast<int>(lp.channels.size());
    Reduction red;
    for (std::size_t a = 0; a < lp.served.size(); ++a) {
        const int j = lp.served[a];
        std::vector<int> nulled;
        for (int k = 0; k < nu; ++k)
            if (k != j && lp.caps[static_cast<std::size_t>(k)] == 0.0 && lp.channels[static_cast<std::size_t>(k)].squaredNorm() > 0.0)
                nulled.push_back(k);
        CMat zmat(n, static_cast<Eigen::Index>(nulled.size()));
        for (std::size_t c = 0; c < nulled.size(); ++c) zmat.col(static_cast<Eigen::Index>(c)) = lp.channels[static_cast<std::size_t>(nulled[c])];
        const CMat p = null_basis(zmat, n);
        CMat proj(p.cols(), nu);
        for (int k = 0; k < nu; ++k) proj.col(k) = p.adjoint() * lp.channels[static_cast<std::size_t>(k)];
        red.basis.push_back(p * range_basis(proj));
        red.offset.push_back(red.n_var);
        red.n_var += 2 * static_cast<int>(red.basis.back().cols());
    }
    return red;
}

// Dense row builder for one cone: entries are affine in x.
class ConeRows {
public:
    ConeRows(int n_var) : n_var_(n_var) {}

    void constant(double v) { push(RVec::Zero(n_var_), v); }
    void linear(const RVec& coef) { push(coef, 0.0); }
    // Re and Im of a^H y where y occupies [off, off + 2r).
    void complex_functional(const CVec& a, int off, double scale, bool imag_too) {
        const auto r = a.size();
        RVec re = RVec::Zero(n_var_);
        re.segment(off, r) = a.real() * scale;
        re.segment(off + r, r) = a.imag() * scale;
        push(re, 0.0);
        if (imag_too) {
            RVec im = RVec::Zero(n_var_);
            im.segment(off, r) = -a.imag() * scale;
            im.segment(off + r, r) = a.real() * scale;
            push(im, 0.0);
        }
    }
    void flush(ConeProgram& prog) {
        const auto base = prog.g.rows();
        const auto k = static_cast<Eigen::Index>(rows_.size());
        prog.g.conservativeResize(base + k, n_var_);
        prog.h.conservativeResize(base + k);
        for (Eigen::Index r = 0; r < k; ++r) {
            prog.g.row(base + r) = -rows_[static_cast<std::size_t>(r)].transpose();
            prog.h(base + r) = consts_[static_cast<std::size_t>(r)];
        }
        prog.cones.push_back(static_cast<int>(k));
        rows_.clear();
        consts_.clear();
    }

private:
    void push(RVec coef, double v) {
        rows_.push_back(std::move(coef));
        consts_.push_back(v);
    }
    int n_var_;
    std::vector<RVec> rows_;
    std::vector<double> consts_;
};

struct Formulation {
    ConeProgram prog;
    Reduction red;
    double zeta = 1.0; ///< w = zeta * basis * y
};

Formulation formulate(const LocalProblem& lp) {
    validate(lp);
    Formulation f;
    f.red = reduce(lp);
    const auto& red = f.red;
    const auto ns = lp.served.size();

    double z2 = 0.0;
    for (std::size_t a = 0; a < ns; ++a) {
        const double g = lp.channels[static_cast<std::size_t>(lp.served[a])].squaredNorm();
        z2 += g > 0.0 ? lp.gamma[a] * lp.incoming[a] / g : 0.0;
    }
    f.zeta = z2 > 0.0 ? std::sqrt(z2 / static_cast<double>(ns)) : 1.0;

    // Channel of UE k seen by stream a, in reduced coordinates, times zeta.
    auto coeff = [&](int k, std::size_t a) -> CVec {
        return f.zeta * (red.basis[a].adjoint() * lp.channels[static_cast<std::size_t>(k)]);
    };

    const int nv = red.n_var;
    ConeProgram& prog = f.prog;
    prog.g.resize(0, nv);
    prog.h.resize(0);
    prog.c = RVec::Zero(nv);
    prog.c(0) = 1.0;

    ConeRows rows(nv);
    // |y| <= t
    {
        RVec e = RVec::Zero(nv);
        e(0) = 1.0;
        rows.linear(e);
        for (int v = 1; v < nv; ++v) {
            RVec u = RVec::Zero(nv);
            u(v) = 1.0;
            rows.linear(u);
        }
        rows.flush(prog);
    }
    // Re(h_i^H w_i) >= sqrt(gamma_i) |[h_i^H w_j]_{j != i}, sqrt(c_i)|, divided through by sqrt(c_i).
    for (std::size_t a = 0; a < ns; ++a) {
        const int i = lp.served[a];
        const double rc = 1.0 / std::sqrt(lp.incoming[a]);
        rows.complex_functional(coeff(i, a), red.offset[a], rc / std::sqrt(lp.gamma[a]), false);
        for (std::size_t b = 0; b < ns; ++b)
            if (b != a) rows.complex_functional(coeff(i, b), red.offset[b], rc, true);
        rows.constant(1.0);
        rows.flush(prog);
    }
    // |[h_k^H w_j]_{j != k}| <= sqrt(cap_k), divided through by sqrt(cap_k).
    for (std::size_t k = 0; k < lp.channels.size(); ++k) {
        const double cap = lp.caps[k];
        if (!std::isfinite(cap) || cap == 0.0) continue;
        bool any = false;
        for (std::size_t b = 0; b < ns; ++b)
            if (lp.served[b] != static_cast<int>(k) && coeff(static_cast<int>(k), b).squaredNorm() > 0.0) any = true;
        if (!any) continue;
        rows.constant(1.0);
        const double rc = 1.0 / std::sqrt(cap);
        for (std::size_t b = 0; b < ns; ++b)
            if (lp.served[b] != static_cast<int>(k)) rows.complex_functional(coeff(static_cast<int>(k), b), red.offset[b], rc, true);
        rows.flush(prog);
    }
    return f;
}

std::vector<CVec> recover(const Formulation& f, const RVec& x) {
    std::vector<CVec> w;
    for (std::size_t a = 0; a < f.red.basis.size(); ++a) {
        const auto r = f.red.basis[a].cols();
        CVec y(r);
        for (Eigen::Index t = 0; t < r; ++t) y(t) = cplx(x(f.red.offset[a] + t), x(f.red.offset[a] + r + t));
        w.push_back(f.zeta * (f.red.basis[a] * y));
    }
    return w;
}

} // namespace

ConeProgram local_cone_program(const LocalProblem& problem) {
    return formulate(problem).prog;
}

LocalSolution solve_subproblem(const LocalProblem& problem, const SocpSettings& settings) {
    const Formulation f = formulate(problem);
    LocalSolution sol;
    const auto ns = problem.served.size();
    const int n = static_cast<int>(problem.channels.front().size());

    // A served UE whose channel vanished inside the admissible subspace can
    // never reach a positive SINR.
    for (std::size_t a = 0; a < ns; ++a)
        if (f.red.basis[a].cols() == 0 ||
            (f.red.basis[a].adjoint() * problem.channels[static_cast<std::size_t>(problem.served[a])]).squaredNorm() == 0.0) {
            sol.status = LocalStatus::infeasible;
            sol.w.assign(ns, CVec::Zero(n));
            return sol;
        }

    const ConeSolution cs = solve_socp(f.prog, settings);
    sol.iterations = cs.iterations;
    sol.kkt_gap = cs.relgap;
    switch (cs.status) {
    case ConeStatus::optimal: sol.status = LocalStatus::optimal; break;
    case ConeStatus::primal_infeasible: sol.status = LocalStatus::infeasible; break;
    case ConeStatus::max_iter: sol.status = LocalStatus::max_iter; break;
    default: sol.status = LocalStatus::numerical; break;
    }
    if (sol.status == LocalStatus::infeasible) {
        sol.certificate = cs.certificate;
        sol.w.assign(ns, CVec::Zero(n));
        return sol;
    }
    sol.w = recover(f, cs.x);
    sol.objective = 0.0;
    for (const auto& v : sol.w) sol.objective += v.squaredNorm();
    return sol;
}

LocalSolution dual_oracle_single_cell(const LocalProblem& problem, double tol, int max_iter) {
    validate(problem);
    const auto ns = problem.served.size();
    const auto n = problem.channels.front().size();

    std::vector<CVec> hn;
    for (std::size_t a = 0; a < ns; ++a)
        hn.push_back(problem.channels[static_cast<std::size_t>(problem.served[a])] / std::sqrt(problem.incoming[a]));

    LocalSolution sol;
    sol.w.assign(ns, CVec::Zero(n));

    auto resolvent = [&](const std::vector<double>& q, std::size_t a) {
        CMat m = CMat::Identity(n, n);
        for (std::size_t b = 0; b < ns; ++b)
            if (b != a) m.noalias() += q[b] * hn[b] * hn[b].adjoint();
        return Eigen::LLT<CMat>(m);
    };

    std::vector<double> q(ns, 0.0);
    double first = 0.0;
    bool converged = false;
    for (int it = 1; it <= max_iter; ++it) {
        std::vector<double> next(ns);
        for (std::size_t a = 0; a < ns; ++a) {
            const auto llt = resolvent(q, a);
            next[a] = problem.gamma[a] / hn[a].dot(llt.solve(hn[a])).real();
        }
        double change = 0.0;
        double total = 0.0;
        for (std::size_t a = 0; a < ns; ++a) {
            change = std::max(change, std::abs(next[a] - q[a]) / next[a]);
            total += next[a];
        }
        q = std::move(next);
        sol.iterations = it;
        if (it == 1) first = total;
        if (!std::isfinite(total) || total > 1e10 * first) {
            sol.status = LocalStatus::infeasible;
            return sol;
        }
        if (change <= tol) {
            converged = true;
            break;
        }
    }
    if (!converged) {
        sol.status = LocalStatus::max_iter;
        return sol;
    }

    std::vector<CVec> u(ns);
    for (std::size_t a = 0; a < ns; ++a) {
        u[a] = resolvent(q, a).solve(hn[a]);
        u[a].normalize();
    }
    RMat d(static_cast<Eigen::Index>(ns), static_cast<Eigen::Index>(ns));
    for (std::size_t a = 0; a < ns; ++a)
        for (std::size_t b = 0; b < ns; ++b) {
            const double g = std::norm(hn[a].dot(u[b]));
            d(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = a == b ? g / problem.gamma[a] : -g;
        }
    const RVec p = d.partialPivLu().solve(RVec::Ones(static_cast<Eigen::Index>(ns)));
    for (Eigen::Index a = 0; a < p.size(); ++a)
        if (!(p(a) > 0.0)) {
            sol.status = LocalStatus::infeasible;
            return sol;
        }
    sol.objective = 0.0;
    for (std::size_t a = 0; a < ns; ++a) {
        sol.w[a] = std::sqrt(p(static_cast<Eigen::Index>(a))) * u[a];
        sol.objective += p(static_cast<Eigen::Index>(a));
    }
    sol.status = LocalStatus::optimal;
    return sol;
}

std::vector<double> sinr_slack(const LocalProblem& problem, const std::vector<CVec>& w) {
    std::vector<double> out;
    for (std::size_t a = 0; a < problem.served.size(); ++a) {
        const CVec& h = problem.channels[static_cast<std::size_t>(problem.served[a])];
        double interf = problem.incoming[a];
        for (std::size_t b = 0; b < w.size(); ++b)
            if (b != a) interf += std::norm(h.dot(w[b]));
        out.push_back(std::norm(h.dot(w[a])) / problem.gamma[a] - interf);
    }
    return out;
}

std::vector<double> cap_slack(const LocalProblem& problem, const std::vector<CVec>& w) {
    std::vector<double> out;
    for (std::size_t k = 0; k < problem.channels.size(); ++k) {
        if (!std::isfinite(problem.caps[k])) {
            out.push_back(0.0);
            continue;
        }
        double leak = 0.0;
        for (std::size_t b = 0; b < problem.served.size(); ++b)
            if (problem.served[b] != static_cast<int>(k)) leak += std::norm(problem.channels[k].dot(w[b]));
        out.push_back(leak - problem.caps[k]);
    }
    return out;
}

void write_local_problem(std::ostream& os, const LocalProblem& problem) {
    write_cone_program(os, local_cone_program(problem));
}

} // namespace cjt
