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

#include "socp.hpp"

#include "error.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace cjt {

const char* to_string(ConeStatus s) {
    switch (s) {
    case ConeStatus::optimal: return "optimal";
    case ConeStatus::primal_infeasible: return "primal_infeasible";
    case ConeStatus::dual_infeasible: return "dual_infeasible";
    case ConeStatus::max_iter: return "max_iter";
    case ConeStatus::numerical: return "numerical";
    }
    return "unknown";
}

namespace detail {

RVec NtScaling::apply(const RVec& v) const {
    RVec out(v.size());
    const auto tail = v.tail(v.size() - 1);
    const double zeta = q.dot(tail);
    out(0) = eta * (a * v(0) + zeta);
    out.tail(v.size() - 1) = eta * (tail + (v(0) + zeta / (1.0 + a)) * q);
    return out;
}

RVec NtScaling::apply_inverse(const RVec& v) const {
    RVec out(v.size());
    const auto tail = v.tail(v.size() - 1);
    const double zeta = q.dot(tail);
    out(0) = (a * v(0) - zeta) / eta;
    out.tail(v.size() - 1) = (tail + (-v(0) + zeta / (1.0 + a)) * q) / eta;
    return out;
}

bool nt_scaling(const RVec& s, const RVec& z, NtScaling& out) {
    const auto k = s.size();
    const double sres = s(0) * s(0) - s.tail(k - 1).squaredNorm();
    const double zres = z(0) * z(0) - z.tail(k - 1).squaredNorm();
    if (!(sres > 0.0) || !(zres > 0.0) || s(0) <= 0.0 || z(0) <= 0.0) return false;
    const double snorm = std::sqrt(sres);
    const double znorm = std::sqrt(zres);
    const RVec sbar = s / snorm;
    const RVec zbar = z / znorm;
    const double gamma = std::sqrt(0.5 * (1.0 + sbar.dot(zbar)));
    out.eta = std::sqrt(snorm / znorm);
    out.a = (sbar(0) + zbar(0)) / (2.0 * gamma);
    out.q = (sbar.tail(k - 1) - zbar.tail(k - 1)) / (2.0 * gamma);
    return true;
}

RVec jordan_product(const RVec& u, const RVec& v) {
    RVec w(u.size());
    w(0) = u.dot(v);
    w.tail(u.size() - 1) = u(0) * v.tail(v.size() - 1) + v(0) * u.tail(u.size() - 1);
    return w;
}

RVec jordan_divide(const RVec& lambda, const RVec& d) {
    const auto k = lambda.size();
    const auto l1 = lambda.tail(k - 1);
    const auto d1 = d.tail(k - 1);
    const double rho = lambda(0) * lambda(0) - l1.squaredNorm();
    RVec x(k);
    x(0) = (lambda(0) * d(0) - l1.dot(d1)) / rho;
    x.tail(k - 1) = (d1 - x(0) * l1) / lambda(0);
    return x;
}

} // namespace detail

namespace {

using detail::NtScaling;

class Cones {
public:
    explicit Cones(const std::vector<int>& dims) : dims_(dims) {
        offsets_.resize(dims.size());
        int off = 0;
        for (std::size_t k = 0; k < dims.size(); ++k) {
            if (dims[k] < 1) throw ConfigError("cone dimension must be >= 1");
            offsets_[k] = off;
            off += dims[k];
        }
        total_ = off;
    }

    int size() const { return total_; }
    std::size_t count() const { return dims_.size(); }
    auto block(RVec& v, std::size_t k) const { return v.segment(offsets_[k], dims_[k]); }
    auto block(const RVec& v, std::size_t k) const { return v.segment(offsets_[k], dims_[k]); }
    int offset(std::size_t k) const { return offsets_[k]; }
    int dim(std::size_t k) const { return dims_[k]; }

    RVec identity() const {
        RVec e = RVec::Zero(total_);
        for (int off : offsets_) e(off) = 1.0;
        return e;
    }

    // Smallest alpha with u + alpha e in K (negative when u is interior).
    double interior_margin(const RVec& u) const {
        double m = -std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < count(); ++k) {
            const auto b = block(u, k);
            m = std::max(m, b.tail(b.size() - 1).norm() - b(0));
        }
        return m;
    }

private:
    std::vector<int> dims_;
    std::vector<int> offsets_;
    int total_ = 0;
};

struct Scaling {
    std::vector<NtScaling> cones;

    RVec apply(const Cones& k, const RVec& v) const {
        RVec out(v.size());
        for (std::size_t i = 0; i < k.count(); ++i) k.block(out, i) = cones[i].apply(k.block(v, i));
        return out;
    }
    RVec apply_inverse(const Cones& k, const RVec& v) const {
        RVec out(v.size());
        for (std::size_t i = 0; i < k.count(); ++i) k.block(out, i) = cones[i].apply_inverse(k.block(v, i));
        return out;
    }
    RMat apply_inverse_cols(const Cones& k, const RMat& g) const {
        RMat out(g.rows(), g.cols());
        for (Eigen::Index c = 0; c < g.cols(); ++c) out.col(c) = apply_inverse(k, g.col(c));
        return out;
    }
};

// Reduced KKT system [0 G'; G -W^2] [x; z] = [bx; bz] through the normal
// equations G' W^{-2} G x = bx + G' W^{-2} bz.
class KktSolver {
public:
    KktSolver(const RMat& g, const Cones& cones) : g_(g), cones_(cones) {}

    bool factor(const Scaling& w) {
        w_ = &w;
        gs_ = w.apply_inverse_cols(cones_, g_);
        RMat n = gs_.transpose() * gs_;
        llt_.compute(n);
        if (llt_.info() == Eigen::Success) return true;
        const double reg = 1e-13 * std::max(1.0, n.diagonal().maxCoeff());
        n.diagonal().array() += reg;
        llt_.compute(n);
        return llt_.info() == Eigen::Success;
    }

    void solve(const RVec& bx, const RVec& bz, RVec& x, RVec& z) const {
        solve_once(bx, bz, x, z);
        for (int r = 0; r < 2; ++r) {
            const RVec rx = bx - g_.transpose() * z;
            const RVec rz = bz - (g_ * x - w_->apply(cones_, w_->apply(cones_, z)));
            RVec dx, dz;
            solve_once(rx, rz, dx, dz);
            x += dx;
            z += dz;
        }
    }

private:
    void solve_once(const RVec& bx, const RVec& bz, RVec& x, RVec& z) const {
        const RVec bzs = w_->apply_inverse(cones_, bz);
        x = llt_.solve(bx + gs_.transpose() * bzs);
        z = w_->apply_inverse(cones_, RVec(gs_ * x - bzs));
    }

    const RMat& g_;
    const Cones& cones_;
    const Scaling* w_ = nullptr;
    RMat gs_;
    Eigen::LLT<RMat> llt_;
};

// Largest step keeping lambda + alpha d inside the cone, for a direction d
// expressed in the scaled space of lambda.
double max_cone_step(const Cones& cones, const RVec& lambda, const RVec& d) {
    double alpha = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < cones.count(); ++k) {
        const auto l = cones.block(lambda, k);
        const auto dk = cones.block(d, k);
        const auto n = l.size();
        const double lnorm2 = l(0) * l(0) - l.tail(n - 1).squaredNorm();
        if (!(lnorm2 > 0.0)) return 0.0;
        const double lnorm = std::sqrt(lnorm2);
        const RVec lbar = l / lnorm;
        const double ld = lbar(0) * dk(0) - lbar.tail(n - 1).dot(dk.tail(n - 1));
        const double rho0 = ld / lnorm;
        const double factor = (ld + dk(0)) / (lbar(0) + 1.0);
        const double rho1 = ((dk.tail(n - 1) - factor * lbar.tail(n - 1)) / lnorm).norm();
        const double step = rho1 - rho0;
        if (step > 0.0) alpha = std::min(alpha, 1.0 / step);
    }
    return alpha;
}

} // namespace

ConeSolution solve_socp(const ConeProgram& prog, const SocpSettings& st) {
    const Cones cones(prog.cones);
    const auto n = prog.g.cols();
    const auto m = prog.g.rows();
    if (cones.size() != m || prog.h.size() != m || prog.c.size() != n)
        throw ConfigError("cone program dimensions are inconsistent");

    const RMat& g = prog.g;
    const RVec& h = prog.h;
    const RVec& c = prog.c;
    const double hnorm = std::max(1.0, h.norm());
    const double cnorm = std::max(1.0, c.norm());
    const double degree = static_cast<double>(cones.count());

    ConeSolution out;
    KktSolver kkt(g, cones);

    // Initial point: least-squares solutions under identity scaling, shifted
    // into the cone interior.
    Scaling w;
    w.cones.resize(cones.count());
    for (std::size_t k = 0; k < cones.count(); ++k) {
        w.cones[k].eta = 1.0;
        w.cones[k].a = 1.0;
        w.cones[k].q = RVec::Zero(cones.dim(k) - 1);
    }
    if (!kkt.factor(w)) {
        out.status = ConeStatus::numerical;
        return out;
    }
    RVec x, z, s, xt, zt;
    kkt.solve(RVec::Zero(n), h, x, zt);
    s = -zt;
    kkt.solve(-c, RVec::Zero(m), xt, z);
    const RVec e = cones.identity();
    if (const double a = cones.interior_margin(s); a >= -1e-8) s += (1.0 + a) * e;
    if (const double a = cones.interior_margin(z); a >= -1e-8) z += (1.0 + a) * e;
    double tau = 1.0;
    double kappa = 1.0;

    RVec x1, z1, x2, z2;
    for (int it = 0; it <= st.max_iter; ++it) {
        const RVec rx = g.transpose() * z + c * tau;
        const RVec rz = s + g * x - h * tau;
        const double cx = c.dot(x);
        const double hz = h.dot(z);
        const double rt = kappa + cx + hz;
        const double sz = s.dot(z);
        const double mu = (sz + tau * kappa) / (degree + 1.0);

        out.iterations = it;
        out.pcost = cx / tau;
        out.dcost = -hz / tau;
        out.gap = sz / (tau * tau);
        out.relgap = out.pcost < 0.0   ? out.gap / -out.pcost
                     : out.dcost > 0.0 ? out.gap / out.dcost
                                       : std::numeric_limits<double>::infinity();
        out.pres = rz.norm() / tau / hnorm;
        out.dres = rx.norm() / tau / cnorm;
        out.x = x / tau;
        out.s = s / tau;
        out.z = z / tau;

        if (out.pres < st.feastol && out.dres < st.feastol && (out.gap < st.abstol || out.relgap < st.reltol)) {
            out.status = ConeStatus::optimal;
            return out;
        }
        if (hz < 0.0 && kappa > tau) {
            const double cert = (g.transpose() * z).norm() / -hz;
            if (cert < st.feastol) {
                out.status = ConeStatus::primal_infeasible;
                out.certificate = cert;
                out.z = z / -hz;
                return out;
            }
        }
        if (cx < 0.0 && kappa > tau) {
            const double cert = (g * x + s).norm() / -cx;
            if (cert < st.feastol) {
                out.status = ConeStatus::dual_infeasible;
                out.certificate = cert;
                out.x = x / -cx;
                return out;
            }
        }
        if (it == st.max_iter) break;

        for (std::size_t k = 0; k < cones.count(); ++k)
            if (!detail::nt_scaling(cones.block(s, k), cones.block(z, k), w.cones[k])) {
                out.status = ConeStatus::numerical;
                return out;
            }
        const RVec lambda = w.apply(cones, z);
        if (!kkt.factor(w)) {
            out.status = ConeStatus::numerical;
            return out;
        }
        kkt.solve(-c, h, x1, z1);
        const double denom = c.dot(x1) + h.dot(z1) - kappa / tau;

        // Shared direction assembly for given complementarity targets.
        auto direction = [&](double keep, const RVec& ds_target, double dk_target, RVec& dx, RVec& ds, RVec& dz,
                             double& dtau, double& dkappa) {
            RVec dst(m);
            for (std::size_t k = 0; k < cones.count(); ++k)
                cones.block(dst, k) = detail::jordan_divide(cones.block(lambda, k), cones.block(ds_target, k));
            const RVec wdst = w.apply(cones, dst);
            kkt.solve(-keep * rx, -keep * rz - wdst, x2, z2);
            dtau = (-keep * rt - c.dot(x2) - h.dot(z2) - dk_target / tau) / denom;
            dx = x2 + dtau * x1;
            dz = z2 + dtau * z1;
            ds = w.apply(cones, RVec(dst - w.apply(cones, dz)));
            dkappa = (dk_target - kappa * dtau) / tau;
        };
        auto step_length = [&](const RVec& ds, const RVec& dz, double dtau, double dkappa) {
            double a = std::min(max_cone_step(cones, lambda, w.apply_inverse(cones, ds)),
                                max_cone_step(cones, lambda, w.apply(cones, dz)));
            if (dtau < 0.0) a = std::min(a, -tau / dtau);
            if (dkappa < 0.0) a = std::min(a, -kappa / dkappa);
            return a;
        };

        // Predictor.
        RVec lsq(m);
        for (std::size_t k = 0; k < cones.count(); ++k)
            cones.block(lsq, k) = detail::jordan_product(cones.block(lambda, k), cones.block(lambda, k));
        RVec dxa, dsa, dza;
        double dta = 0.0, dka = 0.0;
        direction(1.0, -lsq, -tau * kappa, dxa, dsa, dza, dta, dka);
        const double alpha_aff = std::min(1.0, step_length(dsa, dza, dta, dka));
        const double sigma = std::clamp(std::pow(1.0 - alpha_aff, 3), 1e-4, 1.0);

        // Corrector.
        const RVec sa = w.apply_inverse(cones, dsa);
        const RVec za = w.apply(cones, dza);
        RVec target(m);
        for (std::size_t k = 0; k < cones.count(); ++k)
            cones.block(target, k) = -cones.block(lsq, k) -
                                     detail::jordan_product(cones.block(sa, k), cones.block(za, k));
        target += sigma * mu * e;
        RVec dx, ds, dz;
        double dt = 0.0, dk = 0.0;
        direction(1.0 - sigma, target, -tau * kappa - dta * dka + sigma * mu, dx, ds, dz, dt, dk);
        const double alpha = std::min(1.0, st.step * step_length(ds, dz, dt, dk));
        if (!(alpha > 1e-10)) {
            out.status = ConeStatus::numerical;
            return out;
        }

        x += alpha * dx;
        s += alpha * ds;
        z += alpha * dz;
        tau += alpha * dt;
        kappa += alpha * dk;
    }
    out.status = ConeStatus::max_iter;
    return out;
}

void write_cone_program(std::ostream& os, const ConeProgram& prog) {
    os.precision(17);
    for (Eigen::Index i = 0; i < prog.g.rows(); ++i)
        for (Eigen::Index j = 0; j < prog.g.cols(); ++j)
            if (prog.g(i, j) != 0.0) os << "G " << i << ' ' << j << ' ' << prog.g(i, j) << '\n';
    for (Eigen::Index i = 0; i < prog.h.size(); ++i)
        if (prog.h(i) != 0.0) os << "h " << i << ' ' << prog.h(i) << '\n';
    for (Eigen::Index j = 0; j < prog.c.size(); ++j)
        if (prog.c(j) != 0.0) os << "c " << j << ' ' << prog.c(j) << '\n';
    for (std::size_t k = 0; k < prog.cones.size(); ++k) os << "cone " << k << ' ' << prog.cones[k] << '\n';
}

} // namespace cjt
