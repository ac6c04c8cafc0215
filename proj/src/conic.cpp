// SPDX-License-Identifier: Apache-2.0
//
// irscomp - IRS-aided joint-processing CoMP beamforming and phase design
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
// ------------------------------------------------------------------------

#include "irscomp/conic.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <unistd.h>

namespace irscomp
{
    double ConeConstraint::margin(const RVec &x) const
    {
        const RVec u = a * x + b;
        const double s = c.dot(x) + d;
        return kind == Kind::standard ? s - u.norm() : s - u.squaredNorm();
    }

    void SocpProblem::validate() const
    {
        if (num_vars < 1 || objective_index < 0 || objective_index >= num_vars)
            throw DomainError("socp: bad variable count or objective index");
        if (cones.empty())
            throw DomainError("socp: no cones");
        for (const auto &c : cones)
        {
            if (c.a.cols() != num_vars || c.c.size() != num_vars || c.b.size() != c.a.rows())
                throw DomainError("socp: cone dimensions inconsistent");
            if (!c.a.allFinite() || !c.b.allFinite() || !c.c.allFinite() || !std::isfinite(c.d))
                throw DomainError("socp: nonfinite cone data");
        }
    }

    void SdpProblem::validate() const
    {
        if (psi.empty() || static_cast<int>(psi.size()) != constants.size())
            throw DomainError("sdp: need one constant per constraint matrix");
        const int n = size();
        if (n < 1)
            throw DomainError("sdp: empty matrix variable");
        for (const auto &p : psi)
        {
            if (p.rows() != n || p.cols() != n)
                throw DomainError("sdp: constraint matrix has the wrong size");
            if (!p.allFinite() || (p - p.adjoint()).norm() > 1e-9 * (1.0 + p.norm()))
                throw DomainError("sdp: constraint matrix not Hermitian");
        }
        if (!constants.allFinite())
            throw DomainError("sdp: nonfinite constant");
    }

    std::string to_string(ConicStatus s)
    {
        switch (s)
        {
        case ConicStatus::optimal:
            return "optimal";
        case ConicStatus::max_iterations:
            return "max-iterations";
        case ConicStatus::infeasible:
            return "infeasible";
        }
        return "?";
    }

    namespace
    {
        ConicStatus status_from_string(const std::string &s)
        {
            if (s == "optimal")
                return ConicStatus::optimal;
            if (s == "max-iterations")
                return ConicStatus::max_iterations;
            if (s == "infeasible")
                return ConicStatus::infeasible;
            throw DomainError("unknown conic status '" + s + "'");
        }

        constexpr double kInf = std::numeric_limits<double>::infinity();

        // Barrier sum_i -log g_i(x) with value, gradient and Hessian; value is +inf outside.
        double socp_barrier(const SocpProblem &p, const RVec &x, RVec *grad, RMat *hess)
        {
            const int n = p.num_vars;
            if (grad)
                grad->setZero(n);
            if (hess)
                hess->setZero(n, n);
            double value = 0.0;
            for (const auto &c : p.cones)
            {
                const RVec u = c.a * x + c.b;
                const double s = c.c.dot(x) + c.d;
                double g;
                RVec dg;
                if (c.kind == ConeConstraint::Kind::standard)
                {
                    if (s <= 0.0)
                        return kInf;
                    g = s * s - u.squaredNorm();
                    if (g <= 0.0)
                        return kInf;
                    dg = 2.0 * s * c.c - 2.0 * c.a.transpose() * u;
                }
                else
                {
                    g = s - u.squaredNorm();
                    if (g <= 0.0)
                        return kInf;
                    dg = c.c - 2.0 * c.a.transpose() * u;
                }
                value -= std::log(g);
                if (grad)
                    *grad -= dg / g;
                if (hess)
                {
                    hess->noalias() += dg * dg.transpose() / (g * g);
                    hess->noalias() += 2.0 / g * c.a.transpose() * c.a;
                    if (c.kind == ConeConstraint::Kind::standard)
                        hess->noalias() -= 2.0 / g * c.c * c.c.transpose();
                }
            }
            return value;
        }

        double barrier_degree(const SocpProblem &p)
        {
            double nu = 0.0;
            for (const auto &c : p.cones)
                nu += c.kind == ConeConstraint::Kind::standard ? 2.0 : 1.0;
            return nu;
        }

        double worst_violation(const SocpProblem &p, const RVec &x)
        {
            double v = 0.0;
            for (const auto &c : p.cones)
                v = std::max(v, -c.margin(x));
            return v;
        }

        // Solves H dx = -g; a tiny diagonal shift is added when H is numerically singular.
        RVec newton_direction(const RMat &h, const RVec &g)
        {
            const RVec js = h.diagonal().cwiseAbs().cwiseMax(1e-300).cwiseSqrt().cwiseInverse();
            RMat hs = js.asDiagonal() * h * js.asDiagonal();
            Eigen::LDLT<RMat> ldlt(hs);
            if (ldlt.info() == Eigen::Success && ldlt.isPositive())
            {
                RVec dx = -js.cwiseProduct(ldlt.solve(js.cwiseProduct(g)));
                if (dx.allFinite())
                    return dx;
            }
            hs.diagonal().array() += 1e-12;
            return -js.cwiseProduct(Eigen::LDLT<RMat>(hs).solve(js.cwiseProduct(g)));
        }

        // Minimizes -t x[obj] + barrier from a strictly feasible x. Returns false if the Newton
        // budget ran out. `stop` (optional) ends the run early when it returns true.
        template <class Stop>
        bool center(const SocpProblem &p, double t, RVec &x, const ConicTolerances &tol, int &steps, Stop stop)
        {
            const int obj = p.objective_index;
            auto merit = [&](const RVec &v) {
                const double b = socp_barrier(p, v, nullptr, nullptr);
                return std::isfinite(b) ? -t * v(obj) + b : kInf;
            };
            RVec g;
            RMat h;
            while (steps < tol.max_newton_iterations)
            {
                const double f = -t * x(obj) + socp_barrier(p, x, &g, &h);
                g(obj) -= t;
                const RVec dx = newton_direction(h, g);
                const double dec = -g.dot(dx);
                if (!(dec >= 0.0) || 0.5 * dec <= tol.newton_tolerance)
                    return true;
                double step = 1.0;
                RVec trial = x + dx;
                double ft = merit(trial);
                while (ft > f + tol.alpha * step * g.dot(dx))
                {
                    step *= tol.beta;
                    if (step < 1e-14)
                        return true; // no progress possible at this precision
                    trial = x + step * dx;
                    ft = merit(trial);
                }
                x = trial;
                ++steps;
                if (stop(x) || f - ft <= 1e-15 * std::abs(f))
                    return true;
            }
            return false;
        }

        // Barrier weight that best centers x: argmin_t of the Newton decrement of -t x[obj] + barrier.
        // Starting at a fixed t = 1 from a far-off point leaves Newton in its damped phase for
        // thousands of steps when the cone slacks are large.
        double initial_weight(const SocpProblem &p, const RVec &x, const ConicTolerances &tol)
        {
            const double fallback = tol.initial_mu > 0.0 ? 1.0 / tol.initial_mu : 1.0;
            RVec g;
            RMat h;
            if (!std::isfinite(socp_barrier(p, x, &g, &h)))
                return fallback;
            RVec e = RVec::Zero(p.num_vars);
            e(p.objective_index) = -1.0;
            const RVec he = -newton_direction(h, e); // H^{-1} e
            const double den = e.dot(he);
            const double t = -g.dot(he) / den;
            if (!(den > 0.0) || !std::isfinite(t) || t <= 0.0)
                return fallback;
            return std::clamp(t, 1e-10, fallback);
        }

        // Phase one: variables (x, tau), every s shifted by tau, minimize tau >= -1.
        std::optional<RVec> find_interior(const SocpProblem &p, const RVec &x0, const ConicTolerances &tol, int &steps)
        {
            const int n = p.num_vars;
            SocpProblem q;
            q.num_vars = n + 1;
            q.objective_index = n;
            double tau0 = 0.0;
            for (const auto &c : p.cones)
            {
                ConeConstraint e = c;
                e.a.conservativeResize(Eigen::NoChange, n + 1);
                e.a.col(n).setZero();
                e.c.conservativeResize(n + 1);
                e.c(n) = 1.0;
                q.cones.push_back(std::move(e));
                tau0 = std::max(tau0, -c.margin(x0));
            }
            // Maximizing -tau: store -tau as the variable, so s gets "- v" and v <= 1.
            for (auto &e : q.cones)
                e.c(n) = -1.0;
            ConeConstraint cap;
            cap.kind = ConeConstraint::Kind::standard;
            cap.a = RMat::Zero(0, n + 1);
            cap.b = RVec::Zero(0);
            cap.c = RVec::Zero(n + 1);
            cap.c(n) = -1.0;
            cap.d = 1.0;
            q.cones.push_back(cap);

            RVec x(n + 1);
            x.head(n) = x0;
            x(n) = -(tau0 + 1.0);
            auto feasible = [&](const RVec &v) {
                for (const auto &c : p.cones)
                    if (c.margin(v.head(n)) <= 0.0)
                        return false;
                return true;
            };
            if (feasible(x))
                return x0;
            for (double t = initial_weight(q, x, tol); t < 1e12; t /= tol.mu_factor)
            {
                const bool ok = center(q, t, x, tol, steps, feasible);
                if (feasible(x))
                    return RVec(x.head(n));
                if (!ok || 2.0 * static_cast<double>(q.cones.size()) / t < 1e-10)
                    break; // budget gone, or the phase-one optimum is not interior
            }
            return std::nullopt;
        }
    }

    ConicSolution solve_socp(const SocpProblem &p, const ConicTolerances &tol, const std::optional<RVec> &start)
    {
        p.validate();
        ConicSolution sol;
        int steps = 0;
        RVec x = start ? *start : RVec::Zero(p.num_vars);
        if (x.size() != p.num_vars)
            throw DomainError("socp: start has the wrong size");
        bool interior = true;
        for (const auto &c : p.cones)
            interior = interior && c.margin(x) > 0.0;
        if (!interior)
        {
            auto found = find_interior(p, x, tol, steps);
            if (!found)
            {
                sol.status = ConicStatus::infeasible;
                sol.iterations = steps;
                return sol;
            }
            x = *found;
        }

        const double nu = barrier_degree(p);
        double t = initial_weight(p, x, tol);
        sol.status = ConicStatus::max_iterations;
        for (;;)
        {
            const bool ok = center(p, t, x, tol, steps, [](const RVec &) { return false; });
            if (!ok)
                break;
            if (nu / t <= tol.gap_tolerance * (1.0 + std::abs(x(p.objective_index))))
            {
                sol.status = ConicStatus::optimal;
                break;
            }
            t /= tol.mu_factor;
        }
        sol.x = x;
        sol.objective = x(p.objective_index);
        sol.primal_residual = worst_violation(p, x);
        sol.gap = nu / t;
        sol.iterations = steps;
        return sol;
    }

    namespace
    {
        struct SdpDualEval
        {
            double value = kInf;
            RVec grad;
            RMat hess;
            CMat s_inv;
        };

        // Dual barrier t (c^T lambda - 1^T y) - sum log lambda - log det(sum lambda psi - diag y).
        SdpDualEval sdp_dual(const SdpProblem &p, const RVec &v, double t, bool derivatives)
        {
            const int k = static_cast<int>(p.psi.size());
            const int n = p.size();
            SdpDualEval e;
            const RVec lambda = v.head(k);
            const RVec y = v.tail(n);
            if (lambda.minCoeff() <= 0.0)
                return e;
            CMat s = CMat::Zero(n, n);
            for (int i = 0; i < k; ++i)
                s += lambda(i) * p.psi[static_cast<std::size_t>(i)];
            s.diagonal() -= y.cast<cx>();
            s = hermitian_part(s);
            Eigen::LLT<CMat> llt(s);
            if (llt.info() != Eigen::Success)
                return e;
            const CMat &l = llt.matrixL();
            double logdet = 0.0;
            for (int i = 0; i < n; ++i)
            {
                const double di = l(i, i).real();
                if (!(di > 0.0))
                    return e;
                logdet += 2.0 * std::log(di);
            }
            e.value = t * (p.constants.dot(lambda) - y.sum()) - lambda.array().log().sum() - logdet;
            if (!derivatives)
                return e;
            e.s_inv = hermitian_part(llt.solve(CMat::Identity(n, n)));
            std::vector<CMat> ps(static_cast<std::size_t>(k));
            for (int i = 0; i < k; ++i)
                ps[static_cast<std::size_t>(i)] = e.s_inv * p.psi[static_cast<std::size_t>(i)];
            e.grad.resize(k + n);
            e.hess.resize(k + n, k + n);
            for (int i = 0; i < k; ++i)
            {
                const CMat &pi = ps[static_cast<std::size_t>(i)];
                e.grad(i) = t * p.constants(i) - 1.0 / lambda(i) - pi.trace().real();
                for (int j = 0; j <= i; ++j)
                {
                    // Tr(P_i P_j) as an elementwise sum.
                    const double hij = (pi.array() * ps[static_cast<std::size_t>(j)].transpose().array()).sum().real();
                    e.hess(i, j) = e.hess(j, i) = hij;
                }
                e.hess(i, i) += 1.0 / (lambda(i) * lambda(i));
                // diagonal of P_i S^{-1} only
                const RVec pis = (pi.array() * e.s_inv.transpose().array()).rowwise().sum().real();
                for (int m = 0; m < n; ++m)
                    e.hess(i, k + m) = e.hess(k + m, i) = -pis(m);
            }
            for (int m = 0; m < n; ++m)
                e.grad(k + m) = -t + e.s_inv(m, m).real();
            e.hess.bottomRightCorner(n, n) = e.s_inv.cwiseAbs2();
            return e;
        }

        double sdp_primal_value(const SdpProblem &p, const CMat &theta)
        {
            double r = kInf;
            for (std::size_t i = 0; i < p.psi.size(); ++i)
                r = std::min(r, p.constants(static_cast<Eigen::Index>(i)) - (p.psi[i] * theta).trace().real());
            return r;
        }
    }

    ConicSolution solve_sdp(const SdpProblem &p, const ConicTolerances &tol)
    {
        p.validate();
        const int k = static_cast<int>(p.psi.size());
        const int n = p.size();
        const int nv = k + n;

        RVec v(nv);
        v.head(k).setConstant(1.0 / k);
        {
            CMat s = CMat::Zero(n, n);
            for (const auto &q : p.psi)
                s += q / static_cast<double>(k);
            const double lo = Eigen::SelfAdjointEigenSolver<CMat>(hermitian_part(s), Eigen::EigenvaluesOnly).eigenvalues()(0);
            v.tail(n).setConstant(lo - 1.0);
        }

        ConicSolution sol;
        sol.status = ConicStatus::max_iterations;
        int steps = 0;
        double t = 1.0 / tol.initial_mu;
        const double nu = static_cast<double>(nv);
        CMat best_theta = CMat::Identity(n, n);
        double best_primal = sdp_primal_value(p, best_theta);
        double dual_value = kInf;

        RMat kkt(nv + 1, nv + 1);
        RVec rhs(nv + 1);
        bool budget = true;
        while (budget)
        {
            // Centering with the equality sum(lambda) = 1 kept by the KKT system.
            for (;;)
            {
                if (steps >= tol.max_newton_iterations)
                {
                    budget = false;
                    break;
                }
                const SdpDualEval e = sdp_dual(p, v, t, true);
                // Jacobi scaling keeps the KKT solve accurate when lambda spans many magnitudes.
                const RVec js = e.hess.diagonal().cwiseMax(1e-300).cwiseSqrt().cwiseInverse();
                kkt.setZero();
                kkt.topLeftCorner(nv, nv) = js.asDiagonal() * e.hess * js.asDiagonal();
                kkt.block(0, nv, k, 1) = js.head(k);
                kkt.block(nv, 0, 1, k) = js.head(k).transpose();
                rhs.head(nv) = -js.cwiseProduct(e.grad);
                rhs(nv) = 0.0;
                const RVec sol_kkt = kkt.partialPivLu().solve(rhs);
                const RVec dv = js.cwiseProduct(sol_kkt.head(nv));
                const double dec = dv.dot(e.hess * dv);
                if (!dv.allFinite() || !(dec >= 0.0) || 0.5 * dec <= tol.newton_tolerance)
                    break;
                double step = 1.0;
                const double slope = e.grad.dot(dv);
                RVec trial = v + dv;
                double ft = sdp_dual(p, trial, t, false).value;
                bool moved = true;
                while (ft > e.value + tol.alpha * step * slope)
                {
                    step *= tol.beta;
                    if (step < 1e-14)
                    {
                        moved = false;
                        break;
                    }
                    trial = v + step * dv;
                    ft = sdp_dual(p, trial, t, false).value;
                }
                if (!moved)
                    break;
                v = trial;
                ++steps;
                if (e.value - ft <= 1e-15 * std::abs(e.value))
                    break; // decrease lost in rounding
            }

            // Primal point on the central path, rescaled to unit diagonal.
            const SdpDualEval e = sdp_dual(p, v, t, true);
            CMat theta = e.s_inv / t;
            const RVec dscale = theta.diagonal().real().cwiseMax(1e-300).cwiseSqrt().cwiseInverse();
            theta = hermitian_part(dscale.cast<cx>().asDiagonal() * theta * dscale.cast<cx>().asDiagonal());
            theta.diagonal().setOnes();
            const double primal = sdp_primal_value(p, theta);
            if (primal > best_primal)
            {
                best_primal = primal;
                best_theta = theta;
            }
            // Feasible for the dual after undoing any drift of sum(lambda) away from 1.
            dual_value = std::min(dual_value, (p.constants.dot(v.head(k)) - v.tail(n).sum()) / v.head(k).sum());
            const double scale = 1.0 + std::abs(best_primal);
            if (dual_value - best_primal <= tol.gap_tolerance * scale)
            {
                sol.status = ConicStatus::optimal;
                break;
            }
            if (nu / t < 1e-2 * (dual_value - best_primal))
                break; // rounding in the recovered primal, not the barrier, limits the gap now
            t /= tol.mu_factor;
        }

        sol.theta = best_theta;
        sol.objective = best_primal;
        sol.gap = std::max(0.0, dual_value - best_primal);
        const double min_eig =
            Eigen::SelfAdjointEigenSolver<CMat>(best_theta, Eigen::EigenvaluesOnly).eigenvalues()(0);
        sol.primal_residual = std::max({0.0, -min_eig, (best_theta.diagonal().array() - 1.0).abs().maxCoeff()});
        sol.iterations = steps;
        if (sol.gap <= tol.accept_gap * (1.0 + std::abs(best_primal)) && sol.primal_residual <= 1e-6)
            sol.status = ConicStatus::optimal;
        else
            sol.status = ConicStatus::max_iterations;
        return sol;
    }

    // ---- JSON exchange ----------------------------------------------------

    namespace
    {
        using nlohmann::json;

        json real_matrix(const RMat &m)
        {
            json rows = json::array();
            for (Eigen::Index i = 0; i < m.rows(); ++i)
            {
                json r = json::array();
                for (Eigen::Index j = 0; j < m.cols(); ++j)
                    r.push_back(m(i, j));
                rows.push_back(std::move(r));
            }
            return rows;
        }

        RMat parse_matrix(const json &j, Eigen::Index cols_if_empty)
        {
            const auto rows = static_cast<Eigen::Index>(j.size());
            if (rows == 0)
                return RMat::Zero(0, cols_if_empty);
            const auto cols = static_cast<Eigen::Index>(j.at(0).size());
            RMat m(rows, cols);
            for (Eigen::Index i = 0; i < rows; ++i)
            {
                if (static_cast<Eigen::Index>(j.at(static_cast<std::size_t>(i)).size()) != cols)
                    throw DomainError("json: ragged matrix");
                for (Eigen::Index c = 0; c < cols; ++c)
                    m(i, c) = j[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)].get<double>();
            }
            return m;
        }

        json real_vector(const RVec &v)
        {
            return json(std::vector<double>(v.data(), v.data() + v.size()));
        }

        RVec parse_vector(const json &j)
        {
            const auto v = j.get<std::vector<double>>();
            return Eigen::Map<const RVec>(v.data(), static_cast<Eigen::Index>(v.size()));
        }

        json complex_matrix(const CMat &m)
        {
            return json{{"re", real_matrix(m.real())}, {"im", real_matrix(m.imag())}};
        }

        CMat parse_complex(const json &j)
        {
            const RMat re = parse_matrix(j.at("re"), 0);
            const RMat im = parse_matrix(j.at("im"), 0);
            if (re.rows() != im.rows() || re.cols() != im.cols())
                throw DomainError("json: complex parts differ in shape");
            CMat m(re.rows(), re.cols());
            m.real() = re;
            m.imag() = im;
            return m;
        }

        json parse_text(const std::string &text)
        {
            try
            {
                return json::parse(text);
            }
            catch (const json::exception &e)
            {
                throw DomainError(std::string("json: ") + e.what());
            }
        }
    }

    std::string to_json(const SocpProblem &p)
    {
        json cones = json::array();
        for (const auto &c : p.cones)
            cones.push_back({{"type", c.kind == ConeConstraint::Kind::standard ? "standard" : "rotated"},
                             {"a", real_matrix(c.a)},
                             {"b", real_vector(c.b)},
                             {"c", real_vector(c.c)},
                             {"d", c.d}});
        json j{{"kind", "socp"}, {"num_vars", p.num_vars}, {"objective_index", p.objective_index}, {"cones", cones}};
        return j.dump();
    }

    std::string to_json(const SdpProblem &p)
    {
        json psi = json::array();
        for (const auto &m : p.psi)
            psi.push_back(complex_matrix(m));
        json j{{"kind", "sdp"}, {"size", p.size()}, {"psi", psi}, {"constants", real_vector(p.constants)}};
        return j.dump();
    }

    SocpProblem socp_from_json(const std::string &text)
    {
        const json j = parse_text(text);
        try
        {
            if (j.at("kind") != "socp")
                throw DomainError("json: not an socp problem");
            SocpProblem p;
            p.num_vars = j.at("num_vars").get<int>();
            p.objective_index = j.at("objective_index").get<int>();
            for (const auto &c : j.at("cones"))
            {
                ConeConstraint e;
                const auto type = c.at("type").get<std::string>();
                if (type == "standard")
                    e.kind = ConeConstraint::Kind::standard;
                else if (type == "rotated")
                    e.kind = ConeConstraint::Kind::rotated;
                else
                    throw DomainError("json: unknown cone type '" + type + "'");
                e.a = parse_matrix(c.at("a"), p.num_vars);
                e.b = parse_vector(c.at("b"));
                e.c = parse_vector(c.at("c"));
                e.d = c.at("d").get<double>();
                p.cones.push_back(std::move(e));
            }
            p.validate();
            return p;
        }
        catch (const json::exception &e)
        {
            throw DomainError(std::string("json: ") + e.what());
        }
    }

    SdpProblem sdp_from_json(const std::string &text)
    {
        const json j = parse_text(text);
        try
        {
            if (j.at("kind") != "sdp")
                throw DomainError("json: not an sdp problem");
            SdpProblem p;
            for (const auto &m : j.at("psi"))
                p.psi.push_back(parse_complex(m));
            p.constants = parse_vector(j.at("constants"));
            p.validate();
            return p;
        }
        catch (const json::exception &e)
        {
            throw DomainError(std::string("json: ") + e.what());
        }
    }

    std::string to_json(const ConicSolution &s)
    {
        json j{{"status", to_string(s.status)},
               {"objective", s.objective},
               {"primal_residual", s.primal_residual},
               {"gap", s.gap},
               {"iterations", s.iterations},
               {"x", real_vector(s.x)}};
        if (s.theta.size() > 0)
            j["theta"] = complex_matrix(s.theta);
        return j.dump();
    }

    ConicSolution solution_from_json(const std::string &text)
    {
        const json j = parse_text(text);
        try
        {
            ConicSolution s;
            s.status = status_from_string(j.at("status").get<std::string>());
            s.objective = j.at("objective").get<double>();
            s.primal_residual = j.value("primal_residual", 0.0);
            s.gap = j.value("gap", 0.0);
            s.iterations = j.value("iterations", 0);
            if (j.contains("x"))
                s.x = parse_vector(j.at("x"));
            if (j.contains("theta"))
                s.theta = parse_complex(j.at("theta"));
            return s;
        }
        catch (const json::exception &e)
        {
            throw DomainError(std::string("json: ") + e.what());
        }
    }

    // ---- external solver ----------------------------------------------------

    namespace
    {
        std::filesystem::path temp_file(const char *suffix)
        {
            std::string pattern = (std::filesystem::temp_directory_path() / "irscomp-XXXXXX").string() + suffix;
            std::vector<char> buf(pattern.begin(), pattern.end());
            buf.push_back('\0');
            const int fd = ::mkstemps(buf.data(), static_cast<int>(std::char_traits<char>::length(suffix)));
            if (fd < 0)
                throw AdapterError("external solver: cannot create a temporary file");
            ::close(fd);
            return std::filesystem::path(buf.data());
        }

        struct TempFiles
        {
            std::filesystem::path in = temp_file(".json");
            std::filesystem::path out = temp_file(".json");
            ~TempFiles()
            {
                std::error_code ec;
                std::filesystem::remove(in, ec);
                std::filesystem::remove(out, ec);
            }
        };
    }

    ConicSolution ExternalSolver::run(const std::string &problem_json) const
    {
        if (command_.empty())
            throw AdapterError("external solver: no command configured");
        TempFiles files;
        {
            std::ofstream f(files.in);
            f << problem_json;
            if (!f)
                throw AdapterError("external solver: cannot write " + files.in.string());
        }
        const std::string cmd = command_ + " '" + files.in.string() + "' '" + files.out.string() + "'";
        const int rc = std::system(cmd.c_str());
        if (rc != 0)
            throw AdapterError("external solver: '" + command_ + "' exited with status " + std::to_string(rc));
        std::ifstream f(files.out);
        std::stringstream text;
        text << f.rdbuf();
        if (text.str().empty())
            throw AdapterError("external solver: no output from '" + command_ + "'");
        try
        {
            return solution_from_json(text.str());
        }
        catch (const DomainError &e)
        {
            throw AdapterError(std::string("external solver: bad output: ") + e.what());
        }
    }

    ConicSolution ExternalSolver::solve(const SocpProblem &p) const
    {
        p.validate();
        ConicSolution s = run(to_json(p));
        if (s.status == ConicStatus::optimal)
        {
            if (s.x.size() != p.num_vars)
                throw AdapterError("external solver: solution has the wrong size");
            s.primal_residual = worst_violation(p, s.x);
        }
        return s;
    }

    ConicSolution ExternalSolver::solve(const SdpProblem &p) const
    {
        p.validate();
        ConicSolution s = run(to_json(p));
        if (s.status == ConicStatus::optimal)
        {
            if (s.theta.rows() != p.size() || s.theta.cols() != p.size())
                throw AdapterError("external solver: solution has the wrong size");
            const CMat th = hermitian_part(s.theta);
            const double min_eig = Eigen::SelfAdjointEigenSolver<CMat>(th, Eigen::EigenvaluesOnly).eigenvalues()(0);
            s.primal_residual = std::max({0.0, -min_eig, (th.diagonal().array() - 1.0).abs().maxCoeff()});
        }
        return s;
    }
}
