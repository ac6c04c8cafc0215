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

#include "irscomp/single_user.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>

namespace irscomp
{
    namespace
    {
        void check_dual_inputs(const CMat &hbar, const CMat &u, const CMat &q, int num_bs)
        {
            if (num_bs < 1 || hbar.cols() % num_bs != 0)
                throw DomainError("effective channel width is not a multiple of the BS count");
            if (u.rows() != hbar.rows() || q.rows() != u.cols() || q.cols() != u.cols())
                throw DomainError("receiver/weight shapes do not match the channel");
        }

        // Stationarity system of the Lagrangian.
        struct DualSystem
        {
            CMat j1; // H^H U Q U^H H
            CMat j2; // H^H U Q
            int num_bs;
            int tx;

            DualSystem(const CMat &hbar, const CMat &u, const CMat &q, int n)
            {
                check_dual_inputs(hbar, u, q, n);
                num_bs = n;
                tx = static_cast<int>(hbar.cols()) / n;
                const CMat hu = hbar.adjoint() * u;
                j2 = hu * q;
                j1 = hermitian_part(j2 * hu.adjoint());
            }

            CMat solve(const RVec &mu) const
            {
                if (mu.size() != num_bs || (mu.array() < 0.0).any() || !mu.allFinite())
                    throw DomainError("dual multipliers must be nonnegative, one per BS");
                CMat a = j1;
                for (int n = 0; n < num_bs; ++n)
                    for (int i = 0; i < tx; ++i)
                        a(n * tx + i, n * tx + i) += mu(n);
                Eigen::LLT<CMat> llt(a);
                bool ok = llt.info() == Eigen::Success;
                if (ok)
                {
                    const auto d = llt.matrixLLT().diagonal().real().cwiseAbs2();
                    ok = d.minCoeff() > 1e-13 * std::max(d.maxCoeff(), std::numeric_limits<double>::min());
                }
                if (!ok)
                    throw NumericError("degenerate dual: stationarity system is singular");
                return llt.solve(j2);
            }

            double objective(const CMat &w) const
            {
                return (w.adjoint() * j1 * w).trace().real() - 2.0 * (j2.adjoint() * w).trace().real();
            }

            RVec powers(const CMat &w) const
            {
                RVec p(num_bs);
                for (int n = 0; n < num_bs; ++n)
                    p(n) = w.middleRows(n * tx, tx).squaredNorm();
                return p;
            }
        };

        struct DualPoint
        {
            CMat w;
            RVec slack;
            double value = 0.0;
            RMat hessian; // d^2 g / d mu^2, negative semidefinite
        };

        // Lagrangian minimizer for strictly positive mu through the Woodbury identity
        // (X Q X^H + D)^{-1} X Q = D^{-1} X (Q^{-1} + X^H D^{-1} X)^{-1}, X = H^H U. Only a d x d system is
        // inverted, which stays well conditioned as some mu_n -> 0 even though J1 itself becomes singular.
        DualPoint evaluate_dual(const DualSystem &sys, const CMat &x, const CMat &q_inv, const RVec &mu,
                                double max_power)
        {
            const int tx = sys.tx, nb = sys.num_bs;
            CMat dx = x; // D^{-1} X
            for (int n = 0; n < nb; ++n)
                dx.middleRows(n * tx, tx) /= mu(n);
            const CMat y = hermitian_inverse(hermitian_part(q_inv + x.adjoint() * dx));
            DualPoint d;
            d.w = dx * y;
            const RVec p = sys.powers(d.w);
            d.slack = p.array() - max_power;
            d.value = sys.objective(d.w) + mu.dot(d.slack);

            // d||W_m||^2/d mu_n = -2 Re Tr(W_m^H [J1^{-1}]_{mn} W_n) with
            // [J1^{-1}]_{mn} = delta_mn I / mu_n - X_m Y X_n^H / (mu_m mu_n).
            std::vector<CMat> z(static_cast<std::size_t>(nb));
            for (int n = 0; n < nb; ++n)
                z[static_cast<std::size_t>(n)] = x.middleRows(n * tx, tx).adjoint() * d.w.middleRows(n * tx, tx) / mu(n);
            d.hessian.resize(nb, nb);
            for (int m = 0; m < nb; ++m)
                for (int n = 0; n < nb; ++n)
                {
                    double t = -(z[static_cast<std::size_t>(m)].adjoint() * y * z[static_cast<std::size_t>(n)]).trace().real();
                    if (m == n)
                        t += p(n) / mu(n);
                    d.hessian(m, n) = -2.0 * t;
                }
            d.hessian = 0.5 * (d.hessian + d.hessian.transpose());
            return d;
        }

        // Minimum-norm Lagrangian minimizer for any mu >= 0 (used by the diminishing-step rule, which
        // may put multipliers exactly at zero). J2 lies in the range of J1, so the pseudo-inverse
        // solve is the limit of the regularized one.
        CMat min_norm_solve(const DualSystem &sys, const RVec &mu)
        {
            CMat a = sys.j1;
            for (int n = 0; n < sys.num_bs; ++n)
                for (int i = 0; i < sys.tx; ++i)
                    a(n * sys.tx + i, n * sys.tx + i) += mu(n);
            Eigen::SelfAdjointEigenSolver<CMat> es(hermitian_part(a));
            if (es.info() != Eigen::Success)
                throw NumericError("dual: eigendecomposition failed");
            const RVec &lam = es.eigenvalues();
            const double cut = 1e-12 * std::max(lam.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
            RVec inv(lam.size());
            for (Eigen::Index i = 0; i < lam.size(); ++i)
                inv(i) = lam(i) > cut ? 1.0 / lam(i) : 0.0;
            const CMat &v = es.eigenvectors();
            return v * inv.asDiagonal() * (v.adjoint() * sys.j2);
        }
    }

    namespace
    {
        // When X = H^H U has full column rank, every W with X^H W = I minimizes the objective without
        // constraints (value -Tr Q). If one of them meets all budgets it solves the problem, and the
        // dual optimum sits at mu -> 0 along a direction the dual value cannot resolve. Search that
        // direction scale-free: W_r = R^{-1} X (X^H R^{-1} X)^{-1} minimizes sum_n r_n ||W_n||^2 over the
        // minimizers, and max_r sum_n r_n (||W_r,n||^2 - P) over the simplex equals
        // min_W max_n (||W_n||^2 - P) (minimax), so exponentiated-gradient ascent on r finds a feasible
        // minimizer whenever one exists.
        struct LimitSearch
        {
            std::optional<CMat> feasible; // a budget-feasible unconstrained minimizer
            std::optional<RVec> ratio;    // otherwise the best multiplier direction found
        };

        LimitSearch search_unconstrained_minimizers(const DualSystem &sys, const CMat &x, double max_power)
        {
            LimitSearch out;
            Eigen::JacobiSVD<CMat> svd(x);
            const RVec &sv = svd.singularValues();
            if (sv.size() == 0 || sv.minCoeff() <= 1e-10 * sv.maxCoeff())
                return out;
            const int nb = sys.num_bs, tx = sys.tx;
            RVec r = RVec::Constant(nb, 1.0 / nb);
            RVec best_r = r;
            double best_h = std::numeric_limits<double>::infinity();
            for (int it = 0; it < 2000; ++it)
            {
                CMat rx = x;
                for (int n = 0; n < nb; ++n)
                    rx.middleRows(n * tx, tx) /= r(n);
                Eigen::LLT<CMat> llt(hermitian_part(x.adjoint() * rx));
                if (llt.info() != Eigen::Success)
                    break;
                const CMat w = llt.solve(rx.adjoint()).adjoint();
                const RVec slack = sys.powers(w).array() - max_power;
                if (slack.maxCoeff() <= 0.0)
                {
                    out.feasible = w;
                    return out;
                }
                if (slack.maxCoeff() < best_h)
                {
                    best_h = slack.maxCoeff();
                    best_r = r;
                }
                const double eta = 2.0 / (max_power * std::sqrt(1.0 + it));
                for (int n = 0; n < nb; ++n)
                    r(n) *= std::exp(std::clamp(eta * slack(n), -50.0, 50.0));
                r /= r.sum();
                r = r.cwiseMax(1e-200);
            }
            out.ratio = best_r;
            return out;
        }
    }

    CMat beamformer_closed_form(const RVec &mu, const CMat &hbar, const CMat &u, const CMat &q, int num_bs)
    {
        return DualSystem(hbar, u, q, num_bs).solve(mu);
    }

    CMat beamformer_closed_form(const DualState &dual, const ChannelSet &channels, const PhaseProfile &phase,
                                const CMat &u, const CMat &q)
    {
        return beamformer_closed_form(dual.mu, effective_channel(channels, phase, 0), u, q, channels.num_bs);
    }

    double beamforming_objective(const CMat &hbar, const CMat &u, const CMat &q, const CMat &w)
    {
        const CMat g = u.adjoint() * hbar * w; // U^H H W
        return (q * g * g.adjoint()).trace().real() - 2.0 * (q * g).trace().real();
    }

    SubgradientResult dual_subgradient(const CMat &hbar, const CMat &u, const CMat &q, int num_bs, double max_power,
                                       const SystemConfig &config)
    {
        if (!(max_power > 0.0))
            throw DomainError("dual_subgradient: power budget must be positive");
        const DualSystem sys(hbar, u, q, num_bs);
        const int tx = sys.tx;
        const bool diminishing = config.subgradient_step > 0.0;
        const CMat x = hbar.adjoint() * u;
        const CMat q_inv = hermitian_inverse(q);

        RVec mu(num_bs);
        double scale = 0.0;
        for (int n = 0; n < num_bs; ++n)
        {
            // If mu dominated J1, W_n ~ J2_n / mu_n would meet the budget at this value.
            mu(n) = sys.j2.middleRows(n * tx, tx).norm() / std::sqrt(max_power);
            scale = std::max(scale, mu(n));
        }
        if (!diminishing)
            mu = mu.cwiseMax(1e-6 * scale);
        if (!(scale > 0.0))
        {
            // J2 = 0: W = 0 is optimal for every mu.
            SubgradientResult zero;
            zero.w = CMat::Zero(hbar.cols(), u.cols());
            zero.mu = RVec::Zero(num_bs);
            zero.converged = true;
            zero.iterations = 1;
            return zero;
        }
        // Keeping every mu_n >= mu_floor is the dual of the problem with a tiny proximal term
        // mu_floor ||W||^2; it keeps the minimizer unique when several constraints are inactive and
        // costs at most mu_floor * N * P in the certified gap.
        const double mu_floor = 1e-12 * scale;

        if (!diminishing)
        {
            LimitSearch limit = search_unconstrained_minimizers(sys, x, max_power);
            if (limit.feasible)
            {
                SubgradientResult r;
                r.w = std::move(*limit.feasible);
                r.mu = RVec::Zero(num_bs);
                r.primal_objective = sys.objective(r.w);
                // With mu = 0 the dual value is the unconstrained minimum, attained by r.w.
                r.dual_objective = r.primal_objective;
                r.iterations = 1;
                r.converged = true;
                return r;
            }
            if (limit.ratio)
            {
                // Start on the best direction at the scale maximizing the dual along it; d/ds g(s r) =
                // r . slack(s r) decreases in s, so bisect its sign on a log scale.
                const RVec dirr = limit.ratio->cwiseMax(1e-12);
                double lo = std::log(1e-12 * scale), hi = std::log(1e4 * scale);
                for (int it = 0; it < 80; ++it)
                {
                    const double mid = 0.5 * (lo + hi);
                    const DualPoint d = evaluate_dual(sys, x, q_inv, std::exp(mid) * dirr, max_power);
                    (dirr.dot(d.slack) > 0.0 ? lo : hi) = mid;
                }
                mu = std::exp(0.5 * (lo + hi)) * dirr;
            }
        }

        SubgradientResult best;
        best.primal_objective = std::numeric_limits<double>::infinity();
        best.dual_objective = -std::numeric_limits<double>::infinity();
        best.w = CMat::Zero(hbar.cols(), u.cols());
        best.mu = mu;

        auto point_at = [&](const RVec &m)
        {
            if (diminishing && (m.array() <= 0.0).any())
            {
                DualPoint d;
                d.w = min_norm_solve(sys, m);
                d.slack = sys.powers(d.w).array() - max_power;
                d.value = sys.objective(d.w) + m.dot(d.slack);
                return d;
            }
            return evaluate_dual(sys, x, q_inv, m, max_power);
        };

        DualPoint cur = point_at(mu);
        for (int t = 1; t <= config.max_subgradient_iterations; ++t)
        {
            best.iterations = t;
            if (cur.value > best.dual_objective)
            {
                best.dual_objective = cur.value;
                best.mu = mu;
            }
            CMat feasible = cur.w;
            for (int n = 0; n < num_bs; ++n)
            {
                const double p = cur.slack(n) + max_power;
                if (p > max_power)
                    feasible.middleRows(n * tx, tx) *= std::sqrt(max_power / p);
            }
            const double primal = sys.objective(feasible);
            if (primal < best.primal_objective)
            {
                best.primal_objective = primal;
                best.w = feasible;
            }
            const double gap = best.primal_objective - best.dual_objective;
            if (gap <= config.subgradient_gap_tolerance * std::abs(best.primal_objective))
            {
                best.converged = true;
                break;
            }

            if (diminishing)
            {
                const double step = config.subgradient_step / std::sqrt(static_cast<double>(t));
                mu = (mu + step * cur.slack).cwiseMax(0.0);
                cur = point_at(mu);
                continue;
            }

            // Newton ascent on the concave dual. Multipliers stay strictly positive: a step may shrink
            // mu_n by at most 99%, so an inactive constraint drives mu_n to zero geometrically.
            // Multipliers sitting on the floor with a negative gradient stay out of the Newton system.
            std::vector<int> free;
            for (int n = 0; n < num_bs; ++n)
                if (mu(n) > mu_floor * (1.0 + 1e-9) || cur.slack(n) > 0.0)
                    free.push_back(n);
            RVec dir = RVec::Zero(num_bs);
            if (!free.empty())
            {
                const int f = static_cast<int>(free.size());
                RMat h(f, f);
                RVec g(f);
                for (int i = 0; i < f; ++i)
                {
                    g(i) = cur.slack(free[static_cast<std::size_t>(i)]);
                    for (int j = 0; j < f; ++j)
                        h(i, j) = -cur.hessian(free[static_cast<std::size_t>(i)], free[static_cast<std::size_t>(j)]);
                }
                Eigen::LDLT<RMat> ldlt(h);
                RVec step = ldlt.solve(g);
                if (ldlt.info() != Eigen::Success || !step.allFinite() || step.dot(g) <= 0.0)
                    step = g.cwiseQuotient(h.diagonal().cwiseMax(std::numeric_limits<double>::min()));
                for (int i = 0; i < f; ++i)
                    dir(free[static_cast<std::size_t>(i)]) = step(i);
            }
            double alpha = 1.0;
            for (int n = 0; n < num_bs; ++n)
                if (dir(n) < 0.0 && mu(n) > mu_floor)
                    alpha = std::min(alpha, 0.99 * (mu(n) - mu_floor) / -dir(n));

            bool moved = false;
            const double slope = cur.slack.dot(dir);
            for (int ls = 0; ls < 60; ++ls, alpha *= 0.5)
            {
                const RVec trial = (mu + alpha * dir).cwiseMax(mu_floor);
                DualPoint next = point_at(trial);
                // Near the optimum the ascent can drop below the rounding error of the dual value; then
                // accept steps that shrink the directional derivative instead.
                const bool ascent = next.value >= cur.value + 1e-4 * alpha * slope;
                const bool flat = next.value >= cur.value - 1e-13 * std::abs(cur.value) &&
                                  std::abs(next.slack.dot(dir)) <= 0.5 * std::abs(slope);
                if (ascent || flat)
                {
                    mu = trial;
                    cur = std::move(next);
                    moved = true;
                    break;
                }
            }
            if (!moved)
            {
                // No measurable ascent: the dual is maximized to working precision.
                best.converged = gap <= 1e-10 * std::max(1.0, std::abs(best.primal_objective));
                break;
            }
        }
        return best;
    }

    QuadraticPhaseForm QuadraticPhaseForm::from_quadratic(const CMat &s, const CVec &z)
    {
        if (s.rows() != s.cols() || s.rows() != z.size())
            throw DomainError("from_quadratic: shape mismatch");
        QuadraticPhaseForm f;
        const auto m = z.size();
        f.A = hermitian_part(s);
        f.E_tilde = CMat::Ones(m, m);
        f.S = f.A;
        f.D = z.asDiagonal();
        f.B = CMat::Zero(m, m);
        f.z = z;
        f.lambda_max = m == 0 ? 0.0 : Eigen::SelfAdjointEigenSolver<CMat>(f.S, Eigen::EigenvaluesOnly).eigenvalues().maxCoeff();
        return f;
    }

    double QuadraticPhaseForm::f(const CVec &phi) const
    {
        if (phi.size() != z.size())
            throw DomainError("phase vector length mismatch");
        return phi.dot(S * phi).real() + 2.0 * z.dot(phi).real();
    }

    double QuadraticPhaseForm::objective(const CVec &phi) const
    {
        return f(phi) + c2.real() - 2.0 * c1.real();
    }

    double QuadraticPhaseForm::surrogate(const CVec &phi, const CVec &phi_r) const
    {
        const CVec t = lambda_max * phi_r - S * phi_r; // (lambda I - S) phi_r
        return lambda_max * phi.squaredNorm() - 2.0 * phi.dot(t).real() + phi_r.dot(t).real() +
               2.0 * z.dot(phi).real();
    }

    QuadraticPhaseForm build_phase_form(const ChannelSet &channels, const BeamformerSet &w, const CMat &u,
                                        const CMat &q)
    {
        if (channels.num_users != 1 || w.num_users() != 1)
            throw DomainError("build_phase_form: single-user form requires K = 1");
        const int M = channels.num_irs_elements;
        const CMat &hr = channels.irs_user(0);
        CMat l1 = CMat::Zero(M, w.streams());
        CMat l2 = CMat::Zero(channels.rx_antennas, w.streams());
        for (int n = 0; n < channels.num_bs; ++n)
        {
            l1.noalias() += channels.bs_irs(n) * w.block(n, 0);
            l2.noalias() += channels.direct(n, 0) * w.block(n, 0);
        }
        const CMat uq = u * q;                     // U Q
        const CMat hu = hr.adjoint() * u;          // H_r^H U
        QuadraticPhaseForm f;
        f.A = hermitian_part(hu * q * hu.adjoint());
        f.E_tilde = hermitian_part(l1 * l1.adjoint());
        f.S = hermitian_part(f.A.cwiseProduct(f.E_tilde.transpose()));
        f.D = hu * q * u.adjoint() * l2 * l1.adjoint();
        f.B = hr.adjoint() * uq * l1.adjoint();
        f.z = (f.D - f.B).diagonal();
        f.c1 = (q * l2.adjoint() * u).trace();
        f.c2 = (l2 * l2.adjoint() * uq * u.adjoint()).trace();
        f.lambda_max = M == 0 ? 0.0 : Eigen::SelfAdjointEigenSolver<CMat>(f.S, Eigen::EigenvaluesOnly).eigenvalues().maxCoeff();
        return f;
    }

    CVec mm_phase_step(const QuadraticPhaseForm &form, const CVec &phi_r)
    {
        if (phi_r.size() != form.z.size())
            throw DomainError("mm_phase_step: length mismatch");
        const CVec qv = form.z - form.lambda_max * phi_r + form.S * phi_r;
        CVec out = phi_r;
        for (Eigen::Index m = 0; m < qv.size(); ++m)
        {
            const double mag = std::abs(qv(m));
            if (mag > 0.0 && std::isfinite(mag))
                out(m) = -qv(m) / mag;
        }
        return out;
    }

    MmResult mm_optimize_phase(const QuadraticPhaseForm &form, const CVec &phi0, const SystemConfig &config)
    {
        for (Eigen::Index m = 0; m < phi0.size(); ++m)
            if (std::abs(std::abs(phi0(m)) - 1.0) > 1e-9)
                throw DomainError("mm_optimize_phase: start point must have unit modulus");
        MmResult r;
        r.phi = phi0;
        double f_old = form.f(phi0);
        r.f_values.push_back(f_old);
        for (int it = 1; it <= config.max_mm_iterations; ++it)
        {
            const CVec next = mm_phase_step(form, r.phi);
            const double f_new = form.f(next);
            if (f_new > f_old + 1e-10 * std::max(1.0, std::abs(f_old)))
                throw InvariantViolation("MM step increased the objective");
            r.iterations = it;
            const double decrease = f_old - f_new;
            if (f_new <= f_old)
            {
                r.phi = next;
                r.f_values.push_back(f_new);
            }
            if (decrease <= config.mm_threshold * std::abs(f_new))
            {
                r.converged = true;
                break;
            }
            f_old = std::min(f_old, f_new);
        }
        return r;
    }

    CMat matched_filter(const CMat &hbar_block, int streams, double power)
    {
        const int tx = static_cast<int>(hbar_block.cols());
        CMat w = CMat::Zero(tx, streams);
        Eigen::JacobiSVD<CMat> svd(hbar_block, Eigen::ComputeThinU);
        const int r = std::min<int>(streams, static_cast<int>(svd.matrixU().cols()));
        w.leftCols(r) = hbar_block.adjoint() * svd.matrixU().leftCols(r);
        double nrm = w.squaredNorm();
        if (!(nrm > 0.0) || !std::isfinite(nrm))
        {
            // Zero channel: any direction is as good as another.
            w.setZero();
            for (int i = 0; i < std::min(tx, streams); ++i)
                w(i, i) = 1.0;
            nrm = w.squaredNorm();
        }
        return w * std::sqrt(power / nrm);
    }

    namespace
    {
        std::vector<double> powers_of(const BeamformerSet &w)
        {
            std::vector<double> p;
            for (int n = 0; n < w.num_bs(); ++n)
                p.push_back(w.bs_power(n));
            return p;
        }

        SolveResult run_alternation(const SystemConfig &config, const ChannelSet &channels, PhaseProfile phase,
                                    bool optimize_phase)
        {
            config.validate();
            channels.check_consistent();
            if (channels.num_users != 1)
                throw DomainError("single-user solver requires K = 1");
            if (phase.size() != channels.num_irs_elements)
                throw DomainError("phase profile length does not match M");
            const int N = channels.num_bs, Nt = channels.tx_antennas, d = config.streams;
            const double P = config.max_power;
            const CMat noise = noise_covariance(channels.rx_antennas, config.noise_power);

            BeamformerSet w(N, 1, Nt, d);
            {
                const CMat hbar = effective_channel(channels, phase, 0);
                for (int n = 0; n < N; ++n)
                    w.block(n, 0) = matched_filter(hbar.middleCols(n * Nt, Nt), d, P);
            }

            SolveResult res;
            double rate = user_rate(effective_channel(channels, phase, 0), w, 0, noise);
            res.trajectory.push_back({0, rate, powers_of(w), true});

            for (int it = 1; it <= config.max_outer_iterations; ++it)
            {
                const CMat hbar = effective_channel(channels, phase, 0);
                const CMat u = mmse_receiver(hbar, w, 0, noise);
                const CMat q = optimal_weight(mse_matrix(hbar, w, 0, u, noise));

                const SubgradientResult sub = dual_subgradient(hbar, u, q, N, P, config);
                const double old_obj = beamforming_objective(hbar, u, q, w.stacked(0));
                bool accepted = sub.primal_objective <= old_obj;
                if (accepted)
                    w.set_stacked(0, sub.w);

                if (optimize_phase && channels.num_irs_elements > 0)
                {
                    const QuadraticPhaseForm form = build_phase_form(channels, w, u, q);
                    const MmResult mm = mm_optimize_phase(form, phase.phi(), config);
                    phase = PhaseProfile::from_phasors(mm.phi);
                }

                w.check_power(P, 1e-9 * std::max(1.0, P));
                const double next = user_rate(effective_channel(channels, phase, 0), w, 0, noise);
                if (next < rate - 1e-8)
                    throw InvariantViolation("alternating optimization decreased the rate from " +
                                             std::to_string(rate) + " to " + std::to_string(next));
                res.trajectory.push_back({it, next, powers_of(w), accepted});
                res.iterations = it;
                const double increase = next - rate;
                rate = std::max(rate, next);
                if (increase < config.convergence_threshold * std::abs(rate))
                {
                    res.converged = true;
                    break;
                }
            }
            res.w = std::move(w);
            res.phase = std::move(phase);
            res.rate = rate;
            return res;
        }
    }

    SolveResult optimize_single_user(const SystemConfig &config, const ChannelSet &channels,
                                     const std::optional<PhaseProfile> &initial_phase)
    {
        PhaseProfile phase;
        if (initial_phase)
            phase = *initial_phase;
        else
        {
            Rng rng = Rng(config.rng_seed).split("initial-phase");
            phase = PhaseProfile::random(channels.num_irs_elements, rng);
        }
        return run_alternation(config, channels, std::move(phase), true);
    }

    SolveResult beamform_single_user(const SystemConfig &config, const ChannelSet &channels, const PhaseProfile &phase)
    {
        return run_alternation(config, channels, phase, false);
    }
}
