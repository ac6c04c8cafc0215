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

#include "irscomp/multi_user.hpp"

#include "irscomp/single_user.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace irscomp
{
    RVec SocpLayout::pack(const BeamformerSet &w, double rate) const
    {
        RVec x(num_vars());
        for (int n = 0; n < num_bs; ++n)
            for (int k = 0; k < num_users; ++k)
            {
                const CMat &b = w.block(n, k);
                int o = offset(n, k);
                for (int c = 0; c < streams; ++c)
                    for (int t = 0; t < tx_antennas; ++t)
                    {
                        x(o++) = b(t, c).real();
                        x(o++) = b(t, c).imag();
                    }
            }
        x(rate_index()) = rate;
        return x;
    }

    BeamformerSet SocpLayout::unpack(const RVec &x) const
    {
        if (x.size() != num_vars())
            throw DomainError("socp layout: vector has the wrong size");
        BeamformerSet w(num_bs, num_users, tx_antennas, streams);
        for (int n = 0; n < num_bs; ++n)
            for (int k = 0; k < num_users; ++k)
            {
                CMat &b = w.block(n, k);
                int o = offset(n, k);
                for (int c = 0; c < streams; ++c)
                    for (int t = 0; t < tx_antennas; ++t, o += 2)
                        b(t, c) = cx(x(o), x(o + 1));
            }
        return w;
    }

    namespace
    {
        void check_inputs(const std::vector<CMat> &hbars, const MseState &mse, const std::vector<CMat> &noise_covs)
        {
            const std::size_t K = hbars.size();
            if (K == 0 || mse.receivers.size() != K || mse.weights.size() != K || noise_covs.size() != K)
                throw DomainError("multi-user: per-user inputs disagree in count");
        }

        CMat checked_sqrt(const CMat &q)
        {
            Eigen::LLT<CMat> llt(hermitian_part(q));
            if (llt.info() != Eigen::Success)
                throw NumericError("degenerate weight: Q is not positive definite");
            return hermitian_sqrt(q);
        }

        double rhs_of(const CMat &q, const CMat &u, const CMat &noise_cov)
        {
            return log_det_hpd(q) + static_cast<double>(q.rows()) - (q * u.adjoint() * noise_cov * u).trace().real();
        }
    }

    SocpVectors socp_vectors(const std::vector<CMat> &hbars, const BeamformerSet &w, const MseState &mse,
                             const std::vector<CMat> &noise_covs)
    {
        check_inputs(hbars, mse, noise_covs);
        const int K = w.num_users(), N = w.num_bs(), d = w.streams();
        SocpVectors v;
        for (int n = 0; n < N; ++n)
        {
            CVec eta(K * w.tx_antennas() * d);
            for (int k = 0; k < K; ++k)
                eta.segment(k * w.tx_antennas() * d, w.tx_antennas() * d) =
                    w.block(n, k).reshaped();
            v.eta.push_back(std::move(eta));
        }
        v.rhs.resize(K);
        for (int k = 0; k < K; ++k)
        {
            const CMat &u = mse.receivers[static_cast<std::size_t>(k)];
            const CMat &q = mse.weights[static_cast<std::size_t>(k)];
            const CMat qs = checked_sqrt(q);
            const CMat m = hbars[static_cast<std::size_t>(k)].adjoint() * u * qs;
            CVec omega(K * d * d);
            for (int j = 0; j < K; ++j)
            {
                CMat blk = w.stacked(j).adjoint() * m;
                if (j == k)
                    blk -= qs;
                omega.segment(j * d * d, d * d) = blk.reshaped();
            }
            v.omega.push_back(std::move(omega));
            v.rhs(k) = rhs_of(q, u, noise_covs[static_cast<std::size_t>(k)]);
        }
        return v;
    }

    double BeamformingSocp::value(const BeamformerSet &w) const
    {
        double r = std::numeric_limits<double>::infinity();
        const int K = layout.num_users;
        for (int k = 0; k < K; ++k)
        {
            double sq = 0.0;
            for (int j = 0; j < K; ++j)
            {
                CMat blk = m[static_cast<std::size_t>(k)].adjoint() * w.stacked(j);
                if (j == k)
                    blk -= q_sqrt[static_cast<std::size_t>(k)];
                sq += blk.squaredNorm();
            }
            r = std::min(r, (rhs(k) - sq) / rate_factor);
        }
        return r;
    }

    BeamformingSocp build_socp_problem(const std::vector<CMat> &hbars, const MseState &mse,
                                       const std::vector<CMat> &noise_covs, double max_power, int num_bs,
                                       int tx_antennas, double rate_factor)
    {
        check_inputs(hbars, mse, noise_covs);
        if (!(max_power > 0.0) || !(rate_factor > 0.0))
            throw DomainError("socp: power and rate factor must be positive");
        const int K = static_cast<int>(hbars.size());
        const int d = static_cast<int>(mse.weights.front().rows());
        BeamformingSocp b;
        b.layout = {num_bs, K, tx_antennas, d};
        b.rate_factor = rate_factor;
        const SocpLayout &lay = b.layout;
        const int nv = lay.num_vars();
        SocpProblem &p = b.problem;
        p.num_vars = nv;
        p.objective_index = lay.rate_index();

        // ||eta_n|| <= sqrt(P)
        for (int n = 0; n < num_bs; ++n)
        {
            ConeConstraint c;
            c.kind = ConeConstraint::Kind::standard;
            const int len = K * lay.block_size();
            c.a = RMat::Zero(len, nv);
            for (int i = 0; i < len; ++i)
                c.a(i, lay.offset(n, 0) + i) = 1.0;
            c.b = RVec::Zero(len);
            c.c = RVec::Zero(nv);
            c.d = std::sqrt(max_power);
            p.cones.push_back(std::move(c));
        }

        // ||omega_k||^2 <= rhs_k - rate_factor R
        b.rhs.resize(K);
        for (int k = 0; k < K; ++k)
        {
            const CMat &u = mse.receivers[static_cast<std::size_t>(k)];
            const CMat &q = mse.weights[static_cast<std::size_t>(k)];
            if (q.rows() != d)
                throw DomainError("socp: users disagree on the stream count");
            const CMat qs = checked_sqrt(q);
            const CMat m = hbars[static_cast<std::size_t>(k)].adjoint() * u * qs; // (N Nt) x d
            b.rhs(k) = rhs_of(q, u, noise_covs[static_cast<std::size_t>(k)]);

            ConeConstraint c;
            c.kind = ConeConstraint::Kind::rotated;
            c.a = RMat::Zero(2 * K * d * d, nv);
            c.b = RVec::Zero(2 * K * d * d);
            for (int j = 0; j < K; ++j)
                for (int bcol = 0; bcol < d; ++bcol)
                    for (int a = 0; a < d; ++a)
                    {
                        // entry (a, bcol) of M^H W_j - delta_jk Q^{1/2}
                        const int row = 2 * (j * d * d + bcol * d + a);
                        for (int n = 0; n < num_bs; ++n)
                            for (int t = 0; t < tx_antennas; ++t)
                            {
                                const cx alpha = std::conj(m(n * tx_antennas + t, a));
                                const int col = lay.offset(n, j) + 2 * (bcol * tx_antennas + t);
                                c.a(row, col) = alpha.real();
                                c.a(row, col + 1) = -alpha.imag();
                                c.a(row + 1, col) = alpha.imag();
                                c.a(row + 1, col + 1) = alpha.real();
                            }
                        if (j == k)
                        {
                            c.b(row) = -qs(a, bcol).real();
                            c.b(row + 1) = -qs(a, bcol).imag();
                        }
                    }
            c.c = RVec::Zero(nv);
            c.c(lay.rate_index()) = -rate_factor;
            c.d = b.rhs(k);
            p.cones.push_back(std::move(c));
            b.q_sqrt.push_back(qs);
            b.m.push_back(m);
        }
        return b;
    }

    SocpBeamformingResult solve_beamforming_socp(const std::vector<CMat> &hbars, const MseState &mse,
                                                 const std::vector<CMat> &noise_covs, double max_power,
                                                 const BeamformerSet &start, double rate_factor)
    {
        const BeamformingSocp b = build_socp_problem(hbars, mse, noise_covs, max_power, start.num_bs(),
                                                     start.tx_antennas(), rate_factor);
        BeamformerSet half = start;
        half.clip_power(max_power);
        for (int n = 0; n < half.num_bs(); ++n)
            for (int k = 0; k < half.num_users(); ++k)
                half.block(n, k) *= 0.5;
        const RVec x0 = b.layout.pack(half, b.value(half) - 1.0);

        SocpBeamformingResult r;
        r.solution = solve_socp(b.problem, {}, x0);
        if (r.solution.status == ConicStatus::infeasible)
            throw NumericError("beamforming socp: no strictly feasible point");
        r.w = b.layout.unpack(r.solution.x);
        r.objective = b.value(r.w);
        return r;
    }

    // ---- SDR ----------------------------------------------------------------

    double SdrData::value(const CVec &phi) const
    {
        if (phi.size() != size())
            throw DomainError("sdr: phase vector length mismatch");
        CVec aug(phi.size() + 1);
        aug.head(phi.size()) = phi;
        aug(phi.size()) = 1.0;
        double r = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < psi.size(); ++k)
            r = std::min(r, constants(static_cast<Eigen::Index>(k)) - aug.dot(psi[k] * aug).real());
        return r;
    }

    SdpProblem SdrData::sdp() const
    {
        SdpProblem p;
        p.psi = psi;
        p.constants = constants;
        return p;
    }

    SdrData build_sdr_data(const ChannelSet &channels, const BeamformerSet &w, const MseState &mse,
                           const std::vector<CMat> &noise_covs)
    {
        channels.check_consistent();
        const int N = channels.num_bs, K = channels.num_users, M = channels.num_irs_elements;
        const int d = w.streams();
        if (w.num_bs() != N || w.num_users() != K || static_cast<int>(mse.weights.size()) != K ||
            static_cast<int>(noise_covs.size()) != K)
            throw DomainError("sdr: inputs disagree with the channel set");

        SdrData s;
        s.L1.assign(static_cast<std::size_t>(K), CMat::Zero(M, d));
        s.L2.assign(static_cast<std::size_t>(K), std::vector<CMat>(static_cast<std::size_t>(K), CMat::Zero(channels.rx_antennas, d)));
        for (int j = 0; j < K; ++j)
            for (int n = 0; n < N; ++n)
                s.L1[static_cast<std::size_t>(j)].noalias() += channels.bs_irs(n) * w.block(n, j);
        for (int k = 0; k < K; ++k)
            for (int j = 0; j < K; ++j)
                for (int n = 0; n < N; ++n)
                    s.L2[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)].noalias() +=
                        channels.direct(n, k) * w.block(n, j);
        s.E_check = CMat::Zero(M, M);
        for (int j = 0; j < K; ++j)
            s.E_check.noalias() += s.L1[static_cast<std::size_t>(j)] * s.L1[static_cast<std::size_t>(j)].adjoint();
        s.E_check = hermitian_part(s.E_check);

        s.constants.resize(K);
        for (int k = 0; k < K; ++k)
        {
            const auto kk = static_cast<std::size_t>(k);
            const CMat &u = mse.receivers[kk];
            const CMat &q = mse.weights[kk];
            const CMat hu = channels.irs_user(k).adjoint() * u; // H_r^H U
            const CMat a = hermitian_part(hu * q * hu.adjoint());
            CMat l2l1 = CMat::Zero(channels.rx_antennas, M);
            CMat l2l2 = CMat::Zero(channels.rx_antennas, channels.rx_antennas);
            for (int j = 0; j < K; ++j)
            {
                const auto jj = static_cast<std::size_t>(j);
                l2l1.noalias() += s.L2[kk][jj] * s.L1[jj].adjoint();
                l2l2.noalias() += s.L2[kk][jj] * s.L2[kk][jj].adjoint();
            }
            const CMat dmat = hu * q * u.adjoint() * l2l1;
            const CMat bmat = hu * q * s.L1[kk].adjoint();
            const CVec z = (dmat - bmat).diagonal();
            const cx c1 = (q * s.L2[kk][kk].adjoint() * u).trace();
            const cx c2 = (l2l2 * u * q * u.adjoint()).trace();

            CMat psi = CMat::Zero(M + 1, M + 1);
            psi.topLeftCorner(M, M) = hermitian_part(a.cwiseProduct(s.E_check.transpose()));
            psi.topRightCorner(M, 1) = z;
            psi.bottomLeftCorner(1, M) = z.adjoint();

            s.constants(k) = log_det_hpd(q) + d + 2.0 * c1.real() - c2.real() -
                             (q * (u.adjoint() * noise_covs[kk] * u + CMat::Identity(d, d))).trace().real();
            s.A.push_back(a);
            s.B.push_back(bmat);
            s.D.push_back(dmat);
            s.z.push_back(z);
            s.c1.push_back(c1);
            s.c2.push_back(c2);
            s.psi.push_back(std::move(psi));
        }
        return s;
    }

    RandomizationResult gaussian_randomization(const CMat &theta, const SdrData &sdr, int count, Rng &rng)
    {
        const int n = static_cast<int>(theta.rows());
        if (n != sdr.size() + 1 || theta.cols() != n)
            throw DomainError("randomization: Theta size does not match the SDR data");
        if (count < 1)
            throw DomainError("randomization: need at least one candidate");
        const Eigen::SelfAdjointEigenSolver<CMat> eig(hermitian_part(theta));
        if (eig.info() != Eigen::Success)
            throw NumericError("randomization: eigendecomposition failed");
        const RVec lam = eig.eigenvalues().cwiseMax(0.0);
        const CMat &vecs = eig.eigenvectors();
        const int M = n - 1;

        auto normalize = [&](const CVec &t) {
            CVec phi(M);
            const cx ref = t(M);
            for (int m = 0; m < M; ++m)
                phi(m) = std::polar(1.0, std::arg(t(m) / (std::abs(ref) > 0.0 ? ref : cx(1.0))));
            return phi;
        };

        RandomizationResult best;
        const double top = lam(n - 1);
        if (n == 1 || lam(n - 2) < 1e-8 * top)
        {
            best.phi = normalize(vecs.col(n - 1));
            best.objective = sdr.value(best.phi);
            best.rank_one = true;
            best.best_index = 0;
            return best;
        }
        const CMat factor = vecs * lam.cwiseSqrt().cast<cx>().asDiagonal();
        best.objective = -std::numeric_limits<double>::infinity();
        CVec v(n);
        for (int i = 0; i < count; ++i)
        {
            for (int m = 0; m < n; ++m)
                v(m) = rng.complex_normal();
            const CVec phi = normalize(factor * v);
            const double val = sdr.value(phi);
            if (val > best.objective)
            {
                best.objective = val;
                best.phi = phi;
                best.best_index = i;
            }
        }
        return best;
    }

    // ---- Algorithm loop -----------------------------------------------------

    BeamformerSet initial_beamformers(const std::vector<CMat> &hbars, int num_bs, int tx_antennas, int streams,
                                      double max_power)
    {
        const int K = static_cast<int>(hbars.size());
        BeamformerSet w(num_bs, K, tx_antennas, streams);
        for (int k = 0; k < K; ++k)
            for (int n = 0; n < num_bs; ++n)
                w.block(n, k) = matched_filter(hbars[static_cast<std::size_t>(k)].middleCols(n * tx_antennas, tx_antennas),
                                               streams, max_power / K);
        return w;
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

        MultiUserResult run_multi(const SystemConfig &config, const ChannelSet &channels, PhaseProfile phase,
                                  bool optimize_phase)
        {
            config.validate();
            channels.check_consistent();
            if (phase.size() != channels.num_irs_elements)
                throw DomainError("phase profile length does not match M");
            const int N = channels.num_bs, K = channels.num_users, Nt = channels.tx_antennas;
            const int d = config.streams;
            const double P = config.max_power;
            const double nan = std::numeric_limits<double>::quiet_NaN();
            const std::vector<CMat> noise(static_cast<std::size_t>(K),
                                          noise_covariance(channels.rx_antennas, config.noise_power));
            const Rng rand_root = Rng(config.rng_seed).split("randomization");

            std::vector<CMat> hbars = effective_channels(channels, phase);
            BeamformerSet w = initial_beamformers(hbars, N, Nt, d, P);

            MultiUserResult res;
            double rate = min_rate(hbars, w, noise);
            res.trajectory.push_back({0, rate, nan, nan, nan, false, powers_of(w)});

            for (int it = 1; it <= config.max_outer_iterations; ++it)
            {
                MultiUserRecord rec;
                rec.iteration = it;
                rec.sdp_bound = rec.randomized = nan;
                const MseState mse = update_mse_state(hbars, w, noise);

                SocpBeamformingResult sb;
                try
                {
                    sb = solve_beamforming_socp(hbars, mse, noise, P, w);
                }
                catch (const NumericError &e)
                {
                    throw NumericError("iteration " + std::to_string(it) + ": " + e.what());
                }
                const BeamformingSocp current = build_socp_problem(hbars, mse, noise, P, N, Nt);
                const double old_value = current.value(w);
                if (sb.objective >= old_value)
                {
                    w = std::move(sb.w);
                    rec.socp_rate = sb.objective;
                }
                else
                    rec.socp_rate = old_value;

                if (optimize_phase && channels.num_irs_elements > 0)
                {
                    const SdrData sdr = build_sdr_data(channels, w, mse, noise);
                    const ConicSolution sdp = solve_sdp(sdr.sdp());
                    if (sdp.status == ConicStatus::infeasible)
                        throw NumericError("iteration " + std::to_string(it) + ": phase sdp infeasible");
                    Rng rng = rand_root.split(static_cast<std::uint64_t>(it));
                    const RandomizationResult rr = gaussian_randomization(sdp.theta, sdr, config.randomization_count, rng);
                    rec.sdp_bound = sdp.objective;
                    rec.randomized = rr.objective;
                    rec.phase_accepted = rr.objective >= rec.socp_rate - 1e-9;
                    if (rec.phase_accepted)
                    {
                        phase = PhaseProfile::from_phasors(rr.phi);
                        hbars = effective_channels(channels, phase);
                    }
                }

                w.check_power(P, 1e-6 * P);
                const double next = min_rate(hbars, w, noise);
                if (next < rate - 1e-8)
                    throw InvariantViolation("iteration " + std::to_string(it) + ": max-min rate decreased from " +
                                             std::to_string(rate) + " to " + std::to_string(next));
                rec.objective = next;
                rec.bs_power = powers_of(w);
                res.trajectory.push_back(std::move(rec));
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

    MultiUserResult optimize_multi_user(const SystemConfig &config, const ChannelSet &channels,
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
        return run_multi(config, channels, std::move(phase), true);
    }

    MultiUserResult beamform_multi_user(const SystemConfig &config, const ChannelSet &channels,
                                        const PhaseProfile &phase)
    {
        return run_multi(config, channels, phase, false);
    }
}
