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

#include "irscomp/relay.hpp"

#include "irscomp/multi_user.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace irscomp
{
    CMat stacked_bs_relay(const ChannelSet &channels)
    {
        CMat g(channels.num_irs_elements, channels.num_bs * channels.tx_antennas);
        for (int n = 0; n < channels.num_bs; ++n)
            g.middleCols(n * channels.tx_antennas, channels.tx_antennas) = channels.bs_irs(n);
        return g;
    }

    namespace
    {
        void check_relay(const ChannelSet &channels, const CMat &v)
        {
            const int M = channels.num_irs_elements;
            if (v.rows() != M || v.cols() != M)
                throw DomainError("relay matrix must be M x M");
        }
    }

    CMat relay_channel(const ChannelSet &channels, const CMat &v, int k)
    {
        check_relay(channels, v);
        return channels.irs_user(k) * v * stacked_bs_relay(channels);
    }

    CMat relay_noise_covariance(const ChannelSet &channels, const CMat &v, int k, double sigma2)
    {
        check_relay(channels, v);
        const CMat x = channels.irs_user(k) * v;
        CMat c = sigma2 * (x * x.adjoint());
        c.diagonal().array() += sigma2;
        return hermitian_part(c);
    }

    double af_rate(const ChannelSet &channels, const BeamformerSet &w, const CMat &v, double sigma2, int k)
    {
        return 0.5 * user_rate(relay_channel(channels, v, k), w, k, relay_noise_covariance(channels, v, k, sigma2));
    }

    namespace
    {
        // Cached per-user quantities for cheap single-entry updates of V.
        struct SweepState
        {
            std::vector<CMat> x;                // H_{r,k} V, N_r x M
            std::vector<std::vector<CMat>> sig; // T_k W_j, N_r x d
            std::vector<CMat> cov;              // relay + receiver noise covariance
        };

        double rate_from(const std::vector<CMat> &sig, const CMat &cov, int k)
        {
            CMat all = cov;
            for (const auto &s : sig)
                all.noalias() += s * s.adjoint();
            const CMat &own = sig[static_cast<std::size_t>(k)];
            const CMat rest = all - own * own.adjoint();
            return 0.5 * (log_det_hpd(hermitian_part(all)) - log_det_hpd(hermitian_part(rest)));
        }

        double min_af_rate(const ChannelSet &channels, const BeamformerSet &w, const CMat &v, double sigma2)
        {
            double r = std::numeric_limits<double>::infinity();
            for (int k = 0; k < channels.num_users; ++k)
                r = std::min(r, af_rate(channels, w, v, sigma2, k));
            return r;
        }

        // One row-major pass over V; returns the number of entries changed.
        int sweep(const ChannelSet &channels, const BeamformerSet &w, CMat &v, double sigma2, int grid, double &current)
        {
            const int M = channels.num_irs_elements, K = channels.num_users;
            const CMat g = stacked_bs_relay(channels);
            std::vector<CMat> gw; // G_r W_j, M x d
            for (int j = 0; j < K; ++j)
                gw.push_back(g * w.stacked(j));

            SweepState st;
            for (int k = 0; k < K; ++k)
            {
                st.x.push_back(channels.irs_user(k) * v);
                std::vector<CMat> s;
                for (int j = 0; j < K; ++j)
                    s.push_back(st.x.back() * gw[static_cast<std::size_t>(j)]);
                st.sig.push_back(std::move(s));
                CMat c = sigma2 * (st.x.back() * st.x.back().adjoint());
                c.diagonal().array() += sigma2;
                st.cov.push_back(hermitian_part(c));
            }

            std::vector<cx> levels;
            for (int i = 0; i < grid; ++i)
                levels.push_back(std::polar(1.0, kTwoPi * i / grid));

            int changed = 0;
            std::vector<CMat> trial_sig(static_cast<std::size_t>(K));
            for (int row = 0; row < M; ++row)
                for (int col = 0; col < M; ++col)
                {
                    int best = -1;
                    double best_val = current;
                    for (int i = 0; i < grid; ++i)
                    {
                        const cx delta = levels[static_cast<std::size_t>(i)] - v(row, col);
                        if (std::abs(delta) == 0.0)
                            continue;
                        double val = std::numeric_limits<double>::infinity();
                        for (int k = 0; k < K && val > best_val; ++k)
                        {
                            const auto kk = static_cast<std::size_t>(k);
                            const CVec h = channels.irs_user(k).col(row);
                            const CVec xc = st.x[kk].col(col);
                            for (int j = 0; j < K; ++j)
                                trial_sig[static_cast<std::size_t>(j)] =
                                    st.sig[kk][static_cast<std::size_t>(j)] + delta * h * gw[static_cast<std::size_t>(j)].row(col);
                            const CMat hx = h * xc.adjoint();
                            CMat cov = st.cov[kk] + sigma2 * (delta * hx + std::conj(delta) * hx.adjoint() +
                                                              std::norm(delta) * (h * h.adjoint()));
                            val = std::min(val, rate_from(trial_sig, cov, k));
                        }
                        if (val > best_val)
                        {
                            best_val = val;
                            best = i;
                        }
                    }
                    if (best < 0)
                        continue;
                    const cx delta = levels[static_cast<std::size_t>(best)] - v(row, col);
                    for (int k = 0; k < K; ++k)
                    {
                        const auto kk = static_cast<std::size_t>(k);
                        const CVec h = channels.irs_user(k).col(row);
                        const CVec xc = st.x[kk].col(col);
                        for (int j = 0; j < K; ++j)
                            st.sig[kk][static_cast<std::size_t>(j)] += delta * h * gw[static_cast<std::size_t>(j)].row(col);
                        const CMat hx = h * xc.adjoint();
                        st.cov[kk] = hermitian_part(st.cov[kk] + sigma2 * (delta * hx + std::conj(delta) * hx.adjoint() +
                                                                           std::norm(delta) * (h * h.adjoint())));
                        st.x[kk].col(col) += delta * h;
                    }
                    v(row, col) = levels[static_cast<std::size_t>(best)];
                    current = best_val;
                    ++changed;
                }
            return changed;
        }
    }

    RelayResult optimize_af(const SystemConfig &config, const ChannelSet &channels)
    {
        config.validate();
        channels.check_consistent();
        const int N = channels.num_bs, K = channels.num_users, Nt = channels.tx_antennas, M = channels.num_irs_elements;
        const double P = config.max_power, s2 = config.noise_power;
        if (config.relay_grid_points < 2)
            throw DomainError("relay grid needs at least two points");

        RelayResult res;
        res.v.resize(M, M);
        {
            Rng rng = Rng(config.rng_seed).split("relay-init");
            for (int j = 0; j < M; ++j)
                for (int i = 0; i < M; ++i)
                    res.v(i, j) = std::polar(1.0, rng.uniform(0.0, kTwoPi));
        }

        auto channels_of = [&](const CMat &v) {
            std::vector<CMat> h, c;
            for (int k = 0; k < K; ++k)
            {
                h.push_back(relay_channel(channels, v, k));
                c.push_back(relay_noise_covariance(channels, v, k, s2));
            }
            return std::make_pair(h, c);
        };

        auto [hbars, covs] = channels_of(res.v);
        BeamformerSet w = initial_beamformers(hbars, N, Nt, config.streams, P);
        double rate = min_af_rate(channels, w, res.v, s2);
        res.trajectory.push_back({0, rate, std::numeric_limits<double>::quiet_NaN(), 0});

        for (int it = 1; it <= config.max_outer_iterations; ++it)
        {
            RelayRecord rec;
            rec.iteration = it;
            const MseState mse = update_mse_state(hbars, w, covs);
            SocpBeamformingResult sb;
            try
            {
                sb = solve_beamforming_socp(hbars, mse, covs, P, w, 2.0);
            }
            catch (const NumericError &e)
            {
                throw NumericError("relay iteration " + std::to_string(it) + ": " + e.what());
            }
            const double old_value = build_socp_problem(hbars, mse, covs, P, N, Nt, 2.0).value(w);
            if (sb.objective >= old_value)
            {
                w = std::move(sb.w);
                rec.socp_rate = sb.objective;
            }
            else
                rec.socp_rate = old_value;

            double current = min_af_rate(channels, w, res.v, s2);
            rec.entries_changed = sweep(channels, w, res.v, s2, config.relay_grid_points, current);
            std::tie(hbars, covs) = channels_of(res.v);

            w.check_power(P, 1e-6 * P);
            const double next = min_af_rate(channels, w, res.v, s2);
            if (next < rate - 1e-8)
                throw InvariantViolation("relay iteration " + std::to_string(it) + ": max-min rate decreased from " +
                                         std::to_string(rate) + " to " + std::to_string(next));
            rec.objective = next;
            res.trajectory.push_back(rec);
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
        res.rate = rate;
        return res;
    }
}
