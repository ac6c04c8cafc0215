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

#include "irscomp/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace irscomp
{
    BeamformerSet::BeamformerSet(int num_bs, int num_users, int tx_antennas, int streams)
        : num_bs_(num_bs), num_users_(num_users), tx_antennas_(tx_antennas), streams_(streams)
    {
        if (num_bs < 1 || num_users < 1 || tx_antennas < 1 || streams < 1)
            throw DomainError("BeamformerSet: dimensions must be positive");
        blocks_.assign(static_cast<std::size_t>(num_bs * num_users), CMat::Zero(tx_antennas, streams));
    }

    CMat BeamformerSet::stacked(int k) const
    {
        CMat w(num_bs_ * tx_antennas_, streams_);
        for (int n = 0; n < num_bs_; ++n)
            w.middleRows(n * tx_antennas_, tx_antennas_) = block(n, k);
        return w;
    }

    void BeamformerSet::set_stacked(int k, const CMat &w)
    {
        if (w.rows() != num_bs_ * tx_antennas_ || w.cols() != streams_)
            throw DomainError("BeamformerSet::set_stacked: shape mismatch");
        for (int n = 0; n < num_bs_; ++n)
            block(n, k) = w.middleRows(n * tx_antennas_, tx_antennas_);
    }

    double BeamformerSet::bs_power(int n) const
    {
        double p = 0.0;
        for (int k = 0; k < num_users_; ++k)
            p += block(n, k).squaredNorm();
        return p;
    }

    bool BeamformerSet::all_finite() const
    {
        for (const auto &b : blocks_)
            if (!b.allFinite())
                return false;
        return true;
    }

    void BeamformerSet::check_power(double max_power, double tolerance) const
    {
        if (!all_finite())
            throw InvariantViolation("beamformer has nonfinite entries");
        for (int n = 0; n < num_bs_; ++n)
            if (bs_power(n) > max_power + tolerance)
                throw InvariantViolation("BS " + std::to_string(n) + " power " + std::to_string(bs_power(n)) +
                                         " exceeds budget " + std::to_string(max_power));
    }

    void BeamformerSet::clip_power(double max_power)
    {
        for (int n = 0; n < num_bs_; ++n)
        {
            const double p = bs_power(n);
            if (p > max_power)
            {
                const double s = std::sqrt(max_power / p);
                for (int k = 0; k < num_users_; ++k)
                    block(n, k) *= s;
            }
        }
    }

    CMat effective_channel(const ChannelSet &channels, const PhaseProfile &phase, int k)
    {
        if (k < 0 || k >= channels.num_users)
            throw DomainError("effective_channel: user index out of range");
        if (phase.size() != channels.num_irs_elements)
            throw DomainError("effective_channel: phase profile length does not match M");
        const int Nt = channels.tx_antennas;
        CMat hbar(channels.rx_antennas, channels.num_bs * Nt);
        // H_r Phi is a column scaling of H_r.
        const CMat hr_phi = channels.irs_user(k) * phase.phi().asDiagonal();
        for (int n = 0; n < channels.num_bs; ++n)
        {
            const CMat &h = channels.direct(n, k);
            if (h.rows() != channels.rx_antennas || h.cols() != Nt)
                throw DomainError("effective_channel: direct link shape mismatch");
            hbar.middleCols(n * Nt, Nt) = h + hr_phi * channels.bs_irs(n);
        }
        return hbar;
    }

    std::vector<CMat> effective_channels(const ChannelSet &channels, const PhaseProfile &phase)
    {
        std::vector<CMat> out;
        out.reserve(static_cast<std::size_t>(channels.num_users));
        for (int k = 0; k < channels.num_users; ++k)
            out.push_back(effective_channel(channels, phase, k));
        return out;
    }

    namespace
    {
        void check_shapes(const CMat &hbar, const BeamformerSet &w, int k, const CMat &noise_cov)
        {
            if (k < 0 || k >= w.num_users())
                throw DomainError("user index out of range");
            if (hbar.cols() != w.num_bs() * w.tx_antennas())
                throw DomainError("effective channel width does not match N N_t");
            if (noise_cov.rows() != hbar.rows() || noise_cov.cols() != hbar.rows())
                throw DomainError("noise covariance shape mismatch");
            if (!hbar.allFinite() || !w.all_finite() || !noise_cov.allFinite())
                throw NumericError("nonfinite input");
        }

        CMat interference_plus_noise(const CMat &hbar, const BeamformerSet &w, int k, const CMat &noise_cov)
        {
            CMat f = noise_cov;
            for (int j = 0; j < w.num_users(); ++j)
            {
                if (j == k)
                    continue;
                const CMat hw = hbar * w.stacked(j);
                f.noalias() += hw * hw.adjoint();
            }
            return hermitian_part(f);
        }
    }

    CMat noise_covariance(int rx_antennas, double sigma2)
    {
        if (!(sigma2 > 0.0))
            throw DomainError("noise power must be positive");
        return sigma2 * CMat::Identity(rx_antennas, rx_antennas);
    }

    CMat receive_covariance(const CMat &hbar, const BeamformerSet &w, const CMat &noise_cov)
    {
        CMat j = noise_cov;
        for (int u = 0; u < w.num_users(); ++u)
        {
            const CMat hw = hbar * w.stacked(u);
            j.noalias() += hw * hw.adjoint();
        }
        return hermitian_part(j);
    }

    double user_rate(const CMat &hbar, const BeamformerSet &w, int k, const CMat &noise_cov)
    {
        check_shapes(hbar, w, k, noise_cov);
        const CMat f = interference_plus_noise(hbar, w, k, noise_cov);
        Eigen::LLT<CMat> llt(f);
        if (llt.info() != Eigen::Success)
            throw NumericError("user_rate: interference-plus-noise covariance is not positive definite");
        // ln det(I + X^H X) with X = L^{-1} H W_k equals the stated determinant and is >= 0 by construction.
        const CMat x = llt.matrixL().solve(hbar * w.stacked(k));
        const CMat g = CMat::Identity(x.cols(), x.cols()) + x.adjoint() * x;
        return log_det_hpd(hermitian_part(g));
    }

    double user_rate(const CMat &hbar, const BeamformerSet &w, int k, double sigma2)
    {
        return user_rate(hbar, w, k, noise_covariance(static_cast<int>(hbar.rows()), sigma2));
    }

    CMat mse_matrix(const CMat &hbar, const BeamformerSet &w, int k, const CMat &u, const CMat &noise_cov)
    {
        check_shapes(hbar, w, k, noise_cov);
        if (u.rows() != hbar.rows() || u.cols() != w.streams())
            throw DomainError("mse_matrix: receiver shape mismatch");
        const CMat j = receive_covariance(hbar, w, noise_cov);
        const CMat cross = u.adjoint() * hbar * w.stacked(k);
        CMat e = u.adjoint() * j * u - cross - cross.adjoint();
        e += CMat::Identity(w.streams(), w.streams());
        return hermitian_part(e);
    }

    CMat mse_matrix(const CMat &hbar, const BeamformerSet &w, int k, const CMat &u, double sigma2)
    {
        return mse_matrix(hbar, w, k, u, noise_covariance(static_cast<int>(hbar.rows()), sigma2));
    }

    CMat mmse_receiver(const CMat &hbar, const BeamformerSet &w, int k, const CMat &noise_cov)
    {
        check_shapes(hbar, w, k, noise_cov);
        const CMat j = receive_covariance(hbar, w, noise_cov);
        Eigen::LLT<CMat> llt(j);
        if (llt.info() != Eigen::Success)
            throw NumericError("mmse_receiver: receive covariance is not positive definite");
        return llt.solve(hbar * w.stacked(k));
    }

    CMat mmse_receiver(const CMat &hbar, const BeamformerSet &w, int k, double sigma2)
    {
        return mmse_receiver(hbar, w, k, noise_covariance(static_cast<int>(hbar.rows()), sigma2));
    }

    CMat optimal_weight(const CMat &e)
    {
        if (e.rows() != e.cols())
            throw DomainError("optimal_weight: E must be square");
        return hermitian_inverse(hermitian_part(e));
    }

    double mse_objective(const CMat &q, const CMat &e)
    {
        if (q.rows() != q.cols() || e.rows() != q.rows() || e.cols() != q.cols())
            throw DomainError("mse_objective: shape mismatch");
        return log_det_hpd(hermitian_part(q)) - (q * e).trace().real() + static_cast<double>(q.rows());
    }

    MseState update_mse_state(const std::vector<CMat> &hbars, const BeamformerSet &w,
                              const std::vector<CMat> &noise_covs)
    {
        if (static_cast<int>(hbars.size()) != w.num_users() || noise_covs.size() != hbars.size())
            throw DomainError("update_mse_state: one channel and noise covariance per user required");
        MseState s;
        for (int k = 0; k < w.num_users(); ++k)
        {
            const auto uk = static_cast<std::size_t>(k);
            CMat u = mmse_receiver(hbars[uk], w, k, noise_covs[uk]);
            const CMat e = mse_matrix(hbars[uk], w, k, u, noise_covs[uk]);
            s.weights.push_back(optimal_weight(e));
            s.receivers.push_back(std::move(u));
        }
        return s;
    }

    double min_rate(const std::vector<CMat> &hbars, const BeamformerSet &w, const std::vector<CMat> &noise_covs)
    {
        if (static_cast<int>(hbars.size()) != w.num_users() || noise_covs.size() != hbars.size())
            throw DomainError("min_rate: one channel and noise covariance per user required");
        double r = std::numeric_limits<double>::infinity();
        for (int k = 0; k < w.num_users(); ++k)
            r = std::min(r, user_rate(hbars[static_cast<std::size_t>(k)], w, k, noise_covs[static_cast<std::size_t>(k)]));
        return r;
    }
}
