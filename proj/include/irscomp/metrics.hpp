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

#ifndef IRSCOMP_METRICS_HPP
#define IRSCOMP_METRICS_HPP

#include "irscomp/scenario.hpp"
#include "irscomp/types.hpp"

#include <vector>

namespace irscomp
{
    // Per-BS per-user precoders W_{n,k} (N_t x d).
    class BeamformerSet
    {
    public:
        BeamformerSet() = default;
        BeamformerSet(int num_bs, int num_users, int tx_antennas, int streams);

        int num_bs() const { return num_bs_; }
        int num_users() const { return num_users_; }
        int tx_antennas() const { return tx_antennas_; }
        int streams() const { return streams_; }

        const CMat &block(int n, int k) const { return blocks_[index(n, k)]; }
        CMat &block(int n, int k) { return blocks_[index(n, k)]; }

        // W_k = [W_{1,k}; ...; W_{N,k}], (N N_t) x d.
        CMat stacked(int k) const;
        void set_stacked(int k, const CMat &w);

        // sum_k ||W_{n,k}||_F^2
        double bs_power(int n) const;
        bool all_finite() const;

        // Throws InvariantViolation when some BS exceeds max_power + tolerance or an entry is nonfinite.
        void check_power(double max_power, double tolerance = 1e-9) const;

        // Scales each BS's blocks down (never up) so its power is at most max_power.
        void clip_power(double max_power);

    private:
        std::size_t index(int n, int k) const { return static_cast<std::size_t>(n * num_users_ + k); }

        int num_bs_ = 0;
        int num_users_ = 0;
        int tx_antennas_ = 0;
        int streams_ = 0;
        std::vector<CMat> blocks_;
    };

    struct MseState
    {
        std::vector<CMat> receivers; // U_k, N_r x d
        std::vector<CMat> weights;   // Q_k, d x d Hermitian PD
    };

    // H_bar_k = [H_{1,k} + H_{r,k} Phi G_{1,r}, ..., H_{N,k} + H_{r,k} Phi G_{N,r}].
    CMat effective_channel(const ChannelSet &channels, const PhaseProfile &phase, int k);
    std::vector<CMat> effective_channels(const ChannelSet &channels, const PhaseProfile &phase);

    // Covariance of everything user k receives: H_bar (sum_j W_j W_j^H) H_bar^H + C.
    CMat receive_covariance(const CMat &hbar, const BeamformerSet &w, const CMat &noise_cov);

    // ln det(I + H W_k W_k^H H^H F^{-1}), F the interference-plus-noise covariance. The
    // sigma2 overloads use C = sigma2 I.
    double user_rate(const CMat &hbar, const BeamformerSet &w, int k, const CMat &noise_cov);
    double user_rate(const CMat &hbar, const BeamformerSet &w, int k, double sigma2);

    CMat mse_matrix(const CMat &hbar, const BeamformerSet &w, int k, const CMat &u, const CMat &noise_cov);
    CMat mse_matrix(const CMat &hbar, const BeamformerSet &w, int k, const CMat &u, double sigma2);

    CMat mmse_receiver(const CMat &hbar, const BeamformerSet &w, int k, const CMat &noise_cov);
    CMat mmse_receiver(const CMat &hbar, const BeamformerSet &w, int k, double sigma2);

    // E^{-1}; throws NumericError when E is not positive definite.
    CMat optimal_weight(const CMat &e);

    // ln det Q - Tr(Q E) + d
    double mse_objective(const CMat &q, const CMat &e);

    CMat noise_covariance(int rx_antennas, double sigma2);

    // Closed-form U, Q for every user given effective channels and noise covariances.
    MseState update_mse_state(const std::vector<CMat> &hbars, const BeamformerSet &w,
                              const std::vector<CMat> &noise_covs);

    // min_k user_rate
    double min_rate(const std::vector<CMat> &hbars, const BeamformerSet &w, const std::vector<CMat> &noise_covs);
}

#endif
