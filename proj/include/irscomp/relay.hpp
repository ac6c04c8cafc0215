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

#ifndef IRSCOMP_RELAY_HPP
#define IRSCOMP_RELAY_HPP

#include "irscomp/metrics.hpp"
#include "irscomp/scenario.hpp"

#include <vector>

namespace irscomp
{
    // G_r = [G_{1,r}, ..., G_{N,r}], M x (N N_t).
    CMat stacked_bs_relay(const ChannelSet &channels);

    // H_{r,k} V G_r, the two-hop channel of user k (direct links ignored).
    CMat relay_channel(const ChannelSet &channels, const CMat &v, int k);

    // sigma2 (H_{r,k} V V^H H_{r,k}^H + I): forwarded relay noise plus receiver noise.
    CMat relay_noise_covariance(const ChannelSet &channels, const CMat &v, int k, double sigma2);

    // (1/2) ln det(I + T W_k W_k^H T^H F^{-1}), T = H_{r,k} V G_r, F = T (sum_{j != k} W_j W_j^H) T^H + C_k.
    double af_rate(const ChannelSet &channels, const BeamformerSet &w, const CMat &v, double sigma2, int k);

    struct RelayRecord
    {
        int iteration = 0;
        double objective = 0.0; // min_k af_rate after the iteration, nats
        double socp_rate = 0.0;
        int entries_changed = 0; // V entries moved by the sweep
    };

    struct RelayResult
    {
        BeamformerSet w;
        CMat v; // M x M, unit-modulus entries
        std::vector<RelayRecord> trajectory;
        double rate = 0.0;
        int iterations = 0;
        bool converged = false;
    };

    // Alternates SOCP beamforming (rate factor 1/2, relay noise in the MSE) with a row-major sweep
    // over V that sets each entry to the best of config.relay_grid_points phases when that raises the
    // max-min rate. V starts from seeded random phases.
    RelayResult optimize_af(const SystemConfig &config, const ChannelSet &channels);
}

#endif
