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

#ifndef IRSCOMP_MULTI_USER_HPP
#define IRSCOMP_MULTI_USER_HPP

#include "irscomp/conic.hpp"
#include "irscomp/metrics.hpp"
#include "irscomp/rng.hpp"
#include "irscomp/scenario.hpp"

#include <optional>
#include <vector>

namespace irscomp
{
    // Real variable vector of the beamforming SOCP: for n, for k, vec(W_{n,k}) column-major with
    // each complex entry as (re, im); the rate variable R last.
    struct SocpLayout
    {
        int num_bs = 0;
        int num_users = 0;
        int tx_antennas = 0;
        int streams = 0;

        int block_size() const { return 2 * tx_antennas * streams; }
        int offset(int n, int k) const { return (n * num_users + k) * block_size(); }
        int rate_index() const { return num_bs * num_users * block_size(); }
        int num_vars() const { return rate_index() + 1; }

        RVec pack(const BeamformerSet &w, double rate) const;
        BeamformerSet unpack(const RVec &x) const;
    };

    // eta_n = [vec W_{n,1}; ...; vec W_{n,K}];
    // omega_k = [vec(W_j^H Hbar_k^H U_k Q_k^{1/2} - delta_jk Q_k^{1/2})]_j;
    // rhs_k = ln det Q_k + d - Tr(Q_k U_k^H C_k U_k).
    struct SocpVectors
    {
        std::vector<CVec> eta;
        std::vector<CVec> omega;
        RVec rhs;
    };

    SocpVectors socp_vectors(const std::vector<CMat> &hbars, const BeamformerSet &w, const MseState &mse,
                             const std::vector<CMat> &noise_covs);

    struct BeamformingSocp
    {
        SocpProblem problem;
        SocpLayout layout;
        RVec rhs;
        std::vector<CMat> q_sqrt;
        std::vector<CMat> m; // Hbar_k^H U_k Q_k^{1/2}
        double rate_factor = 1.0;

        // R implied by beamformers w: min_k (rhs_k - ||omega_k||^2) / rate_factor.
        double value(const BeamformerSet &w) const;
    };

    // maximize R s.t. ||eta_n|| <= sqrt(P) and ||omega_k||^2 <= rhs_k - rate_factor R. Throws
    // NumericError when some Q_k is not positive definite.
    BeamformingSocp build_socp_problem(const std::vector<CMat> &hbars, const MseState &mse,
                                       const std::vector<CMat> &noise_covs, double max_power, int num_bs,
                                       int tx_antennas, double rate_factor = 1.0);

    struct SocpBeamformingResult
    {
        BeamformerSet w;
        double objective = 0.0; // R at w
        ConicSolution solution;
    };

    // Builds and solves; the start point is `start` scaled by 1/2 with R strictly inside.
    SocpBeamformingResult solve_beamforming_socp(const std::vector<CMat> &hbars, const MseState &mse,
                                                 const std::vector<CMat> &noise_covs, double max_power,
                                                 const BeamformerSet &start, double rate_factor = 1.0);

    // Phase-dependent pieces of every user's MSE trace; psi_k = [[A_k o E^T, z_k], [z_k^H, 0]].
    struct SdrData
    {
        std::vector<CMat> A;
        std::vector<CMat> B;
        std::vector<CMat> D;
        CMat E_check;
        std::vector<CMat> L1;              // per user, M x d
        std::vector<std::vector<CMat>> L2; // L2[k][j], N_r x d
        std::vector<cx> c1;
        std::vector<cx> c2;
        std::vector<CVec> z;
        std::vector<CMat> psi;
        RVec constants;

        int size() const { return E_check.rows(); } // M

        // min_k (const_k - phi_aug^H psi_k phi_aug), phi_aug = [phi; 1]; phi need not be unit modulus.
        double value(const CVec &phi) const;
        SdpProblem sdp() const;
    };

    SdrData build_sdr_data(const ChannelSet &channels, const BeamformerSet &w, const MseState &mse,
                           const std::vector<CMat> &noise_covs);

    struct RandomizationResult
    {
        CVec phi;               // unit modulus, length M
        double objective = 0.0; // SdrData::value(phi)
        bool rank_one = false;  // extracted from the principal eigenvector
        int best_index = -1;    // winning candidate (0 for the rank-one path)
    };

    // Candidates phi = exp(j arg(t_m / t_{M+1})) from t = U Sigma^{1/2} v, v ~ CN(0, I); the best by
    // value() wins, ties to the lowest index. A rank-one Theta (second eigenvalue below 1e-8 of the
    // first) uses the principal eigenvector instead.
    RandomizationResult gaussian_randomization(const CMat &theta, const SdrData &sdr, int count, Rng &rng);

    struct MultiUserRecord
    {
        int iteration = 0;
        double objective = 0.0;  // min_k rate in nats after the iteration
        double socp_rate = 0.0;  // R of the beamforming step
        double sdp_bound = 0.0;  // relaxation optimum (NaN when phases are fixed)
        double randomized = 0.0; // value of the chosen phases (NaN when phases are fixed)
        bool phase_accepted = false;
        std::vector<double> bs_power;
    };

    struct MultiUserResult
    {
        BeamformerSet w;
        PhaseProfile phase;
        std::vector<MultiUserRecord> trajectory;
        double rate = 0.0; // nats
        int iterations = 0;
        bool converged = false;
    };

    // ||W_{n,k}||_F^2 = P / K with each block a matched filter to Hbar_{n,k}.
    BeamformerSet initial_beamformers(const std::vector<CMat> &hbars, int num_bs, int tx_antennas, int streams,
                                      double max_power);

    // Alternating SOCP beamforming and SDR phase design with the non-decrease guard. Initial phases are
    // drawn from the config seed unless given.
    MultiUserResult optimize_multi_user(const SystemConfig &config, const ChannelSet &channels,
                                        const std::optional<PhaseProfile> &initial_phase = std::nullopt);

    // The same loop with phases held fixed (beamforming only).
    MultiUserResult beamform_multi_user(const SystemConfig &config, const ChannelSet &channels,
                                        const PhaseProfile &phase);
}

#endif
