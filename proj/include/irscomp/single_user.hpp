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

#ifndef IRSCOMP_SINGLE_USER_HPP
#define IRSCOMP_SINGLE_USER_HPP

#include "irscomp/metrics.hpp"
#include "irscomp/scenario.hpp"

#include <optional>
#include <vector>

namespace irscomp
{
    struct DualState
    {
        RVec mu;                 // one multiplier per BS, >= 0
        double step_scale = 0.0; // c_pi; <= 0 selects the adaptive per-BS step
        int iteration = 0;
    };

    // W(mu) = J1^{-1} J2 with J1 = H^H U Q U^H H + blockdiag(mu_n I), J2 = H^H U Q, where H is the
    // effective channel [H_bar_1, ..., H_bar_N]. Returns the stacked (N N_t) x d matrix.
    // Throws NumericError ("degenerate dual") when J1 is numerically singular.
    CMat beamformer_closed_form(const RVec &mu, const CMat &hbar, const CMat &u, const CMat &q, int num_bs);
    CMat beamformer_closed_form(const DualState &dual, const ChannelSet &channels, const PhaseProfile &phase,
                                const CMat &u, const CMat &q);

    // Tr(Q U^H H W W^H H^H U) - 2 Re Tr(Q U^H H W): the part of Tr(Q E) that depends on W (and phi).
    double beamforming_objective(const CMat &hbar, const CMat &u, const CMat &q, const CMat &w);

    struct SubgradientResult
    {
        CMat w;                  // stacked, every BS within the power budget
        RVec mu;                 // multipliers of the best dual iterate
        double primal_objective = 0.0;
        double dual_objective = 0.0;
        int iterations = 0;
        bool converged = false;  // certified relative gap reached
    };

    // Minimizes beamforming_objective subject to ||W_n||_F^2 <= max_power by projected ascent on the
    // Lagrange dual, mu_n <- [mu_n + pi_n (||W_n||^2 - P)]^+. With config.subgradient_step > 0 the step
    // is c_pi / sqrt(t); otherwise a projected Newton step on the (smooth, concave) dual with
    // backtracking. Stops on a certified duality gap; the returned primal is the best feasible
    // (per-BS scaled) iterate.
    SubgradientResult dual_subgradient(const CMat &hbar, const CMat &u, const CMat &q, int num_bs, double max_power,
                                       const SystemConfig &config);

    // f(phi) = phi^H S phi + 2 Re(z^H phi), S = A o E_tilde^T.
    struct QuadraticPhaseForm
    {
        CMat A;
        CMat E_tilde;
        CMat D;
        CMat B;
        CVec z;
        cx c1{0.0, 0.0};
        cx c2{0.0, 0.0};
        CMat S;
        double lambda_max = 0.0;

        // Builds a form from S and z alone (A = S, E_tilde = all-ones, D = diag(z), B = 0).
        static QuadraticPhaseForm from_quadratic(const CMat &s, const CVec &z);

        int size() const { return static_cast<int>(z.size()); }
        double f(const CVec &phi) const;
        // f + c2 - 2 Re c1: the phase-dependent part of Tr(Q E) for fixed W, U, Q.
        double objective(const CVec &phi) const;
        // Majorizer g(phi | phi_r) >= f(phi), equal at phi = phi_r.
        double surrogate(const CVec &phi, const CVec &phi_r) const;
    };

    // Single user (user 0) phase form at beamformers w and receiver/weight (u, q).
    QuadraticPhaseForm build_phase_form(const ChannelSet &channels, const BeamformerSet &w, const CMat &u,
                                        const CMat &q);

    // Exact minimizer of the surrogate over unit-modulus vectors: phi_m = -q_m / |q_m| with
    // q = z - (lambda_max I - S) phi_r. Elements with q_m = 0 keep their phase.
    CVec mm_phase_step(const QuadraticPhaseForm &form, const CVec &phi_r);

    struct MmResult
    {
        CVec phi;
        std::vector<double> f_values; // f at phi_0, phi_1, ...
        int iterations = 0;
        bool converged = false;
    };

    MmResult mm_optimize_phase(const QuadraticPhaseForm &form, const CVec &phi0, const SystemConfig &config);

    struct OuterRecord
    {
        int iteration = 0;
        double objective = 0.0; // max-min rate in nats
        std::vector<double> bs_power;
        bool update_accepted = true;
    };

    struct SolveResult
    {
        BeamformerSet w;
        PhaseProfile phase;
        std::vector<OuterRecord> trajectory;
        double rate = 0.0; // nats
        int iterations = 0;
        bool converged = false;
    };

    // W_n = H_bar_n^H V_d scaled to ||W_n||_F^2 = power, V_d the leading d left singular vectors of H_bar_n
    // (summed over users when K > 1 is handled by the caller).
    CMat matched_filter(const CMat &hbar_block, int streams, double power);

    // Alternating optimization of beamformers and phases for K = 1. Initial phases are drawn from the
    // config seed unless given.
    SolveResult optimize_single_user(const SystemConfig &config, const ChannelSet &channels,
                                     const std::optional<PhaseProfile> &initial_phase = std::nullopt);

    // Same loop with the phases held fixed.
    SolveResult beamform_single_user(const SystemConfig &config, const ChannelSet &channels, const PhaseProfile &phase);
}

#endif
