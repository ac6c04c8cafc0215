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

#ifndef IRSCOMP_CONIC_HPP
#define IRSCOMP_CONIC_HPP

#include "irscomp/types.hpp"

#include <optional>
#include <string>
#include <vector>

namespace irscomp
{
    // u = a x + b, s = c^T x + d.
    //   standard: ||u|| <= s
    //   rotated:  ||u||^2 <= s
    struct ConeConstraint
    {
        enum class Kind
        {
            standard,
            rotated
        };
        Kind kind = Kind::standard;
        RMat a;
        RVec b;
        RVec c;
        double d = 0.0;

        // s - ||u|| (standard) or s - ||u||^2 (rotated) at x; positive inside.
        double margin(const RVec &x) const;
    };

    // maximize x[objective_index] subject to the cones.
    struct SocpProblem
    {
        int num_vars = 0;
        int objective_index = 0;
        std::vector<ConeConstraint> cones;

        void validate() const; // DomainError on inconsistent shapes
    };

    // maximize R subject to Tr(psi_k Theta) + R <= constants_k, Theta_mm = 1, Theta PSD.
    struct SdpProblem
    {
        std::vector<CMat> psi;
        RVec constants;

        int size() const { return psi.empty() ? 0 : static_cast<int>(psi.front().rows()); }
        void validate() const;
    };

    enum class ConicStatus
    {
        optimal,
        max_iterations,
        infeasible
    };

    std::string to_string(ConicStatus s);

    struct ConicSolution
    {
        ConicStatus status = ConicStatus::infeasible;
        RVec x;       // SOCP variables
        CMat theta;   // SDP matrix
        double objective = 0.0;
        double primal_residual = 0.0; // worst cone / diagonal / PSD violation
        double gap = 0.0;             // duality-gap estimate
        int iterations = 0;           // Newton steps
    };

    struct ConicTolerances
    {
        double initial_mu = 1.0;
        double mu_factor = 0.1;
        double newton_tolerance = 1e-8; // on half the squared Newton decrement
        double gap_tolerance = 1e-9;    // target, relative to (1 + |objective|)
        double accept_gap = 1e-6;       // an SDP stalled in rounding above the target is still optimal below this
        double alpha = 0.25;
        double beta = 0.5;
        int max_newton_iterations = 400; // total
    };

    // Log-barrier path following. A strictly feasible start may be given; otherwise a phase-one
    // problem finds one, and the status is infeasible if none exists.
    ConicSolution solve_socp(const SocpProblem &p, const ConicTolerances &tol = {},
                             const std::optional<RVec> &start = std::nullopt);

    // Solved through its Lagrange dual (K + n variables); Theta is recovered from the barrier
    // central path and rescaled to unit diagonal, objective is the primal value at that Theta.
    ConicSolution solve_sdp(const SdpProblem &p, const ConicTolerances &tol = {});

    // JSON exchange (17 significant digits).
    std::string to_json(const SocpProblem &p);
    std::string to_json(const SdpProblem &p);
    SocpProblem socp_from_json(const std::string &text);
    SdpProblem sdp_from_json(const std::string &text);
    std::string to_json(const ConicSolution &s);
    ConicSolution solution_from_json(const std::string &text);

    // Thrown when the external solver is missing or fails.
    class AdapterError : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    // Runs `command <problem.json> <solution.json>` through the shell.
    class ExternalSolver
    {
    public:
        explicit ExternalSolver(std::string command) : command_(std::move(command)) {}

        ConicSolution solve(const SocpProblem &p) const;
        ConicSolution solve(const SdpProblem &p) const;

        const std::string &command() const { return command_; }

    private:
        ConicSolution run(const std::string &problem_json) const;
        std::string command_;
    };
}

#endif
