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

#ifndef IRSCOMP_TYPES_HPP
#define IRSCOMP_TYPES_HPP

#include <Eigen/Dense>

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace irscomp
{
    using cx = std::complex<double>;
    using CMat = Eigen::MatrixXcd;
    using CVec = Eigen::VectorXcd;
    using RMat = Eigen::MatrixXd;
    using RVec = Eigen::VectorXd;

    inline constexpr double kPi = std::numbers::pi;
    inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
    inline constexpr cx kJ{0.0, 1.0};

    // Invalid argument or violated precondition (bad dimensions, nonpositive distance, ...).
    class DomainError : public std::invalid_argument
    {
    public:
        using std::invalid_argument::invalid_argument;
    };

    // Floating-point breakdown: singular matrix, nonfinite value, failed factorization.
    class NumericError : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    // A runtime check of an algorithmic guarantee (monotonicity, feasibility) failed.
    class InvariantViolation : public std::logic_error
    {
    public:
        using std::logic_error::logic_error;
    };

    // Hermitian part (A + A^H) / 2.
    inline CMat hermitian_part(const CMat &a)
    {
        return 0.5 * (a + a.adjoint());
    }

    // Natural-log determinant of a Hermitian positive definite matrix.
    double log_det_hpd(const CMat &a);

    // Principal (Hermitian PSD) square root via eigendecomposition; negative eigenvalues are clipped.
    CMat hermitian_sqrt(const CMat &a);

    // Inverse of a Hermitian positive definite matrix, symmetrized.
    CMat hermitian_inverse(const CMat &a);

    inline double nats_to_bits(double nats)
    {
        return nats / std::numbers::ln2;
    }

    inline double db_to_linear(double db)
    {
        return std::pow(10.0, db / 10.0);
    }

    inline double dbm_to_watts(double dbm)
    {
        return std::pow(10.0, (dbm - 30.0) / 10.0);
    }

    inline bool all_finite(const CMat &a)
    {
        return a.allFinite();
    }
}

#endif
