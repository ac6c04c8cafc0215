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

#include "irscomp/rng.hpp"
#include "irscomp/types.hpp"

#include <cmath>

namespace irscomp
{
    double log_det_hpd(const CMat &a)
    {
        Eigen::LLT<CMat> llt(hermitian_part(a));
        if (llt.info() != Eigen::Success)
            throw NumericError("log_det_hpd: matrix is not positive definite");
        double acc = 0.0;
        const CMat &l = llt.matrixLLT();
        for (Eigen::Index i = 0; i < l.rows(); ++i)
            acc += std::log(l(i, i).real());
        return 2.0 * acc;
    }

    CMat hermitian_sqrt(const CMat &a)
    {
        Eigen::SelfAdjointEigenSolver<CMat> es(hermitian_part(a));
        if (es.info() != Eigen::Success)
            throw NumericError("hermitian_sqrt: eigendecomposition failed");
        RVec root = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
        CMat v = es.eigenvectors();
        return hermitian_part(v * root.asDiagonal() * v.adjoint());
    }

    CMat hermitian_inverse(const CMat &a)
    {
        Eigen::LLT<CMat> llt(hermitian_part(a));
        if (llt.info() != Eigen::Success)
            throw NumericError("hermitian_inverse: matrix is not positive definite");
        CMat inv = llt.solve(CMat::Identity(a.rows(), a.cols()));
        return hermitian_part(inv);
    }

    double Rng::normal()
    {
        if (has_spare_)
        {
            has_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        while (u1 <= 0.0)
            u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        spare_ = r * std::sin(kTwoPi * u2);
        has_spare_ = true;
        return r * std::cos(kTwoPi * u2);
    }

    std::complex<double> Rng::complex_normal()
    {
        const double re = normal();
        const double im = normal();
        return {re * std::numbers::sqrt2 / 2.0, im * std::numbers::sqrt2 / 2.0};
    }
}
