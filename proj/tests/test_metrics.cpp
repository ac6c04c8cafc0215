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

#include "doctest.h"
#include "test_util.hpp"

#include "irscomp/metrics.hpp"

#include <cmath>

using namespace irscomp;
using namespace testutil;

namespace
{
    ChannelSet scalar_channels(cx h, cx hr, cx g)
    {
        ChannelSet c;
        c.num_bs = c.num_users = c.num_irs_elements = c.tx_antennas = c.rx_antennas = 1;
        c.direct_links = {CMat::Constant(1, 1, h)};
        c.irs_user_links = {CMat::Constant(1, 1, hr)};
        c.bs_irs_links = {CMat::Constant(1, 1, g)};
        return c;
    }

    BeamformerSet scalar_w(int K, cx value)
    {
        BeamformerSet w(1, K, 1, 1);
        for (int k = 0; k < K; ++k)
            w.block(0, k)(0, 0) = value;
        return w;
    }

    // Independent evaluation: product of eigenvalues of I + S F^{-1} (a general, non-Hermitian matrix).
    double eig_rate(const CMat &hbar, const BeamformerSet &w, int k, double sigma2)
    {
        const int nr = static_cast<int>(hbar.rows());
        CMat f = sigma2 * CMat::Identity(nr, nr);
        for (int j = 0; j < w.num_users(); ++j)
            if (j != k)
                f += hbar * w.stacked(j) * w.stacked(j).adjoint() * hbar.adjoint();
        const CMat s = hbar * w.stacked(k) * w.stacked(k).adjoint() * hbar.adjoint();
        const CMat m = CMat::Identity(nr, nr) + s * f.inverse();
        Eigen::ComplexEigenSolver<CMat> es(m);
        cx acc = 0.0;
        for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
            acc += std::log(es.eigenvalues()(i));
        return acc.real();
    }
}

TEST_CASE("effective channel")
{
    const ChannelSet c = scalar_channels(1.0, 2.0, 3.0);
    CHECK(std::abs(effective_channel(c, PhaseProfile::zeros(1), 0)(0, 0) - cx(7.0)) < 1e-12);
    RVec pi(1);
    pi << kPi;
    CHECK(std::abs(effective_channel(c, PhaseProfile(pi), 0)(0, 0) - cx(-5.0)) < 1e-12);

    Rng rng(1);
    ChannelSet r = random_channels(2, 2, 5, 3, 2, rng);
    for (auto &h : r.irs_user_links)
        h.setZero();
    const CMat hbar = effective_channel(r, PhaseProfile::random(5, rng), 1);
    CHECK((hbar.leftCols(3) - r.direct(0, 1)).norm() == 0.0);
    CHECK((hbar.rightCols(3) - r.direct(1, 1)).norm() == 0.0);
    CHECK_THROWS_AS(effective_channel(r, PhaseProfile::zeros(4), 0), DomainError);
}

TEST_CASE("user rate scalar examples")
{
    const CMat one = CMat::Constant(1, 1, 1.0);
    CHECK(user_rate(one, scalar_w(1, 1.0), 0, 1.0) == doctest::Approx(std::log(2.0)).epsilon(1e-14));
    const BeamformerSet w2 = scalar_w(2, 1.0);
    CHECK(user_rate(one, w2, 0, 1.0) == doctest::Approx(std::log(1.5)).epsilon(1e-14));
    CHECK(user_rate(one, w2, 1, 1.0) == doctest::Approx(std::log(1.5)).epsilon(1e-14));
    CHECK(user_rate(one, scalar_w(1, 0.0), 0, 1.0) == 0.0);
    CHECK_THROWS_AS(user_rate(one, scalar_w(1, std::nan("")), 0, 1.0), NumericError);
}

TEST_CASE("user rate matches eigenvalue oracle")
{
    Rng rng(42);
    for (int trial = 0; trial < 20; ++trial)
    {
        const CMat hbar = random_matrix(2, 4, rng);
        const BeamformerSet w = random_beamformers(2, 2, 2, 2, 1.0, rng);
        for (int k = 0; k < 2; ++k)
        {
            const double r = user_rate(hbar, w, k, 0.3);
            CHECK(r >= 0.0);
            CHECK(r == doctest::Approx(eig_rate(hbar, w, k, 0.3)).epsilon(1e-10));
        }
    }
}

TEST_CASE("MSE matrix, receiver and weight")
{
    const CMat one = CMat::Constant(1, 1, 1.0);
    const BeamformerSet w = scalar_w(1, 1.0);
    const CMat u = mmse_receiver(one, w, 0, 1.0);
    CHECK(std::abs(u(0, 0) - 0.5) < 1e-14);
    const CMat e = mse_matrix(one, w, 0, u, 1.0);
    CHECK(std::abs(e(0, 0) - 0.5) < 1e-14);
    const CMat q = optimal_weight(e);
    CHECK(std::abs(q(0, 0) - 2.0) < 1e-13);
    CHECK(mse_objective(q, e) == doctest::Approx(std::log(2.0)).epsilon(1e-13));
    CHECK((mse_matrix(one, w, 0, CMat::Zero(1, 1), 1.0) - CMat::Identity(1, 1)).norm() == 0.0);
    CHECK(mse_objective(CMat::Identity(2, 2), CMat::Identity(2, 2)) == doctest::Approx(0.0));
    CHECK(std::abs(mmse_receiver(one, w, 0, 1e12)(0, 0)) < 1e-11);
    CHECK_THROWS_AS(optimal_weight(CMat::Zero(2, 2)), NumericError);

    Rng rng(5);
    for (int trial = 0; trial < 10; ++trial)
    {
        const CMat pd = random_hpd(3, rng);
        CHECK((optimal_weight(pd) * pd - CMat::Identity(3, 3)).norm() < 1e-10);
    }
}

TEST_CASE("MMSE receiver properties on random instances")
{
    Rng rng(77);
    for (int trial = 0; trial < 10; ++trial)
    {
        const int K = 2;
        const CMat hbar = random_matrix(3, 4, rng);
        const BeamformerSet w = random_beamformers(2, K, 2, 2, 1.0, rng);
        const double s2 = 0.5;
        const CMat u = mmse_receiver(hbar, w, 0, s2);
        const CMat e = mse_matrix(hbar, w, 0, u, s2);
        CHECK((e - e.adjoint()).norm() < 1e-12);

        // Closed form E = I - W^H H^H J^{-1} H W at the optimum.
        const CMat j = receive_covariance(hbar, w, noise_covariance(3, s2));
        const CMat hw = hbar * w.stacked(0);
        const CMat e_closed = CMat::Identity(2, 2) - hw.adjoint() * j.inverse() * hw;
        CHECK((e - e_closed).norm() < 1e-10);

        const double tr_opt = e.trace().real();
        for (int probe = 0; probe < 100; ++probe)
        {
            const CMat up = u + random_matrix(3, 2, rng, 0.05);
            const CMat ep = mse_matrix(hbar, w, 0, up, s2);
            CHECK(tr_opt <= ep.trace().real() + 1e-12);
            // E(U) - E_mmse is PSD.
            Eigen::SelfAdjointEigenSolver<CMat> es(hermitian_part(ep - e));
            CHECK(es.eigenvalues().minCoeff() >= -1e-12);
        }
    }
}

TEST_CASE("rate and MSE objective agree at the closed-form receiver and weight")
{
    Rng rng(101);
    for (int trial = 0; trial < 20; ++trial)
    {
        const int K = 1 + trial % 3;
        const CMat hbar = random_matrix(2, 6, rng);
        const BeamformerSet w = random_beamformers(3, K, 2, 2, 2.0, rng);
        std::vector<CMat> hs(static_cast<std::size_t>(K), hbar);
        std::vector<CMat> ns(static_cast<std::size_t>(K), noise_covariance(2, 0.1));
        const MseState st = update_mse_state(hs, w, ns);
        for (int k = 0; k < K; ++k)
        {
            const CMat e = mse_matrix(hbar, w, k, st.receivers[static_cast<std::size_t>(k)], 0.1);
            CHECK(mse_objective(st.weights[static_cast<std::size_t>(k)], e) ==
                  doctest::Approx(user_rate(hbar, w, k, 0.1)).epsilon(1e-10));
        }
    }
}

TEST_CASE("beamformer set bookkeeping")
{
    BeamformerSet w(2, 3, 2, 1);
    w.block(1, 2)(0, 0) = 3.0;
    w.block(1, 0)(1, 0) = 4.0;
    CHECK(w.bs_power(1) == doctest::Approx(25.0));
    CHECK(w.bs_power(0) == 0.0);
    CHECK(w.stacked(2)(2, 0) == cx(3.0));
    CHECK_THROWS_AS(w.check_power(24.0), InvariantViolation);
    w.clip_power(1.0);
    CHECK(w.bs_power(1) == doctest::Approx(1.0));
    CHECK_NOTHROW(w.check_power(1.0));
}
