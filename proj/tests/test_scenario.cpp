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

#include "irscomp/scenario.hpp"

#include <cmath>
#include <sstream>

using namespace irscomp;

TEST_CASE("single-user preset geometry")
{
    const SystemConfig c = make_config(Preset::single_user);
    Rng rng(7);
    const Placement p = build_geometry(c, rng);
    REQUIRE(p.bs_coords.size() == 2);
    CHECK(p.bs_coords[0] == Point3{-300.0, 0.0, 10.0});
    CHECK(p.bs_coords[1] == Point3{300.0, 0.0, 10.0});
    REQUIRE(p.user_coords.size() == 1);
    CHECK(p.user_coords[0] == Point3{0.0, 0.0, 0.0});
    CHECK(p.irs_coord[2] == 10.0);
}

TEST_CASE("multi-user preset geometry")
{
    const SystemConfig c = make_config(Preset::multi_user);
    Rng a(11), b(11);
    const Placement p = build_geometry(c, a);
    const Placement q = build_geometry(c, b);
    CHECK(p.irs_coord[0] == 0.0);
    CHECK(p.irs_coord[1] == doctest::Approx(100.0 * std::sqrt(3.0)).epsilon(1e-15));
    CHECK(p.irs_coord[2] == 10.0);
    REQUIRE(p.user_coords.size() == 3);
    CHECK(p.user_coords == q.user_coords);
    for (const auto &u : p.user_coords)
    {
        const double r = std::hypot(u[0] - c.user_center[0], u[1] - c.user_center[1]);
        CHECK(r <= 30.0);
        CHECK(u[2] == 0.0);
    }
}

TEST_CASE("path loss")
{
    const SystemConfig c;
    CHECK(path_loss(1.0, 2.2, c) == doctest::Approx(1e-3).epsilon(1e-15));
    CHECK(path_loss(c.ref_distance, 3.6, c) == doctest::Approx(c.ref_gain).epsilon(1e-15));
    CHECK(path_loss(100.0, 2.2, c) == doctest::Approx(3.981071705534973e-08).epsilon(1e-12));
    CHECK(path_loss(50.0, 2.2, c) > path_loss(60.0, 2.2, c));
    CHECK_THROWS_AS(path_loss(0.0, 2.2, c), DomainError);
    CHECK_THROWS_AS(path_loss(-1.0, 2.2, c), DomainError);
}

TEST_CASE("config validation and overrides")
{
    SystemConfig c = make_config(Preset::multi_user);
    CHECK_NOTHROW(c.validate());
    apply_override(c, "max_power_dbm", "10");
    CHECK(c.max_power == doctest::Approx(0.01));
    apply_override(c, "quantizer_bits", "2");
    REQUIRE(c.quantizer_bits);
    CHECK(*c.quantizer_bits == 2);
    apply_override(c, "quantizer_bits", "continuous");
    CHECK_FALSE(c.quantizer_bits);
    CHECK_THROWS_AS(apply_override(c, "no_such_key", "1"), DomainError);
    CHECK_THROWS_AS(apply_override(c, "num_bs", "two"), DomainError);

    std::istringstream in("# comment\nM = 20\n\nirs_x=-50 # trailing\n");
    apply_config_stream(c, in);
    CHECK(c.num_irs_elements == 20);
    CHECK(c.irs_position[0] == -50.0);

    SystemConfig bad = c;
    bad.streams = 3; // N_r = 2
    CHECK_THROWS_AS(bad.validate(), DomainError);
    bad = c;
    bad.noise_power = 0.0;
    CHECK_THROWS_AS(bad.validate(), DomainError);
    bad = c;
    bad.irs_position[2] = -1.0;
    CHECK_THROWS_AS(bad.validate(), DomainError);
}

TEST_CASE("channel dimensions and determinism")
{
    SystemConfig c = make_config(Preset::multi_user);
    c.num_irs_elements = 8;
    Rng g(3);
    const Placement p = build_geometry(c, g);
    Rng a(5), b(5);
    const ChannelSet x = sample_channels(c, p, a);
    const ChannelSet y = sample_channels(c, p, b);
    CHECK_NOTHROW(x.check_consistent());
    CHECK(x.direct(1, 2).rows() == c.rx_antennas);
    CHECK(x.direct(1, 2).cols() == c.tx_antennas);
    CHECK(x.bs_irs(0).rows() == 8);
    CHECK(x.bs_irs(0).cols() == c.tx_antennas);
    CHECK(x.irs_user(2).rows() == c.rx_antennas);
    CHECK(x.irs_user(2).cols() == 8);
    for (std::size_t i = 0; i < x.direct_links.size(); ++i)
        CHECK(x.direct_links[i] == y.direct_links[i]);
    for (std::size_t i = 0; i < x.bs_irs_links.size(); ++i)
        CHECK(x.bs_irs_links[i] == y.bs_irs_links[i]);
    // Consecutive draws from one generator differ.
    const ChannelSet z = sample_channels(c, p, a);
    CHECK(z.direct(0, 0) != x.direct(0, 0));
}

TEST_CASE("pure line-of-sight limit")
{
    SystemConfig c = make_config(Preset::single_user);
    c.rician_factor = 1e9;
    c.num_irs_elements = 16;
    Rng g(1);
    const Placement p = build_geometry(c, g);
    const ChannelSet ch = sample_channels(c, p, g);
    const double amp = std::sqrt(path_loss(distance(p.bs_coords[0], p.irs_coord), c.alpha_bs_irs, c));
    const CMat &gm = ch.bs_irs(0);
    for (Eigen::Index i = 0; i < gm.size(); ++i)
        CHECK(std::abs(gm.data()[i]) == doctest::Approx(amp).epsilon(1e-3));
}

TEST_CASE("Rayleigh second moment and Rician K-factor")
{
    SystemConfig c = make_config(Preset::single_user);
    c.num_irs_elements = 4;
    Rng g(2024);
    const Placement p = build_geometry(c, g);
    const double l_bu = path_loss(distance(p.bs_coords[0], p.user_coords[0]), c.alpha_bs_user, c);
    const double l_br = path_loss(distance(p.bs_coords[0], p.irs_coord), c.alpha_bs_irs, c);

    const int draws = 10000;
    double direct_power = 0.0;
    double m1 = 0.0, m2 = 0.0;
    long count = 0;
    for (int t = 0; t < draws; ++t)
    {
        const ChannelSet ch = sample_channels(c, p, g);
        direct_power += ch.direct(0, 0).squaredNorm() / static_cast<double>(ch.direct(0, 0).size());
        const CMat &gm = ch.bs_irs(0);
        for (Eigen::Index i = 0; i < gm.size(); ++i)
        {
            const double e = std::norm(gm.data()[i]) / l_br;
            m1 += e;
            m2 += e * e;
            ++count;
        }
    }
    direct_power /= draws;
    CHECK(direct_power == doctest::Approx(l_bu).epsilon(0.05));

    // Moment estimator of the Rician factor: gamma = Var|g|^2 / E^2|g|^2.
    m1 /= static_cast<double>(count);
    m2 /= static_cast<double>(count);
    const double gamma = (m2 - m1 * m1) / (m1 * m1);
    const double root = std::sqrt(1.0 - gamma);
    const double kappa = root / (1.0 - root);
    CHECK(m1 == doctest::Approx(1.0).epsilon(0.05));
    CHECK(kappa == doctest::Approx(c.rician_factor).epsilon(0.10));
}

TEST_CASE("phase quantization")
{
    const double pi = kPi;
    RVec t(3);
    t << pi / 3.0, pi / 2.0, 2.0 * pi - 0.1;
    const RVec b1 = quantize_phases(t, 1);
    CHECK(b1(0) == 0.0);
    CHECK(b1(1) == 0.0); // exact tie goes to the smaller angle
    CHECK(b1(2) == 0.0);
    const RVec b2 = quantize_phases(t, 2);
    CHECK(b2(0) == doctest::Approx(pi / 2.0));
    CHECK_THROWS_AS(quantize_phases(t, 0), DomainError);

    Rng rng(9);
    for (int b = 1; b <= 4; ++b)
    {
        RVec x(200);
        for (int i = 0; i < 200; ++i)
            x(i) = rng.uniform(-10.0, 10.0);
        const RVec y = quantize_phases(x, b);
        const double bound = 2.0 * std::sin(pi / std::pow(2.0, b + 1)) + 1e-12;
        for (int i = 0; i < 200; ++i)
        {
            CHECK(std::abs(std::polar(1.0, y(i)) - std::polar(1.0, x(i))) <= bound);
            const double level = y(i) / (2.0 * pi / std::pow(2.0, b));
            CHECK(std::abs(level - std::round(level)) < 1e-9);
        }
    }
}

TEST_CASE("phase profile")
{
    RVec t(3);
    t << -0.5, 7.0, 1.0;
    const PhaseProfile p(t);
    for (int m = 0; m < 3; ++m)
    {
        CHECK(p.theta()(m) >= 0.0);
        CHECK(p.theta()(m) < kTwoPi);
        CHECK(std::abs(p.phi()(m)) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(p.Phi()(m, m) == p.phi()(m));
    }
    CHECK(p.theta()(0) == doctest::Approx(kTwoPi - 0.5));
    const PhaseProfile q = PhaseProfile::from_phasors(p.phi() * 3.0);
    CHECK((q.phi() - p.phi()).norm() < 1e-12);
}
