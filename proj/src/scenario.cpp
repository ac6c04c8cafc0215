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

#include "irscomp/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <sstream>

namespace irscomp
{
    double distance(const Point3 &a, const Point3 &b)
    {
        const double dx = a[0] - b[0], dy = a[1] - b[1], dz = a[2] - b[2];
        return std::sqrt(dx * dx + dy * dy + dz * dz);
    }

    std::string to_string(Preset p)
    {
        return p == Preset::single_user ? "single-user" : "multi-user";
    }

    Preset preset_from_string(const std::string &name)
    {
        if (name == "single-user")
            return Preset::single_user;
        if (name == "multi-user")
            return Preset::multi_user;
        throw DomainError("unknown preset '" + name + "' (expected single-user or multi-user)");
    }

    void SystemConfig::validate() const
    {
        auto require = [](bool ok, const char *what)
        {
            if (!ok)
                throw DomainError(std::string("invalid configuration: ") + what);
        };
        require(num_bs >= 1, "num_bs >= 1");
        require(num_users >= 1, "num_users >= 1");
        require(num_irs_elements >= 0, "num_irs_elements >= 0");
        require(tx_antennas >= 1, "tx_antennas >= 1");
        require(rx_antennas >= 1, "rx_antennas >= 1");
        require(streams >= 1 && streams <= std::min(tx_antennas * num_bs, rx_antennas),
                "1 <= streams <= min(tx_antennas * num_bs, rx_antennas)");
        require(max_power > 0.0 && std::isfinite(max_power), "max_power > 0");
        require(noise_power > 0.0 && std::isfinite(noise_power), "noise_power > 0");
        require(ref_gain > 0.0, "ref_gain > 0");
        require(ref_distance > 0.0, "ref_distance > 0");
        require(rician_factor >= 0.0, "rician_factor >= 0");
        require(convergence_threshold > 0.0, "convergence_threshold > 0");
        require(mm_threshold > 0.0, "mm_threshold > 0");
        require(subgradient_gap_tolerance > 0.0, "subgradient_gap_tolerance > 0");
        require(max_outer_iterations >= 1, "max_outer_iterations >= 1");
        require(max_subgradient_iterations >= 1, "max_subgradient_iterations >= 1");
        require(max_mm_iterations >= 1, "max_mm_iterations >= 1");
        require(randomization_count >= 1, "randomization_count >= 1");
        require(relay_grid_points >= 2, "relay_grid_points >= 2");
        require(user_radius >= 0.0, "user_radius >= 0");
        require(!quantizer_bits || *quantizer_bits >= 1, "quantizer_bits >= 1");
        require(static_cast<int>(bs_positions.size()) == num_bs, "bs_positions has num_bs entries");
        for (const auto &p : bs_positions)
            require(p[2] >= 0.0, "BS altitude >= 0");
        require(irs_position[2] >= 0.0, "IRS altitude >= 0");
        require(user_center[2] >= 0.0, "user altitude >= 0");
    }

    SystemConfig make_config(Preset preset)
    {
        SystemConfig c;
        c.preset = preset;
        if (preset == Preset::multi_user)
        {
            const double s3 = std::sqrt(3.0);
            c.num_bs = 3;
            c.num_users = 3;
            c.num_irs_elements = 100;
            c.tx_antennas = 6;
            c.bs_positions = {{-300.0, 0.0, 10.0}, {300.0, 0.0, 10.0}, {0.0, 300.0 * s3, 10.0}};
            c.irs_position = {0.0, 100.0 * s3, 10.0};
            c.user_center = {0.0, 100.0 * s3, 0.0};
            c.user_radius = 30.0;
        }
        return c;
    }

    namespace
    {
        std::string trim(const std::string &s)
        {
            const auto b = s.find_first_not_of(" \t\r\n");
            if (b == std::string::npos)
                return {};
            const auto e = s.find_last_not_of(" \t\r\n");
            return s.substr(b, e - b + 1);
        }

        double parse_double(const std::string &key, const std::string &text)
        {
            const std::string t = trim(text);
            double v = 0.0;
            auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
            if (ec != std::errc() || ptr != t.data() + t.size() || !std::isfinite(v))
                throw DomainError("config key '" + key + "': expected a number, got '" + text + "'");
            return v;
        }

        long long parse_int(const std::string &key, const std::string &text)
        {
            const std::string t = trim(text);
            long long v = 0;
            auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
            if (ec != std::errc() || ptr != t.data() + t.size())
                throw DomainError("config key '" + key + "': expected an integer, got '" + text + "'");
            return v;
        }

        bool parse_bool(const std::string &key, const std::string &text)
        {
            const std::string t = trim(text);
            if (t == "true" || t == "1" || t == "yes")
                return true;
            if (t == "false" || t == "0" || t == "no")
                return false;
            throw DomainError("config key '" + key + "': expected true/false, got '" + text + "'");
        }

        Point3 parse_point(const std::string &key, const std::string &text)
        {
            Point3 p{};
            std::stringstream ss(text);
            std::string item;
            int i = 0;
            while (std::getline(ss, item, ','))
            {
                if (i >= 3)
                    throw DomainError("config key '" + key + "': expected x,y,z");
                p[static_cast<std::size_t>(i++)] = parse_double(key, item);
            }
            if (i != 3)
                throw DomainError("config key '" + key + "': expected x,y,z");
            return p;
        }

        int to_int(const std::string &key, long long v)
        {
            if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max())
                throw DomainError("config key '" + key + "': out of range");
            return static_cast<int>(v);
        }
    }

    void apply_override(SystemConfig &c, const std::string &raw_key, const std::string &value)
    {
        static const std::map<std::string, std::string> aliases = {
            {"N", "num_bs"}, {"K", "num_users"}, {"M", "num_irs_elements"}, {"Nt", "tx_antennas"},
            {"Nr", "rx_antennas"}, {"d", "streams"}, {"seed", "rng_seed"}, {"bits", "quantizer_bits"}};
        std::string key = trim(raw_key);
        if (auto it = aliases.find(key); it != aliases.end())
            key = it->second;

        if (key == "preset")
        {
            const std::uint64_t seed = c.rng_seed;
            c = make_config(preset_from_string(trim(value)));
            c.rng_seed = seed;
        }
        else if (key == "num_bs")
        {
            c.num_bs = to_int(key, parse_int(key, value));
            if (static_cast<int>(c.bs_positions.size()) > c.num_bs && c.num_bs >= 0)
                c.bs_positions.resize(static_cast<std::size_t>(c.num_bs));
        }
        else if (key == "num_users")
            c.num_users = to_int(key, parse_int(key, value));
        else if (key == "num_irs_elements")
            c.num_irs_elements = to_int(key, parse_int(key, value));
        else if (key == "tx_antennas")
            c.tx_antennas = to_int(key, parse_int(key, value));
        else if (key == "rx_antennas")
            c.rx_antennas = to_int(key, parse_int(key, value));
        else if (key == "streams")
            c.streams = to_int(key, parse_int(key, value));
        else if (key == "max_power")
            c.max_power = parse_double(key, value);
        else if (key == "max_power_dbm")
            c.max_power = dbm_to_watts(parse_double(key, value));
        else if (key == "noise_power")
            c.noise_power = parse_double(key, value);
        else if (key == "noise_power_dbm")
            c.noise_power = dbm_to_watts(parse_double(key, value));
        else if (key == "ref_gain")
            c.ref_gain = parse_double(key, value);
        else if (key == "ref_gain_db")
            c.ref_gain = db_to_linear(parse_double(key, value));
        else if (key == "ref_distance")
            c.ref_distance = parse_double(key, value);
        else if (key == "alpha_bs_irs")
            c.alpha_bs_irs = parse_double(key, value);
        else if (key == "alpha_irs_user")
            c.alpha_irs_user = parse_double(key, value);
        else if (key == "alpha_bs_user")
            c.alpha_bs_user = parse_double(key, value);
        else if (key == "rician_factor")
            c.rician_factor = parse_double(key, value);
        else if (key == "rician_factor_db")
            c.rician_factor = db_to_linear(parse_double(key, value));
        else if (key == "bs_positions")
        {
            std::vector<Point3> pts;
            std::stringstream ss(value);
            std::string item;
            while (std::getline(ss, item, ';'))
                if (!trim(item).empty())
                    pts.push_back(parse_point(key, item));
            c.bs_positions = std::move(pts);
        }
        else if (key == "irs_position")
            c.irs_position = parse_point(key, value);
        else if (key == "irs_x")
            c.irs_position[0] = parse_double(key, value);
        else if (key == "user_center")
            c.user_center = parse_point(key, value);
        else if (key == "user_radius")
            c.user_radius = parse_double(key, value);
        else if (key == "quantizer_bits")
        {
            if (trim(value) == "continuous")
                c.quantizer_bits.reset();
            else
                c.quantizer_bits = to_int(key, parse_int(key, value));
        }
        else if (key == "randomization_count")
            c.randomization_count = to_int(key, parse_int(key, value));
        else if (key == "convergence_threshold")
            c.convergence_threshold = parse_double(key, value);
        else if (key == "max_outer_iterations")
            c.max_outer_iterations = to_int(key, parse_int(key, value));
        else if (key == "subgradient_step")
            c.subgradient_step = parse_double(key, value);
        else if (key == "subgradient_gap_tolerance")
            c.subgradient_gap_tolerance = parse_double(key, value);
        else if (key == "max_subgradient_iterations")
            c.max_subgradient_iterations = to_int(key, parse_int(key, value));
        else if (key == "mm_threshold")
            c.mm_threshold = parse_double(key, value);
        else if (key == "max_mm_iterations")
            c.max_mm_iterations = to_int(key, parse_int(key, value));
        else if (key == "relay_grid_points")
            c.relay_grid_points = to_int(key, parse_int(key, value));
        else if (key == "include_direct_links")
            c.include_direct_links = parse_bool(key, value);
        else if (key == "rng_seed")
        {
            const long long v = parse_int(key, value);
            if (v < 0)
                throw DomainError("config key 'rng_seed': must be nonnegative");
            c.rng_seed = static_cast<std::uint64_t>(v);
        }
        else
            throw DomainError("unknown config key '" + raw_key + "'");
    }

    void apply_config_stream(SystemConfig &config, std::istream &in)
    {
        std::string line;
        int line_no = 0;
        while (std::getline(in, line))
        {
            ++line_no;
            if (auto hash = line.find('#'); hash != std::string::npos)
                line.erase(hash);
            if (trim(line).empty())
                continue;
            const auto eq = line.find('=');
            if (eq == std::string::npos)
                throw DomainError("config line " + std::to_string(line_no) + ": expected key=value");
            apply_override(config, line.substr(0, eq), line.substr(eq + 1));
        }
    }

    void apply_config_file(SystemConfig &config, const std::string &path)
    {
        std::ifstream in(path);
        if (!in)
            throw DomainError("cannot open config file '" + path + "'");
        apply_config_stream(config, in);
    }

    Placement build_geometry(const SystemConfig &config, Rng &rng)
    {
        config.validate();
        Placement p;
        p.bs_coords = config.bs_positions;
        p.irs_coord = config.irs_position;

        Rng users = rng.split("user-placement");
        for (int k = 0; k < config.num_users; ++k)
        {
            Point3 u = config.user_center;
            if (config.user_radius > 0.0)
            {
                const double r = config.user_radius * std::sqrt(users.uniform());
                const double a = users.uniform(0.0, kTwoPi);
                u[0] += r * std::cos(a);
                u[1] += r * std::sin(a);
            }
            p.user_coords.push_back(u);
        }

        for (const auto &b : p.bs_coords)
            for (const auto &u : p.user_coords)
                if (distance(b, u) <= config.ref_distance)
                    throw DomainError("build_geometry: BS-user distance must exceed the reference distance");
        return p;
    }

    double path_loss(double distance_m, double exponent, const SystemConfig &config)
    {
        if (!(distance_m > 0.0))
            throw DomainError("path_loss: distance must be positive");
        return config.ref_gain * std::pow(distance_m / config.ref_distance, -exponent);
    }

    void ChannelSet::check_consistent() const
    {
        auto fail = [](const char *what)
        { throw DomainError(std::string("ChannelSet: ") + what); };
        if (static_cast<int>(direct_links.size()) != num_bs * num_users)
            fail("direct link count");
        if (static_cast<int>(bs_irs_links.size()) != num_bs)
            fail("BS-IRS link count");
        if (static_cast<int>(irs_user_links.size()) != num_users)
            fail("IRS-user link count");
        for (const auto &h : direct_links)
            if (h.rows() != rx_antennas || h.cols() != tx_antennas || !h.allFinite())
                fail("direct link shape");
        for (const auto &g : bs_irs_links)
            if (g.rows() != num_irs_elements || g.cols() != tx_antennas || !g.allFinite())
                fail("BS-IRS link shape");
        for (const auto &h : irs_user_links)
            if (h.rows() != rx_antennas || h.cols() != num_irs_elements || !h.allFinite())
                fail("IRS-user link shape");
    }

    ChannelSet ChannelSet::without_irs() const
    {
        ChannelSet c = *this;
        for (auto &g : c.bs_irs_links)
            g.setZero();
        for (auto &h : c.irs_user_links)
            h.setZero();
        return c;
    }

    ChannelSet ChannelSet::without_direct() const
    {
        ChannelSet c = *this;
        for (auto &h : c.direct_links)
            h.setZero();
        return c;
    }

    CVec ula_steering(int size, double angle)
    {
        CVec a(size);
        const double s = std::sin(angle);
        for (int i = 0; i < size; ++i)
            a(i) = std::polar(1.0, kPi * i * s);
        return a;
    }

    namespace
    {
        CMat gaussian_matrix(int rows, int cols, Rng &rng)
        {
            CMat m(rows, cols);
            for (int j = 0; j < cols; ++j)
                for (int i = 0; i < rows; ++i)
                    m(i, j) = rng.complex_normal();
            return m;
        }

        // sqrt(L) (sqrt(k/(1+k)) a_rx a_tx^H + sqrt(1/(1+k)) G)
        CMat rician_matrix(int rows, int cols, double loss, double kappa, Rng &rng)
        {
            const double aoa = rng.uniform(0.0, kTwoPi);
            const double aod = rng.uniform(0.0, kTwoPi);
            const CMat los = ula_steering(rows, aoa) * ula_steering(cols, aod).adjoint();
            const CMat nlos = gaussian_matrix(rows, cols, rng);
            return std::sqrt(loss) * (std::sqrt(kappa / (1.0 + kappa)) * los + std::sqrt(1.0 / (1.0 + kappa)) * nlos);
        }
    }

    ChannelSet sample_channels(const SystemConfig &config, const Placement &placement, Rng &rng)
    {
        config.validate();
        const int N = config.num_bs, K = config.num_users, M = config.num_irs_elements;
        const int Nt = config.tx_antennas, Nr = config.rx_antennas;
        if (static_cast<int>(placement.bs_coords.size()) != N || static_cast<int>(placement.user_coords.size()) != K)
            throw DomainError("sample_channels: placement does not match configuration");

        ChannelSet ch;
        ch.num_bs = N;
        ch.num_users = K;
        ch.num_irs_elements = M;
        ch.tx_antennas = Nt;
        ch.rx_antennas = Nr;

        // Each link draws from its own stream so link statistics do not depend on the others.
        const Rng base(rng());
        const double kappa = config.rician_factor;

        for (int n = 0; n < N; ++n)
            for (int k = 0; k < K; ++k)
            {
                Rng r = base.split("direct").split(static_cast<std::uint64_t>(n * K + k));
                const double loss = path_loss(distance(placement.bs_coords[static_cast<std::size_t>(n)],
                                                       placement.user_coords[static_cast<std::size_t>(k)]),
                                              config.alpha_bs_user, config);
                CMat h = std::sqrt(loss) * gaussian_matrix(Nr, Nt, r);
                if (!config.include_direct_links)
                    h.setZero();
                ch.direct_links.push_back(std::move(h));
            }
        for (int n = 0; n < N; ++n)
        {
            Rng r = base.split("bs-irs").split(static_cast<std::uint64_t>(n));
            const double loss = path_loss(distance(placement.bs_coords[static_cast<std::size_t>(n)], placement.irs_coord),
                                          config.alpha_bs_irs, config);
            ch.bs_irs_links.push_back(rician_matrix(M, Nt, loss, kappa, r));
        }
        for (int k = 0; k < K; ++k)
        {
            Rng r = base.split("irs-user").split(static_cast<std::uint64_t>(k));
            const double loss = path_loss(distance(placement.irs_coord, placement.user_coords[static_cast<std::size_t>(k)]),
                                          config.alpha_irs_user, config);
            ch.irs_user_links.push_back(rician_matrix(Nr, M, loss, kappa, r));
        }
        return ch;
    }

    double wrap_angle(double theta)
    {
        double t = std::fmod(theta, kTwoPi);
        if (t < 0.0)
            t += kTwoPi;
        if (t >= kTwoPi)
            t = 0.0;
        return t;
    }

    PhaseProfile::PhaseProfile(RVec theta) : theta_(std::move(theta))
    {
        for (Eigen::Index m = 0; m < theta_.size(); ++m)
        {
            if (!std::isfinite(theta_(m)))
                throw DomainError("PhaseProfile: nonfinite angle");
            theta_(m) = wrap_angle(theta_(m));
        }
    }

    PhaseProfile PhaseProfile::zeros(int size)
    {
        return PhaseProfile(RVec::Zero(size));
    }

    PhaseProfile PhaseProfile::random(int size, Rng &rng)
    {
        RVec t(size);
        for (int m = 0; m < size; ++m)
            t(m) = rng.uniform(0.0, kTwoPi);
        return PhaseProfile(std::move(t));
    }

    PhaseProfile PhaseProfile::from_phasors(const CVec &phi)
    {
        RVec t(phi.size());
        for (Eigen::Index m = 0; m < phi.size(); ++m)
            t(m) = std::arg(phi(m));
        return PhaseProfile(std::move(t));
    }

    CVec PhaseProfile::phi() const
    {
        CVec p(theta_.size());
        for (Eigen::Index m = 0; m < theta_.size(); ++m)
            p(m) = std::polar(1.0, theta_(m));
        return p;
    }

    CMat PhaseProfile::Phi() const
    {
        return phi().asDiagonal();
    }

    RVec quantize_phases(const RVec &theta, int bits)
    {
        if (bits < 1 || bits > 30)
            throw DomainError("quantize_phases: bits must be in [1, 30]");
        const long levels = 1L << bits;
        const double step = kTwoPi / static_cast<double>(levels);
        RVec out(theta.size());
        for (Eigen::Index m = 0; m < theta.size(); ++m)
        {
            const cx target = std::polar(1.0, theta(m));
            // Only the two levels bracketing theta can be nearest; scan them plus the wraparound.
            const double t = wrap_angle(theta(m));
            const long lo = static_cast<long>(std::floor(t / step)) % levels;
            const long cand[3] = {(lo + levels - 1) % levels, lo, (lo + 1) % levels};
            long best = -1;
            double best_dist = 0.0;
            for (long c : cand)
            {
                const double dist = std::abs(std::polar(1.0, step * static_cast<double>(c)) - target);
                const bool tie = best >= 0 && std::abs(dist - best_dist) <= 1e-12;
                if (best < 0 || dist < best_dist - 1e-12 || (tie && c < best))
                {
                    best = c;
                    best_dist = dist;
                }
            }
            out(m) = step * static_cast<double>(best);
        }
        return out;
    }
}
