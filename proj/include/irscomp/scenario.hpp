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

#ifndef IRSCOMP_SCENARIO_HPP
#define IRSCOMP_SCENARIO_HPP

#include "irscomp/rng.hpp"
#include "irscomp/types.hpp"

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace irscomp
{
    using Point3 = std::array<double, 3>; // (x, y, z) in meters

    double distance(const Point3 &a, const Point3 &b);

    enum class Preset
    {
        single_user,
        multi_user
    };

    std::string to_string(Preset p);
    Preset preset_from_string(const std::string &name); // "single-user" | "multi-user"

    // All scenario constants. Powers are linear watts, gains linear. Defaults are the
    // single-user preset; use make_config() to obtain either preset.
    struct SystemConfig
    {
        Preset preset = Preset::single_user;

        int num_bs = 2;            // N
        int num_users = 1;         // K
        int num_irs_elements = 100; // M
        int tx_antennas = 2;       // N_t
        int rx_antennas = 2;       // N_r
        int streams = 2;           // d

        double max_power = 1.0;      // P_max [W]
        double noise_power = 1e-11;  // sigma^2 [W], -80 dBm
        double ref_gain = 1e-3;      // L_0, -30 dB
        double ref_distance = 1.0;   // d_0 [m]
        double alpha_bs_irs = 2.2;
        double alpha_irs_user = 2.2;
        double alpha_bs_user = 3.6;
        double rician_factor = 10.0; // kappa, 10 dB

        std::vector<Point3> bs_positions{{-300.0, 0.0, 10.0}, {300.0, 0.0, 10.0}};
        Point3 irs_position{0.0, 0.0, 10.0};
        Point3 user_center{0.0, 0.0, 0.0};
        double user_radius = 0.0; // users uniform in this disc around user_center (horizontal plane)

        std::optional<int> quantizer_bits; // empty = continuous phases
        int randomization_count = 1000;
        double convergence_threshold = 1e-3; // outer-loop fractional increase
        int max_outer_iterations = 100;

        // Dual subgradient: c_pi > 0 selects the diminishing rule pi_t = c_pi / sqrt(t);
        // c_pi <= 0 (default) selects the per-BS adaptive step.
        double subgradient_step = 0.0;
        double subgradient_gap_tolerance = 1e-8;
        int max_subgradient_iterations = 500;

        double mm_threshold = 1e-8;
        int max_mm_iterations = 500;

        int relay_grid_points = 64;
        bool include_direct_links = true;

        std::uint64_t rng_seed = 1;

        // Throws DomainError on a violated invariant.
        void validate() const;
    };

    SystemConfig make_config(Preset preset);

    // Flat key=value overrides. Keys are the field names above (num_bs, max_power, ...), plus
    // max_power_dbm, noise_power_dbm, ref_gain_db, rician_factor_db, irs_x and
    // quantizer_bits ("continuous" or an integer). Throws DomainError on unknown keys or bad values.
    void apply_override(SystemConfig &config, const std::string &key, const std::string &value);

    // Reads a UTF-8 key=value file; '#' starts a comment, blank lines ignored.
    void apply_config_stream(SystemConfig &config, std::istream &in);
    void apply_config_file(SystemConfig &config, const std::string &path);

    struct Placement
    {
        std::vector<Point3> bs_coords;
        Point3 irs_coord{};
        std::vector<Point3> user_coords;
    };

    Placement build_geometry(const SystemConfig &config, Rng &rng);

    // L_0 (d / d_0)^(-alpha); throws DomainError for d <= 0.
    double path_loss(double distance_m, double exponent, const SystemConfig &config);

    // One realization of every channel. direct(n,k) is N_r x N_t, bs_irs(n) is M x N_t,
    // irs_user(k) is N_r x M.
    struct ChannelSet
    {
        int num_bs = 0;
        int num_users = 0;
        int num_irs_elements = 0;
        int tx_antennas = 0;
        int rx_antennas = 0;

        std::vector<CMat> direct_links; // index n * K + k
        std::vector<CMat> bs_irs_links;
        std::vector<CMat> irs_user_links;

        const CMat &direct(int n, int k) const { return direct_links[static_cast<std::size_t>(n * num_users + k)]; }
        CMat &direct(int n, int k) { return direct_links[static_cast<std::size_t>(n * num_users + k)]; }
        const CMat &bs_irs(int n) const { return bs_irs_links[static_cast<std::size_t>(n)]; }
        const CMat &irs_user(int k) const { return irs_user_links[static_cast<std::size_t>(k)]; }

        void check_consistent() const;

        // Copies with the IRS links set to zero / the direct links set to zero.
        ChannelSet without_irs() const;
        ChannelSet without_direct() const;
    };

    // Half-wavelength uniform linear array response, unit-modulus entries.
    CVec ula_steering(int size, double angle);

    ChannelSet sample_channels(const SystemConfig &config, const Placement &placement, Rng &rng);

    // M reflection phases with unit amplitude.
    class PhaseProfile
    {
    public:
        PhaseProfile() = default;
        explicit PhaseProfile(RVec theta);

        static PhaseProfile zeros(int size);
        static PhaseProfile random(int size, Rng &rng);
        // Angles of a (nonzero-entry) complex vector; magnitudes are discarded.
        static PhaseProfile from_phasors(const CVec &phi);

        int size() const { return static_cast<int>(theta_.size()); }
        const RVec &theta() const { return theta_; }
        CVec phi() const;
        CMat Phi() const;

    private:
        RVec theta_; // wrapped to [0, 2 pi)
    };

    double wrap_angle(double theta);

    // Nearest point of {0, 2pi/2^b, ..., 2pi(2^b-1)/2^b} on the unit circle; exact ties go to the
    // smaller angle.
    RVec quantize_phases(const RVec &theta, int bits);
}

#endif
