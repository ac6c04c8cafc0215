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

#ifndef IRSCOMP_BENCH_HPP
#define IRSCOMP_BENCH_HPP

#include "irscomp/scenario.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace irscomp
{
    // Bad preset, scheme, sweep or flag; maps to a usage exit code in the CLI.
    class UsageError : public std::invalid_argument
    {
    public:
        using std::invalid_argument::invalid_argument;
    };

    enum class SweepVariable
    {
        max_power_dbm,
        irs_elements,
        tx_antennas,
        irs_x
    };

    std::string to_string(SweepVariable v);
    SweepVariable sweep_from_string(const std::string &name);

    // optimized-continuous, quantized-b<bits>, random-phase, no-irs, af-relay.
    struct Scheme
    {
        enum class Kind
        {
            optimized,
            quantized,
            random_phase,
            no_irs,
            af_relay
        };
        Kind kind = Kind::optimized;
        int bits = 0; // quantized only

        bool operator==(const Scheme &) const = default;
    };

    std::string to_string(const Scheme &s);
    Scheme scheme_from_string(const std::string &name);

    struct ExperimentSpec
    {
        std::string preset = "custom";
        SystemConfig base;
        SweepVariable sweep = SweepVariable::max_power_dbm;
        std::vector<double> values;
        int realizations = 1;
        std::vector<Scheme> schemes;
        std::uint64_t seed = 1;
        std::string output_path; // empty: caller handles the rows
        int workers = 1;
        bool record_wall_time = false;       // off keeps the CSV byte-identical across runs
        std::string trajectory_path;         // optional per-iteration CSV (convergence figures)

        // Throws UsageError.
        void validate() const;
    };

    struct ResultRow
    {
        std::string preset;
        std::string scheme;
        std::string sweep; // sweep variable name
        double sweep_value = 0.0;
        int realization = 0;
        std::uint64_t seed = 0; // realization sub-seed
        double rate_nats = 0.0;
        double rate_bps = 0.0;
        int iterations = 0;
        std::optional<double> wall_time; // seconds
        std::string status = "ok";       // ok | max-iterations | error: ...

        bool operator==(const ResultRow &) const = default;
    };

    struct TrajectoryRow
    {
        std::string preset;
        std::string scheme;
        double sweep_value = 0.0;
        int realization = 0;
        int iteration = 0;
        double rate_nats = 0.0;
    };

    // CSV with RFC-4180 quoting; doubles are written with 17 significant digits so parse_row
    // returns the identical row.
    std::string csv_header();
    std::string format_row(const ResultRow &row);
    ResultRow parse_row(const std::string &line);
    std::vector<std::string> split_csv_line(const std::string &line);

    // Per-realization sub-seed; independent of the sweep value so schemes and sweep points share
    // the same geometry draws where dimensions allow.
    std::uint64_t realization_seed(std::uint64_t seed, int realization);

    // Config for one sweep point with the realization seed set.
    SystemConfig point_config(const ExperimentSpec &spec, double value, std::uint64_t sub_seed);

    // Geometry and channels of one realization.
    ChannelSet draw_channels(const SystemConfig &config);

    struct SchemeOutcome
    {
        double rate = 0.0; // nats
        int iterations = 0;
        bool converged = true;
        std::vector<double> trajectory;
        std::optional<PhaseProfile> phase; // optimized phases, when any
    };

    // Beamforming-only solve at fixed phases, dispatching on K (single-user dual method or the
    // multiuser SOCP loop).
    SchemeOutcome beamform_fixed_phase(const SystemConfig &config, const ChannelSet &channels,
                                       const PhaseProfile &phase);
    SchemeOutcome optimize_joint(const SystemConfig &config, const ChannelSet &channels);
    SchemeOutcome baseline_random_phase(const SystemConfig &config, const ChannelSet &channels, Rng &rng);
    SchemeOutcome baseline_no_irs(const SystemConfig &config, const ChannelSet &channels);
    // Quantizes the given continuous phases to 2^bits levels, then re-optimizes beamforming.
    SchemeOutcome quantized_phase(const SystemConfig &config, const ChannelSet &channels,
                                  const PhaseProfile &continuous, int bits);
    SchemeOutcome af_relay(const SystemConfig &config, const ChannelSet &channels);

    // Rows in (sweep value, realization, scheme) order; writes the CSV when output_path is set.
    std::vector<ResultRow> run_experiment(const ExperimentSpec &spec);
    void write_csv(std::ostream &out, const std::vector<ResultRow> &rows);

    // fig2 fig3 fig5 fig6 fig7 fig8 fig10 fig11.
    std::vector<std::string> figure_names();
    ExperimentSpec figure_spec(const std::string &name);

    struct SummaryRow
    {
        std::string scheme;
        double sweep_value = 0.0;
        int count = 0;
        double mean_bps = 0.0;
        double stderr_bps = 0.0;
        double mean_iterations = 0.0;
    };

    // Means over the ok/max-iterations rows, grouped by (sweep value, scheme) in first-seen order.
    std::vector<SummaryRow> summarize(const std::vector<ResultRow> &rows);
    void print_summary(std::ostream &out, const std::vector<SummaryRow> &summary);
}

#endif
