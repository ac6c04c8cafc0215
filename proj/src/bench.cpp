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

#include "irscomp/bench.hpp"

#include "irscomp/multi_user.hpp"
#include "irscomp/relay.hpp"
#include "irscomp/single_user.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>
#include <thread>
#include <utility>

namespace irscomp
{
    std::string to_string(SweepVariable v)
    {
        switch (v)
        {
        case SweepVariable::max_power_dbm:
            return "max_power_dbm";
        case SweepVariable::irs_elements:
            return "num_irs_elements";
        case SweepVariable::tx_antennas:
            return "tx_antennas";
        case SweepVariable::irs_x:
            return "irs_x";
        }
        return "?";
    }

    SweepVariable sweep_from_string(const std::string &name)
    {
        if (name == "max_power_dbm" || name == "pmax-dbm")
            return SweepVariable::max_power_dbm;
        if (name == "num_irs_elements" || name == "m")
            return SweepVariable::irs_elements;
        if (name == "tx_antennas" || name == "nt")
            return SweepVariable::tx_antennas;
        if (name == "irs_x")
            return SweepVariable::irs_x;
        throw UsageError("unknown sweep variable '" + name + "'");
    }

    std::string to_string(const Scheme &s)
    {
        switch (s.kind)
        {
        case Scheme::Kind::optimized:
            return "optimized-continuous";
        case Scheme::Kind::quantized:
            return "quantized-b" + std::to_string(s.bits);
        case Scheme::Kind::random_phase:
            return "random-phase";
        case Scheme::Kind::no_irs:
            return "no-irs";
        case Scheme::Kind::af_relay:
            return "af-relay";
        }
        return "?";
    }

    Scheme scheme_from_string(const std::string &name)
    {
        if (name == "optimized-continuous")
            return {Scheme::Kind::optimized, 0};
        if (name == "random-phase")
            return {Scheme::Kind::random_phase, 0};
        if (name == "no-irs")
            return {Scheme::Kind::no_irs, 0};
        if (name == "af-relay")
            return {Scheme::Kind::af_relay, 0};
        const std::string q = "quantized-b";
        if (name.rfind(q, 0) == 0 && name.size() > q.size())
        {
            const std::string digits = name.substr(q.size());
            if (digits.find_first_not_of("0123456789") == std::string::npos && digits.size() <= 2)
            {
                const int b = std::stoi(digits);
                if (b >= 1 && b <= 16)
                    return {Scheme::Kind::quantized, b};
            }
        }
        throw UsageError("unknown scheme '" + name + "'");
    }

    void ExperimentSpec::validate() const
    {
        if (realizations < 1)
            throw UsageError("realizations must be >= 1");
        if (values.empty())
            throw UsageError("sweep values must be nonempty");
        if (schemes.empty())
            throw UsageError("scheme list must be nonempty");
        if (workers < 1)
            throw UsageError("workers must be >= 1");
        for (double v : values)
        {
            if (!std::isfinite(v))
                throw UsageError("sweep value is not finite");
            const bool integral = sweep == SweepVariable::irs_elements || sweep == SweepVariable::tx_antennas;
            if (integral && (v != std::floor(v) || v < 0.0))
                throw UsageError(to_string(sweep) + " values must be nonnegative integers");
        }
        for (const auto &s : schemes)
            if (s.kind == Scheme::Kind::quantized && s.bits < 1)
                throw UsageError("quantized scheme needs bits >= 1");
        try
        {
            for (double v : values)
                point_config(*this, v, 1).validate();
        }
        catch (const DomainError &e)
        {
            throw UsageError(std::string("invalid configuration: ") + e.what());
        }
    }

    // ---- CSV

    namespace
    {
        std::string fmt_double(double x)
        {
            char buf[40];
            std::snprintf(buf, sizeof buf, "%.17g", x);
            return buf;
        }

        std::string quote(const std::string &field)
        {
            if (field.find_first_of(",\"\r\n") == std::string::npos)
                return field;
            std::string out = "\"";
            for (char c : field)
            {
                if (c == '"')
                    out += '"';
                out += c;
            }
            return out + "\"";
        }

        double parse_double_field(const std::string &s)
        {
            char *end = nullptr;
            const double v = std::strtod(s.c_str(), &end);
            if (s.empty() || *end != '\0')
                throw UsageError("bad numeric CSV field '" + s + "'");
            return v;
        }

        long long parse_int_field(const std::string &s)
        {
            char *end = nullptr;
            const long long v = std::strtoll(s.c_str(), &end, 10);
            if (s.empty() || *end != '\0')
                throw UsageError("bad integer CSV field '" + s + "'");
            return v;
        }
    }

    std::string csv_header()
    {
        return "preset,scheme,sweep,sweep_value,realization,seed,rate_nats,rate_bps,iterations,wall_time_s,status";
    }

    std::string format_row(const ResultRow &r)
    {
        std::string s;
        s += quote(r.preset) + ',';
        s += quote(r.scheme) + ',';
        s += quote(r.sweep) + ',';
        s += fmt_double(r.sweep_value) + ',';
        s += std::to_string(r.realization) + ',';
        s += std::to_string(r.seed) + ',';
        s += fmt_double(r.rate_nats) + ',';
        s += fmt_double(r.rate_bps) + ',';
        s += std::to_string(r.iterations) + ',';
        s += (r.wall_time ? fmt_double(*r.wall_time) : std::string()) + ',';
        s += quote(r.status);
        return s;
    }

    std::vector<std::string> split_csv_line(const std::string &line)
    {
        std::vector<std::string> fields;
        std::string cur;
        bool quoted = false;
        for (std::size_t i = 0; i < line.size(); ++i)
        {
            const char c = line[i];
            if (quoted)
            {
                if (c == '"')
                {
                    if (i + 1 < line.size() && line[i + 1] == '"')
                    {
                        cur += '"';
                        ++i;
                    }
                    else
                        quoted = false;
                }
                else
                    cur += c;
            }
            else if (c == '"')
                quoted = true;
            else if (c == ',')
                fields.push_back(std::exchange(cur, {}));
            else if (c != '\r')
                cur += c;
        }
        if (quoted)
            throw UsageError("unterminated quote in CSV line");
        fields.push_back(cur);
        return fields;
    }

    ResultRow parse_row(const std::string &line)
    {
        const auto f = split_csv_line(line);
        if (f.size() != 11)
            throw UsageError("CSV row has " + std::to_string(f.size()) + " fields, expected 11");
        ResultRow r;
        r.preset = f[0];
        r.scheme = f[1];
        r.sweep = f[2];
        r.sweep_value = parse_double_field(f[3]);
        r.realization = static_cast<int>(parse_int_field(f[4]));
        char *end = nullptr;
        r.seed = std::strtoull(f[5].c_str(), &end, 10);
        if (f[5].empty() || *end != '\0')
            throw UsageError("bad seed field '" + f[5] + "'");
        r.rate_nats = parse_double_field(f[6]);
        r.rate_bps = parse_double_field(f[7]);
        r.iterations = static_cast<int>(parse_int_field(f[8]));
        if (!f[9].empty())
            r.wall_time = parse_double_field(f[9]);
        r.status = f[10];
        return r;
    }

    void write_csv(std::ostream &out, const std::vector<ResultRow> &rows)
    {
        out << csv_header() << "\r\n";
        for (const auto &r : rows)
            out << format_row(r) << "\r\n";
    }

    // ---- realizations

    std::uint64_t realization_seed(std::uint64_t seed, int realization)
    {
        return Rng(seed).split("realization").split(static_cast<std::uint64_t>(realization)).key();
    }

    SystemConfig point_config(const ExperimentSpec &spec, double value, std::uint64_t sub_seed)
    {
        SystemConfig c = spec.base;
        switch (spec.sweep)
        {
        case SweepVariable::max_power_dbm:
            c.max_power = dbm_to_watts(value);
            break;
        case SweepVariable::irs_elements:
            c.num_irs_elements = static_cast<int>(value);
            break;
        case SweepVariable::tx_antennas:
            c.tx_antennas = static_cast<int>(value);
            break;
        case SweepVariable::irs_x:
            c.irs_position[0] = value;
            break;
        }
        c.rng_seed = sub_seed;
        return c;
    }

    ChannelSet draw_channels(const SystemConfig &config)
    {
        const Rng root(config.rng_seed);
        Rng geometry = root.split("geometry");
        const Placement placement = build_geometry(config, geometry);
        Rng fading = root.split("channels");
        return sample_channels(config, placement, fading);
    }

    // ---- schemes

    namespace
    {
        SchemeOutcome from_single(const SolveResult &r)
        {
            SchemeOutcome o;
            o.rate = r.rate;
            o.iterations = r.iterations;
            o.converged = r.converged;
            for (const auto &rec : r.trajectory)
                o.trajectory.push_back(rec.objective);
            o.phase = r.phase;
            return o;
        }

        SchemeOutcome from_multi(const MultiUserResult &r)
        {
            SchemeOutcome o;
            o.rate = r.rate;
            o.iterations = r.iterations;
            o.converged = r.converged;
            for (const auto &rec : r.trajectory)
                o.trajectory.push_back(rec.objective);
            o.phase = r.phase;
            return o;
        }
    }

    SchemeOutcome beamform_fixed_phase(const SystemConfig &config, const ChannelSet &channels,
                                       const PhaseProfile &phase)
    {
        if (channels.num_users == 1)
            return from_single(beamform_single_user(config, channels, phase));
        return from_multi(beamform_multi_user(config, channels, phase));
    }

    SchemeOutcome optimize_joint(const SystemConfig &config, const ChannelSet &channels)
    {
        if (channels.num_users == 1)
            return from_single(optimize_single_user(config, channels));
        return from_multi(optimize_multi_user(config, channels));
    }

    SchemeOutcome baseline_random_phase(const SystemConfig &config, const ChannelSet &channels, Rng &rng)
    {
        const PhaseProfile phase = PhaseProfile::random(channels.num_irs_elements, rng);
        return beamform_fixed_phase(config, channels, phase);
    }

    SchemeOutcome baseline_no_irs(const SystemConfig &config, const ChannelSet &channels)
    {
        return beamform_fixed_phase(config, channels.without_irs(), PhaseProfile::zeros(channels.num_irs_elements));
    }

    SchemeOutcome quantized_phase(const SystemConfig &config, const ChannelSet &channels,
                                  const PhaseProfile &continuous, int bits)
    {
        const PhaseProfile q(quantize_phases(continuous.theta(), bits));
        SchemeOutcome o = beamform_fixed_phase(config, channels, q);
        o.phase = q;
        return o;
    }

    SchemeOutcome af_relay(const SystemConfig &config, const ChannelSet &channels)
    {
        const RelayResult r = optimize_af(config, channels);
        SchemeOutcome o;
        o.rate = r.rate;
        o.iterations = r.iterations;
        o.converged = r.converged;
        for (const auto &rec : r.trajectory)
            o.trajectory.push_back(rec.objective);
        return o;
    }

    // ---- experiment

    namespace
    {
        struct ItemResult
        {
            std::vector<ResultRow> rows;
            std::vector<TrajectoryRow> trajectory;
        };

        double seconds_since(std::chrono::steady_clock::time_point t0)
        {
            return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        }

        std::string one_line(std::string s)
        {
            for (char &c : s)
                if (c == '\n' || c == '\r')
                    c = ' ';
            return s;
        }

        ItemResult run_item(const ExperimentSpec &spec, double value, int realization)
        {
            ItemResult out;
            const std::uint64_t sub = realization_seed(spec.seed, realization);
            const SystemConfig config = point_config(spec, value, sub);

            ResultRow proto;
            proto.preset = spec.preset;
            proto.sweep = to_string(spec.sweep);
            proto.sweep_value = value;
            proto.realization = realization;
            proto.seed = sub;

            std::optional<ChannelSet> channels;
            std::string channel_error;
            try
            {
                channels = draw_channels(config);
            }
            catch (const std::exception &e)
            {
                channel_error = one_line(e.what());
            }

            // Quantized schemes round the continuous solution; it is computed once per realization.
            std::optional<SchemeOutcome> continuous;
            std::string continuous_error;
            auto get_continuous = [&]() -> const SchemeOutcome & {
                if (!continuous && continuous_error.empty())
                {
                    try
                    {
                        continuous = optimize_joint(config, *channels);
                    }
                    catch (const std::exception &e)
                    {
                        continuous_error = one_line(e.what());
                    }
                }
                if (!continuous)
                    throw std::runtime_error("continuous solve failed: " + continuous_error);
                return *continuous;
            };

            for (const Scheme &scheme : spec.schemes)
            {
                ResultRow row = proto;
                row.scheme = to_string(scheme);
                const auto t0 = std::chrono::steady_clock::now();
                try
                {
                    if (!channels)
                        throw std::runtime_error("channel draw failed: " + channel_error);
                    SchemeOutcome o;
                    switch (scheme.kind)
                    {
                    case Scheme::Kind::optimized:
                        o = get_continuous();
                        break;
                    case Scheme::Kind::quantized:
                        o = quantized_phase(config, *channels, *get_continuous().phase, scheme.bits);
                        break;
                    case Scheme::Kind::random_phase:
                    {
                        Rng rng = Rng(sub).split("random-phase");
                        o = baseline_random_phase(config, *channels, rng);
                        break;
                    }
                    case Scheme::Kind::no_irs:
                        o = baseline_no_irs(config, *channels);
                        break;
                    case Scheme::Kind::af_relay:
                        o = af_relay(config, *channels);
                        break;
                    }
                    row.rate_nats = o.rate;
                    row.rate_bps = nats_to_bits(o.rate);
                    row.iterations = o.iterations;
                    row.status = o.converged ? "ok" : "max-iterations";
                    if (!spec.trajectory_path.empty())
                        for (std::size_t i = 0; i < o.trajectory.size(); ++i)
                            out.trajectory.push_back({spec.preset, row.scheme, value, realization,
                                                      static_cast<int>(i), o.trajectory[i]});
                }
                catch (const std::exception &e)
                {
                    row.rate_nats = std::nan("");
                    row.rate_bps = std::nan("");
                    row.iterations = 0;
                    row.status = "error: " + one_line(e.what());
                }
                if (spec.record_wall_time)
                    row.wall_time = seconds_since(t0);
                out.rows.push_back(std::move(row));
            }
            return out;
        }

        void write_trajectory(const std::string &path, const std::vector<ItemResult> &items)
        {
            std::ofstream f(path, std::ios::binary);
            if (!f)
                throw UsageError("cannot open '" + path + "' for writing");
            f << "preset,scheme,sweep_value,realization,iteration,rate_nats,rate_bps\r\n";
            for (const auto &item : items)
                for (const auto &t : item.trajectory)
                    f << quote(t.preset) << ',' << quote(t.scheme) << ',' << fmt_double(t.sweep_value) << ','
                      << t.realization << ',' << t.iteration << ',' << fmt_double(t.rate_nats) << ','
                      << fmt_double(nats_to_bits(t.rate_nats)) << "\r\n";
        }
    }

    std::vector<ResultRow> run_experiment(const ExperimentSpec &spec)
    {
        spec.validate();

        const std::size_t per_value = static_cast<std::size_t>(spec.realizations);
        const std::size_t total = spec.values.size() * per_value;
        std::vector<ItemResult> items(total);

        std::atomic<std::size_t> next{0};
        auto worker = [&]() {
            for (std::size_t i = next++; i < total; i = next++)
                items[i] = run_item(spec, spec.values[i / per_value], static_cast<int>(i % per_value));
        };
        const std::size_t nthreads = std::min<std::size_t>(static_cast<std::size_t>(spec.workers), total);
        if (nthreads <= 1)
            worker();
        else
        {
            std::vector<std::jthread> pool;
            for (std::size_t t = 0; t < nthreads; ++t)
                pool.emplace_back(worker);
        }

        std::vector<ResultRow> rows;
        for (auto &item : items)
            for (auto &r : item.rows)
                rows.push_back(std::move(r));

        if (!spec.output_path.empty())
        {
            std::ofstream f(spec.output_path, std::ios::binary);
            if (!f)
                throw UsageError("cannot open '" + spec.output_path + "' for writing");
            write_csv(f, rows);
        }
        if (!spec.trajectory_path.empty())
            write_trajectory(spec.trajectory_path, items);
        return rows;
    }

    // ---- presets

    std::vector<std::string> figure_names()
    {
        return {"fig2", "fig3", "fig5", "fig6", "fig7", "fig8", "fig10", "fig11"};
    }

    ExperimentSpec figure_spec(const std::string &name)
    {
        using K = Scheme::Kind;
        const std::vector<Scheme> all = {{K::optimized, 0}, {K::quantized, 1}, {K::quantized, 2},
                                         {K::random_phase, 0}, {K::no_irs, 0}};
        ExperimentSpec s;
        s.preset = name;
        s.realizations = 50;
        s.base = make_config(Preset::single_user);
        SystemConfig multi = make_config(Preset::multi_user);
        multi.randomization_count = 200;

        if (name == "fig2")
        {
            s.sweep = SweepVariable::irs_elements;
            s.values = {20, 50, 100};
            s.schemes = {{K::optimized, 0}};
            s.realizations = 20;
        }
        else if (name == "fig3")
        {
            s.sweep = SweepVariable::max_power_dbm;
            s.values = {10, 15, 20, 25, 30, 35, 40};
            s.schemes = all;
        }
        else if (name == "fig5")
        {
            s.sweep = SweepVariable::irs_elements;
            s.values = {10, 50, 100, 150, 200, 250, 300};
            s.schemes = all;
        }
        else if (name == "fig6")
        {
            s.sweep = SweepVariable::irs_x;
            s.values = {-150, -100, -50, 0, 50, 100, 150};
            s.schemes = {{K::optimized, 0}, {K::random_phase, 0}, {K::no_irs, 0}};
        }
        else if (name == "fig7")
        {
            s.base = multi;
            s.sweep = SweepVariable::irs_elements;
            s.values = {20, 100};
            s.schemes = {{K::optimized, 0}};
            s.realizations = 20;
        }
        else if (name == "fig8")
        {
            s.base = multi;
            s.sweep = SweepVariable::max_power_dbm;
            s.values = {0, 5, 10, 15, 20};
            s.schemes = all;
            s.realizations = 30;
        }
        else if (name == "fig10")
        {
            s.base = multi;
            s.sweep = SweepVariable::irs_elements;
            s.values = {20, 40, 60, 80, 100};
            s.schemes = all;
            s.realizations = 30;
        }
        else if (name == "fig11")
        {
            s.base = multi;
            s.base.include_direct_links = false;
            s.sweep = SweepVariable::irs_elements;
            s.values = {16, 36, 64, 100};
            s.schemes = {{K::optimized, 0}, {K::af_relay, 0}};
            s.realizations = 20;
        }
        else
            throw UsageError("unknown figure preset '" + name + "'");
        return s;
    }

    // ---- summary

    std::vector<SummaryRow> summarize(const std::vector<ResultRow> &rows)
    {
        struct Acc
        {
            double sum = 0.0, sum2 = 0.0, iters = 0.0;
            int n = 0;
        };
        std::vector<std::pair<double, std::string>> order;
        std::map<std::pair<double, std::string>, Acc> acc;
        for (const auto &r : rows)
        {
            const auto key = std::make_pair(r.sweep_value, r.scheme);
            if (!acc.count(key))
                order.push_back(key);
            Acc &a = acc[key];
            if (r.status.rfind("error", 0) == 0)
                continue;
            a.sum += r.rate_bps;
            a.sum2 += r.rate_bps * r.rate_bps;
            a.iters += r.iterations;
            ++a.n;
        }
        std::vector<SummaryRow> out;
        for (const auto &key : order)
        {
            const Acc &a = acc[key];
            SummaryRow s;
            s.sweep_value = key.first;
            s.scheme = key.second;
            s.count = a.n;
            if (a.n > 0)
            {
                s.mean_bps = a.sum / a.n;
                s.mean_iterations = a.iters / a.n;
            }
            if (a.n > 1)
            {
                const double var = std::max(0.0, (a.sum2 - a.n * s.mean_bps * s.mean_bps) / (a.n - 1));
                s.stderr_bps = std::sqrt(var / a.n);
            }
            out.push_back(s);
        }
        return out;
    }

    void print_summary(std::ostream &out, const std::vector<SummaryRow> &summary)
    {
        out << std::left << std::setw(14) << "sweep" << std::setw(24) << "scheme" << std::right << std::setw(6)
            << "runs" << std::setw(12) << "mean bps" << std::setw(10) << "stderr" << std::setw(10) << "iters"
            << '\n';
        for (const auto &s : summary)
            out << std::left << std::setw(14) << fmt_double(s.sweep_value) << std::setw(24) << s.scheme
                << std::right << std::setw(6) << s.count << std::fixed << std::setprecision(4) << std::setw(12)
                << s.mean_bps << std::setw(10) << s.stderr_bps << std::setprecision(1) << std::setw(10)
                << s.mean_iterations << std::defaultfloat << std::setprecision(6) << '\n';
    }
}
