// SPDX-License-Identifier: Apache-2.0
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

#include "mmfsec/report.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <ostream>

#include <json.hpp>

#include "mmfsec/format.hpp"

namespace mmfsec {

namespace {

double parse_number(std::string_view text, std::string_view what)
{
    double value = 0;
    const auto *first = text.data();
    const auto *last = text.data() + text.size();
    const auto res = std::from_chars(first, last, value);
    if (res.ec != std::errc() || res.ptr != last || text.empty())
        throw UsageError("invalid " + std::string(what) + " '" + std::string(text) + "'");
    return value;
}

} // namespace

std::vector<double> parse_snr_range(std::string_view text)
{
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    for (;;) {
        const auto colon = text.find(':', start);
        parts.push_back(text.substr(start, colon - start));
        if (colon == std::string_view::npos)
            break;
        start = colon + 1;
    }
    if (parts.size() == 1)
        return {parse_number(parts[0], "SNR value")};
    if (parts.size() != 3)
        throw UsageError("SNR range must be start:stop:step, got '" + std::string(text) + "'");

    const double a = parse_number(parts[0], "SNR start");
    const double b = parse_number(parts[1], "SNR stop");
    const double step = parse_number(parts[2], "SNR step");
    if (!(step > 0.0))
        throw ConfigError("SNR step must be > 0");
    if (b < a)
        throw ConfigError("SNR stop must be >= start");
    const auto count = static_cast<std::int64_t>(std::floor((b - a) / step + 1e-9)) + 1;
    if (count > 100000)
        throw ConfigError("SNR range has too many points");
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(count));
    for (std::int64_t k = 0; k < count; ++k)
        out.push_back(a + static_cast<double>(k) * step);
    return out;
}

std::vector<Scheme> parse_scheme_list(std::string_view text)
{
    std::vector<Scheme> out;
    std::size_t start = 0;
    for (;;) {
        const auto comma = text.find(',', start);
        const auto name = text.substr(start, comma - start);
        const auto scheme = parse_scheme(name);
        if (!scheme)
            throw UsageError("unknown scheme '" + std::string(name) + "'");
        out.push_back(*scheme);
        if (comma == std::string_view::npos)
            break;
        start = comma + 1;
    }
    return out;
}

void write_stats_csv(std::ostream &out, const std::vector<TrialStats> &stats, std::uint64_t seed)
{
    out << "snr_db,scheme,mean_rs,min_rs,std_rs,trials,seed\n";
    for (const auto &s : stats)
        out << format_double(s.snr_db) << ',' << s.scheme << ',' << format_double(s.mean_rs) << ','
            << format_double(s.min_rs) << ',' << format_double(s.std_rs) << ',' << s.trials << ',' << seed
            << '\n';
}

void write_trials_csv(std::ostream &out, const std::vector<TrialRecord> &trials)
{
    out << "snr_db,scheme,trial,rs\n";
    for (const auto &t : trials)
        out << format_double(t.snr_db) << ',' << t.scheme << ',' << t.trial << ',' << format_double(t.rs) << '\n';
}

void write_surface_csv(std::ostream &out, const SurfaceGrid &grid)
{
    out << "s,tau,mean_rs\n";
    for (std::size_t i = 0; i < grid.s_values.size(); ++i)
        for (std::size_t j = 0; j < grid.tau_values.size(); ++j)
            out << grid.s_values[i] << ',' << format_double(grid.tau_values[j]) << ','
                << format_double(grid.values(static_cast<Index>(i), static_cast<Index>(j))) << '\n';
}

std::string RunManifest::to_json() const
{
    nlohmann::ordered_json j;
    j["command"] = command;
    j["tool_version"] = tool_version;
    j["master_seed"] = master_seed;
    j["channel_digest"] = channel_digest;
    j["timestamp"] = timestamp;
    j["config"] = config_json.empty() ? nlohmann::ordered_json::object() : nlohmann::ordered_json::parse(config_json);
    return j.dump(2) + "\n";
}

std::string sweep_config_json(const SweepConfig &config)
{
    nlohmann::ordered_json j;
    j["snr_db"] = config.snr_db_points;
    j["snr_convention"] = "SNR_dB = 10 log10(P / sigma2), P fixed";
    j["rate_unit"] = "bits per channel use";
    j["trials"] = config.trials;
    auto schemes = nlohmann::ordered_json::array();
    for (auto s : config.schemes)
        schemes.push_back(std::string(scheme_name(s)));
    j["schemes"] = schemes;
    j["power"] = config.power;
    j["mdl_db"] = config.profile.mdl_db;
    j["loss_draw_rule"] = "uniform-linear";
    j["normalize_trace"] = config.profile.normalize_trace;
    j["master_seed"] = config.master_seed;
    j["tau_step"] = config.tau_grid_step;
    j["eve_draws"] = config.eve_draws;
    j["gram_draws"] = config.gram_draws;
    j["share_draws_across_snr"] = config.share_draws_across_snr;
    return j.dump();
}

std::string utc_timestamp()
{
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

} // namespace mmfsec
