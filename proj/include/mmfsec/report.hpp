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

#ifndef MMFSEC_REPORT_HPP
#define MMFSEC_REPORT_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "mmfsec/montecarlo.hpp"

namespace mmfsec {

inline constexpr std::string_view kToolVersion = "0.3.0";

/// "start:stop:step" in dB with inclusive endpoints, or a single value.
std::vector<double> parse_snr_range(std::string_view text);

/// Comma separated scheme names.  Unknown names raise UsageError.
std::vector<Scheme> parse_scheme_list(std::string_view text);

// Header: snr_db,scheme,mean_rs,min_rs,std_rs,trials,seed
void write_stats_csv(std::ostream &out, const std::vector<TrialStats> &stats, std::uint64_t seed);

// Header: snr_db,scheme,trial,rs
void write_trials_csv(std::ostream &out, const std::vector<TrialRecord> &trials);

// Header: s,tau,mean_rs
void write_surface_csv(std::ostream &out, const SurfaceGrid &grid);

/// Everything needed to rerun a command and get the same bytes back.
struct RunManifest {
    std::string command;
    std::string tool_version{kToolVersion};
    std::uint64_t master_seed = 0;
    std::string channel_digest; // hex FNV-1a of the canonical channel file
    std::string timestamp;      // UTC, ISO 8601
    std::string config_json;    // resolved configuration

    std::string to_json() const;
};

std::string sweep_config_json(const SweepConfig &config);
std::string utc_timestamp();

} // namespace mmfsec

#endif
