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

#ifndef MMFSEC_MONTECARLO_HPP
#define MMFSEC_MONTECARLO_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mmfsec/channel.hpp"
#include "mmfsec/precoding.hpp"
#include "mmfsec/rates.hpp"

namespace mmfsec {

enum class Scheme {
    waterfilling, // peaceful waterfilling, no AN
    svd_uniform,  // equal power on every mode, no AN
    greedy_an,
    jensen_bound,
    lemma_bounds, // emits lemma-lower and lemma-upper rows
};

std::string_view scheme_name(Scheme s);
std::optional<Scheme> parse_scheme(std::string_view name);

/// SNR_dB = 10 log10(P / sigma2): the power stays fixed and sigma2 moves.
double noise_variance_for_snr(double power, double snr_db);

struct SweepConfig {
    std::vector<double> snr_db_points;
    std::int64_t trials = 20000;
    std::vector<Scheme> schemes{Scheme::greedy_an, Scheme::waterfilling};
    double power = 1.0;
    MdlProfile profile{};
    std::uint64_t master_seed = 1;
    double tau_grid_step = 0.05;
    std::int64_t eve_draws = 200;      // frozen draws for the greedy search
    std::int64_t gram_draws = 0;       // Monte Carlo cross-check of E[G^H G]
    bool share_draws_across_snr = false;
    bool keep_trials = false;
    unsigned threads = 1; // 0: hardware concurrency

    /// Throws ConfigError on the first violated invariant.
    void validate() const;
};

struct TrialStats {
    double snr_db = 0;
    std::string scheme;
    double mean_rs = 0;
    double min_rs = 0;
    double std_rs = 0;
    std::int64_t trials = 0;
    double wall_seconds = 0;
};

struct TrialRecord {
    double snr_db;
    std::string scheme;
    std::int64_t trial;
    double rs;
};

/// What the greedy search picked at one SNR point.
struct GreedyChoice {
    double snr_db;
    Index s_count;
    double tau;
    double search_mean_rs; // on the search's own frozen draws
};

struct SweepResult {
    std::vector<TrialStats> stats; // SNR-major, schemes in config order
    std::vector<TrialRecord> trials; // only with keep_trials
    std::vector<GreedyChoice> greedy;
};

SweepResult run_sweep(const ChannelMatrix<double> &h, const SweepConfig &config);

/// Mean secrecy rate on a grid of (S, tau) over one frozen draw set.
struct SurfaceGrid {
    std::vector<Index> s_values;
    std::vector<double> tau_values;
    Eigen::MatrixXd values; // rows: S, cols: tau
};

SurfaceGrid unimodality_surface(const AllocationScorer<double> &scorer, const std::vector<Index> &s_values,
                                const std::vector<double> &tau_grid);

SurfaceGrid unimodality_surface(const ChannelMatrix<double> &h, double power, const NoiseModel<double> &noise,
                                const MdlProfile &profile, const std::vector<Index> &s_values,
                                const std::vector<double> &tau_grid, std::int64_t eve_draws, SeededRng &rng);

/// Number of local maxima of a sequence; a plateau counts once.
int count_local_maxima(const std::vector<double> &values, double tol = 1e-12);

// Stream tags for run_sweep, exposed so tests can reproduce its draws.
inline constexpr std::uint64_t kTrialStreamTag = 1;
inline constexpr std::uint64_t kSearchStreamTag = 2;
inline constexpr std::uint64_t kGramStreamTag = 3;

} // namespace mmfsec

#endif
