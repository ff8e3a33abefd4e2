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

#include "mmfsec/montecarlo.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <thread>

namespace mmfsec {

std::string_view scheme_name(Scheme s)
{
    switch (s) {
    case Scheme::waterfilling: return "waterfilling";
    case Scheme::svd_uniform: return "svd-uniform";
    case Scheme::greedy_an: return "greedy-an";
    case Scheme::jensen_bound: return "jensen-bound";
    case Scheme::lemma_bounds: return "lemma-bounds";
    }
    return "?";
}

std::optional<Scheme> parse_scheme(std::string_view name)
{
    for (auto s : {Scheme::waterfilling, Scheme::svd_uniform, Scheme::greedy_an, Scheme::jensen_bound,
                   Scheme::lemma_bounds})
        if (scheme_name(s) == name)
            return s;
    return std::nullopt;
}

double noise_variance_for_snr(double power, double snr_db)
{
    return power / std::pow(10.0, snr_db / 10.0);
}

void SweepConfig::validate() const
{
    if (snr_db_points.empty())
        throw ConfigError("at least one SNR point is required");
    for (double s : snr_db_points)
        if (!std::isfinite(s))
            throw ConfigError("SNR points must be finite");
    if (trials < 1)
        throw ConfigError("trials must be >= 1");
    if (schemes.empty())
        throw ConfigError("at least one scheme is required");
    if (!(power > 0.0) || !std::isfinite(power))
        throw ConfigError("power must be finite and > 0");
    if (!std::isfinite(profile.mdl_db) || profile.mdl_db < 0.0)
        throw ConfigError("mdl_db must be finite and >= 0");
    if (!(tau_grid_step > 0.0 && tau_grid_step <= 0.5))
        throw ConfigError("tau step must lie in (0, 0.5]");
    if (eve_draws < 1)
        throw ConfigError("eve draws must be >= 1");
    if (gram_draws < 0)
        throw ConfigError("gram draws must be >= 0");
}

namespace {

// One diagonal-basis covariance evaluated against every trial.
struct DiagonalScheme {
    std::string name;
    RVectorXd signal;
    RVectorXd an;
    double bob_rate = 0;
};

struct Moments {
    double mean = 0;
    double min = 0;
    double std = 0;
};

// Fixed-order fold: ascending trial index.
Moments fold(const std::vector<double> &xs)
{
    Moments m;
    double sum = 0;
    m.min = xs.front();
    for (double x : xs) {
        sum += x;
        m.min = std::min(m.min, x);
    }
    m.mean = sum / static_cast<double>(xs.size());
    if (xs.size() > 1) {
        double ss = 0;
        for (double x : xs)
            ss += (x - m.mean) * (x - m.mean);
        m.std = std::sqrt(ss / static_cast<double>(xs.size() - 1));
    }
    return m;
}

template <typename Fn>
void parallel_for(std::int64_t count, unsigned threads, Fn &&fn)
{
    if (threads == 0)
        threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::int64_t>(threads, count));
    if (threads <= 1) {
        fn(std::int64_t{0}, count);
        return;
    }
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    const std::int64_t chunk = (count + threads - 1) / threads;
    for (unsigned w = 0; w < threads; ++w) {
        const std::int64_t begin = w * chunk;
        const std::int64_t end = std::min(count, begin + chunk);
        if (begin >= end)
            break;
        pool.emplace_back([&fn, begin, end] { fn(begin, end); });
    }
}

} // namespace

SweepResult run_sweep(const ChannelMatrix<double> &h, const SweepConfig &config)
{
    config.validate();
    const Index n = h.n();
    const RVectorXd gains_sq = h.gains_squared();
    const auto &t = h.svd().right;
    const bool want_greedy = std::any_of(config.schemes.begin(), config.schemes.end(), [](Scheme s) {
        return s == Scheme::greedy_an || s == Scheme::lemma_bounds;
    });

    SweepResult result;
    for (std::size_t point = 0; point < config.snr_db_points.size(); ++point) {
        const auto started = std::chrono::steady_clock::now();
        const double snr_db = config.snr_db_points[point];
        const double sigma2 = noise_variance_for_snr(config.power, snr_db);
        const NoiseModel<double> noise{sigma2};

        std::optional<GreedySearchResult<double>> greedy;
        if (want_greedy) {
            SeededRng search_rng(config.master_seed, stream_key({kSearchStreamTag, point}));
            greedy = greedy_an_search(h, config.profile, config.power, noise, config.eve_draws,
                                      config.tau_grid_step, search_rng);
            result.greedy.push_back({snr_db, greedy->best_s, greedy->best_tau, greedy->mean_rate});
        }

        // Covariances for every scheme, all diagonal in the basis of T.
        std::vector<DiagonalScheme> diag;
        auto add_diag = [&](std::string name, RVectorXd p, RVectorXd b) {
            const double rb = parallel_channel_rate(gains_sq, p, sigma2);
            diag.push_back({std::move(name), std::move(p), std::move(b), rb});
        };
        bool lemma = false;
        for (Scheme s : config.schemes) {
            switch (s) {
            case Scheme::waterfilling:
                add_diag("waterfilling", waterfilling(gains_sq, config.power, sigma2), RVectorXd::Zero(n));
                break;
            case Scheme::svd_uniform:
                add_diag("svd-uniform", RVectorXd::Constant(n, config.power / static_cast<double>(n)),
                         RVectorXd::Zero(n));
                break;
            case Scheme::greedy_an:
                add_diag("greedy-an", greedy->solution.allocation.signal_powers,
                         greedy->solution.allocation.an_powers);
                break;
            case Scheme::lemma_bounds:
                lemma = true;
                break;
            case Scheme::jensen_bound:
                break;
            }
        }
        const RVectorXd greedy_p = want_greedy ? greedy->solution.allocation.signal_powers : RVectorXd();
        const RVectorXd greedy_b = want_greedy ? greedy->solution.allocation.an_powers : RVectorXd();
        const double greedy_rb = want_greedy ? parallel_channel_rate(gains_sq, greedy_p, sigma2) : 0.0;
        // Spectra of Qs + Qa and Qa, ascending, for the eigenvalue bounds.
        RVectorXd spec_total, spec_an;
        if (lemma) {
            spec_total = greedy_p + greedy_b;
            std::sort(spec_total.data(), spec_total.data() + n);
            spec_an = greedy_b;
            std::sort(spec_an.data(), spec_an.data() + n);
        }

        const std::int64_t trials = config.trials;
        std::vector<std::vector<double>> rs(diag.size(), std::vector<double>(static_cast<std::size_t>(trials)));
        std::vector<double> lemma_lo, lemma_hi;
        if (lemma) {
            lemma_lo.resize(static_cast<std::size_t>(trials));
            lemma_hi.resize(static_cast<std::size_t>(trials));
        }
        const std::uint64_t point_key = config.share_draws_across_snr ? 0 : point;

        parallel_for(trials, config.threads, [&](std::int64_t begin, std::int64_t end) {
            for (std::int64_t k = begin; k < end; ++k) {
                SeededRng rng(config.master_seed,
                              stream_key({kTrialStreamTag, point_key, static_cast<std::uint64_t>(k)}));
                const auto g = draw_eve_channel(h, config.profile, rng);
                const CMatrixXd gt = g.entries() * t;
                const auto idx = static_cast<std::size_t>(k);
                for (std::size_t s = 0; s < diag.size(); ++s) {
                    const double re = rate_in_basis(gt, diag[s].signal, diag[s].an, sigma2);
                    rs[s][idx] = std::max(0.0, diag[s].bob_rate - re);
                }
                if (lemma) {
                    const Eigen::JacobiSVD<CMatrixXd> sv(g.entries());
                    const auto b = detail::eve_rate_bounds_from_spectra<double>(sv.singularValues(), spec_total,
                                                                                spec_an, sigma2);
                    lemma_lo[idx] = std::max(0.0, greedy_rb - b.upper);
                    lemma_hi[idx] = std::max(0.0, greedy_rb - b.lower);
                }
            }
        });

        std::optional<JensenBound<double>> jensen;
        if (std::find(config.schemes.begin(), config.schemes.end(), Scheme::jensen_bound) != config.schemes.end()) {
            SeededRng gram_rng(config.master_seed, stream_key({kGramStreamTag, point}));
            jensen = jensen_secrecy_lower_bound(h, config.profile, config.power, noise, config.gram_draws, gram_rng);
        }

        const double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

        auto emit = [&](const std::string &name, const std::vector<double> &values) {
            const Moments m = fold(values);
            result.stats.push_back({snr_db, name, m.mean, m.min, m.std, static_cast<std::int64_t>(values.size()),
                                    elapsed});
            if (config.keep_trials)
                for (std::size_t k = 0; k < values.size(); ++k)
                    result.trials.push_back({snr_db, name, static_cast<std::int64_t>(k), values[k]});
        };

        std::size_t next_diag = 0;
        for (Scheme s : config.schemes) {
            switch (s) {
            case Scheme::waterfilling:
            case Scheme::svd_uniform:
            case Scheme::greedy_an:
                emit(diag[next_diag].name, rs[next_diag]);
                ++next_diag;
                break;
            case Scheme::lemma_bounds:
                emit("lemma-lower", lemma_lo);
                emit("lemma-upper", lemma_hi);
                break;
            case Scheme::jensen_bound:
                result.stats.push_back({snr_db, "jensen-bound", jensen->rate, jensen->rate, 0.0, 1, elapsed});
                break;
            }
        }
    }
    return result;
}

SurfaceGrid unimodality_surface(const AllocationScorer<double> &scorer, const std::vector<Index> &s_values,
                                const std::vector<double> &tau_grid)
{
    if (s_values.empty() || tau_grid.empty())
        throw DomainError("surface grids must be non-empty");
    SurfaceGrid grid{s_values, tau_grid, Eigen::MatrixXd(s_values.size(), tau_grid.size())};
    for (std::size_t i = 0; i < s_values.size(); ++i)
        for (std::size_t j = 0; j < tau_grid.size(); ++j)
            grid.values(static_cast<Index>(i), static_cast<Index>(j)) = scorer.score(s_values[i], tau_grid[j]);
    return grid;
}

SurfaceGrid unimodality_surface(const ChannelMatrix<double> &h, double power, const NoiseModel<double> &noise,
                                const MdlProfile &profile, const std::vector<Index> &s_values,
                                const std::vector<double> &tau_grid, std::int64_t eve_draws, SeededRng &rng)
{
    noise.validate();
    const FrozenEveDraws<double> draws(h, profile, eve_draws, rng);
    const AllocationScorer<double> scorer(draws, power, noise.sigma2);
    return unimodality_surface(scorer, s_values, tau_grid);
}

int count_local_maxima(const std::vector<double> &values, double tol)
{
    // Collapse plateaus, then count strict peaks (ends included).
    std::vector<double> v;
    for (double x : values)
        if (v.empty() || std::abs(x - v.back()) > tol)
            v.push_back(x);
    if (v.size() <= 1)
        return v.empty() ? 0 : 1;
    int peaks = 0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const bool left = i == 0 || v[i] > v[i - 1];
        const bool right = i + 1 == v.size() || v[i] > v[i + 1];
        peaks += left && right;
    }
    return peaks;
}

} // namespace mmfsec
