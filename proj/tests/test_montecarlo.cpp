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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cstring>

#include "mmfsec/montecarlo.hpp"
#include "mmfsec/report.hpp"

using namespace mmfsec;

namespace {

ChannelMatrix<double> test_channel(Index n = 6, double spread = 20.0, std::uint64_t seed = 11)
{
    SeededRng rng(seed);
    return gen_synthetic_channel(n, spread, rng);
}

SweepConfig small_config()
{
    SweepConfig c;
    c.snr_db_points = {0.0, 10.0};
    c.trials = 200;
    c.schemes = {Scheme::greedy_an, Scheme::waterfilling, Scheme::svd_uniform, Scheme::jensen_bound,
                 Scheme::lemma_bounds};
    c.eve_draws = 40;
    c.tau_grid_step = 0.1;
    c.master_seed = 99;
    return c;
}

bool bit_equal(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

} // namespace

TEST_CASE("scheme names round trip")
{
    for (auto s : {Scheme::waterfilling, Scheme::svd_uniform, Scheme::greedy_an, Scheme::jensen_bound,
                   Scheme::lemma_bounds})
        CHECK(parse_scheme(scheme_name(s)) == s);
    CHECK_FALSE(parse_scheme("water-filling"));
    CHECK(noise_variance_for_snr(1.0, 10.0) == doctest::Approx(0.1).epsilon(1e-15));
    CHECK(noise_variance_for_snr(2.0, 0.0) == 2.0);
}

TEST_CASE("row layout")
{
    const auto r = run_sweep(test_channel(), small_config());
    const std::vector<std::string> names{"greedy-an",    "waterfilling", "svd-uniform",
                                         "jensen-bound", "lemma-lower",  "lemma-upper"};
    REQUIRE(r.stats.size() == 2 * names.size());
    for (std::size_t i = 0; i < r.stats.size(); ++i) {
        CHECK(r.stats[i].scheme == names[i % names.size()]);
        CHECK(r.stats[i].snr_db == (i < names.size() ? 0.0 : 10.0));
        CHECK(r.stats[i].min_rs <= r.stats[i].mean_rs);
        CHECK(r.stats[i].min_rs >= 0.0);
        CHECK(r.stats[i].std_rs >= 0.0);
    }
    CHECK(r.stats[0].trials == 200);
    CHECK(r.stats[3].trials == 1);
    CHECK(r.stats[3].std_rs == 0.0);
    CHECK(r.greedy.size() == 2);
    CHECK(r.trials.empty());
}

TEST_CASE("single trial has zero spread")
{
    SweepConfig c;
    c.snr_db_points = {5.0};
    c.trials = 1;
    c.schemes = {Scheme::waterfilling};
    const auto r = run_sweep(test_channel(), c);
    REQUIRE(r.stats.size() == 1);
    CHECK(r.stats[0].std_rs == 0.0);
    CHECK(r.stats[0].min_rs == r.stats[0].mean_rs);
}

TEST_CASE("serial and parallel runs are bit identical")
{
    auto c = small_config();
    c.keep_trials = true;
    const auto h = test_channel();
    const auto a = run_sweep(h, c);
    c.threads = 4;
    const auto b = run_sweep(h, c);
    c.threads = 3;
    const auto d = run_sweep(h, c);
    REQUIRE(a.stats.size() == b.stats.size());
    for (std::size_t i = 0; i < a.stats.size(); ++i)
        for (const auto *other : {&b, &d}) {
            CHECK(bit_equal(a.stats[i].mean_rs, other->stats[i].mean_rs));
            CHECK(bit_equal(a.stats[i].min_rs, other->stats[i].min_rs));
            CHECK(bit_equal(a.stats[i].std_rs, other->stats[i].std_rs));
        }
    std::ostringstream x, y;
    write_trials_csv(x, a.trials);
    write_trials_csv(y, b.trials);
    CHECK(x.str() == y.str());
}

TEST_CASE("worst case equals the per-trial minimum")
{
    auto c = small_config();
    c.keep_trials = true;
    const auto r = run_sweep(test_channel(), c);
    for (const auto &s : r.stats) {
        if (s.scheme == "jensen-bound")
            continue;
        double lo = 1e300;
        std::int64_t count = 0;
        double sum = 0;
        for (const auto &t : r.trials)
            if (t.scheme == s.scheme && t.snr_db == s.snr_db) {
                lo = std::min(lo, t.rs);
                sum += t.rs;
                ++count;
            }
        CHECK(count == s.trials);
        CHECK(bit_equal(lo, s.min_rs));
        CHECK(sum / static_cast<double>(count) == doctest::Approx(s.mean_rs).epsilon(1e-12));
    }
}

TEST_CASE("eigenvalue bounds bracket the greedy curve")
{
    auto c = small_config();
    c.keep_trials = true;
    const auto r = run_sweep(test_channel(), c);
    auto trials_of = [&](const std::string &name, double snr) {
        std::vector<double> v;
        for (const auto &t : r.trials)
            if (t.scheme == name && t.snr_db == snr)
                v.push_back(t.rs);
        return v;
    };
    for (double snr : c.snr_db_points) {
        const auto g = trials_of("greedy-an", snr);
        const auto lo = trials_of("lemma-lower", snr);
        const auto hi = trials_of("lemma-upper", snr);
        REQUIRE(g.size() == lo.size());
        for (std::size_t k = 0; k < g.size(); ++k) {
            REQUIRE(lo[k] <= g[k] + 1e-9);
            REQUIRE(g[k] <= hi[k] + 1e-9);
        }
    }
}

TEST_CASE("Eve draws are shared across schemes")
{
    // With identical covariances two schemes must see identical per-trial rates:
    // svd-uniform equals waterfilling (up to rounding) when all gains are equal.
    const auto h = ChannelMatrix<double>::identity(3);
    SweepConfig c;
    c.snr_db_points = {10.0};
    c.trials = 50;
    c.schemes = {Scheme::waterfilling, Scheme::svd_uniform};
    c.profile = MdlProfile{10.0};
    c.keep_trials = true;
    const auto r = run_sweep(h, c);
    for (std::size_t k = 0; k < 50; ++k)
        CHECK(r.trials[k].rs == doctest::Approx(r.trials[50 + k].rs).epsilon(1e-12));
}

TEST_CASE("mean secrecy rate grows with SNR under shared draws")
{
    SweepConfig c;
    c.snr_db_points = {-5.0, 0.0, 5.0, 10.0, 15.0};
    c.trials = 300;
    c.schemes = {Scheme::greedy_an, Scheme::waterfilling, Scheme::svd_uniform};
    c.eve_draws = 60;
    c.tau_grid_step = 0.1;
    c.share_draws_across_snr = true;
    const auto r = run_sweep(test_channel(8), c);
    for (const std::string name : {"greedy-an", "waterfilling", "svd-uniform"}) {
        double prev = -1;
        for (const auto &s : r.stats)
            if (s.scheme == name) {
                CHECK_MESSAGE(s.mean_rs >= prev, name << " at " << s.snr_db << " dB");
                prev = s.mean_rs;
            }
    }
}

TEST_CASE("configuration errors")
{
    const auto h = test_channel(3);
    auto bad = [&](auto mutate) {
        auto c = small_config();
        mutate(c);
        CHECK_THROWS_AS(run_sweep(h, c), ConfigError);
    };
    bad([](SweepConfig &c) { c.snr_db_points.clear(); });
    bad([](SweepConfig &c) { c.snr_db_points = {std::nan("")}; });
    bad([](SweepConfig &c) { c.trials = 0; });
    bad([](SweepConfig &c) { c.schemes.clear(); });
    bad([](SweepConfig &c) { c.power = 0; });
    bad([](SweepConfig &c) { c.profile.mdl_db = -1; });
    bad([](SweepConfig &c) { c.tau_grid_step = 0.7; });
    bad([](SweepConfig &c) { c.eve_draws = 0; });
    bad([](SweepConfig &c) { c.gram_draws = -1; });
}

// ---------------------------------------------------------------------------

TEST_CASE("surface cells equal direct scores")
{
    const auto h = test_channel(5);
    SeededRng a(7), b(7);
    const auto grid = unimodality_surface(h, 1.0, NoiseModel<>{0.3}, MdlProfile{20.0}, {1, 3, 5},
                                          tau_grid(0.25), 40, a);
    const FrozenEveDraws<double> draws(h, MdlProfile{20.0}, 40, b);
    const AllocationScorer<double> scorer(draws, 1.0, 0.3);
    REQUIRE(grid.values.rows() == 3);
    REQUIRE(grid.values.cols() == 4);
    for (Index i = 0; i < 3; ++i)
        for (Index j = 0; j < 4; ++j)
            CHECK(bit_equal(grid.values(i, j), scorer.score(grid.s_values[i], grid.tau_values[j])));

    const auto single = unimodality_surface(scorer, {2}, {0.5});
    CHECK(bit_equal(single.values(0, 0), scorer.score(2, 0.5)));
    CHECK_THROWS_AS(unimodality_surface(scorer, {}, {0.5}), DomainError);
}

TEST_CASE("surface maximum equals the greedy result")
{
    const auto h = test_channel(6);
    SeededRng rng(8);
    const FrozenEveDraws<double> draws(h, MdlProfile{20.0}, 100, rng);
    const AllocationScorer<double> scorer(draws, 1.0, noise_variance_for_snr(1.0, 5.0));
    std::vector<Index> s_values{1, 2, 3, 4, 5, 6};
    const auto grid = unimodality_surface(scorer, s_values, tau_grid(0.05));
    const auto greedy = greedy_an_search(scorer, 0.05);
    CHECK(greedy.mean_rate == doctest::Approx(grid.values.maxCoeff()).epsilon(1e-12));
}

TEST_CASE("local maxima counting")
{
    CHECK(count_local_maxima({}) == 0);
    CHECK(count_local_maxima({1.0}) == 1);
    CHECK(count_local_maxima({1, 2, 3}) == 1);
    CHECK(count_local_maxima({3, 2, 1}) == 1);
    CHECK(count_local_maxima({1, 3, 3, 2}) == 1);
    CHECK(count_local_maxima({1, 3, 2, 4}) == 2);
    CHECK(count_local_maxima({2, 2, 2}) == 1);
    CHECK(count_local_maxima({0, 1, 0, 1, 0}) == 2);
}
