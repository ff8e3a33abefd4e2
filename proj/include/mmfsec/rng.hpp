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

#ifndef MMFSEC_RNG_HPP
#define MMFSEC_RNG_HPP

#include <cmath>
#include <complex>
#include <cstdint>
#include <initializer_list>
#include <numbers>
#include <random>

namespace mmfsec {

/// SplitMix64 finaliser, used to decorrelate seeds and stream keys.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept
{
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Folds an ordered tuple of keys into one stream index.  Used to key
/// per-trial streams such as (kind, snr point, trial).
constexpr std::uint64_t stream_key(std::initializer_list<std::uint64_t> keys) noexcept
{
    std::uint64_t h = 0x6A09E667F3BCC909ULL;
    for (auto k : keys)
        h = splitmix64(h ^ splitmix64(k));
    return h;
}

/**
 * Reproducible random stream identified by (master_seed, stream_index).
 *
 * The engine is std::mt19937_64 (its output sequence is fixed by the C++
 * standard) seeded with splitmix64(master_seed ^ splitmix64(stream_index)).
 * Distributions are implemented here rather than taken from <random>, whose
 * algorithms are implementation-defined:
 *   uniform  = (next() >> 11) * 2^-53           in [0, 1)
 *   normal   = Box-Muller on (1 - u1, u2), both outputs used in turn
 *   complex  = (normal + i normal) / sqrt(2)     i.e. CN(0, 1)
 */
class SeededRng {
public:
    SeededRng(std::uint64_t master_seed, std::uint64_t stream_index = 0)
        : master_seed_(master_seed), stream_index_(stream_index),
          engine_(splitmix64(master_seed ^ splitmix64(stream_index)))
    {}

    std::uint64_t master_seed() const noexcept { return master_seed_; }
    std::uint64_t stream_index() const noexcept { return stream_index_; }

    /// Independent stream sharing this master seed.
    SeededRng substream(std::uint64_t index) const { return {master_seed_, index}; }

    std::uint64_t next_u64() { return engine_(); }

    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n).
    std::uint64_t uniform_index(std::uint64_t n)
    {
        // Lemire-style rejection keeps this exactly uniform.
        const std::uint64_t limit = (0 - n) % n;
        for (;;) {
            const std::uint64_t x = engine_();
            if (x >= limit)
                return x % n;
        }
    }

    double normal()
    {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = 1.0 - uniform(); // (0, 1]
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double phi = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(phi);
        has_spare_ = true;
        return r * std::cos(phi);
    }

    template <typename Real = double>
    std::complex<Real> complex_normal()
    {
        const double re = normal();
        const double im = normal();
        return {static_cast<Real>(re * std::numbers::sqrt2 / 2),
                static_cast<Real>(im * std::numbers::sqrt2 / 2)};
    }

private:
    std::uint64_t master_seed_;
    std::uint64_t stream_index_;
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace mmfsec

#endif
