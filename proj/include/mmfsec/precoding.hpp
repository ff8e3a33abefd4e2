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

#ifndef MMFSEC_PRECODING_HPP
#define MMFSEC_PRECODING_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <vector>

#include "mmfsec/channel.hpp"
#include "mmfsec/rates.hpp"

namespace mmfsec {

/// Per-mode powers in the right-singular basis of H, ordered by decreasing
/// gain.  Signal and AN supports are disjoint.
template <typename Real = double>
struct PowerAllocation {
    RVector<Real> signal_powers;
    RVector<Real> an_powers;
    Real tau = 1;       // effective signal fraction of the budget
    Real threshold = 0; // modes with d_i^2 > threshold carry signal
    Index s_count = 0;  // ||p||_0
    Index a_count = 0;  // ||beta||_0
    bool degenerate = false; // tau = 0: no signal at all

    Index n() const { return signal_powers.size(); }
    Real total_power() const { return signal_powers.sum() + an_powers.sum(); }
};

template <typename Real = double>
struct PrecoderSolution {
    CMatrix<Real> f_signal; // N x S
    CMatrix<Real> e_an;     // N x A
    CMatrix<Real> q_s;
    CMatrix<Real> q_a;
    Real total_power = 0;
    PowerAllocation<Real> allocation;
};

namespace detail {

template <typename Real>
void require_descending(const RVector<Real> &gains_sq)
{
    for (Index i = 0; i < gains_sq.size(); ++i) {
        if (!(gains_sq(i) >= Real(0)))
            throw DomainError("channel gains must be >= 0");
        if (i > 0 && gains_sq(i) > gains_sq(i - 1))
            throw DomainError("channel gains must be sorted in descending order");
    }
}

} // namespace detail

// ---------------------------------------------------------------------------

/// Classic waterfilling p_i = [mu - sigma2 / d_i^2]^+ with sum p_i = P.
template <typename Real>
RVector<Real> waterfilling(const RVector<Real> &gains_sq, Real power, Real sigma2)
{
    detail::require_descending(gains_sq);
    if (!(power > Real(0)))
        throw DomainError("power must be > 0");
    if (!(sigma2 > Real(0)))
        throw DomainError("noise variance must be > 0");
    const Index n = gains_sq.size();
    Index usable = 0;
    while (usable < n && gains_sq(usable) > Real(0))
        ++usable;
    if (usable == 0)
        throw DomainError("waterfilling: no mode with positive gain");

    Real inv_sum = 0;
    Real level = 0;
    Index active = 0;
    for (Index k = 0; k < usable; ++k) {
        inv_sum += sigma2 / gains_sq(k);
        level = (power + inv_sum) / static_cast<Real>(k + 1);
        active = k + 1;
        if (k + 1 == usable || !(level > sigma2 / gains_sq(k + 1)))
            break;
    }

    RVector<Real> p = RVector<Real>::Zero(n);
    for (Index i = 0; i < active; ++i)
        p(i) = std::max(Real(0), level - sigma2 / gains_sq(i));
    return p;
}

/// Equal signal power on the `s` strongest modes, equal AN on the rest.
template <typename Real>
PowerAllocation<Real> allocation_for_count(const RVector<Real> &gains_sq, Index s, Real tau, Real power)
{
    const Index n = gains_sq.size();
    if (s < 0 || s > n)
        throw DomainError("signal mode count out of range");
    if (!(tau >= Real(0) && tau <= Real(1)))
        throw DomainError("tau must lie in [0, 1]");
    if (!(power > Real(0)))
        throw DomainError("power must be > 0");
    if (s == 0 && tau > Real(0))
        throw InfeasibleError("no signal mode above the threshold while tau > 0");

    PowerAllocation<Real> a;
    a.signal_powers = RVector<Real>::Zero(n);
    a.an_powers = RVector<Real>::Zero(n);
    a.threshold = s < n ? gains_sq(s) : Real(0);
    const Index an_modes = n - s;

    if (an_modes == 0) {
        a.signal_powers.setConstant(power / static_cast<Real>(s));
        a.tau = 1;
    } else if (tau == Real(0)) {
        // All AN; the designated signal modes stay silent.
        a.an_powers.tail(an_modes).setConstant(power / static_cast<Real>(an_modes));
        a.tau = 0;
        a.degenerate = true;
    } else if (tau == Real(1)) {
        a.signal_powers.head(s).setConstant(power / static_cast<Real>(s));
        a.tau = 1;
    } else {
        a.signal_powers.head(s).setConstant(tau * power / static_cast<Real>(s));
        a.an_powers.tail(an_modes).setConstant((Real(1) - tau) * power / static_cast<Real>(an_modes));
        a.tau = tau;
    }
    a.s_count = (a.signal_powers.array() > Real(0)).count();
    a.a_count = (a.an_powers.array() > Real(0)).count();
    return a;
}

/// p_i = c for d_i^2 > theta, AN power gamma on the remaining modes, with
/// c = tau P / S and gamma = (1 - tau) P / A.
template <typename Real>
PowerAllocation<Real> threshold_allocation(const RVector<Real> &gains_sq, Real theta, Real tau, Real power)
{
    detail::require_descending(gains_sq);
    if (!(theta >= Real(0)))
        throw DomainError("threshold must be >= 0");
    const Index s = (gains_sq.array() > theta).count();
    auto a = allocation_for_count(gains_sq, s, tau, power);
    a.threshold = theta;
    return a;
}

/// Signal and AN columns along the right singular vectors of H.
template <typename Real>
PrecoderSolution<Real> build_precoder(const ChannelMatrix<Real> &h, const PowerAllocation<Real> &alloc)
{
    const Index n = h.n();
    if (alloc.signal_powers.size() != n || alloc.an_powers.size() != n)
        throw DimensionError("allocation does not match the channel size");
    const auto &t = h.svd().right;

    PrecoderSolution<Real> sol;
    sol.allocation = alloc;
    sol.f_signal.resize(n, alloc.s_count);
    sol.e_an.resize(n, alloc.a_count);
    Index fs = 0;
    Index fa = 0;
    for (Index i = 0; i < n; ++i) {
        const Real p = alloc.signal_powers(i);
        const Real b = alloc.an_powers(i);
        if (p > Real(0) && b > Real(0))
            throw DomainError("signal and AN supports overlap");
        if (p > Real(0))
            sol.f_signal.col(fs++) = t.col(i) * std::sqrt(p);
        else if (b > Real(0))
            sol.e_an.col(fa++) = t.col(i) * std::sqrt(b);
    }
    sol.q_s = sol.f_signal * sol.f_signal.adjoint();
    sol.q_a = sol.e_an * sol.e_an.adjoint();
    sol.total_power = alloc.total_power();
    return sol;
}

// ---------------------------------------------------------------------------
// Frozen eavesdropper realisations (common random numbers)

/// A fixed set of eavesdropper draws G_k together with their projections
/// G_k T onto the right-singular basis of H.
template <typename Real = double>
class FrozenEveDraws {
public:
    FrozenEveDraws(const ChannelMatrix<Real> &h, const MdlProfile &profile, std::int64_t draws,
                   SeededRng &rng)
        : h_(h)
    {
        if (draws < 1)
            throw DomainError("eve draws must be >= 1");
        channels_.reserve(static_cast<std::size_t>(draws));
        projected_.reserve(static_cast<std::size_t>(draws));
        const auto &t = h.svd().right;
        for (std::int64_t k = 0; k < draws; ++k) {
            channels_.push_back(draw_eve_channel(h, profile, rng));
            projected_.push_back(channels_.back().entries() * t);
        }
    }

    const ChannelMatrix<Real> &bob() const { return h_; }
    Index n() const { return h_.n(); }
    std::size_t size() const { return channels_.size(); }
    const std::vector<ChannelMatrix<Real>> &channels() const { return channels_; }
    const std::vector<CMatrix<Real>> &projected() const { return projected_; }

private:
    ChannelMatrix<Real> h_;
    std::vector<ChannelMatrix<Real>> channels_;
    std::vector<CMatrix<Real>> projected_;
};

/**
 * Mean secrecy rate mean_k [R_b - R_e(G_k)]^+ of threshold allocations over
 * a frozen draw set.  For each signal count S the Gram pieces
 * G_k T_S T_S^H G_k^H and G_k T_A T_A^H G_k^H are cached, so each (S, tau)
 * cell costs two Cholesky factorisations per draw.
 */
template <typename Real = double>
class AllocationScorer {
public:
    AllocationScorer(const FrozenEveDraws<Real> &draws, Real power, Real sigma2)
        : draws_(draws), gains_sq_(draws.bob().gains_squared()), power_(power), sigma2_(sigma2)
    {
        if (!(power > Real(0)))
            throw DomainError("power must be > 0");
        if (!(sigma2 > Real(0)))
            throw DomainError("noise variance must be > 0");
    }

    const ChannelMatrix<Real> &bob() const { return draws_.bob(); }
    const RVector<Real> &gains_squared() const { return gains_sq_; }
    Real power() const { return power_; }
    Real sigma2() const { return sigma2_; }
    Index n() const { return draws_.n(); }

    PowerAllocation<Real> allocation(Index s, Real tau) const
    {
        return allocation_for_count(gains_sq_, s, tau, power_);
    }

    Real score(Index s, Real tau) const { return score(allocation(s, tau)); }

    Real score(const PowerAllocation<Real> &a) const
    {
        if (a.s_count == 0)
            return 0;
        const Index n = draws_.n();
        const Index s = a.s_count;
        // Allocations from allocation_for_count put signal on the leading
        // modes with a common power, AN on the trailing ones.
        const Real c = a.signal_powers(0);
        const Real gamma = a.a_count > 0 ? a.an_powers(n - 1) : Real(0);
        const Real r_b = parallel_channel_rate(gains_sq_, a.signal_powers, sigma2_);
        const auto &grams = grams_for(s);

        Real sum = 0;
        for (const auto &[sig, an] : grams) {
            CMatrix<Real> k_total = c * sig;
            Real noise_term = static_cast<Real>(n) * std::log2(sigma2_);
            if (gamma > Real(0)) {
                CMatrix<Real> k_an = gamma * an;
                k_an.diagonal().array() += sigma2_;
                noise_term = detail::log2_det_pd(k_an);
                k_total += gamma * an;
            }
            k_total.diagonal().array() += sigma2_;
            const Real r_e = std::max(Real(0), detail::log2_det_pd(k_total) - noise_term);
            sum += std::max(Real(0), r_b - r_e);
        }
        return sum / static_cast<Real>(grams.size());
    }

private:
    using GramPair = std::pair<CMatrix<Real>, CMatrix<Real>>;

    const std::vector<GramPair> &grams_for(Index s) const
    {
        auto it = cache_.find(s);
        if (it != cache_.end())
            return it->second;
        const Index n = draws_.n();
        std::vector<GramPair> grams;
        grams.reserve(draws_.size());
        for (const auto &gt : draws_.projected()) {
            CMatrix<Real> sig = gt.leftCols(s) * gt.leftCols(s).adjoint();
            CMatrix<Real> an = n > s ? CMatrix<Real>(gt.rightCols(n - s) * gt.rightCols(n - s).adjoint())
                                     : CMatrix<Real>::Zero(n, n);
            grams.emplace_back(std::move(sig), std::move(an));
        }
        return cache_.emplace(s, std::move(grams)).first->second;
    }

    const FrozenEveDraws<Real> &draws_;
    RVector<Real> gains_sq_;
    Real power_;
    Real sigma2_;
    mutable std::map<Index, std::vector<GramPair>> cache_;
};

/// tau = 1, 1 - step, 1 - 2 step, ... down to (but excluding) 0.
template <typename Real>
std::vector<Real> tau_grid(Real step)
{
    if (!(step > Real(0) && step <= Real(0.5)))
        throw DomainError("tau grid step must lie in (0, 0.5]");
    std::vector<Real> taus;
    for (int j = 0;; ++j) {
        const Real tau = Real(1) - static_cast<Real>(j) * step;
        if (!(tau > Real(1e-9)))
            break;
        taus.push_back(tau);
    }
    return taus;
}

template <typename Real = double>
struct SearchPoint {
    Index s_count;
    Real tau;
    Real mean_rate;
};

template <typename Real = double>
struct GreedySearchResult {
    PrecoderSolution<Real> solution;
    Real mean_rate = 0;
    Index best_s = 0;
    Real best_tau = 1;
    std::vector<SearchPoint<Real>> trace;
};

struct GreedyOptions {
    bool refine_tau = false; // golden-section on [tau* - step, tau* + step]
};

/**
 * Greedy AN allocation.  The outer loop lowers the threshold one mode at a
 * time (S = 1, 2, ...), the inner loop shifts power to AN (tau = 1,
 * 1 - step, ...).  Each loop stops at its first non-improvement.  Ties
 * within 1e-12 keep the earlier candidate, i.e. smaller S, then larger tau.
 */
template <typename Real>
GreedySearchResult<Real> greedy_an_search(const AllocationScorer<Real> &scorer, Real tau_grid_step,
                                          const GreedyOptions &options = {})
{
    constexpr Real tie = Real(1e-12);
    const Index n = scorer.n();
    const std::vector<Real> taus = tau_grid(tau_grid_step);

    GreedySearchResult<Real> out;
    Real best = -std::numeric_limits<Real>::infinity();
    for (Index s = 1; s <= n; ++s) {
        Real best_here = -std::numeric_limits<Real>::infinity();
        Real tau_here = 1;
        for (Real tau : taus) {
            const Real v = scorer.score(s, tau);
            out.trace.push_back({s, tau, v});
            if (!(v > best_here + tie))
                break;
            best_here = v;
            tau_here = tau;
            if (s == n)
                break; // no AN modes left, tau has no effect
        }
        if (!(best_here > best + tie))
            break;
        best = best_here;
        out.best_s = s;
        out.best_tau = tau_here;
    }

    if (options.refine_tau && out.best_s < n) {
        const Real inv_phi = (std::sqrt(Real(5)) - Real(1)) / Real(2);
        Real lo = std::max(Real(1e-9), out.best_tau - tau_grid_step);
        Real hi = std::min(Real(1), out.best_tau + tau_grid_step);
        Real x1 = hi - inv_phi * (hi - lo);
        Real x2 = lo + inv_phi * (hi - lo);
        Real f1 = scorer.score(out.best_s, x1);
        Real f2 = scorer.score(out.best_s, x2);
        for (int it = 0; it < 48; ++it) {
            if (f1 < f2) {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + inv_phi * (hi - lo);
                f2 = scorer.score(out.best_s, x2);
            } else {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - inv_phi * (hi - lo);
                f1 = scorer.score(out.best_s, x1);
            }
        }
        const Real tau = (lo + hi) / 2;
        const Real v = scorer.score(out.best_s, tau);
        if (v > best + tie) {
            best = v;
            out.best_tau = tau;
        }
    }

    out.mean_rate = std::max(Real(0), best);
    out.solution = build_precoder(scorer.bob(), scorer.allocation(out.best_s, out.best_tau));
    return out;
}

/// Convenience overload: draws `eve_draws` frozen realisations from `rng`.
template <typename Real>
GreedySearchResult<Real> greedy_an_search(const ChannelMatrix<Real> &h, const MdlProfile &profile, Real power,
                                          const NoiseModel<Real> &noise, std::int64_t eve_draws,
                                          Real tau_grid_step, SeededRng &rng,
                                          const GreedyOptions &options = {})
{
    noise.validate();
    const FrozenEveDraws<Real> draws(h, profile, eve_draws, rng);
    const AllocationScorer<Real> scorer(draws, power, noise.sigma2);
    return greedy_an_search(scorer, tau_grid_step, options);
}

} // namespace mmfsec

#endif
