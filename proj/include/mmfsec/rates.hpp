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

#ifndef MMFSEC_RATES_HPP
#define MMFSEC_RATES_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <string>

#include "mmfsec/channel.hpp"

// All rates are in bits per channel use (log base 2).

namespace mmfsec {

template <typename Real = double>
struct NoiseModel {
    Real sigma2 = Real(1); // per-mode noise variance

    void validate() const
    {
        if (!(sigma2 > Real(0)) || !std::isfinite(static_cast<double>(sigma2)))
            throw DomainError("noise variance must be finite and > 0");
    }
};

template <typename Real = double>
struct RatePair {
    Real r_b = 0; // Bob
    Real r_e = 0; // Eve
};

template <typename Real = double>
struct EveRateBounds {
    Real lower = 0;
    Real upper = 0;
    bool singular_channel = false; // some g_i = 0; those modes were dropped
};

template <typename Real = double>
struct MonteCarloEstimate {
    Real mean = 0;
    Real std_error = 0;
    std::int64_t samples = 0;
};

namespace detail {

template <typename Derived>
auto hermitian_part(const Eigen::MatrixBase<Derived> &a)
{
    using M = Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    M out = (a + a.adjoint()) / typename Derived::RealScalar(2);
    return out;
}

/// log2 |I + A| for Hermitian PSD A, through its eigenvalues.
template <typename Real>
Real log2_det_identity_plus(const CMatrix<Real> &a)
{
    Eigen::SelfAdjointEigenSolver<CMatrix<Real>> eig(hermitian_part(a), Eigen::EigenvaluesOnly);
    Real acc = 0;
    for (Index i = 0; i < eig.eigenvalues().size(); ++i)
        acc += std::log2(Real(1) + std::max(eig.eigenvalues()(i), Real(-1e-12)));
    return acc;
}

/// log2 |K| for Hermitian positive definite K, through a Cholesky factor.
template <typename Real>
Real log2_det_pd(const CMatrix<Real> &k)
{
    Eigen::LLT<CMatrix<Real>> llt(k);
    if (llt.info() != Eigen::Success) {
        Eigen::SelfAdjointEigenSolver<CMatrix<Real>> eig(hermitian_part(k), Eigen::EigenvaluesOnly);
        Real acc = 0;
        for (Index i = 0; i < eig.eigenvalues().size(); ++i)
            acc += std::log2(std::max(eig.eigenvalues()(i), std::numeric_limits<Real>::min()));
        return acc;
    }
    Real acc = 0;
    const auto &l = llt.matrixLLT();
    for (Index i = 0; i < k.rows(); ++i)
        acc += std::log2(std::real(l(i, i)));
    return Real(2) * acc;
}

template <typename Real>
void check_covariance(const CMatrix<Real> &q, Index n, const char *name)
{
    if (q.rows() != n || q.cols() != n)
        throw DimensionError(std::string(name) + " must be " + std::to_string(n) + "x" +
                             std::to_string(n));
    const Real scale = std::max(q.cwiseAbs().maxCoeff(), std::numeric_limits<Real>::min());
    if ((q - q.adjoint()).cwiseAbs().maxCoeff() > Real(1e-9) * scale)
        throw DomainError(std::string(name) + " is not Hermitian");
    const Real trace = std::real(q.trace());
    Eigen::SelfAdjointEigenSolver<CMatrix<Real>> eig(hermitian_part(q), Eigen::EigenvaluesOnly);
    if (eig.eigenvalues().minCoeff() < -Real(1e-9) * std::max(trace, Real(0)) - Real(1e-300))
        throw DomainError(std::string(name) + " is not positive semidefinite");
}

/// Unchecked rate: log2 |I + K^{-1} H Qs H^H| with K = sigma2 I + H Qa H^H,
/// evaluated on the whitened matrix L^{-1} (H Qs H^H) L^{-H}, K = L L^H.
template <typename Real>
Real rate_unchecked(const CMatrix<Real> &h, const CMatrix<Real> &q_s, const CMatrix<Real> &q_a,
                    Real sigma2)
{
    const Index n = h.rows();
    const CMatrix<Real> k = hermitian_part(
        CMatrix<Real>(sigma2 * CMatrix<Real>::Identity(n, n) + h * q_a * h.adjoint()));
    const CMatrix<Real> s = hermitian_part(CMatrix<Real>(h * q_s * h.adjoint()));
    Eigen::LLT<CMatrix<Real>> llt(k);
    const auto lower = llt.matrixL();
    const CMatrix<Real> x = lower.solve(s);
    const CMatrix<Real> whitened = lower.solve(CMatrix<Real>(x.adjoint()));
    return std::max(Real(0), log2_det_identity_plus(whitened));
}

} // namespace detail

// ---------------------------------------------------------------------------

/// log2 |I + [sigma2 I + H Qa H^H]^{-1} H Qs H^H|.
template <typename Real>
Real rate(const ChannelMatrix<Real> &channel, const CMatrix<Real> &q_s, const CMatrix<Real> &q_a,
          const NoiseModel<Real> &noise)
{
    noise.validate();
    detail::check_covariance(q_s, channel.n(), "q_s");
    detail::check_covariance(q_a, channel.n(), "q_a");
    return detail::rate_unchecked(channel.entries(), q_s, q_a, noise.sigma2);
}

template <typename Real>
RatePair<Real> rate_pair(const ChannelMatrix<Real> &h, const ChannelMatrix<Real> &g,
                         const CMatrix<Real> &q_s, const CMatrix<Real> &q_a,
                         const NoiseModel<Real> &noise)
{
    if (g.n() != h.n())
        throw DimensionError("Bob and Eve channels differ in size");
    return {rate(h, q_s, q_a, noise), rate(g, q_s, q_a, noise)};
}

/// [R_b - R_e]^+
template <typename Real>
Real secrecy_rate(const ChannelMatrix<Real> &h, const ChannelMatrix<Real> &g,
                  const CMatrix<Real> &q_s, const CMatrix<Real> &q_a, const NoiseModel<Real> &noise)
{
    const auto r = rate_pair(h, g, q_s, q_a, noise);
    return std::max(Real(0), r.r_b - r.r_e);
}

/// Sum of log2(1 + d_i^2 p_i / sigma2) over parallel modes.
template <typename Real>
Real parallel_channel_rate(const RVector<Real> &gains_sq, const RVector<Real> &powers, Real sigma2)
{
    if (gains_sq.size() != powers.size())
        throw DimensionError("gain and power vectors differ in length");
    Real acc = 0;
    for (Index i = 0; i < gains_sq.size(); ++i)
        acc += std::log2(Real(1) + gains_sq(i) * powers(i) / sigma2);
    return acc;
}

/**
 * Eavesdropper rate for covariances that are diagonal in a common transmit
 * basis T, i.e. Qs = T diag(p) T^H and Qa = T diag(beta) T^H, given the
 * projected channel gt = G T:
 *
 *   log2|sigma2 I + gt diag(p + beta) gt^H| - log2|sigma2 I + gt diag(beta) gt^H|
 *
 * Both log-determinants go through Cholesky factors.  This equals rate() on
 * the full covariances and is what the search and sweep loops use.
 */
template <typename Real>
Real rate_in_basis(const CMatrix<Real> &gt, const RVector<Real> &signal, const RVector<Real> &an,
                   Real sigma2)
{
    const Index n = gt.rows();
    if (gt.cols() != signal.size() || gt.cols() != an.size())
        throw DimensionError("projected channel and power vectors disagree in size");
    const RVector<Real> total = signal + an;
    CMatrix<Real> k_total = gt * total.template cast<Complex<Real>>().asDiagonal() * gt.adjoint();
    k_total.diagonal().array() += sigma2;
    Real noise_term;
    if ((an.array() > Real(0)).any()) {
        CMatrix<Real> k_an = gt * an.template cast<Complex<Real>>().asDiagonal() * gt.adjoint();
        k_an.diagonal().array() += sigma2;
        noise_term = detail::log2_det_pd(k_an);
    } else {
        noise_term = static_cast<Real>(n) * std::log2(sigma2);
    }
    return std::max(Real(0), detail::log2_det_pd(k_total) - noise_term);
}

// ---------------------------------------------------------------------------
// Secrecy rate estimated at the transmitter (statistical Eve CSI)

/**
 * [R_b - mean_k R_e(G_k)]^+ over `draws` fresh eavesdropper channels.  Per
 * draw, R_e is the difference of the two expectation terms
 * log2|I + G(Qs+Qa)G^H / sigma2| - log2|I + G Qa G^H / sigma2|, taken before
 * averaging.  sigma2 enters Bob's term as well.
 */
template <typename Real>
Real estimated_secrecy_rate(const ChannelMatrix<Real> &h, const CMatrix<Real> &q_s,
                            const CMatrix<Real> &q_a, const NoiseModel<Real> &noise,
                            const MdlProfile &profile, std::int64_t draws, SeededRng &rng)
{
    if (draws < 1)
        throw DomainError("draws must be >= 1");
    const Real r_b = rate(h, q_s, q_a, noise);
    const CMatrix<Real> q_total = q_s + q_a;
    Real sum = 0;
    for (std::int64_t k = 0; k < draws; ++k) {
        const auto g = draw_eve_channel(h, profile, rng);
        const auto &gm = g.entries();
        const Real with_signal =
            detail::log2_det_identity_plus(CMatrix<Real>(gm * q_total * gm.adjoint() / noise.sigma2));
        const Real an_only =
            detail::log2_det_identity_plus(CMatrix<Real>(gm * q_a * gm.adjoint() / noise.sigma2));
        sum += with_signal - an_only;
    }
    return std::max(Real(0), r_b - sum / static_cast<Real>(draws));
}

// ---------------------------------------------------------------------------
// Bounds on Eve's rate

namespace detail {

/// Bounds from the spectra: singular values of G (descending), eigenvalues
/// of Qs + Qa and of Qa (both ascending).
template <typename Real>
EveRateBounds<Real> eve_rate_bounds_from_spectra(const RVector<Real> &sv, const RVector<Real> &p_total,
                                                 const RVector<Real> &beta, Real sigma2)
{
    const Index n = sv.size();
    const Real cutoff = sv(0) * Real(n) * std::numeric_limits<Real>::epsilon();
    EveRateBounds<Real> out;
    for (Index i = 0; i < n; ++i) {
        if (!(sv(i) > cutoff)) {
            out.singular_channel = true;
            continue;
        }
        const Real alpha = sigma2 / (sv(i) * sv(i));
        const Real p_up = std::max(p_total(i), Real(0));
        const Real p_down = std::max(p_total(n - 1 - i), Real(0));
        const Real b_up = std::max(beta(i), Real(0));
        const Real b_down = std::max(beta(n - 1 - i), Real(0));
        out.lower += std::log2(alpha + p_up) - std::log2(alpha + b_down);
        out.upper += std::log2(alpha + p_down) - std::log2(alpha + b_up);
    }
    return out;
}

} // namespace detail

/**
 * Eigenvalue bounds on R_e.  With alpha_i = sigma2 / g_i^2 (ascending),
 * p the eigenvalues of Qs + Qa and beta the eigenvalues of Qa:
 *
 *   lower = sum log2(alpha_i + p_i^asc)  - sum log2(alpha_i + beta_i^desc)
 *   upper = sum log2(alpha_i + p_i^desc) - sum log2(alpha_i + beta_i^asc)
 *
 * Both follow from Fiedler's determinant inequality applied to
 * R_e = log2|A + Qs + Qa| - log2|A + Qa| with A = sigma2 (G^H G)^{-1}.  For
 * Qa = 0 they reduce to sum log2(alpha_i + p_i) - sum log2(alpha_i) with
 * co-sorted (lower) and anti-sorted (upper) pairing.  Modes with g_i = 0
 * have alpha_i = inf; their two terms cancel and are dropped.
 */
template <typename Real>
EveRateBounds<Real> eve_rate_bounds(const ChannelMatrix<Real> &g, const CMatrix<Real> &q_s,
                                    const CMatrix<Real> &q_a, const NoiseModel<Real> &noise)
{
    noise.validate();
    const Index n = g.n();
    detail::check_covariance(q_s, n, "q_s");
    detail::check_covariance(q_a, n, "q_a");

    Eigen::SelfAdjointEigenSolver<CMatrix<Real>> eig_total(detail::hermitian_part(CMatrix<Real>(q_s + q_a)),
                                                           Eigen::EigenvaluesOnly);
    Eigen::SelfAdjointEigenSolver<CMatrix<Real>> eig_an(detail::hermitian_part(q_a), Eigen::EigenvaluesOnly);
    return detail::eve_rate_bounds_from_spectra<Real>(g.singular_values(), eig_total.eigenvalues(),
                                                      eig_an.eigenvalues(), noise.sigma2);
}

// ---------------------------------------------------------------------------
// Ergodic secrecy rate and its Jensen lower bound

/**
 * Maximises sum_i log2(1 + d_i^2 q_i / s2) - log2(1 + c q_i / s2) subject to
 * sum q_i = P, q_i >= 0.  Only modes with d_i^2 > c get power; the KKT
 * condition d^2/(s2 + d^2 q) - c/(s2 + c q) = lambda is a quadratic in q
 * whose positive root is taken in the cancellation-free form
 * q = 2 (-k0) / (k1 + sqrt(k1^2 - 4 k2 k0)).  lambda is found by bisection
 * on the power budget.
 */
template <typename Real>
RVector<Real> secrecy_waterfilling(const RVector<Real> &gains_sq, Real gram_scalar, Real power,
                                   Real sigma2)
{
    const Index n = gains_sq.size();
    RVector<Real> q = RVector<Real>::Zero(n);
    const Real c = gram_scalar;
    Real lambda_max = 0;
    for (Index i = 0; i < n; ++i)
        lambda_max = std::max(lambda_max, (gains_sq(i) - c) / sigma2);
    if (!(lambda_max > Real(0)) || !(power > Real(0)))
        return q;

    auto powers_at = [&](Real lambda) {
        RVector<Real> out = RVector<Real>::Zero(n);
        for (Index i = 0; i < n; ++i) {
            const Real d = gains_sq(i);
            if (!(d > c) || lambda >= (d - c) / sigma2)
                continue;
            const Real k2 = lambda * d * c;
            const Real k1 = lambda * sigma2 * (d + c);
            const Real k0 = lambda * sigma2 * sigma2 - sigma2 * (d - c);
            out(i) = Real(2) * (-k0) / (k1 + std::sqrt(k1 * k1 - Real(4) * k2 * k0));
        }
        return out;
    };

    Real hi = lambda_max;
    Real lo = lambda_max / 2;
    while (powers_at(lo).sum() < power)
        lo /= 2;

    const Real tol = Real(1e-12) * std::max(Real(1), power);
    for (int it = 0; it < 2000; ++it) {
        const Real mid = (lo + hi) / 2;
        if (!(mid > lo && mid < hi))
            break;
        const Real total = powers_at(mid).sum();
        if (std::abs(total - power) <= tol)
            return powers_at(mid);
        if (total > power)
            lo = mid;
        else
            hi = mid;
    }
    q = powers_at(hi);
    // Interval exhausted in floating point: spread the sub-ulp residue over
    // the active modes.
    const Real total = q.sum();
    if (total > Real(0))
        q *= power / total;
    return q;
}

template <typename Real = double>
struct JensenBound {
    Real rate = 0;
    CMatrix<Real> covariance;  // maximising Q
    RVector<Real> mode_powers; // Q in the right-singular basis of H
    Real gram_scalar = 0;      // c in E[G^H G] = c I
    Real gram_mc_deviation = 0; // max |mean(G^H G) - c I| / c over the cross-check draws
};

/// Closed form of E[G^H G] = c I under Haar rotation.
template <typename Real>
Real expected_gram_scalar(const ChannelMatrix<Real> &h, const MdlProfile &profile)
{
    profile.validate();
    const Real per_mode = h.gram_trace() / static_cast<Real>(h.n());
    if (profile.normalize_trace)
        return per_mode; // s^2 tr(H^H L H) = tr(H H^H) for every draw of L
    if (profile.mdl_db == 0.0)
        return per_mode;
    // Each mode is l_max or l_min with probability 1/n, otherwise uniform.
    const Real mean_loss = static_cast<Real>((profile.l_max() + profile.l_min()) / 2.0);
    return mean_loss * per_mode;
}

template <typename Real>
JensenBound<Real> jensen_secrecy_lower_bound(const ChannelMatrix<Real> &h, const MdlProfile &profile,
                                             Real power, const NoiseModel<Real> &noise,
                                             std::int64_t draws_for_gram, SeededRng &rng)
{
    noise.validate();
    if (!(power > Real(0)))
        throw DomainError("power must be > 0");
    const Index n = h.n();

    JensenBound<Real> out;
    out.gram_scalar = expected_gram_scalar(h, profile);

    if (draws_for_gram > 0) {
        CMatrix<Real> mean = CMatrix<Real>::Zero(n, n);
        for (std::int64_t k = 0; k < draws_for_gram; ++k) {
            const auto g = draw_eve_channel(h, profile, rng);
            mean += g.entries().adjoint() * g.entries();
        }
        mean /= static_cast<Real>(draws_for_gram);
        mean.diagonal().array() -= out.gram_scalar;
        out.gram_mc_deviation = mean.cwiseAbs().maxCoeff() / out.gram_scalar;
    }

    const RVector<Real> gains_sq = h.gains_squared();
    out.mode_powers = secrecy_waterfilling(gains_sq, out.gram_scalar, power, noise.sigma2);
    const auto &t = h.svd().right;
    out.covariance = t * out.mode_powers.template cast<Complex<Real>>().asDiagonal() * t.adjoint();

    Real acc = 0;
    for (Index i = 0; i < n; ++i) {
        const Real q = out.mode_powers(i);
        if (q > Real(0))
            acc += std::log2(Real(1) + gains_sq(i) * q / noise.sigma2) -
                   std::log2(Real(1) + out.gram_scalar * q / noise.sigma2);
    }
    out.rate = std::max(Real(0), acc);
    return out;
}

/// log2|I + H Q H^H / s2| - mean_k log2|I + G_k Q G_k^H / s2|.
template <typename Real>
MonteCarloEstimate<Real> ergodic_secrecy_rate_mc(const ChannelMatrix<Real> &h, const CMatrix<Real> &q,
                                                 const MdlProfile &profile, const NoiseModel<Real> &noise,
                                                 std::int64_t draws, SeededRng &rng,
                                                 EveRotation rotation = EveRotation::haar)
{
    noise.validate();
    if (draws < 1)
        throw DomainError("draws must be >= 1");
    detail::check_covariance(q, h.n(), "q");
    const auto &hm = h.entries();
    const Real bob = detail::log2_det_identity_plus(CMatrix<Real>(hm * q * hm.adjoint() / noise.sigma2));

    Real sum = 0;
    Real sum_sq = 0;
    for (std::int64_t k = 0; k < draws; ++k) {
        const auto g = draw_eve_channel(h, profile, rng, rotation);
        const auto &gm = g.entries();
        const Real r = bob - detail::log2_det_identity_plus(CMatrix<Real>(gm * q * gm.adjoint() / noise.sigma2));
        sum += r;
        sum_sq += r * r;
    }
    MonteCarloEstimate<Real> out;
    out.samples = draws;
    out.mean = sum / static_cast<Real>(draws);
    if (draws > 1) {
        const Real var = std::max(Real(0), (sum_sq - sum * out.mean) / static_cast<Real>(draws - 1));
        out.std_error = std::sqrt(var / static_cast<Real>(draws));
    }
    return out;
}

} // namespace mmfsec

#endif
