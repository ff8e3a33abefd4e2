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

#ifndef MMFSEC_CHANNEL_HPP
#define MMFSEC_CHANNEL_HPP

#include <cmath>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>

#include "mmfsec/errors.hpp"
#include "mmfsec/rng.hpp"
#include "mmfsec/types.hpp"

namespace mmfsec {

using Eigen::Index;

/// Singular system M = left * diag(values) * right^H, values descending.
template <typename Real>
struct SingularSystem {
    CMatrix<Real> left;
    RVector<Real> values;
    CMatrix<Real> right;
};

/**
 * Square N x N complex channel (Bob's H or an eavesdropper draw G).
 *
 * Entries are immutable after construction and stored exactly as given; no
 * power normalisation is applied.  The singular system is computed on first
 * use and shared between copies, so a constructed channel may be read from
 * several threads.
 */
template <typename Real = double>
class ChannelMatrix {
public:
    using Matrix = CMatrix<Real>;

    explicit ChannelMatrix(Matrix entries, std::optional<std::string> label = std::nullopt)
        : entries_(std::move(entries)), label_(std::move(label)),
          cache_(std::make_shared<Cache>())
    {
        if (entries_.rows() == 0 || entries_.rows() != entries_.cols())
            throw DimensionError("channel matrix must be square and non-empty, got " +
                                 std::to_string(entries_.rows()) + "x" +
                                 std::to_string(entries_.cols()));
    }

    static ChannelMatrix identity(Index n)
    {
        if (n < 1)
            throw DomainError("mode count must be >= 1");
        return ChannelMatrix(Matrix::Identity(n, n));
    }

    Index n() const noexcept { return entries_.rows(); }
    const Matrix &entries() const noexcept { return entries_; }
    const std::optional<std::string> &label() const noexcept { return label_; }

    /// tr(M M^H)
    Real gram_trace() const { return entries_.squaredNorm(); }

    const SingularSystem<Real> &svd() const
    {
        std::call_once(cache_->once, [this] {
            Eigen::JacobiSVD<Matrix> dec(entries_, Eigen::ComputeFullU | Eigen::ComputeFullV);
            cache_->value = SingularSystem<Real>{dec.matrixU(), dec.singularValues(), dec.matrixV()};
        });
        return cache_->value;
    }

    const RVector<Real> &singular_values() const { return svd().values; }

    /// Squared singular values d_i^2, descending.
    RVector<Real> gains_squared() const { return singular_values().array().square(); }

private:
    struct Cache {
        std::once_flag once;
        SingularSystem<Real> value;
    };

    Matrix entries_;
    std::optional<std::string> label_;
    std::shared_ptr<Cache> cache_;
};

// ---------------------------------------------------------------------------
// Mode-dependent loss

enum class LossDrawRule {
    // l_max and l_min pinned on two distinct random modes, the rest uniform
    // in linear scale between them.
    uniform_linear,
};

struct MdlProfile {
    double mdl_db = 20.0;
    LossDrawRule draw_rule = LossDrawRule::uniform_linear;
    bool normalize_trace = true;

    double l_max() const { return 1.0; }
    double l_min() const { return std::pow(10.0, -mdl_db / 10.0); }

    void validate() const
    {
        if (!std::isfinite(mdl_db) || mdl_db < 0.0)
            throw DomainError("mdl_db must be finite and >= 0");
    }
};

/// Draws per-mode power losses l_i (the diagonal of L).
template <typename Real = double>
RVector<Real> draw_mdl_matrix(Index n, const MdlProfile &profile, SeededRng &rng)
{
    profile.validate();
    if (n < 1)
        throw DomainError("mode count must be >= 1");
    if (profile.mdl_db == 0.0)
        return RVector<Real>::Ones(n);
    if (n == 1)
        throw InfeasibleError("a single mode cannot realise a non-zero MDL");

    const double hi = profile.l_max();
    const double lo = profile.l_min();
    const auto nu = static_cast<std::uint64_t>(n);
    const auto i_max = static_cast<Index>(rng.uniform_index(nu));
    auto i_min = static_cast<Index>(rng.uniform_index(nu - 1));
    if (i_min >= i_max)
        ++i_min;

    RVector<Real> losses(n);
    for (Index i = 0; i < n; ++i) {
        if (i == i_max)
            losses(i) = static_cast<Real>(hi);
        else if (i == i_min)
            losses(i) = static_cast<Real>(lo);
        else
            losses(i) = static_cast<Real>(rng.uniform(lo, hi));
    }
    return losses;
}

// ---------------------------------------------------------------------------
// Haar unitaries

/**
 * Haar-distributed n x n unitary.
 *
 * QR of a matrix of iid CN(0,1) entries, with each column of Q multiplied by
 * r_jj / |r_jj| so that R has a real positive diagonal.  Without that phase
 * fix the result is not Haar distributed.
 */
template <typename Real = double>
CMatrix<Real> draw_haar_unitary(Index n, SeededRng &rng)
{
    if (n < 1)
        throw DomainError("mode count must be >= 1");
    CMatrix<Real> z(n, n);
    for (Index j = 0; j < n; ++j)
        for (Index i = 0; i < n; ++i)
            z(i, j) = rng.complex_normal<Real>();

    Eigen::HouseholderQR<CMatrix<Real>> qr(z);
    CMatrix<Real> q = qr.householderQ();
    const auto &r = qr.matrixQR();
    for (Index j = 0; j < n; ++j) {
        const Complex<Real> rjj = r(j, j);
        const Real mag = std::abs(rjj);
        if (mag > Real(0))
            q.col(j) *= rjj / mag;
    }
    return q;
}

// ---------------------------------------------------------------------------
// Eavesdropper channel G = L^{1/2} H U_e

enum class EveRotation {
    haar,
    identity, // test hook: U_e = I
};

template <typename Real>
ChannelMatrix<Real> draw_eve_channel(const ChannelMatrix<Real> &h, const MdlProfile &profile,
                                     SeededRng &rng, EveRotation rotation = EveRotation::haar)
{
    const Index n = h.n();
    const RVector<Real> losses = draw_mdl_matrix<Real>(n, profile, rng);

    CMatrix<Real> g = losses.array().sqrt().matrix().asDiagonal() * h.entries();
    if (rotation == EveRotation::haar)
        g = g * draw_haar_unitary<Real>(n, rng);

    if (profile.normalize_trace) {
        const Real target = h.gram_trace();
        const Real current = g.squaredNorm();
        if (current > Real(0))
            g *= std::sqrt(target / current);
    }
    return ChannelMatrix<Real>(std::move(g));
}

// ---------------------------------------------------------------------------
// Synthetic stand-in for a measured channel

/**
 * H = U1 diag(d) U2^H with independent Haar U1, U2; d_i^2 log-spaced from 1
 * down to 10^(-spread_db/10), then scaled so that tr(H H^H) = n.
 */
template <typename Real = double>
ChannelMatrix<Real> gen_synthetic_channel(Index n, double spread_db, SeededRng &rng)
{
    if (n < 1)
        throw DomainError("mode count must be >= 1");
    if (!std::isfinite(spread_db) || spread_db < 0.0)
        throw DomainError("spread_db must be finite and >= 0");

    RVector<Real> d(n);
    for (Index i = 0; i < n; ++i) {
        const double frac = n == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(n - 1);
        d(i) = static_cast<Real>(std::pow(10.0, -spread_db * frac / 20.0));
    }
    d *= std::sqrt(static_cast<Real>(n) / d.squaredNorm());

    const CMatrix<Real> u1 = draw_haar_unitary<Real>(n, rng);
    const CMatrix<Real> u2 = draw_haar_unitary<Real>(n, rng);
    CMatrix<Real> h = u1 * d.template cast<Complex<Real>>().asDiagonal() * u2.adjoint();
    return ChannelMatrix<Real>(std::move(h));
}

} // namespace mmfsec

#endif
