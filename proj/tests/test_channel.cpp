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

#include <cmath>
#include <thread>
#include <vector>

#include "mmfsec/channel.hpp"

using namespace mmfsec;

namespace {

CMatrixXd random_complex(Index n, SeededRng &rng)
{
    CMatrixXd m(n, n);
    for (Index j = 0; j < n; ++j)
        for (Index i = 0; i < n; ++i)
            m(i, j) = rng.complex_normal();
    return m;
}

double unitarity_error(const CMatrixXd &u)
{
    return (u * u.adjoint() - CMatrixXd::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff();
}

} // namespace

TEST_CASE("ChannelMatrix rejects non-square input")
{
    CHECK_THROWS_AS(ChannelMatrix<double>(CMatrixXd(2, 3)), DimensionError);
    CHECK_THROWS_AS(ChannelMatrix<double>(CMatrixXd(0, 0)), DimensionError);
    CHECK_THROWS_AS(ChannelMatrix<double>::identity(0), DomainError);
}

TEST_CASE("singular system recomposes the entries")
{
    SeededRng rng(11);
    for (Index n : {1, 2, 3, 8, 16, 33}) {
        const ChannelMatrix<double> h(random_complex(n, rng));
        const auto &svd = h.svd();
        const CMatrixXd rec = svd.left * svd.values.cast<std::complex<double>>().asDiagonal() * svd.right.adjoint();
        CHECK((rec - h.entries()).norm() <= 1e-9 * h.entries().norm());
        for (Index i = 0; i < n; ++i) {
            CHECK(svd.values(i) >= 0.0);
            if (i > 0)
                CHECK(svd.values(i) <= svd.values(i - 1));
        }
    }
}

TEST_CASE("copies share the cached singular system across threads")
{
    SeededRng rng(3);
    const ChannelMatrix<double> h(random_complex(12, rng));
    const auto copy = h;
    std::vector<const RVectorXd *> seen(4);
    {
        std::vector<std::jthread> pool;
        for (int i = 0; i < 4; ++i)
            pool.emplace_back([&, i] { seen[i] = &(i % 2 ? h : copy).singular_values(); });
    }
    for (auto *p : seen)
        CHECK(p == seen[0]);
}

TEST_CASE("the singular system works for long double as well")
{
    SeededRng rng(2);
    CMatrix<long double> m(3, 3);
    for (Index j = 0; j < 3; ++j)
        for (Index i = 0; i < 3; ++i)
            m(i, j) = rng.complex_normal<long double>();
    const ChannelMatrix<long double> h(m);
    const auto &s = h.svd();
    const CMatrix<long double> rec =
        s.left * s.values.cast<std::complex<long double>>().asDiagonal() * s.right.adjoint();
    CHECK(static_cast<double>((rec - m).norm()) < 1e-15);
}

// ---------------------------------------------------------------------------

TEST_CASE("Haar unitaries are unitary")
{
    SeededRng rng(1);
    const auto u1 = draw_haar_unitary(1, rng);
    CHECK(std::abs(std::abs(u1(0, 0)) - 1.0) < 1e-14);
    for (Index n : {2, 3, 4, 8, 16, 55}) {
        for (int k = 0; k < 5; ++k)
            CHECK(unitarity_error(draw_haar_unitary(n, rng)) < 1e-10);
    }
    CHECK_THROWS_AS(draw_haar_unitary(0, rng), DomainError);
}

TEST_CASE("Haar first-entry moment is 1/n")
{
    SeededRng rng(2024);
    const int draws = 20000;
    double acc = 0;
    for (int k = 0; k < draws; ++k)
        acc += std::norm(draw_haar_unitary(4, rng)(0, 0));
    CHECK(std::abs(acc / draws - 0.25) < 0.01);
}

TEST_CASE("Haar measure is invariant under a fixed left rotation")
{
    // Compare first and second entry moments of U and V U over 10^4 draws.
    const Index n = 3;
    SeededRng vrng(77);
    const CMatrixXd v = draw_haar_unitary(n, vrng);
    SeededRng rng_a(5), rng_b(6);
    const int draws = 10000;
    CMatrixXd m1a = CMatrixXd::Zero(n, n), m1b = CMatrixXd::Zero(n, n);
    Eigen::MatrixXd m2a = Eigen::MatrixXd::Zero(n, n), m2b = Eigen::MatrixXd::Zero(n, n);
    CMatrixXd p2a = CMatrixXd::Zero(n, n), p2b = CMatrixXd::Zero(n, n);
    for (int k = 0; k < draws; ++k) {
        const CMatrixXd ua = draw_haar_unitary(n, rng_a);
        const CMatrixXd ub = v * draw_haar_unitary(n, rng_b);
        m1a += ua;
        m1b += ub;
        m2a += ua.cwiseAbs2();
        m2b += ub.cwiseAbs2();
        p2a += ua.cwiseProduct(ua);
        p2b += ub.cwiseProduct(ub);
    }
    CHECK((m1a - m1b).cwiseAbs().maxCoeff() / draws < 0.02);
    CHECK((m2a - m2b).cwiseAbs().maxCoeff() / draws < 0.02);
    CHECK((p2a - p2b).cwiseAbs().maxCoeff() / draws < 0.02);
    // Both match the Haar values E[u] = 0, E|u|^2 = 1/n, E[u^2] = 0.
    CHECK(m1a.cwiseAbs().maxCoeff() / draws < 0.02);
    CHECK((m2a.array() / draws - 1.0 / n).abs().maxCoeff() < 0.02);
    CHECK(p2a.cwiseAbs().maxCoeff() / draws < 0.02);
}

// ---------------------------------------------------------------------------

TEST_CASE("MDL loss draws")
{
    SeededRng rng(8);
    MdlProfile zero{0.0};
    const auto flat = draw_mdl_matrix(5, zero, rng);
    CHECK((flat.array() == flat(0)).all());

    MdlProfile twenty{20.0};
    for (int k = 0; k < 200; ++k) {
        const auto l = draw_mdl_matrix(55, twenty, rng);
        CHECK(l.maxCoeff() / l.minCoeff() == 100.0);
    }

    MdlProfile ten{10.0};
    for (int k = 0; k < 1000; ++k) {
        const auto l = draw_mdl_matrix(3, ten, rng);
        REQUIRE(l.minCoeff() == std::pow(10.0, -1.0));
        REQUIRE(l.maxCoeff() == 1.0);
        REQUIRE((l.array() >= 0.1).all());
        REQUIRE((l.array() <= 1.0).all());
    }

    CHECK_THROWS_AS(draw_mdl_matrix(1, twenty, rng), InfeasibleError);
    CHECK(draw_mdl_matrix(1, zero, rng)(0) == 1.0);
    CHECK_THROWS_AS(draw_mdl_matrix(4, MdlProfile{-1.0}, rng), DomainError);
}

TEST_CASE("MDL ratio holds for arbitrary dB values")
{
    SeededRng rng(12);
    for (int k = 0; k < 500; ++k) {
        MdlProfile p{rng.uniform(0.1, 40.0)};
        const auto l = draw_mdl_matrix(2 + static_cast<Index>(rng.uniform_index(20)), p, rng);
        const double target = std::pow(10.0, p.mdl_db / 10.0);
        CHECK(std::abs(l.maxCoeff() / l.minCoeff() - target) <= 4 * std::numeric_limits<double>::epsilon() * target);
    }
}

TEST_CASE("extreme losses land on uniformly chosen distinct modes")
{
    SeededRng rng(4);
    std::vector<int> hi(4, 0), lo(4, 0);
    for (int k = 0; k < 8000; ++k) {
        const auto l = draw_mdl_matrix(4, MdlProfile{20.0}, rng);
        Index imax, imin;
        l.maxCoeff(&imax);
        l.minCoeff(&imin);
        REQUIRE(imax != imin);
        ++hi[imax];
        ++lo[imin];
    }
    for (int i = 0; i < 4; ++i) {
        CHECK(std::abs(hi[i] - 2000) < 200);
        CHECK(std::abs(lo[i] - 2000) < 200);
    }
}

// ---------------------------------------------------------------------------

TEST_CASE("synthetic channel spectrum")
{
    SeededRng rng(1);
    const auto h1 = gen_synthetic_channel(1, 13.0, rng);
    CHECK(std::norm(h1.entries()(0, 0)) == doctest::Approx(1.0).epsilon(1e-14));

    const auto h4 = gen_synthetic_channel(4, 0.0, rng);
    for (Index i = 0; i < 4; ++i)
        CHECK(h4.singular_values()(i) == doctest::Approx(1.0).epsilon(1e-12));

    const auto h8 = gen_synthetic_channel(8, 20.0, rng);
    const auto d2 = h8.gains_squared();
    CHECK(std::abs(d2(0) / d2(7) - 100.0) <= 1e-9 * 100.0);
    CHECK(h8.gram_trace() == doctest::Approx(8.0).epsilon(1e-12));
    // Log-spaced: constant ratio between neighbours.
    for (Index i = 1; i < 8; ++i)
        CHECK(d2(i - 1) / d2(i) == doctest::Approx(std::pow(100.0, 1.0 / 7.0)).epsilon(1e-9));

    CHECK_THROWS_AS(gen_synthetic_channel(0, 1.0, rng), DomainError);
    CHECK_THROWS_AS(gen_synthetic_channel(3, -1.0, rng), DomainError);
}

TEST_CASE("synthetic channel is reproducible")
{
    SeededRng a(99), b(99);
    CHECK(gen_synthetic_channel(6, 10.0, a).entries() == gen_synthetic_channel(6, 10.0, b).entries());
}

// ---------------------------------------------------------------------------

TEST_CASE("Eve channel without MDL keeps Bob's singular values")
{
    SeededRng rng(21);
    const auto h = gen_synthetic_channel(6, 15.0, rng);
    MdlProfile p{0.0, LossDrawRule::uniform_linear, true};
    for (int k = 0; k < 20; ++k) {
        const auto g = draw_eve_channel(h, p, rng);
        CHECK((g.singular_values() - h.singular_values()).cwiseAbs().maxCoeff() < 1e-9);
    }
    const auto same = draw_eve_channel(h, p, rng, EveRotation::identity);
    CHECK((same.entries() - h.entries()).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("Eve channel keeps Bob's total power")
{
    SeededRng rng(22);
    const auto h = gen_synthetic_channel(10, 20.0, rng);
    const double ref = h.gram_trace();
    for (int k = 0; k < 500; ++k) {
        const auto g = draw_eve_channel(h, MdlProfile{20.0}, rng);
        REQUIRE(std::abs(g.gram_trace() - ref) <= 1e-9 * ref);
    }
}

TEST_CASE("Eve channel composes losses and rotation in that order")
{
    SeededRng rng(23);
    const auto h = gen_synthetic_channel(5, 10.0, rng);
    MdlProfile p{20.0, LossDrawRule::uniform_linear, false};
    SeededRng a(5, 1), b(5, 1);
    const auto g = draw_eve_channel(h, p, a);
    const auto l = draw_mdl_matrix(5, p, b);
    const CMatrixXd u = draw_haar_unitary(5, b);
    const CMatrixXd manual = l.array().sqrt().matrix().cast<std::complex<double>>().asDiagonal() * h.entries() * u;
    CHECK((g.entries() - manual).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("Haar isotropy of the rotated Gram matrix")
{
    // E[U^H A U] = tr(A)/n I for any fixed A; here A = H^H L H with L redrawn.
    SeededRng rng(31);
    const auto h = gen_synthetic_channel(4, 10.0, rng);
    const MdlProfile p{20.0, LossDrawRule::uniform_linear, false};
    const int draws = 5000;
    CMatrixXd mean = CMatrixXd::Zero(4, 4);
    double trace_mean = 0;
    for (int k = 0; k < draws; ++k) {
        const auto l = draw_mdl_matrix(4, p, rng);
        const CMatrixXd u = draw_haar_unitary(4, rng);
        const CMatrixXd a = h.entries().adjoint() * l.cast<std::complex<double>>().asDiagonal() * h.entries();
        mean += u.adjoint() * a * u;
        trace_mean += std::real(a.trace());
    }
    mean /= draws;
    trace_mean /= draws;
    const CMatrixXd target = CMatrixXd::Identity(4, 4) * (trace_mean / 4);
    CHECK((mean - target).cwiseAbs().maxCoeff() < 0.02 * h.gram_trace() / 4);
}

TEST_CASE("equal seeds give bit-identical Eve draws")
{
    SeededRng rng(1);
    const auto h = gen_synthetic_channel(8, 20.0, rng);
    SeededRng a(123, 45), b(123, 45);
    for (int k = 0; k < 10; ++k) {
        CHECK(draw_eve_channel(h, MdlProfile{20.0}, a).entries() == draw_eve_channel(h, MdlProfile{20.0}, b).entries());
    }
}
