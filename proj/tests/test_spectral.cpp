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

#include <doctest.h>

#include <random>

#include "bim/linalg.hpp"
#include "bim/spectral.hpp"
#include "test_support.hpp"

using namespace bim;

TEST_CASE("IDFT basis")
{
    const IdftBasis one = idft_basis(1);
    CHECK(one.columns(0, 0) == cplx{1.0, 0.0});

    const IdftBasis three = idft_basis(3);
    for (int r = 0; r < 3; ++r)
        CHECK(std::abs(three.columns(r, 0) - 1.0 / std::sqrt(3.0)) < 1e-15);

    // second non-flat column of the 4-point basis: 0.5 [1, j, -1, -j]
    const IdftBasis four = idft_basis(4);
    const cplx expect[] = {{0.5, 0}, {0, 0.5}, {-0.5, 0}, {0, -0.5}};
    for (int r = 0; r < 4; ++r)
        CHECK(std::abs(four.columns(r, 1) - expect[r]) < 1e-15);

    for (int n : {2, 5, 8, 13}) {
        const IdftBasis f = idft_basis(n);
        CHECK((f.columns.adjoint() * f.columns - CMatrix::Identity(n, n)).norm() < 1e-12);
    }
    CHECK_THROWS_AS(idft_basis(0), std::invalid_argument);
}

TEST_CASE("circulant construction")
{
    const std::vector<cplx> a{{2.5, -1.0}};
    CHECK(circulant(a)(0, 0) == a[0]);

    const std::vector<cplx> e0{1.0, 0.0, 0.0};
    CHECK(circulant(e0) == CMatrix::Identity(3, 3));

    // ICI block after CP removal with N = 3, two taps: columns are cyclic shifts
    const std::vector<cplx> h{{0.3, 0.1}, {-0.7, 0.4}};
    const CMatrix c = circulant(std::vector<cplx>{h[0], h[1], 0.0});
    CHECK((c - test::cp_removal_matrix(h, 3, 1)).norm() < 1e-15);
    CHECK(is_circulant(c));
    CMatrix broken = c;
    broken(0, 1) += 0.1;
    CHECK_FALSE(is_circulant(broken));
}

TEST_CASE("circulant diagonalization")
{
    CHECK((diagonalize_circulant(CMatrix::Identity(5, 5)) - CVector::Ones(5)).norm() < 1e-14);

    const int n = 6;
    std::vector<cplx> shift(n, 0.0);
    shift[1] = 1.0;
    const CVector lambda = diagonalize_circulant(circulant(shift));
    for (int m = 0; m < n; ++m) {
        CHECK(std::abs(std::abs(lambda(m)) - 1.0) < 1e-14);
        CHECK(std::abs(std::pow(lambda(m), n) - 1.0) < 1e-12);
    }

    std::mt19937_64 rng(5);
    for (int t = 0; t < 20; ++t) {
        const CMatrix c = circulant(test::random_taps(rng, 9));
        const IdftBasis f = idft_basis(9);
        const CMatrix rebuilt = f.columns * diagonalize_circulant(c).asDiagonal() * f.columns.adjoint();
        CHECK((rebuilt - c).norm() <= 1e-10 * c.norm());
    }
}

TEST_CASE("desired link structure of the smallest worked example")
{
    // N = 3, four desired taps, CP of one sample
    const std::vector<cplx> h{{0.1, 0.2}, {0.3, -0.4}, {-0.5, 0.6}, {0.7, 0.8}};
    const DesiredLinkMatrices m = structure_desired_link(h, 3, 2);
    CMatrix expect = CMatrix::Zero(3, 3);
    expect(0, 1) = -h[2];
    expect(2, 2) = h[3];
    CHECK((m.noncirc - expect).norm() < 1e-15);
    CHECK(is_circulant(m.circ));
    CHECK((m.full - test::cp_removal_matrix(h, 3, 1)).norm() < 1e-14);
}

TEST_CASE("structured matrices match the convolution oracle")
{
    std::mt19937_64 rng(17);
    for (int N = 2; N <= 10; ++N)
        for (int li = 1; li <= N; ++li)
            for (int L = 1; L <= N + li - 1; ++L) {
                const auto h = test::random_taps(rng, L);
                const DesiredLinkMatrices m = structure_desired_link(h, N, li);
                CHECK(test::rel_diff(m.full, test::cp_removal_matrix(h, N, li - 1)) < 1e-13);
                CHECK(test::rel_diff(m.prev_subblock, test::previous_leak_matrix(h, N, li - 1)) < 1e-13);
                CHECK(is_circulant(m.circ));
                if (N >= L)
                    CHECK(m.lower.norm() == 0.0);
            }
}

TEST_CASE("interference links are circulant after CP removal")
{
    const auto cfg = SystemConfig::symmetric(3, 2, 8, 3);
    const auto plan = make_plan(cfg);
    const auto ch = sample_channel_iid(cfg, 9);
    const StructuredChannel s = build_structured(cfg, plan, ch);
    for (int k = 0; k < 3; ++k)
        for (int i = 0; i < 3; ++i) {
            if (i == k)
                continue;
            for (int u = 0; u < 2; ++u) {
                const auto t = ch.taps(k, i, u);
                const std::vector<cplx> h(t.begin(), t.end());
                CHECK(test::rel_diff(s.interference[k][i][u], test::cp_removal_matrix(h, plan.core_len, plan.cp_len)) <
                      1e-13);
                CHECK(is_circulant(s.interference[k][i][u]));
            }
        }
}

TEST_CASE("numerical rank and positive QR")
{
    std::mt19937_64 rng(21);
    CMatrix a(6, 4);
    for (int c = 0; c < 4; ++c)
        a.col(c) = test::random_vector(rng, 6);
    CHECK(numerical_rank(a) == 4);
    a.col(3) = a.col(0) * cplx{0.5, -2.0} + a.col(1);
    CHECK(numerical_rank(a) == 3);
    CHECK(numerical_rank(CMatrix::Zero(3, 3)) == 0);

    for (int t = 0; t < 50; ++t) {
        CMatrix h(7, 4);
        for (int c = 0; c < 4; ++c)
            h.col(c) = test::random_vector(rng, 7);
        const ThinQR f = qr_positive(h);
        CHECK((f.q * f.r - h).norm() < 1e-12 * h.norm());
        CHECK((f.q.adjoint() * f.q - CMatrix::Identity(4, 4)).norm() < 1e-12);
        for (int m = 0; m < 4; ++m) {
            CHECK(f.r(m, m).real() > 0.0);
            CHECK(f.r(m, m).imag() == 0.0);
            for (int r = m + 1; r < 4; ++r)
                CHECK(f.r(r, m) == cplx{});
        }
    }
}
