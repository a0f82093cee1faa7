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
#include "bim/transceiver.hpp"
#include "bim/verify.hpp"
#include "test_support.hpp"

using namespace bim;

TEST_CASE("rank factor shapes and trivial symbol index")
{
    const auto cfg = SystemConfig::symmetric(3, 3, 8, 2);
    const auto plan = make_plan(cfg);
    const RankFactors f = build_rank_factors(cfg, plan, 0, 0);
    CHECK((f.d1 - CMatrix::Identity(8, 8)).norm() < 1e-15);
    CHECK((f.d2 - CMatrix::Identity(6, 6)).norm() < 1e-15);
    CHECK(f.e.rows() == 8);
    CHECK(f.e.cols() == 6);
    CHECK(f.e.cwiseAbs().maxCoeff() <= 1.0);
    for (Eigen::Index r = 0; r < f.e.rows(); ++r)
        for (Eigen::Index c = 0; c < f.e.cols(); ++c)
            CHECK((f.e(r, c) == 0.0 || std::abs(f.e(r, c)) == 1.0));
    for (int m = 0; m < plan.symbols_per_user[0]; ++m)
        CHECK(numerical_rank(build_rank_factors(cfg, plan, 0, m).g) == 6);
    CHECK_THROWS_AS(build_rank_factors(cfg, plan, 0, 2), std::invalid_argument);
    CHECK_THROWS_AS(build_rank_factors(SystemConfig::symmetric(2, 1, 2, 2), make_plan(SystemConfig::symmetric(2, 1, 2, 2)),
                                       0, 0),
                    std::invalid_argument);
}

TEST_CASE("decomposition holds on random channels")
{
    for (const auto& cfg : {SystemConfig::symmetric(2, 2, 4, 2), SystemConfig::symmetric(3, 3, 8, 2),
                            SystemConfig::symmetric(2, 2, 9, 3), SystemConfig::symmetric(2, 4, 6, 1)}) {
        const auto plan = make_plan(cfg);
        for (std::uint64_t t = 0; t < 100; ++t) {
            const CheckReport r = check_decomposition(cfg, plan, sample_channel_iid(cfg, child_seed(31, t)));
            CHECK(r.pass);
            CHECK(r.residual <= 1e-10);
        }
    }
}

TEST_CASE("decomposition of a zero channel and of a mutated factor")
{
    const auto cfg = SystemConfig::symmetric(3, 3, 8, 2);
    const auto plan = make_plan(cfg);
    ChannelRealization zero(cfg);
    const CheckReport z = check_decomposition(cfg, plan, zero);
    CHECK(z.pass);
    CHECK(z.residual == 0.0);

    const auto ch = sample_channel_iid(cfg, 3);
    const StructuredChannel s = build_structured(cfg, plan, ch);
    RankFactors f = build_rank_factors(cfg, plan, 0, 1);
    CHECK(decomposition_residual(plan, f, s.desired[0][0], ch.taps(0, 0, 0)) <= 1e-10);
    f.e(0, 0) = f.e(0, 0) == 0.0 ? 1.0 : 0.0;
    f.g = compose_rank_factors(plan, f);
    CHECK(decomposition_residual(plan, f, s.desired[0][0], ch.taps(0, 0, 0)) > 1e-3);
}

TEST_CASE("rank-equivalence chain")
{
    const auto cfg = SystemConfig::symmetric(3, 3, 8, 2);
    const auto plan = make_plan(cfg);
    const int M = plan.symbols_per_user[0];
    for (std::uint64_t t = 0; t < 50; ++t) {
        const auto ch = sample_channel_iid(cfg, child_seed(41, t));
        const auto eff = effective_channels(plan, build_structured(cfg, plan, ch));
        CMatrix h_eff(6, 3);
        for (int u = 0; u < 3; ++u)
            h_eff.col(u) = effective_taps(ch.taps(0, 0, u), 2);
        CMatrix chain(eff[0].h.rows(), M * 3);
        for (int m = 0; m < M; ++m)
            chain.middleCols(m * 3, 3) = build_rank_factors(cfg, plan, 0, m).g * h_eff;
        CHECK(numerical_rank(chain) == numerical_rank(eff[0].h));
    }
}

TEST_CASE("effective channel rank")
{
    CHECK(check_lemma2(SystemConfig::symmetric(2, 2, 4, 2, 1, 7), 1000) == 1.0);

    const auto cfg = SystemConfig::symmetric(2, 2, 4, 2);
    const auto plan = make_plan(cfg);
    auto ch = sample_channel_iid(cfg, 5);
    CHECK(effective_channels_full_rank(cfg, plan, ch));
    for (std::size_t l = 0; l < 4; ++l)
        ch.taps(0, 0, 1)[l] = ch.taps(0, 0, 0)[l];
    CHECK_FALSE(effective_channels_full_rank(cfg, plan, ch));
}

TEST_CASE("rank inequality")
{
    for (int n : {1, 3, 6}) {
        const CMatrix eye = CMatrix::Identity(n, n);
        CHECK(check_lemma3(eye, eye, eye));
    }
    CHECK(check_lemma3(CMatrix::Identity(3, 4), CMatrix::Zero(4, 5), CMatrix::Identity(5, 2)));

    std::mt19937_64 rng(8);
    std::uniform_int_distribution<int> dim(1, 8);
    for (int t = 0; t < 200; ++t) {
        const int p = dim(rng), q = dim(rng), r = dim(rng), s = dim(rng);
        auto low_rank = [&](int rows, int cols) {
            const int k = std::uniform_int_distribution<int>(0, std::min(rows, cols))(rng);
            CMatrix a = CMatrix::Zero(rows, cols);
            for (int i = 0; i < k; ++i)
                a += test::random_vector(rng, rows) * test::random_vector(rng, cols).transpose();
            return a;
        };
        CHECK(check_lemma3(low_rank(p, q), low_rank(q, r), low_rank(r, s)));
    }
}

TEST_CASE("DFT submatrix independence")
{
    std::vector<int> cols(3);
    int cases = 0;
    for (int first = 0; first < 8; ++first)
        for (cols[0] = 0; cols[0] < 8; ++cols[0])
            for (cols[1] = cols[0] + 1; cols[1] < 8; ++cols[1])
                for (cols[2] = cols[1] + 1; cols[2] < 8; ++cols[2]) {
                    CHECK(check_dft_submatrix_independence(8, first, 3, cols));
                    ++cases;
                }
    CHECK(cases == 8 * 56);
    for (int c = 0; c < 8; ++c) {
        const std::vector<int> one{c};
        CHECK(check_dft_submatrix_independence(8, 2, 5, one));
    }
    const std::vector<int> too_many{0, 1, 2, 3, 4, 5};
    CHECK_THROWS_AS(check_dft_submatrix_independence(8, 0, 3, too_many), std::invalid_argument);
}

TEST_CASE("verification suite at the default configuration")
{
    const auto reports = run_verification_suite(SystemConfig::symmetric(3, 3, 8, 2, 10), 50);
    CHECK(reports.size() == 5);
    for (const auto& r : reports) {
        INFO(r.name << ": " << r.detail);
        CHECK(r.pass);
        CHECK_FALSE(r.name.empty());
    }
}
