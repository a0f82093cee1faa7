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

#include "bim/analysis.hpp"
#include "bim/linalg.hpp"
#include "test_support.hpp"

using namespace bim;

namespace {

std::vector<EffectiveChannel> draw_effective(const SystemConfig& cfg, const TransmissionPlan& plan, std::uint64_t seed)
{
    return effective_channels(plan, build_structured(cfg, plan, sample_channel_iid(cfg, seed)));
}

} // namespace

TEST_CASE("fractions")
{
    CHECK(Fraction(6, 9) == Fraction(2, 3));
    CHECK(Fraction(4, -2) == Fraction(-2));
    CHECK(Fraction(0, 5) == Fraction(0));
    CHECK(Fraction(2, 3).str() == "2/3");
    CHECK(Fraction(4, 2).str() == "2");
    CHECK(max(Fraction(1, 2), Fraction(2, 3)) == Fraction(2, 3));
    CHECK(Fraction(2, 3) * Fraction(3, 4) == Fraction(1, 2));
    CHECK_THROWS_AS(Fraction(1, 0), std::invalid_argument);
}

TEST_CASE("DoF of the worked configurations")
{
    for (int K = 2; K <= 8; ++K)
        CHECK(dof_theorem1(SystemConfig::symmetric(K, 2, 4, 2)) == Fraction(K, 2));
    for (int K = 1; K <= 5; ++K)
        for (int L : {1, 2, 5})
            CHECK(dof_theorem1(SystemConfig::symmetric(K, 3, L, L)) == Fraction(1));
    CHECK(dof_theorem1(SystemConfig::symmetric(3, 3, 8, 2)) == Fraction(2));
    CHECK(dof_theorem1(SystemConfig::symmetric(2, 4, 10, 2)) == Fraction(16, 11));
}

TEST_CASE("closed-form symmetric DoF")
{
    CHECK(dof_symmetric(4, 8, 2, 6) == Fraction(3));
    for (int K = 1; K <= 4; ++K)
        for (int ld = 2; ld <= 9; ++ld)
            CHECK(dof_symmetric(K, ld, 1, ld - 1) == Fraction(K * (ld - 1), ld));
    CHECK(dof_symmetric(5, 2000, 2, 1998).value() == doctest::Approx(5.0).epsilon(0.002));
    CHECK_THROWS_AS(dof_symmetric(2, 8, 2, 5), std::invalid_argument);
    CHECK_THROWS_AS(dof_symmetric(2, 5, 3, 2), std::invalid_argument);
}

TEST_CASE("interference-channel DoF")
{
    CHECK(dof_interference_channel(5, 4, 2) == Fraction(2));
    CHECK(dof_interference_channel(6, 2000, 2).value() == doctest::Approx(3.0).epsilon(0.002));
    CHECK(dof_symmetric(6, 2000, 2, 1998).value() / dof_interference_channel(6, 2000, 2).value() ==
          doctest::Approx(2.0).epsilon(0.002));
    CHECK_THROWS_AS(dof_interference_channel(2, 3, 3), std::invalid_argument);
}

TEST_CASE("scheme DoF matches the closed form over the whole sweep")
{
    int checked = 0;
    for (int ld = 2; ld <= 16; ++ld)
        for (int li = 1; li <= ld / 2; ++li)
            for (int U = ld - li; U <= ld - li + 4; ++U)
                for (int K = 1; K <= 6; ++K) {
                    const Fraction closed = dof_symmetric(K, ld, li, U);
                    CHECK(dof_scheme_symmetric(K, ld, li, U) == closed);
                    const Fraction thm = dof_theorem1(SystemConfig::symmetric(K, U, ld, li));
                    CHECK(thm.num >= thm.den);
                    if (K >= 2)
                        CHECK(thm == closed);
                    else
                        CHECK(thm == max(closed, Fraction(1)));
                    ++checked;
                }
    CHECK(checked > 1000);
}

TEST_CASE("QR rate identities")
{
    const auto cfg = SystemConfig::symmetric(3, 3, 8, 2);
    const auto plan = make_plan(cfg);
    for (std::uint64_t t = 0; t < 100; ++t) {
        const auto eff = draw_effective(cfg, plan, child_seed(2, t));
        for (int k = 0; k < 3; ++k) {
            const CMatrix& h = eff[k].h;
            const ThinQR f = qr_positive(h);
            double prod = 1.0;
            for (Eigen::Index m = 0; m < f.r.rows(); ++m)
                prod *= std::norm(f.r(m, m));
            const double det = (h.adjoint() * h).determinant().real();
            CHECK(std::abs(prod - det) <= 1e-8 * det);

            const double snr = db_to_linear(20.0) * plan.core_len / plan.symbols_per_user[k];
            double zf_sic = 0.0;
            for (Eigen::Index m = 0; m < f.r.rows(); ++m)
                zf_sic += std::log2(1.0 + snr * std::norm(f.r(m, m)));
            CHECK(zf_sic <= logdet_rate(h, snr) + 1e-9);
        }
    }
}

TEST_CASE("sum rate behaviour")
{
    const auto cfg = SystemConfig::symmetric(3, 3, 8, 2, 10);
    const auto plan = make_plan(cfg);
    const auto eff = draw_effective(cfg, plan, 77);

    CHECK(sum_rate_qr(plan, eff, 1e-12).network_sum < 1e-9);
    double prev = -1.0;
    for (double db = -10.0; db <= 60.0; db += 5.0) {
        const double r = sum_rate_qr(plan, eff, db_to_linear(db)).network_sum;
        CHECK(r > prev);
        prev = r;
    }
    const RateReport rep = sum_rate_qr(plan, eff, 100.0);
    CHECK(rep.dof_formula == doctest::Approx(2.0));
    CHECK(rep.per_stream[0].size() == 6);
    const RateReport fin = sum_rate_qr(plan, eff, 100.0, RateNormalization::finite_block);
    CHECK(fin.network_sum == doctest::Approx(rep.network_sum * 10.0 * plan.subblock_len / plan.block_len));

    // per-stream rates only see R's diagonal, which a common unitary rotation keeps
    std::mt19937_64 rng(3);
    CMatrix a(eff[0].h.rows(), eff[0].h.rows());
    for (Eigen::Index c = 0; c < a.cols(); ++c)
        a.col(c) = test::random_vector(rng, static_cast<int>(a.rows()));
    const CMatrix unitary = Eigen::HouseholderQR<CMatrix>(a).householderQ();
    std::vector<EffectiveChannel> rotated = eff;
    for (auto& e : rotated)
        e.h = unitary * e.h;
    const RateReport rot = sum_rate_qr(plan, rotated, 100.0);
    for (int k = 0; k < 3; ++k)
        for (std::size_t m = 0; m < rep.per_stream[k].size(); ++m)
            CHECK(std::abs(rot.per_stream[k][m] - rep.per_stream[k][m]) <= 1e-9);

    std::vector<EffectiveChannel> broken = eff;
    broken[1].h.col(1) = broken[1].h.col(0);
    CHECK_THROWS_AS(sum_rate_qr(plan, broken, 100.0), std::domain_error);
}

TEST_CASE("high-SNR slope")
{
    CHECK_THROWS_AS(highsnr_slope(1e3, 0.0, 1e5, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(highsnr_slope(1e6, 0.0, 1e5, 1.0), std::invalid_argument);
    const double r = 0.7;
    auto single = [&](double rho) { return std::log2(1.0 + rho * r * r); };
    CHECK(highsnr_slope(1e5, single(1e5), 1e6, single(1e6)) == doctest::Approx(1.0).epsilon(0.01));

    const auto cfg = SystemConfig::symmetric(3, 3, 8, 2);
    const auto plan = make_plan(cfg);
    double lo = 0.0;
    double hi = 0.0;
    for (std::uint64_t t = 0; t < 200; ++t) {
        const auto eff = draw_effective(cfg, plan, child_seed(4, t));
        lo += sum_rate_qr(plan, eff, 1e5).network_sum / 200;
        hi += sum_rate_qr(plan, eff, 1e6).network_sum / 200;
    }
    CHECK(highsnr_slope(1e5, lo, 1e6, hi) == doctest::Approx(2.0).epsilon(0.03));
}

TEST_CASE("TDMA-OFDMA baseline")
{
    SUBCASE("flat unit channel")
    {
        SystemConfig cfg = SystemConfig::symmetric(1, 1, 4, 1);
        ChannelRealization ch(cfg);
        ch.taps(0, 0, 0)[0] = std::polar(1.0, 0.7);
        for (int Nc : {1, 3, 8}) {
            const double rho = 31.0;
            CHECK(baseline_tdma_ofdma(cfg, ch, rho, Nc).network ==
                  doctest::Approx(static_cast<double>(Nc) / (Nc + 3) * std::log2(1.0 + rho)));
        }
    }
    SUBCASE("independent of interfering links")
    {
        const auto cfg = SystemConfig::symmetric(3, 3, 8, 2);
        auto ch = sample_channel_iid(cfg, 5);
        const BaselineRate a = baseline_tdma_ofdma(cfg, ch, 100.0, 8);
        for (int k = 0; k < 3; ++k)
            for (int i = 0; i < 3; ++i)
                if (i != k)
                    for (int u = 0; u < 3; ++u)
                        for (auto& x : ch.taps(k, i, u))
                            x *= 50.0;
        CHECK(baseline_tdma_ofdma(cfg, ch, 100.0, 8).network == a.network);
        CHECK(a.per_cell_average() == doctest::Approx(a.network / 3.0));
    }
    SUBCASE("slope approaches the CP-reduced TDMA value")
    {
        const auto cfg = SystemConfig::symmetric(3, 3, 8, 2);
        double lo = 0.0;
        double hi = 0.0;
        for (std::uint64_t t = 0; t < 200; ++t) {
            const auto ch = sample_channel_iid(cfg, child_seed(6, t));
            lo += baseline_tdma_ofdma(cfg, ch, 1e5, 8).per_cell_average() / 200;
            hi += baseline_tdma_ofdma(cfg, ch, 1e6, 8).per_cell_average() / 200;
        }
        CHECK(highsnr_slope(1e5, lo, 1e6, hi) == doctest::Approx(8.0 / (3.0 * 15.0)).epsilon(0.03));
    }
}

TEST_CASE("OFDMA with ICI as noise reduces to per-subcarrier capacity without ICI")
{
    SystemConfig cfg = SystemConfig::symmetric(2, 2, 3, 2);
    Deployment dep;
    auto ch = sample_channel_iid(cfg, 15);
    for (int u = 0; u < 2; ++u)
        for (auto& x : ch.taps(0, 1, u))
            x = 0.0;
    const int Nc = 4;
    const double P = dep.tx_power_mw();
    const double noise = dep.noise_power_mw();
    double expect = 0.0;
    for (int n = 0; n < Nc; ++n) {
        const auto h = ch.taps(0, 0, n % 2);
        cplx g{};
        for (std::size_t l = 0; l < h.size(); ++l)
            g += h[l] * std::polar(1.0, -2.0 * kPi * static_cast<double>(l) * n / Nc);
        expect += std::log2(1.0 + P * Nc / 2.0 * std::norm(g) / noise);
    }
    expect /= Nc + 2;
    CHECK(ofdma_ici_as_noise_rate(cfg, dep, ch, 0, Nc) == doctest::Approx(expect).epsilon(1e-12));

    // interference only lowers the rate
    const auto with_ici = sample_channel_iid(cfg, 15);
    CHECK(ofdma_ici_as_noise_rate(cfg, dep, with_ici, 0, Nc) < expect);
}

TEST_CASE("proposed scheme beats the baseline at 10 dB")
{
    for (int K : {2, 3}) {
        const auto cfg = SystemConfig::symmetric(K, 3, 8, 2, 10);
        const std::vector<double> snr{10.0};
        const auto p = ergodic_rate(cfg, snr, 200, Scheme::proposed);
        const auto b = ergodic_rate(cfg, snr, 200, Scheme::tdma_ofdma);
        CHECK(p[0].mean > b[0].mean);
    }
}

TEST_CASE("ergodic averaging")
{
    const auto cfg = SystemConfig::symmetric(2, 2, 4, 2, 5, 21);
    const auto plan = make_plan(cfg);

    const std::vector<double> one{15.0};
    const auto single = ergodic_rate(cfg, one, 1, Scheme::proposed);
    const auto eff = effective_channels(plan, build_structured(cfg, plan, sample_channel_iid(cfg, child_seed(21, 0))));
    CHECK(single[0].mean ==
          doctest::Approx(sum_rate_qr(plan, eff, db_to_linear(15.0), RateNormalization::finite_block).network_sum));

    const std::vector<double> fwd{0.0, 10.0, 20.0};
    const std::vector<double> rev{20.0, 10.0, 0.0, 0.0, 10.0, 20.0};
    const auto a = ergodic_rate(cfg, fwd, 30, Scheme::proposed);
    const auto b = ergodic_rate(cfg, rev, 30, Scheme::proposed);
    for (std::size_t s = 0; s < 3; ++s) {
        CHECK(a[s].mean == b[2 - s].mean);
        CHECK(a[s].mean == b[3 + s].mean);
    }

    const auto few = ergodic_rate(cfg, one, 100, Scheme::proposed);
    const auto many = ergodic_rate(cfg, one, 400, Scheme::proposed);
    const double ratio = few[0].std_error / many[0].std_error;
    CHECK(ratio > 1.5);
    CHECK(ratio < 2.7);

    // scheduling does not change the result
    const auto serial = ergodic_rate(cfg, fwd, 30, Scheme::proposed, 1);
    const auto threaded = ergodic_rate(cfg, fwd, 30, Scheme::proposed, 4);
    for (std::size_t s = 0; s < 3; ++s)
        CHECK(serial[s].mean == threaded[s].mean);
    CHECK_THROWS_AS(ergodic_rate(cfg, fwd, 0, Scheme::proposed), std::invalid_argument);
}
