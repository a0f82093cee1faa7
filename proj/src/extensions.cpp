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

#include "bim/extensions.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

#include "bim/linalg.hpp"
#include "bim/spectral.hpp"

namespace bim {

namespace {

double log2_det_hpd(const CMatrix& a)
{
    Eigen::LLT<CMatrix> llt(a);
    if (llt.info() != Eigen::Success)
        throw std::domain_error("rate_with_residual_ici: noise-plus-interference matrix is singular");
    double acc = 0.0;
    const CMatrix& l = llt.matrixLLT();
    for (Eigen::Index i = 0; i < l.rows(); ++i) {
        const double d = l(i, i).real();
        if (!(d > 0.0))
            throw std::domain_error("rate_with_residual_ici: noise-plus-interference matrix is singular");
        acc += 2.0 * std::log2(d);
    }
    return acc;
}

int max_offdiag_len(const SystemConfig& cfg)
{
    int li = 1;
    for (int k = 0; k < cfg.cells; ++k)
        for (int i = 0; i < cfg.cells; ++i)
            if (i != k)
                li = std::max(li, cfg.cir_len[k][i]);
    return li;
}

} // namespace

void validate_delay_profile(const DelayProfile& dp)
{
    if (dp.considered_ici_len < 1 || dp.delay_taps < 0 || dp.delay_taps > dp.considered_ici_len ||
        dp.considered_ici_len > dp.ici_len)
        throw std::invalid_argument("delay profile requires 0 <= L_Id <= L_I' <= L_I and L_I' >= 1 (got L_Id = " +
                                    std::to_string(dp.delay_taps) + ", L_I' = " +
                                    std::to_string(dp.considered_ici_len) + ", L_I = " + std::to_string(dp.ici_len) +
                                    ")");
}

TwoStageCombiner build_two_stage_combiner(int core_len, int desired_len, int considered_ici_len, int delay_taps)
{
    const int N = core_len;
    const int cp = considered_ici_len - 1;
    if (N < 2 || desired_len < 1 || considered_ici_len < 1 || delay_taps < 0)
        throw std::invalid_argument("build_two_stage_combiner: parameters out of range");
    // Folded samples must be ICI-free and land on distinct rows exactly once.
    if (delay_taps > 0 && (delay_taps >= considered_ici_len || N < cp))
        throw std::invalid_argument("build_two_stage_combiner: no valid fold for N = " + std::to_string(N) +
                                    ", L_I' = " + std::to_string(considered_ici_len) +
                                    ", L_Id = " + std::to_string(delay_taps));

    TwoStageCombiner c;
    c.fold = RMatrix::Zero(N, N + cp);
    for (int r = 0; r < N; ++r) {
        c.fold(r, cp + r) = 1.0;
        const int early = cp + r - N;
        if (early >= 0 && early < delay_taps)
            c.fold(r, early) = 1.0;
    }
    c.project = idft_basis(N).block(1, N - 1).adjoint();
    return c;
}

DelayedPlan make_delayed_plan(const SystemConfig& cfg, const DelayProfile& dp)
{
    require_valid(cfg);
    validate_delay_profile(dp);
    const int lip = dp.considered_ici_len;
    int ld = 0;
    for (int k = 0; k < cfg.cells; ++k)
        ld = std::max(ld, cfg.cir_len[k][k]);

    DelayedPlan p;
    p.core_len = std::max(ld - lip + 1, lip);
    p.cp_len = lip - 1;
    p.window_len = p.core_len + p.cp_len;
    p.subblocks = cfg.subblocks;
    p.max_ici_len = max_offdiag_len(cfg);
    p.block_len = p.subblocks * p.window_len + p.max_ici_len - 1;
    for (int k = 0; k < cfg.cells; ++k) {
        const int dims = std::max(cfg.cir_len[k][k] - lip, 0) + dp.delay_taps;
        p.active_users.push_back(std::min({cfg.users_per_cell[k], dims, p.core_len - 1}));
    }
    return p;
}

DofCount delayed_dof(const DelayedPlan& plan)
{
    DofCount d;
    for (int u : plan.active_users)
        d.symbols += u * plan.symbols_per_user;
    d.slots = plan.window_len;
    return d;
}

CMatrix delayed_composite(const DelayedPlan& plan, const TwoStageCombiner& comb, std::span<const cplx> taps)
{
    const int N = plan.core_len;
    const int Lw = plan.window_len;
    const int cp = plan.cp_len;
    CMatrix conv = CMatrix::Zero(Lw, Lw);
    for (int r = 0; r < Lw; ++r)
        for (int c = 0; c <= r; ++c)
            if (static_cast<std::size_t>(r - c) < taps.size())
                conv(r, c) = taps[static_cast<std::size_t>(r - c)];
    CMatrix insert = CMatrix::Zero(Lw, N);
    for (int j = 0; j < Lw; ++j)
        insert(j, j < cp ? N - cp + j : j - cp) = 1.0;
    return comb.fold.cast<cplx>() * conv * insert;
}

namespace {

CMatrix stacked_channel(const DelayedPlan& plan, const TwoStageCombiner& comb, const ChannelRealization& ch, int k,
                        int i)
{
    const int U = plan.active_users[i];
    const CVector f0 = idft_basis(plan.core_len).column(0);
    CMatrix h(comb.project.rows(), U);
    for (int u = 0; u < U; ++u)
        h.col(u) = comb.project * (delayed_composite(plan, comb, ch.taps(k, i, u)) * f0);
    return h;
}

} // namespace

CMatrix delayed_effective_channel(const DelayedPlan& plan, const TwoStageCombiner& comb,
                                  const ChannelRealization& ch, int k)
{
    return stacked_channel(plan, comb, ch, k, k);
}

CMatrix delayed_interference_channel(const DelayedPlan& plan, const TwoStageCombiner& comb,
                                     const ChannelRealization& ch, int k, int i)
{
    if (i == k)
        throw std::invalid_argument("delayed_interference_channel: i must differ from k");
    return stacked_channel(plan, comb, ch, k, i);
}

std::vector<std::vector<CVector>> simulate_delayed_frames(const SystemConfig& cfg, const DelayedPlan& plan,
                                                          const ChannelRealization& ch,
                                                          const std::vector<std::vector<std::vector<cplx>>>& symbols,
                                                          std::uint64_t noise_seed, double noise_var)
{
    const int K = cfg.cells;
    const int N = plan.core_len;
    const int cp = plan.cp_len;
    const int Lw = plan.window_len;
    if (static_cast<int>(symbols.size()) != K)
        throw std::invalid_argument("simulate_delayed_frames: one symbol list per cell required");
    const CVector f0 = idft_basis(N).column(0);

    std::mt19937_64 rng(noise_seed);
    std::normal_distribution<double> gauss(0.0, std::sqrt(0.5 * std::max(noise_var, 0.0)));

    std::vector<std::vector<CVector>> frames(static_cast<std::size_t>(K));
    for (int k = 0; k < K; ++k)
        frames[k].assign(static_cast<std::size_t>(plan.subblocks), CVector::Zero(Lw));

    for (int b = 0; b < plan.subblocks; ++b)
        for (int i = 0; i < K; ++i)
            for (std::size_t u = 0; u < symbols[i].size(); ++u) {
                if (static_cast<int>(symbols[i][u].size()) != plan.subblocks)
                    throw std::invalid_argument("simulate_delayed_frames: symbol count differs from B");
                const CVector core = f0 * symbols[i][u][static_cast<std::size_t>(b)];
                CVector x(Lw);
                x.head(cp) = core.tail(cp);
                x.tail(N) = core;
                for (int k = 0; k < K; ++k) {
                    const auto h = ch.taps(k, i, static_cast<int>(u));
                    for (int n = 0; n < Lw; ++n)
                        for (int l = 0; l <= n && static_cast<std::size_t>(l) < h.size(); ++l)
                            frames[k][b](n) += h[static_cast<std::size_t>(l)] * x(n - l);
                }
            }

    if (noise_var > 0.0)
        for (auto& per_cell : frames)
            for (auto& f : per_cell)
                for (int n = 0; n < Lw; ++n) {
                    const double re = gauss(rng);
                    f(n) += cplx(re, gauss(rng));
                }
    return frames;
}

std::vector<DecodeResult> decode_delayed_ici(const SystemConfig& cfg, const DelayedPlan& plan,
                                             const ChannelRealization& ch, const DelayProfile& dp,
                                             const std::vector<std::vector<CVector>>& frames,
                                             const Detector& detector)
{
    validate_delay_profile(dp);
    int ld = 1;
    for (int k = 0; k < cfg.cells; ++k)
        ld = std::max(ld, cfg.cir_len[k][k]);
    const TwoStageCombiner comb = build_two_stage_combiner(plan.core_len, ld, dp.considered_ici_len, dp.delay_taps);
    const CMatrix w = comb.combined();

    std::vector<DecodeResult> out(static_cast<std::size_t>(cfg.cells));
    for (int k = 0; k < cfg.cells; ++k) {
        const CMatrix h = delayed_effective_channel(plan, comb, ch, k);
        for (int b = 0; b < plan.subblocks; ++b) {
            const CVector y = w * frames[k][b];
            CVector s;
            try {
                s = h.cols() > 0 ? detector(h, y) : CVector(0);
            } catch (const std::exception& e) {
                throw std::runtime_error("decode_delayed_ici: cell " + std::to_string(k) + ", frame " +
                                         std::to_string(b) + ": " + e.what());
            }
            out[k].residual_power.push_back((y - h * s).squaredNorm());
            out[k].symbols.push_back(std::move(s));
        }
    }
    return out;
}

double rate_with_residual_ici(const SystemConfig& cfg, const DelayedPlan& plan, const Deployment& dep,
                              const ChannelRealization& ch, const DelayProfile& dp, int k)
{
    validate_delay_profile(dp);
    if (plan.active_users[k] == 0)
        return 0.0;
    const TwoStageCombiner comb =
        build_two_stage_combiner(plan.core_len, cfg.cir_len[k][k], dp.considered_ici_len, dp.delay_taps);
    const double gain =
        plan.core_len * dep.tx_power_mw() / (plan.symbols_per_user * dep.noise_power_mw());

    const CMatrix w = comb.combined();
    CMatrix q = w * w.adjoint();
    for (int i = 0; i < cfg.cells; ++i) {
        if (i == k || plan.active_users[i] == 0)
            continue;
        const CMatrix hi = delayed_interference_channel(plan, comb, ch, k, i);
        q += gain * hi * hi.adjoint();
    }
    const CMatrix h = delayed_effective_channel(plan, comb, ch, k);
    const CMatrix s = gain * h * h.adjoint();
    const double bits = log2_det_hpd(q + s) - log2_det_hpd(q);
    return static_cast<double>(plan.subblocks) / plan.block_len * std::max(bits, 0.0);
}

} // namespace bim
