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

#include "bim/transceiver.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

#include "bim/linalg.hpp"

namespace bim {

double symbol_variance(const TransmissionPlan& plan, int k)
{
    const int m = plan.symbols_per_user[k];
    if (m == 0)
        return 0.0;
    return static_cast<double>(plan.core_len) / m;
}

std::vector<cplx> qpsk_alphabet()
{
    const double a = std::sqrt(0.5);
    return {{a, a}, {-a, a}, {-a, -a}, {a, -a}};
}

std::vector<std::vector<SymbolStream>> draw_symbols(const TransmissionPlan& plan, SymbolModel model,
                                                    std::uint64_t rng_seed)
{
    std::mt19937_64 rng(rng_seed);
    std::normal_distribution<double> gauss(0.0, std::sqrt(0.5));
    std::uniform_int_distribution<int> pick(0, 3);
    const auto qpsk = qpsk_alphabet();

    const int K = static_cast<int>(plan.active_users.size());
    std::vector<std::vector<SymbolStream>> out(static_cast<std::size_t>(K));
    for (int k = 0; k < K; ++k) {
        const double scale = std::sqrt(symbol_variance(plan, k));
        const int M = plan.symbols_per_user[k];
        out[k].resize(static_cast<std::size_t>(plan.active_users[k]));
        for (auto& stream : out[k]) {
            stream.assign(static_cast<std::size_t>(plan.subblocks), CVector(M));
            for (auto& s : stream)
                for (int m = 0; m < M; ++m) {
                    if (model == SymbolModel::gaussian) {
                        const double re = gauss(rng);
                        s(m) = scale * cplx(re, gauss(rng));
                    } else {
                        s(m) = scale * qpsk[static_cast<std::size_t>(pick(rng))];
                    }
                }
        }
    }
    return out;
}

CVector precode(const TransmissionPlan& plan, const CVector& symbols)
{
    const int N = plan.core_len;
    if (symbols.size() > N)
        throw std::invalid_argument("precode: more symbols than core samples");
    if (symbols.size() == 0)
        return CVector::Zero(N);
    return idft_basis(N).block(0, static_cast<int>(symbols.size())) * symbols;
}

CVector precode_and_frame(const TransmissionPlan& plan, const SymbolStream& symbols)
{
    if (static_cast<int>(symbols.size()) != plan.subblocks)
        throw std::invalid_argument("precode_and_frame: expected " + std::to_string(plan.subblocks) +
                                    " subblocks, got " + std::to_string(symbols.size()));
    const int N = plan.core_len;
    const int cp = plan.cp_len;
    const int Nbar = plan.subblock_len;
    CVector x = CVector::Zero(plan.block_len);
    for (int b = 0; b < plan.subblocks; ++b) {
        if (symbols[b].size() != symbols[0].size())
            throw std::invalid_argument("precode_and_frame: ragged symbol shape at subblock " + std::to_string(b));
        const CVector core = precode(plan, symbols[b]);
        x.segment(b * Nbar, cp) = core.tail(cp);
        x.segment(b * Nbar + cp, N) = core;
    }
    return x;
}

std::vector<CVector> simulate_reception(const SystemConfig& cfg, const TransmissionPlan& plan,
                                        const ChannelRealization& ch, const std::vector<std::vector<CVector>>& tx,
                                        std::uint64_t noise_seed, double noise_var)
{
    const int K = cfg.cells;
    const int T = plan.block_len;
    if (static_cast<int>(tx.size()) != K)
        throw std::invalid_argument("simulate_reception: one transmit list per cell required");

    std::vector<CVector> y(static_cast<std::size_t>(K), CVector::Zero(T));
    for (int k = 0; k < K; ++k)
        for (int i = 0; i < K; ++i)
            for (std::size_t u = 0; u < tx[i].size(); ++u) {
                const CVector& x = tx[i][u];
                if (x.size() != T)
                    throw std::invalid_argument("simulate_reception: transmit block length differs from T");
                const auto h = ch.taps(k, i, static_cast<int>(u));
                const int L = static_cast<int>(h.size());
                for (int n = 0; n < T; ++n) {
                    cplx acc{};
                    for (int l = 0; l < L && l <= n; ++l)
                        acc += h[static_cast<std::size_t>(l)] * x(n - l);
                    y[k](n) += acc;
                }
            }

    if (noise_var > 0.0) {
        std::mt19937_64 rng(noise_seed);
        std::normal_distribution<double> gauss(0.0, std::sqrt(0.5 * noise_var));
        for (auto& yk : y)
            for (int n = 0; n < T; ++n) {
                const double re = gauss(rng);
                yk(n) += cplx(re, gauss(rng));
            }
    }
    return y;
}

CVector remove_cp_and_stack(const TransmissionPlan& plan, const CVector& y, int b)
{
    if (b < 0 || b >= plan.subblocks)
        throw std::out_of_range("remove_cp_and_stack: subblock " + std::to_string(b) + " out of range");
    const Eigen::Index start = static_cast<Eigen::Index>(b) * plan.subblock_len + plan.cp_len;
    if (y.size() < start + plan.core_len)
        throw std::out_of_range("remove_cp_and_stack: received stream too short");
    return y.segment(start, plan.core_len);
}

CMatrix combiner(const TransmissionPlan& plan)
{
    const int N = plan.core_len;
    return idft_basis(N).block(plan.max_symbols, N - plan.max_symbols).adjoint();
}

CVector combine(const TransmissionPlan& plan, const CVector& y_bar)
{
    if (y_bar.size() != plan.core_len)
        throw std::invalid_argument("combine: input length differs from N");
    return combiner(plan) * y_bar;
}

std::vector<EffectiveChannel> effective_channels(const TransmissionPlan& plan, const StructuredChannel& s)
{
    const int K = static_cast<int>(plan.active_users.size());
    const IdftBasis F = idft_basis(plan.core_len);
    const CMatrix W = combiner(plan);
    std::vector<EffectiveChannel> out(static_cast<std::size_t>(K));
    for (int k = 0; k < K; ++k) {
        const int M = plan.symbols_per_user[k];
        const int U = plan.active_users[k];
        const CMatrix Fk = F.block(0, M);
        auto& e = out[k];
        e.combiner = W;
        e.h.resize(W.rows(), U * M);
        e.h_sub.resize(W.rows(), U * M);
        for (int u = 0; u < U; ++u) {
            const auto& link = s.desired[k][u];
            e.h.middleCols(u * M, M) = W * link.noncirc * Fk;
            e.h_sub.middleCols(u * M, M) = W * link.prev_subblock * Fk;
        }
    }
    return out;
}

CVector detect_zf(const CMatrix& h, const CVector& y)
{
    if (h.rows() != y.size())
        throw std::invalid_argument("detect_zf: dimension mismatch");
    if (h.cols() == 0)
        return CVector(0);
    if (h.rows() < h.cols() || numerical_rank(h) < h.cols())
        throw std::domain_error("detect_zf: effective channel is rank deficient");
    return h.householderQr().solve(y);
}

CVector detect_ml(const CMatrix& h, const CVector& y, std::span<const cplx> alphabet)
{
    const auto n = static_cast<int>(h.cols());
    const auto q = static_cast<int>(alphabet.size());
    if (h.rows() != y.size())
        throw std::invalid_argument("detect_ml: dimension mismatch");
    if (q == 0)
        throw std::invalid_argument("detect_ml: empty alphabet");
    if (n > kMlMaxSymbols || std::pow(static_cast<double>(q), n) > kMlMaxCandidates)
        throw std::length_error("detect_ml: search space exceeds guard (" + std::to_string(n) + " symbols)");

    std::vector<int> digits(static_cast<std::size_t>(n), 0);
    CVector cand(n);
    CVector best = CVector::Zero(n);
    double best_cost = std::numeric_limits<double>::infinity();
    while (true) {
        for (int j = 0; j < n; ++j)
            cand(j) = alphabet[static_cast<std::size_t>(digits[j])];
        const double cost = (y - h * cand).squaredNorm();
        if (cost < best_cost) {
            best_cost = cost;
            best = cand;
        }
        int j = 0;
        while (j < n && ++digits[j] == q)
            digits[j++] = 0;
        if (j == n)
            break;
    }
    return best;
}

DecodeResult decode_block(const TransmissionPlan& plan, const EffectiveChannel& eff, std::span<const CVector> y_tilde,
                          const Detector& detector, const std::vector<CVector>* genie,
                          std::optional<double> effective_snr)
{
    const auto B = static_cast<int>(y_tilde.size());
    if (B != plan.subblocks)
        throw std::invalid_argument("decode_block: expected one combined vector per subblock");
    if (genie != nullptr && static_cast<int>(genie->size()) < B - 1)
        throw std::invalid_argument("decode_block: genie symbols missing");

    DecodeResult res;
    if (effective_snr && eff.h.cols() > 0) {
        const ThinQR f = qr_positive(eff.h);
        for (Eigen::Index m = 0; m < f.r.rows(); ++m)
            res.post_snr.push_back(*effective_snr * std::norm(f.r(m, m)));
    }

    for (int b = 0; b < B; ++b) {
        CVector y = y_tilde[static_cast<std::size_t>(b)];
        if (b > 0 && eff.h.cols() > 0) {
            const CVector& prev = genie != nullptr ? (*genie)[static_cast<std::size_t>(b - 1)] : res.symbols.back();
            y -= eff.h_sub * prev;
        }
        CVector s;
        try {
            s = eff.h.cols() > 0 ? detector(eff.h, y) : CVector(0);
        } catch (const std::exception& e) {
            throw std::runtime_error("decode_block: subblock " + std::to_string(b) + ": " + e.what());
        }
        res.residual_power.push_back((y - eff.h * s).squaredNorm());
        res.symbols.push_back(std::move(s));
    }
    return res;
}

std::vector<CVector> stack_cell_symbols(const TransmissionPlan& plan, int k, const std::vector<SymbolStream>& users)
{
    const int U = plan.active_users[k];
    const int M = plan.symbols_per_user[k];
    if (static_cast<int>(users.size()) < U)
        throw std::invalid_argument("stack_cell_symbols: fewer symbol streams than active users");
    std::vector<CVector> out(static_cast<std::size_t>(plan.subblocks), CVector(U * M));
    for (int b = 0; b < plan.subblocks; ++b)
        for (int u = 0; u < U; ++u)
            out[b].segment(u * M, M) = users[u][b];
    return out;
}

} // namespace bim
