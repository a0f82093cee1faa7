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

#include "bim/verify.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

#include "bim/linalg.hpp"
#include "bim/transceiver.hpp"

namespace bim {

namespace {

std::string describe(const SystemConfig& cfg)
{
    std::ostringstream os;
    os << "K=" << cfg.cells << " U=[";
    for (std::size_t i = 0; i < cfg.users_per_cell.size(); ++i)
        os << (i ? "," : "") << cfg.users_per_cell[i];
    os << "] Lkk=[";
    for (int k = 0; k < cfg.cells; ++k)
        os << (k ? "," : "") << cfg.cir_len[k][k];
    os << "]";
    return os.str();
}

CMatrix random_matrix(std::mt19937_64& rng, int rows, int cols)
{
    std::normal_distribution<double> g(0.0, std::sqrt(0.5));
    CMatrix a(rows, cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) {
            const double re = g(rng);
            a(r, c) = cplx(re, g(rng));
        }
    return a;
}

// Random rows x cols matrix of rank at most `rank`.
// Unit-modulus taps with uniform phase. The factor ranks are exact statements for any
// channel with nonzero taps, but a triangular Toeplitz block with a small leading tap
// has condition number growing like |h|^-q, so Rayleigh draws push true singular
// values below any fixed numerical-rank threshold.
ChannelRealization sample_unit_modulus(const SystemConfig& cfg, std::uint64_t seed)
{
    ChannelRealization ch(cfg);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * kPi);
    for (int k = 0; k < cfg.cells; ++k)
        for (int i = 0; i < cfg.cells; ++i)
            for (int u = 0; u < ch.users(i); ++u)
                for (cplx& x : ch.taps(k, i, u))
                    x = std::polar(1.0, phase(rng));
    return ch;
}

CMatrix random_low_rank(std::mt19937_64& rng, int rows, int cols, int rank)
{
    if (rank == 0)
        return CMatrix::Zero(rows, cols);
    return random_matrix(rng, rows, rank) * random_matrix(rng, rank, cols);
}

} // namespace

RankFactors build_rank_factors(const SystemConfig& cfg, const TransmissionPlan& plan, int k, int m)
{
    if (k < 0 || k >= cfg.cells)
        throw std::invalid_argument("build_rank_factors: cell index out of range");
    const int L = cfg.cir_len[k][k];
    const int LI = plan.max_ici_len;
    const int N = plan.core_len;
    if (L <= LI)
        throw std::invalid_argument("build_rank_factors: requires L_kk > L_I");
    if (m < 0 || m >= plan.symbols_per_user[k])
        throw std::invalid_argument("build_rank_factors: symbol index out of range");

    const int Q = L - LI;
    RankFactors f;
    f.core_len = N;
    f.ici_len = LI;
    f.desired_len = L;
    f.symbol = m;
    // exponents are reduced mod N before evaluating the roots of unity
    auto w_pow = [&](long long e) {
        const long long r = ((e * m) % N + N) % N;
        return std::polar(1.0, 2.0 * kPi * static_cast<double>(r) / N);
    };
    f.d1 = CMatrix::Zero(N, N);
    for (int r = 0; r < N; ++r)
        f.d1(r, r) = w_pow(r);
    f.d2 = CMatrix::Zero(Q, Q);
    for (int q = 0; q < Q; ++q)
        f.d2(q, q) = w_pow(-(LI + q));
    f.e = RMatrix::Zero(N, Q);
    for (int r = 0; r <= N - LI - 1; ++r)
        for (int q = r; q <= std::min(N - LI, Q) - 1; ++q)
            f.e(r, q) = -1.0;
    for (int r = N - LI + 1; r < N; ++r)
        for (int q = N - LI; q <= std::min(r, Q) - 1; ++q)
            f.e(r, q) = 1.0;
    f.g = compose_rank_factors(plan, f);
    return f;
}

CMatrix compose_rank_factors(const TransmissionPlan& plan, const RankFactors& f)
{
    return combiner(plan) * f.d1 * f.e.cast<cplx>() * f.d2 / std::sqrt(static_cast<double>(f.core_len));
}

CVector effective_taps(std::span<const cplx> h, int ici_len)
{
    const int Q = std::max(static_cast<int>(h.size()) - ici_len, 0);
    CVector v(Q);
    for (int q = 0; q < Q; ++q)
        v(q) = h[static_cast<std::size_t>(ici_len + q)];
    return v;
}

double decomposition_residual(const TransmissionPlan& plan, const RankFactors& f, const DesiredLinkMatrices& link,
                              std::span<const cplx> h)
{
    const CVector fm = idft_basis(plan.core_len).column(f.symbol);
    const CVector lhs = combiner(plan) * link.noncirc * fm;
    const CVector rhs = f.g * effective_taps(h, plan.max_ici_len);
    const double scale = lhs.norm() + rhs.norm();
    const double diff = (lhs - rhs).norm();
    return scale == 0.0 ? diff : diff / scale;
}

CheckReport check_decomposition(const SystemConfig& cfg, const TransmissionPlan& plan, const ChannelRealization& ch,
                                double tol)
{
    CheckReport rep;
    rep.name = "decomposition";
    rep.parameters = describe(cfg);
    const StructuredChannel s = build_structured(cfg, plan, ch);
    for (int k = 0; k < cfg.cells; ++k) {
        if (cfg.cir_len[k][k] <= plan.max_ici_len)
            continue;
        for (int m = 0; m < plan.symbols_per_user[k]; ++m) {
            const RankFactors f = build_rank_factors(cfg, plan, k, m);
            for (int u = 0; u < ch.users(k); ++u) {
                const double res = decomposition_residual(plan, f, s.desired[k][u], ch.taps(k, k, u));
                rep.residual = std::max(rep.residual, res);
                if (res > tol && rep.pass) {
                    rep.pass = false;
                    std::ostringstream os;
                    os << "first violation at (k=" << k << ", u=" << u << ", m=" << m << ") residual " << res;
                    rep.detail = os.str();
                }
            }
        }
    }
    return rep;
}

bool effective_channels_full_rank(const SystemConfig& cfg, const TransmissionPlan& plan, const ChannelRealization& ch)
{
    const auto eff = effective_channels(plan, build_structured(cfg, plan, ch));
    for (int k = 0; k < cfg.cells; ++k)
        if (numerical_rank(eff[k].h) != plan.streams(k))
            return false;
    return true;
}

double check_lemma2(const SystemConfig& cfg, int trials)
{
    if (trials < 1)
        throw std::invalid_argument("check_lemma2: trials must be >= 1");
    const TransmissionPlan plan = make_plan(cfg);
    int ok = 0;
    for (int t = 0; t < trials; ++t)
        if (effective_channels_full_rank(cfg, plan, sample_channel_iid(cfg, child_seed(cfg.seed, t))))
            ++ok;
    return static_cast<double>(ok) / trials;
}

bool check_lemma3(const CMatrix& a, const CMatrix& b, const CMatrix& c)
{
    if (a.cols() != b.rows() || b.cols() != c.rows())
        throw std::invalid_argument("check_lemma3: non-conformable matrices");
    return numerical_rank(a * b) + numerical_rank(b * c) <= numerical_rank(b) + numerical_rank(a * b * c);
}

bool check_dft_submatrix_independence(int n, int first_removed, int removed, std::span<const int> picked_cols)
{
    const int kept = n - removed;
    const int picked = static_cast<int>(picked_cols.size());
    if (n < 1 || removed < 0 || removed > n || picked < 1)
        throw std::invalid_argument("check_dft_submatrix_independence: dimensions out of range");
    if (n - kept < picked || kept < picked)
        throw std::invalid_argument("check_dft_submatrix_independence: requires N - N1 >= N2 and N1 >= N2");
    for (int c : picked_cols)
        if (c < 0 || c >= n)
            throw std::invalid_argument("check_dft_submatrix_independence: column index out of range");

    const CMatrix full = idft_basis(n).columns;
    CMatrix sub(kept, picked);
    int row = 0;
    for (int r = 0; r < n; ++r) {
        const int offset = ((r - first_removed) % n + n) % n;
        if (offset < removed)
            continue;
        for (int j = 0; j < picked; ++j)
            sub(row, j) = full(r, picked_cols[static_cast<std::size_t>(j)]);
        ++row;
    }
    return numerical_rank(sub) == picked;
}

std::vector<CheckReport> run_verification_suite(const SystemConfig& cfg, int trials)
{
    require_valid(cfg);
    const TransmissionPlan plan = make_plan(cfg);
    std::vector<CheckReport> out;

    CheckReport dec;
    dec.name = "decomposition";
    dec.parameters = describe(cfg) + " trials=" + std::to_string(trials);
    for (int t = 0; t < trials; ++t) {
        const CheckReport r = check_decomposition(cfg, plan, sample_channel_iid(cfg, child_seed(cfg.seed, t)));
        dec.residual = std::max(dec.residual, r.residual);
        if (!r.pass && dec.pass) {
            dec.pass = false;
            dec.detail = "trial " + std::to_string(t) + ": " + r.detail;
        }
    }
    out.push_back(dec);

    CheckReport l2;
    l2.name = "effective_channel_rank";
    l2.parameters = dec.parameters;
    const double frac = check_lemma2(cfg, trials);
    l2.pass = frac == 1.0;
    l2.residual = 1.0 - frac;
    out.push_back(l2);

    // Ranks of the individual factors on one random draw per trial. rank(H^NC) = L_kk - L_I
    // needs L_kk <= N; for longer CIRs the wrapped lower block adds rank, while the products
    // with the combiner and with the precoder keep the stated ranks.
    CheckReport ranks;
    ranks.name = "factor_ranks";
    ranks.parameters = dec.parameters;
    const CMatrix W = combiner(plan);
    const IdftBasis F = idft_basis(plan.core_len);
    for (int t = 0; t < trials && ranks.pass; ++t) {
        const ChannelRealization ch = sample_unit_modulus(cfg, child_seed(cfg.seed, t));
        const StructuredChannel s = build_structured(cfg, plan, ch);
        for (int k = 0; k < cfg.cells && ranks.pass; ++k) {
            const int q = cfg.cir_len[k][k] - plan.max_ici_len;
            if (q <= 0)
                continue;
            const int M = plan.symbols_per_user[k];
            for (int m = 0; m < M; ++m)
                if (numerical_rank(build_rank_factors(cfg, plan, k, m).g) != q) {
                    ranks.pass = false;
                    ranks.detail = "rank(G) != L_kk - L_I at k=" + std::to_string(k);
                }
            for (int u = 0; u < ch.users(k) && ranks.pass; ++u) {
                const CMatrix& nc = s.desired[k][u].noncirc;
                const bool own_rank = cfg.cir_len[k][k] > plan.core_len || numerical_rank(nc) == q;
                if (!own_rank || numerical_rank(W * nc) != q ||
                    numerical_rank(nc * F.block(0, M)) != M) {
                    ranks.pass = false;
                    ranks.detail = "non-circulant rank mismatch at k=" + std::to_string(k) + ", u=" +
                                   std::to_string(u);
                }
            }
        }
    }
    out.push_back(ranks);

    CheckReport l3;
    l3.name = "rank_inequality";
    l3.parameters = "random triples=200, sizes<=8";
    std::mt19937_64 rng(child_seed(cfg.seed, 0x13));
    std::uniform_int_distribution<int> dim(1, 8);
    for (int t = 0; t < 200; ++t) {
        const int p = dim(rng), q = dim(rng), r = dim(rng), s = dim(rng);
        std::uniform_int_distribution<int> rk(0, std::min(q, r));
        const CMatrix a = random_low_rank(rng, p, q, std::uniform_int_distribution<int>(0, std::min(p, q))(rng));
        const CMatrix b = random_low_rank(rng, q, r, rk(rng));
        const CMatrix c = random_low_rank(rng, r, s, std::uniform_int_distribution<int>(0, std::min(r, s))(rng));
        if (!check_lemma3(a, b, c)) {
            l3.pass = false;
            l3.detail = "violated at triple " + std::to_string(t);
            break;
        }
    }
    out.push_back(l3);

    CheckReport dft;
    dft.name = "dft_submatrix_independence";
    dft.parameters = "N=8, 3 consecutive rows removed, all column triples";
    for (int first = 0; first < 8 && dft.pass; ++first)
        for (int a = 0; a < 8; ++a)
            for (int b = a + 1; b < 8; ++b)
                for (int c = b + 1; c < 8; ++c) {
                    const int cols[3] = {a, b, c};
                    if (!check_dft_submatrix_independence(8, first, 3, cols)) {
                        dft.pass = false;
                        dft.detail = "dependent columns found";
                    }
                }
    out.push_back(dft);
    return out;
}

} // namespace bim
