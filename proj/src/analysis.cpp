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

#include "bim/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "bim/linalg.hpp"
#include "bim/parallel.hpp"
#include "bim/spectral.hpp"

namespace bim {

Fraction::Fraction(std::int64_t n, std::int64_t d)
{
    if (d == 0)
        throw std::invalid_argument("Fraction: zero denominator");
    if (d < 0) {
        n = -n;
        d = -d;
    }
    const std::int64_t g = std::gcd(n, d);
    num = g == 0 ? 0 : n / g;
    den = g == 0 ? 1 : d / g;
}

std::string Fraction::str() const
{
    if (den == 1)
        return std::to_string(num);
    return std::to_string(num) + "/" + std::to_string(den);
}

Fraction operator*(const Fraction& a, const Fraction& b)
{
    return Fraction(a.num * b.num, a.den * b.den);
}

Fraction max(const Fraction& a, const Fraction& b)
{
    // a.num / a.den < b.num / b.den with positive denominators
    return a.num * b.den < b.num * a.den ? b : a;
}

std::ostream& operator<<(std::ostream& os, const Fraction& f)
{
    return os << f.str();
}

Fraction dof_scheme(const SystemConfig& cfg)
{
    const TransmissionPlan plan = make_plan(cfg);
    std::int64_t streams = 0;
    for (int k = 0; k < cfg.cells; ++k)
        streams += plan.streams(k);
    return Fraction(streams, plan.subblock_len);
}

Fraction dof_theorem1(const SystemConfig& cfg)
{
    return max(dof_scheme(cfg), Fraction(1));
}

Fraction dof_scheme_symmetric(int cells, int desired_len, int ici_len, int users)
{
    if (cells < 1 || desired_len < 1 || ici_len < 1 || users < 1)
        throw std::invalid_argument("dof_scheme_symmetric: parameters must be positive");
    const int excess = desired_len - ici_len;
    int active = 0;
    int per_user = 0;
    if (excess > 0 && users <= excess) {
        active = users;
        per_user = std::max(excess / users, 1);
    } else if (excess > 0) {
        active = excess;
        per_user = 1;
    }
    const int core = std::max(desired_len - ici_len + per_user, ici_len);
    return Fraction(static_cast<std::int64_t>(cells) * active * per_user, core + ici_len - 1);
}

bool dof_symmetric_applicable(int desired_len, int ici_len, int users)
{
    return ici_len >= 1 && users >= desired_len - ici_len && desired_len >= 2 * ici_len;
}

Fraction dof_symmetric(int cells, int desired_len, int ici_len, int users)
{
    if (cells < 1 || !dof_symmetric_applicable(desired_len, ici_len, users))
        throw std::invalid_argument("dof_symmetric: requires U >= L_D - L_I and L_D >= 2 L_I");
    return Fraction(static_cast<std::int64_t>(cells) * (desired_len - ici_len), desired_len);
}

Fraction dof_interference_channel(int cells, int desired_len, int ici_len)
{
    if (cells < 1 || ici_len < 1 || desired_len <= ici_len)
        throw std::invalid_argument("dof_interference_channel: requires L_D > L_I >= 1");
    return Fraction(static_cast<std::int64_t>(cells) * (desired_len - ici_len),
                    std::max(2 * desired_len - ici_len - 1, 2 * ici_len - 1));
}

RateReport sum_rate_qr(const TransmissionPlan& plan, std::span<const EffectiveChannel> eff, double snr_linear,
                       RateNormalization norm)
{
    const int K = static_cast<int>(plan.active_users.size());
    if (static_cast<int>(eff.size()) != K)
        throw std::invalid_argument("sum_rate_qr: one effective channel per cell required");
    const double share = norm == RateNormalization::asymptotic
                             ? 1.0 / plan.subblock_len
                             : static_cast<double>(plan.subblocks) / plan.block_len;

    RateReport rep;
    rep.per_stream.resize(static_cast<std::size_t>(K));
    rep.per_cell.assign(static_cast<std::size_t>(K), 0.0);
    std::int64_t streams = 0;
    for (int k = 0; k < K; ++k) {
        const CMatrix& h = eff[k].h;
        streams += h.cols();
        if (h.cols() == 0)
            continue;
        if (numerical_rank(h) < h.cols())
            throw std::domain_error("sum_rate_qr: effective channel of cell " + std::to_string(k) +
                                    " is rank deficient");
        const double gain = static_cast<double>(plan.core_len) / plan.symbols_per_user[k] * snr_linear;
        const ThinQR f = qr_positive(h);
        double cell = 0.0;
        for (Eigen::Index m = 0; m < f.r.rows(); ++m) {
            const double r = std::log2(1.0 + gain * std::norm(f.r(m, m)));
            rep.per_stream[k].push_back(r);
            cell += r;
        }
        rep.per_cell[k] = share * cell;
    }
    rep.network_sum = std::accumulate(rep.per_cell.begin(), rep.per_cell.end(), 0.0);
    rep.dof_formula = static_cast<double>(streams) / plan.subblock_len;
    return rep;
}

double logdet_rate(const CMatrix& h, double effective_snr)
{
    const CMatrix g = CMatrix::Identity(h.cols(), h.cols()) + effective_snr * h.adjoint() * h;
    Eigen::LLT<CMatrix> llt(g);
    double acc = 0.0;
    for (Eigen::Index i = 0; i < g.rows(); ++i)
        acc += 2.0 * std::log2(llt.matrixLLT()(i, i).real());
    return acc;
}

double BaselineRate::per_cell_average() const
{
    return per_cell.empty() ? 0.0 : network / static_cast<double>(per_cell.size());
}

namespace {

cplx dft_gain(std::span<const cplx> h, int n, int subcarriers)
{
    cplx acc{};
    for (std::size_t l = 0; l < h.size(); ++l) {
        const auto e = static_cast<long long>(l) * n % subcarriers;
        acc += h[l] * std::polar(1.0, -2.0 * kPi * static_cast<double>(e) / subcarriers);
    }
    return acc;
}

// Full-use interleaved allocation: subcarrier n belongs to user n mod min(U, N_c),
// so set sizes differ by at most one and no subcarrier stays idle.
struct InterleavedPlan
{
    int served = 0;
    int subcarriers = 0;
    int size(int u) const { return (subcarriers - u + served - 1) / served; }
};

InterleavedPlan interleave_subcarriers(int users, int subcarriers)
{
    return {std::min(users, subcarriers), subcarriers};
}

int max_desired(const SystemConfig& cfg)
{
    int ld = 1;
    for (int k = 0; k < cfg.cells; ++k)
        ld = std::max(ld, cfg.cir_len[k][k]);
    return ld;
}

} // namespace

BaselineRate baseline_tdma_ofdma(const SystemConfig& cfg, const ChannelRealization& ch, double snr_linear,
                                 int subcarriers)
{
    if (subcarriers < 1)
        throw std::invalid_argument("baseline_tdma_ofdma: subcarrier count must be positive");
    const int K = cfg.cells;
    const int Nc = subcarriers;
    const int cp = max_desired(cfg) - 1;
    BaselineRate out;
    out.per_cell.assign(static_cast<std::size_t>(K), 0.0);
    for (int k = 0; k < K; ++k) {
        // unit power on every subcarrier keeps the active cell at unit power per sample
        const InterleavedPlan sp = interleave_subcarriers(cfg.users_per_cell[k], Nc);
        double acc = 0.0;
        for (int n = 0; n < Nc; ++n)
            acc += std::log2(1.0 + snr_linear * std::norm(dft_gain(ch.taps(k, k, n % sp.served), n, Nc)));
        out.per_cell[k] = acc / (static_cast<double>(K) * (Nc + cp));
    }
    out.network = std::accumulate(out.per_cell.begin(), out.per_cell.end(), 0.0);
    return out;
}

double ofdma_ici_as_noise_rate(const SystemConfig& cfg, const Deployment& dep, const ChannelRealization& ch, int k,
                               int subcarriers)
{
    if (subcarriers < 1)
        throw std::invalid_argument("ofdma_ici_as_noise_rate: subcarrier count must be positive");
    const int K = cfg.cells;
    const int Nc = subcarriers;
    const int cp = max_desired(cfg) - 1;
    const int frame = Nc + cp;
    const double P = dep.tx_power_mw();
    const double noise = dep.noise_power_mw();
    const IdftBasis F = idft_basis(Nc);

    std::vector<double> interference(static_cast<std::size_t>(Nc), 0.0);
    for (int i = 0; i < K; ++i) {
        if (i == k)
            continue;
        const InterleavedPlan sp = interleave_subcarriers(cfg.users_per_cell[i], Nc);
        for (int u = 0; u < sp.served; ++u) {
            const auto g = ch.taps(k, i, u);
            const int L = static_cast<int>(g.size());
            const int past = L - 1 > cp ? (L - 1 - cp + frame - 1) / frame : 0;
            const double p = P * Nc / sp.size(u);
            // window sample r of the current frame sits at stream index past * frame + cp + r;
            // frame t (0 = current, t = 1.. earlier) starts at (past - t) * frame.
            for (int t = 0; t <= past; ++t) {
                CMatrix m = CMatrix::Zero(Nc, Nc);
                const int start = (past - t) * frame;
                for (int r = 0; r < Nc; ++r) {
                    const int pos = past * frame + cp + r;
                    for (int j = 0; j < frame; ++j) {
                        const int l = pos - (start + j);
                        if (l < 0 || l >= L)
                            continue;
                        const int c = j < cp ? Nc - cp + j : j - cp;
                        m(r, c) += g[static_cast<std::size_t>(l)];
                    }
                }
                const CMatrix leak = F.columns.adjoint() * m * F.columns;
                for (int n = 0; n < Nc; ++n)
                    for (int s = u; s < Nc; s += sp.served)
                        interference[static_cast<std::size_t>(n)] += p * std::norm(leak(n, s));
            }
        }
    }

    const InterleavedPlan sp = interleave_subcarriers(cfg.users_per_cell[k], Nc);
    double acc = 0.0;
    for (int n = 0; n < Nc; ++n) {
        const int u = n % sp.served;
        const double p = P * Nc / sp.size(u);
        const double signal = p * std::norm(dft_gain(ch.taps(k, k, u), n, Nc));
        acc += std::log2(1.0 + signal / (noise + interference[static_cast<std::size_t>(n)]));
    }
    return acc / frame;
}

std::vector<ErgodicPoint> ergodic_rate(const SystemConfig& cfg, std::span<const double> snr_db, int trials,
                                       Scheme scheme, unsigned workers)
{
    if (trials < 1)
        throw std::invalid_argument("ergodic_rate: trials must be >= 1");
    require_valid(cfg);
    const TransmissionPlan plan = make_plan(cfg);
    const int K = cfg.cells;
    const std::size_t S = snr_db.size();

    // per trial: S x (K per-cell rates)
    auto runs = parallel_trials(
        trials,
        [&](int t) {
            const ChannelRealization ch = sample_channel_iid(cfg, child_seed(cfg.seed, static_cast<std::uint64_t>(t)));
            std::vector<std::vector<double>> cells(S);
            if (scheme == Scheme::proposed) {
                const auto eff = effective_channels(plan, build_structured(cfg, plan, ch));
                for (std::size_t s = 0; s < S; ++s)
                    cells[s] = sum_rate_qr(plan, eff, db_to_linear(snr_db[s]), RateNormalization::finite_block)
                                   .per_cell;
            } else {
                for (std::size_t s = 0; s < S; ++s)
                    cells[s] = baseline_tdma_ofdma(cfg, ch, db_to_linear(snr_db[s]), plan.core_len).per_cell;
            }
            return cells;
        },
        workers);

    std::vector<ErgodicPoint> out(S);
    for (std::size_t s = 0; s < S; ++s) {
        ErgodicPoint& pt = out[s];
        pt.snr_db = snr_db[s];
        pt.mean_per_cell.assign(static_cast<std::size_t>(K), 0.0);
        double sum = 0.0;
        double sq = 0.0;
        for (const auto& run : runs) {
            double net = 0.0;
            for (int k = 0; k < K; ++k) {
                pt.mean_per_cell[k] += run[s][k];
                net += run[s][k];
            }
            sum += net;
            sq += net * net;
        }
        for (auto& v : pt.mean_per_cell)
            v /= trials;
        pt.mean = sum / trials;
        if (trials > 1) {
            const double var = std::max(sq / trials - pt.mean * pt.mean, 0.0) * trials / (trials - 1);
            pt.std_error = std::sqrt(var / trials);
        }
    }
    return out;
}

double highsnr_slope(double rho1, double rate1, double rho2, double rate2)
{
    if (!(rho2 > rho1) || rho1 < 1e4)
        throw std::invalid_argument("highsnr_slope: requires rho2 > rho1 >= 1e4");
    return (rate2 - rate1) / (std::log2(rho2) - std::log2(rho1));
}

} // namespace bim
