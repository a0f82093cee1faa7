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

#include "bim/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bim {

namespace {

cplx tap_or_zero(std::span<const cplx> h, int l)
{
    if (l < 0 || static_cast<std::size_t>(l) >= h.size())
        return {};
    return h[static_cast<std::size_t>(l)];
}

} // namespace

IdftBasis idft_basis(int n)
{
    if (n < 1)
        throw std::invalid_argument("idft_basis: n must be positive");
    IdftBasis basis;
    basis.n = n;
    basis.columns.resize(n, n);
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    for (int r = 0; r < n; ++r)
        for (int m = 0; m < n; ++m) {
            // reduce the exponent mod n so large products stay exact
            const int e = (r * m) % n;
            basis.columns(r, m) = scale * std::polar(1.0, 2.0 * kPi * e / n);
        }
    return basis;
}

CMatrix circulant(std::span<const cplx> first_column)
{
    const auto n = static_cast<Eigen::Index>(first_column.size());
    if (n == 0)
        throw std::invalid_argument("circulant: empty first column");
    CMatrix c(n, n);
    for (Eigen::Index r = 0; r < n; ++r)
        for (Eigen::Index col = 0; col < n; ++col)
            c(r, col) = first_column[static_cast<std::size_t>((r - col + n) % n)];
    return c;
}

CMatrix circulant(const CVector& first_column)
{
    return circulant(std::span<const cplx>(first_column.data(), static_cast<std::size_t>(first_column.size())));
}

bool is_circulant(const CMatrix& c, double rel_tol)
{
    if (c.rows() != c.cols() || c.rows() == 0)
        return false;
    const Eigen::Index n = c.rows();
    const double scale = std::max(c.cwiseAbs().maxCoeff(), 1e-300);
    for (Eigen::Index col = 1; col < n; ++col)
        for (Eigen::Index r = 0; r < n; ++r)
            if (std::abs(c(r, col) - c((r - col + n) % n, 0)) > rel_tol * scale)
                return false;
    return true;
}

CVector diagonalize_circulant(const CMatrix& c)
{
    if (!is_circulant(c))
        throw std::invalid_argument("diagonalize_circulant: matrix is not circulant");
    const Eigen::Index n = c.rows();
    CVector lambda(n);
    for (Eigen::Index m = 0; m < n; ++m) {
        cplx acc{};
        for (Eigen::Index l = 0; l < n; ++l)
            acc += c(l, 0) * std::polar(1.0, -2.0 * kPi * static_cast<double>((l * m) % n) / static_cast<double>(n));
        lambda(m) = acc;
    }
    return lambda;
}

CMatrix upper_toeplitz_block(std::span<const cplx> h, int core_len, int ici_len, int n_prime)
{
    const int dim = core_len - ici_len + 1;
    CMatrix up = CMatrix::Zero(dim, dim);
    for (int r = 0; r < dim; ++r)
        for (int c = r + 1; c < dim; ++c) {
            const int idx = core_len - (c - r);
            if (idx >= ici_len && idx < n_prime)
                up(r, c) = tap_or_zero(h, idx);
        }
    return up;
}

CMatrix lower_toeplitz_block(std::span<const cplx> h, int core_len, int ici_len)
{
    const int dim = ici_len - 1;
    CMatrix low = CMatrix::Zero(dim, dim);
    // local (r, c) sits at global (N - L_I + 1 + r, N - L_I + 1 + c); tap index N + r - c
    for (int r = 0; r < dim; ++r)
        for (int c = 0; c <= r; ++c)
            low(r, c) = tap_or_zero(h, core_len + r - c);
    return low;
}

CMatrix previous_subblock_matrix(std::span<const cplx> h, int core_len, int ici_len)
{
    CMatrix sub = CMatrix::Zero(core_len, core_len);
    for (int r = 0; r < core_len; ++r)
        for (int c = 0; c < core_len; ++c)
            sub(r, c) = tap_or_zero(h, core_len + ici_len - 1 + r - c);
    return sub;
}

DesiredLinkMatrices structure_desired_link(std::span<const cplx> h, int core_len, int ici_len)
{
    const int N = core_len;
    const int L = static_cast<int>(h.size());
    if (N < ici_len)
        throw std::invalid_argument("structure_desired_link: core length below ICI length");
    if (L > N + ici_len - 1)
        throw std::invalid_argument("structure_desired_link: CIR longer than one subblock");
    const int n_prime = std::min(L, N);

    DesiredLinkMatrices out;
    std::vector<cplx> first(static_cast<std::size_t>(N), cplx{});
    for (int l = 0; l < n_prime; ++l)
        first[static_cast<std::size_t>(l)] = h[static_cast<std::size_t>(l)];
    out.circ = circulant(first);
    out.upper = upper_toeplitz_block(h, N, ici_len, n_prime);
    out.lower = lower_toeplitz_block(h, N, ici_len);

    const int up_dim = N - ici_len + 1;
    out.noncirc = CMatrix::Zero(N, N);
    out.noncirc.topLeftCorner(up_dim, up_dim) = -out.upper;
    out.noncirc.bottomRightCorner(ici_len - 1, ici_len - 1) = out.lower;
    out.full = out.circ + out.noncirc;
    out.prev_subblock = previous_subblock_matrix(h, N, ici_len);
    return out;
}

StructuredChannel build_structured(const SystemConfig& cfg, const TransmissionPlan& plan,
                                   const ChannelRealization& ch)
{
    const int K = cfg.cells;
    const int N = plan.core_len;
    const int LI = plan.max_ici_len;
    if (ch.cells() != K || static_cast<int>(plan.active_users.size()) != K)
        throw std::invalid_argument("build_structured: dimension mismatch between config, plan and channel");
    if (N < LI)
        throw std::invalid_argument("build_structured: N >= L_I required");

    StructuredChannel s;
    s.cells = K;
    s.core_len = N;
    s.ici_len = LI;
    s.desired.resize(static_cast<std::size_t>(K));
    s.interference.resize(static_cast<std::size_t>(K));
    for (int k = 0; k < K; ++k) {
        for (int u = 0; u < ch.users(k); ++u)
            s.desired[k].push_back(structure_desired_link(ch.taps(k, k, u), N, LI));
        s.interference[k].resize(static_cast<std::size_t>(K));
        for (int i = 0; i < K; ++i) {
            if (i == k)
                continue;
            for (int u = 0; u < ch.users(i); ++u) {
                const auto h = ch.taps(k, i, u);
                if (static_cast<int>(h.size()) > LI)
                    throw std::invalid_argument("build_structured: ICI link longer than L_I");
                std::vector<cplx> first(static_cast<std::size_t>(N), cplx{});
                std::copy(h.begin(), h.end(), first.begin());
                s.interference[k][i].push_back(circulant(first));
            }
        }
    }
    return s;
}

} // namespace bim
