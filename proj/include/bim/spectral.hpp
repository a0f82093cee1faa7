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

#ifndef BIM_SPECTRAL_HPP
#define BIM_SPECTRAL_HPP

#include <span>
#include <vector>

#include "bim/model.hpp"
#include "bim/types.hpp"

namespace bim {

/// n-point IDFT basis. Column m (zero-based) is
///   f_m[r] = exp(+j 2 pi r m / n) / sqrt(n),  r = 0..n-1,
/// so f_0 is the flat vector and every circulant matrix satisfies C f_m = lambda_m f_m
/// with lambda_m the forward DFT of its first column.
struct IdftBasis
{
    int n = 0;
    CMatrix columns;

    CVector column(int m) const { return columns.col(m); }
    // Columns [first, first + count).
    CMatrix block(int first, int count) const { return columns.middleCols(first, count); }
};

IdftBasis idft_basis(int n);

CMatrix circulant(std::span<const cplx> first_column);
CMatrix circulant(const CVector& first_column);

// Structural test: each column is the cyclic down-shift of the previous one.
bool is_circulant(const CMatrix& c, double rel_tol = 1e-12);

// Eigenvalues of a circulant matrix in the IdftBasis order: C = F diag(lambda) F^H.
CVector diagonalize_circulant(const CMatrix& c);

/// Post-CP-removal channel matrices of one desired link, split into the part a
/// cyclic prefix of length L_I - 1 makes circulant and the residual.
struct DesiredLinkMatrices
{
    CMatrix full;           // H-bar (N x N), current-subblock contribution
    CMatrix circ;           // H^C = Circ([h[0..N'-1], 0...]), N' = min(L, N)
    CMatrix noncirc;        // H^NC = full - circ
    CMatrix upper;          // H^upp, (N - L_I + 1) square, strictly upper Toeplitz
    CMatrix lower;          // H^low, (L_I - 1) square, lower Toeplitz; zero when N >= L
    CMatrix prev_subblock;  // H^sub: contribution of the previous subblock's core
};

struct StructuredChannel
{
    int cells = 0;
    int core_len = 0;
    int ici_len = 1;
    // desired[k][u], interference[k][i][u] (circulant; empty matrix for i == k)
    std::vector<std::vector<DesiredLinkMatrices>> desired;
    std::vector<std::vector<std::vector<CMatrix>>> interference;
};

// Upper Toeplitz block of H^NC with entries h[N - (c - r)] for L_I <= N - (c - r) < n_prime.
CMatrix upper_toeplitz_block(std::span<const cplx> h, int core_len, int ici_len, int n_prime);
// Lower Toeplitz block of H^NC with entries h[N + r - c] for indices in [N, L).
CMatrix lower_toeplitz_block(std::span<const cplx> h, int core_len, int ici_len);
// ISBI matrix: entry (r, c) = h[N + L_I - 1 + r - c] (zero outside the CIR).
CMatrix previous_subblock_matrix(std::span<const cplx> h, int core_len, int ici_len);

DesiredLinkMatrices structure_desired_link(std::span<const cplx> h, int core_len, int ici_len);

StructuredChannel build_structured(const SystemConfig& cfg, const TransmissionPlan& plan,
                                   const ChannelRealization& ch);

} // namespace bim

#endif
