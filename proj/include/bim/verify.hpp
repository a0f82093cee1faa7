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

#ifndef BIM_VERIFY_HPP
#define BIM_VERIFY_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "bim/model.hpp"
#include "bim/spectral.hpp"
#include "bim/types.hpp"

namespace bim {

// Factorization W H^NC f_m = G h_eff of one cell's projected non-circulant channel,
// where h_eff = [h[L_I], ..., h[L - 1]] and G = N^{-1/2} W D1 E D2.
//   D1 = diag(w^r), r = 0..N-1, with w = exp(j 2 pi m / N)
//   D2 = w^{-L_I} diag(w^{-q}), q = 0..L-L_I-1
//   E  = -1 on rows r <= N-L_I-1, columns r..min(N-L_I, L-L_I)-1
//        +1 on rows r >= N-L_I+1, columns N-L_I..min(r, L-L_I)-1
struct RankFactors
{
    int core_len = 0;
    int ici_len = 1;
    int desired_len = 0;
    int symbol = 0;    // m, zero-based
    CMatrix d1;        // N x N
    CMatrix d2;        // (L - L_I) x (L - L_I)
    RMatrix e;         // N x (L - L_I)
    CMatrix g;         // (N - M_D) x (L - L_I)
};

// Throws std::invalid_argument unless 0 <= m < M_k and L_{k,k} > L_I.
RankFactors build_rank_factors(const SystemConfig& cfg, const TransmissionPlan& plan, int k, int m);

// Recomputes g from (d1, e, d2) and the plan's combiner; used after mutating a factor.
CMatrix compose_rank_factors(const TransmissionPlan& plan, const RankFactors& f);

CVector effective_taps(std::span<const cplx> h, int ici_len);

struct CheckReport
{
    std::string name;
    std::string parameters;
    bool pass = true;
    double residual = 0.0;  // worst value observed
    std::string detail;     // first failure, if any
};

// Compares W H^NC_{k,u} f_m with G_{m,k} h_eff for every cell, user and symbol index.
// Relative residual is ||lhs - rhs|| / (||lhs|| + ||rhs||), zero when both vanish.
CheckReport check_decomposition(const SystemConfig& cfg, const TransmissionPlan& plan, const ChannelRealization& ch,
                                double tol = 1e-10);

// Same comparison for one link with caller-supplied factors.
double decomposition_residual(const TransmissionPlan& plan, const RankFactors& f, const DesiredLinkMatrices& link,
                              std::span<const cplx> h);

// True when every cell's effective channel has rank U'_k M_k.
bool effective_channels_full_rank(const SystemConfig& cfg, const TransmissionPlan& plan, const ChannelRealization& ch);

// Fraction of IID trials (seeded from cfg.seed) whose effective channels all have full rank.
double check_lemma2(const SystemConfig& cfg, int trials);

// rank(AB) + rank(BC) <= rank(B) + rank(ABC).
bool check_lemma3(const CMatrix& a, const CMatrix& b, const CMatrix& c);

// Removes `removed` cyclically consecutive rows starting at `first_removed` from the
// N-point IDFT matrix and tests the picked columns for linear independence. Throws
// std::invalid_argument unless N - N1 >= N2 and N1 >= N2 (N1 rows kept, N2 columns picked).
bool check_dft_submatrix_independence(int n, int first_removed, int removed, std::span<const int> picked_cols);

// Full suite at the given configuration; one report per check.
std::vector<CheckReport> run_verification_suite(const SystemConfig& cfg, int trials);

} // namespace bim

#endif
