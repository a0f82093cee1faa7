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

#ifndef BIM_LINALG_HPP
#define BIM_LINALG_HPP

#include "bim/types.hpp"

namespace bim {

// Singular values above this fraction of the largest count toward rank.
inline constexpr double kRankTolerance = 1e-8;

int numerical_rank(const CMatrix& a, double rel_tol = kRankTolerance);

struct ThinQR
{
    CMatrix q;  // m x n, orthonormal columns
    CMatrix r;  // n x n, upper triangular with real non-negative diagonal
};

// Householder QR with the diagonal of R rotated onto the non-negative real axis.
ThinQR qr_positive(const CMatrix& a);

} // namespace bim

#endif
