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

#include "bim/linalg.hpp"

#include <stdexcept>

namespace bim {

int numerical_rank(const CMatrix& a, double rel_tol)
{
    if (a.size() == 0)
        return 0;
    Eigen::JacobiSVD<CMatrix> svd(a);
    const RVector& s = svd.singularValues();
    if (s(0) == 0.0)
        return 0;
    int rank = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s(i) > rel_tol * s(0))
            ++rank;
    return rank;
}

ThinQR qr_positive(const CMatrix& a)
{
    const Eigen::Index m = a.rows();
    const Eigen::Index n = a.cols();
    if (m < n)
        throw std::invalid_argument("qr_positive: matrix must be tall");
    Eigen::HouseholderQR<CMatrix> qr(a);
    ThinQR out;
    out.q = qr.householderQ() * CMatrix::Identity(m, n);
    out.r = qr.matrixQR().topRows(n).triangularView<Eigen::Upper>();
    for (Eigen::Index j = 0; j < n; ++j) {
        const cplx d = out.r(j, j);
        const double mag = std::abs(d);
        if (mag == 0.0)
            continue;
        const cplx phase = d / mag;
        // R <- diag(conj(phase)) R, Q <- Q diag(phase)
        out.r.row(j) *= std::conj(phase);
        out.q.col(j) *= phase;
        out.r(j, j) = mag;
    }
    return out;
}

} // namespace bim
