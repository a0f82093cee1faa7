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

#ifndef BIM_TRANSCEIVER_HPP
#define BIM_TRANSCEIVER_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "bim/model.hpp"
#include "bim/spectral.hpp"
#include "bim/types.hpp"

namespace bim {

// One user's symbols: entry b holds the M_k symbols of subblock b.
using SymbolStream = std::vector<CVector>;

// Per-sample transmit power P is fixed to 1; symbols then carry variance N / M_k
// and the noise variance is 1 / rho.
double symbol_variance(const TransmissionPlan& plan, int k);

// Draws B x U'_k x M_k symbols for every cell (Gaussian or QPSK at the scaled power).
std::vector<std::vector<SymbolStream>> draw_symbols(const TransmissionPlan& plan, SymbolModel model,
                                                    std::uint64_t rng_seed);

// Unit-energy QPSK constellation.
std::vector<cplx> qpsk_alphabet();

// Precoded core F_k s (length N) for one subblock.
CVector precode(const TransmissionPlan& plan, const CVector& symbols);

// CP ++ core for each subblock, followed by max(L_D, L_I) - 1 zeros; length T.
CVector precode_and_frame(const TransmissionPlan& plan, const SymbolStream& symbols);

// y_k[n] = sum_i sum_u sum_l h^k_{i,u}[l] x_{i,u}[n - l] + z_k[n] with z ~ CN(0, noise_var).
// tx[i][u] holds the length-T block of user (i, u); cells may list fewer than U_i users.
std::vector<CVector> simulate_reception(const SystemConfig& cfg, const TransmissionPlan& plan,
                                        const ChannelRealization& ch, const std::vector<std::vector<CVector>>& tx,
                                        std::uint64_t noise_seed, double noise_var);

// Zero-based subblock b: samples [b N-bar + L_I - 1, (b + 1) N-bar).
CVector remove_cp_and_stack(const TransmissionPlan& plan, const CVector& y, int b);

// W = [f_{M_D}, ..., f_{N-1}]^H (zero-based columns).
CMatrix combiner(const TransmissionPlan& plan);

CVector combine(const TransmissionPlan& plan, const CVector& y_bar);

struct EffectiveChannel
{
    CMatrix h;        // (N - M_D) x U'_k M_k
    CMatrix h_sub;    // same shape; previous-subblock leakage
    CMatrix combiner; // (N - M_D) x N
};

std::vector<EffectiveChannel> effective_channels(const TransmissionPlan& plan, const StructuredChannel& s);

// Least-squares solution through QR; throws std::domain_error on rank deficiency.
CVector detect_zf(const CMatrix& h, const CVector& y);

// Exhaustive search over alphabet^n; throws std::length_error past the search guard.
CVector detect_ml(const CMatrix& h, const CVector& y, std::span<const cplx> alphabet);

inline constexpr int kMlMaxSymbols = 16;
inline constexpr double kMlMaxCandidates = 1 << 22;

using Detector = std::function<CVector(const CMatrix&, const CVector&)>;

struct DecodeResult
{
    std::vector<CVector> symbols;            // s-hat per subblock (length U'_k M_k)
    std::vector<double> residual_power;      // ||y~ - H s-hat - H_sub s-hat_prev||^2 per subblock
    std::vector<double> post_snr;            // per-stream ZF-SIC SNR rho~ |r_m|^2 (empty without snr)
};

// Subblock 0 is detected directly; subblock b >= 1 first subtracts H_sub times the
// previous decision (or the supplied genie symbols). Sequential in b.
DecodeResult decode_block(const TransmissionPlan& plan, const EffectiveChannel& eff, std::span<const CVector> y_tilde,
                          const Detector& detector, const std::vector<CVector>* genie = nullptr,
                          std::optional<double> effective_snr = std::nullopt);

// Stacks a cell's symbol streams into s_k^b = [s_{k,0}^b; ...; s_{k,U'-1}^b] per subblock.
std::vector<CVector> stack_cell_symbols(const TransmissionPlan& plan, int k, const std::vector<SymbolStream>& users);

} // namespace bim

#endif
