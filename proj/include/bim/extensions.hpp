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

#ifndef BIM_EXTENSIONS_HPP
#define BIM_EXTENSIONS_HPP

#include <cstdint>
#include <vector>

#include "bim/model.hpp"
#include "bim/transceiver.hpp"
#include "bim/types.hpp"

namespace bim {

// ICI links carry no energy on taps [0, delay_taps); only taps below
// considered_ici_len are aligned, the rest are left as residual interference.
struct DelayProfile
{
    int delay_taps = 0;          // L_{I,d}
    int considered_ici_len = 1;  // L_I'
    int ici_len = 1;             // L_I

    int effective_ici_len() const { return considered_ici_len - delay_taps; }
};

// Throws std::invalid_argument unless 0 <= L_{I,d} <= L_I' <= L_I and L_I' >= 1.
void validate_delay_profile(const DelayProfile& dp);

struct TwoStageCombiner
{
    RMatrix fold;      // W1: N x (N + L_I' - 1), 0/1 entries
    CMatrix project;   // W2: (N - 1) x N, rows f_1..f_{N-1} (zero-based) conjugated

    CMatrix combined() const { return project * fold.cast<cplx>(); }
};

// Row r of W1 takes raw sample L_I' - 1 + r and, when L_I' - 1 + r - N is an
// ICI-free index (below L_{I,d}), that earlier sample too. Throws
// std::invalid_argument("no valid fold") outside this pattern.
TwoStageCombiner build_two_stage_combiner(int core_len, int desired_len, int considered_ici_len, int delay_taps);

// Each subblock is a self-contained frame of N + L_I' - 1 samples (CP ++ core)
// carrying one symbol per active user on the flat precoder.
struct DelayedPlan
{
    std::vector<int> active_users;
    int symbols_per_user = 1;
    int core_len = 0;
    int cp_len = 0;
    int window_len = 0;
    int subblocks = 1;
    int block_len = 0;  // B * window + L_I - 1
    int max_ici_len = 1;
};

DelayedPlan make_delayed_plan(const SystemConfig& cfg, const DelayProfile& dp);

// Symbols per cell per frame slot summed over cells, as an exact ratio numerator/denominator.
struct DofCount
{
    int symbols = 0;
    int slots = 0;
};
DofCount delayed_dof(const DelayedPlan& plan);

// W1 * (window x window convolution) * (CP insertion), for one link's taps.
CMatrix delayed_composite(const DelayedPlan& plan, const TwoStageCombiner& comb, std::span<const cplx> taps);

// H~_k = W2 [composite_{k,u} f_0]_u over active users of cell k.
CMatrix delayed_effective_channel(const DelayedPlan& plan, const TwoStageCombiner& comb,
                                  const ChannelRealization& ch, int k);

// H~^int_{k,i}: the same construction over the active users of interfering cell i.
CMatrix delayed_interference_channel(const DelayedPlan& plan, const TwoStageCombiner& comb,
                                     const ChannelRealization& ch, int k, int i);

// frames[k][b]: first window_len received samples of frame b at BS k. symbols[i][u][b] is a scalar.
std::vector<std::vector<CVector>> simulate_delayed_frames(const SystemConfig& cfg, const DelayedPlan& plan,
                                                          const ChannelRealization& ch,
                                                          const std::vector<std::vector<std::vector<cplx>>>& symbols,
                                                          std::uint64_t noise_seed, double noise_var);

// Applies W2 W1 to every frame and detects the active users' symbols of every cell.
std::vector<DecodeResult> decode_delayed_ici(const SystemConfig& cfg, const DelayedPlan& plan,
                                             const ChannelRealization& ch, const DelayProfile& dp,
                                             const std::vector<std::vector<CVector>>& frames,
                                             const Detector& detector);

// Gaussian-signalling rate of cell k with the residual ICI and W1-coloured noise as
// interference, in bits per channel use. Taps are in amplitude units of the deployment;
// everything is normalized by the deployment noise power.
double rate_with_residual_ici(const SystemConfig& cfg, const DelayedPlan& plan, const Deployment& dep,
                              const ChannelRealization& ch, const DelayProfile& dp, int k);

} // namespace bim

#endif
