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

#ifndef BIM_MODEL_HPP
#define BIM_MODEL_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "bim/types.hpp"

namespace bim {

enum class SymbolModel { gaussian, qpsk };

// K-cell uplink with per-link CIR lengths. Indices are zero-based:
// cells k, i in [0, K), users u in [0, U_i), taps l in [0, L_{k,i}).
// cir_len[k][i] is the tap count of every link from a user of cell i to BS k.
struct SystemConfig
{
    int cells = 1;
    std::vector<int> users_per_cell{1};
    std::vector<std::vector<int>> cir_len{{1}};
    double snr_db = 20.0;
    int subblocks = 1;
    std::uint64_t seed = 1;
    SymbolModel symbol_model = SymbolModel::gaussian;

    // Symmetric layout: L_{k,k} = desired_len, L_{k,i} = ici_len for i != k.
    static SystemConfig symmetric(int cells, int users, int desired_len, int ici_len, int subblocks = 1,
                                  std::uint64_t seed = 1);

    int desired_len(int k) const { return cir_len[k][k]; }
    double snr_linear() const { return db_to_linear(snr_db); }
};

// Returns one message per violated invariant; empty when the config is valid.
std::vector<std::string> validate_config(const SystemConfig& cfg);

// Throws std::invalid_argument listing every violation.
void require_valid(const SystemConfig& cfg);

struct TransmissionPlan
{
    std::vector<int> active_users;      // U'_k
    std::vector<int> symbols_per_user;  // M_k
    int max_symbols = 0;                // M_D
    int max_desired_len = 0;            // L_D
    int max_ici_len = 1;                // L_I (1 when no interfering link exists)
    int core_len = 0;                   // N
    int subblock_len = 0;               // N + L_I - 1
    int block_len = 0;                  // B * subblock_len + max(L_D, L_I) - 1
    int cp_len = 0;                     // L_I - 1
    int subblocks = 1;

    int streams(int k) const { return active_users[k] * symbols_per_user[k]; }
};

TransmissionPlan make_plan(const SystemConfig& cfg);

// Tap storage for every (BS k, cell i, user u) link.
class ChannelRealization
{
public:
    ChannelRealization() = default;
    explicit ChannelRealization(const SystemConfig& cfg);

    int cells() const { return cells_; }
    int users(int i) const { return users_[i]; }

    std::span<cplx> taps(int k, int i, int u) { return links_[index(k, i, u)]; }
    std::span<const cplx> taps(int k, int i, int u) const { return links_[index(k, i, u)]; }

    // Out-of-range taps read as zero.
    cplx tap(int k, int i, int u, int l) const;

private:
    std::size_t index(int k, int i, int u) const;

    int cells_ = 0;
    std::vector<int> users_;
    std::vector<std::size_t> offsets_;
    std::vector<std::vector<cplx>> links_;
};

// Per-trial child seed derived by mixing (seed, trial).
std::uint64_t child_seed(std::uint64_t seed, std::uint64_t trial);

// Circularly-symmetric CN(0, 1) taps on every link.
ChannelRealization sample_channel_iid(const SystemConfig& cfg, std::uint64_t rng_seed);

struct Deployment
{
    double site_spacing_m = 300.0;
    double user_distance_m = 100.0;
    double pathloss_exponent = 3.5;
    double ref_loss_db = -80.0;
    std::vector<std::vector<double>> pdp_decay;  // K x K; empty means uniform default_pdp_decay
    double default_pdp_decay = 0.5;
    int ici_delay_taps = 0;
    double tx_power_dbm = 23.0;
    double noise_density_dbm_hz = -174.0;
    double bandwidth_hz = 10.0e6;

    double decay(int k, int i) const;
    double noise_power_mw() const;
    double tx_power_mw() const { return db_to_linear(tx_power_dbm); }
    double ref_gain() const { return db_to_linear(ref_loss_db); }
};

std::vector<std::string> validate_deployment(const Deployment& dep);

// Exponential power-delay profile gamma_{k,i,l}: desired links normalized over
// [0, L_D), interfering links over [L_{I,d}, L_I); zero elsewhere.
double pdp_variance(const Deployment& dep, int k, int i, int l, int desired_len, int ici_len);

struct Point
{
    double x = 0.0;
    double y = 0.0;
};

// Node positions and the derived link distances d_{k,i,u} (BS k to user (i,u)).
struct Positions
{
    std::vector<Point> base_stations;
    std::vector<std::vector<Point>> users;  // [cell][user]

    double distance(int k, int i, int u) const;
};

// Seven-cell layout: BS 0 at the origin, BS 1..6 on a hexagonal ring at
// site spacing; users of each cell on a circle of radius user_distance at
// angles 360 u / U_k starting from 0 degrees.
Positions hex_deployment(double site_spacing_m, double user_distance_m, std::span<const int> users_per_cell);

// h = sqrt(P0) d^{-alpha/2} h_check with h_check ~ CN(0, gamma_{k,i,l}). ici_len is
// the full ICI tap count used to normalize the profile.
ChannelRealization sample_channel_geometric(const SystemConfig& cfg, const Deployment& dep, const Positions& pos,
                                            std::uint64_t rng_seed);

} // namespace bim

#endif
