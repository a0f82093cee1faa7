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

#include "bim/model.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

namespace bim {

SystemConfig SystemConfig::symmetric(int cells, int users, int desired_len, int ici_len, int subblocks,
                                     std::uint64_t seed)
{
    SystemConfig cfg;
    cfg.cells = cells;
    cfg.users_per_cell.assign(static_cast<std::size_t>(std::max(cells, 0)), users);
    cfg.cir_len.assign(static_cast<std::size_t>(std::max(cells, 0)),
                       std::vector<int>(static_cast<std::size_t>(std::max(cells, 0)), ici_len));
    for (int k = 0; k < cells; ++k)
        cfg.cir_len[k][k] = desired_len;
    cfg.subblocks = subblocks;
    cfg.seed = seed;
    return cfg;
}

std::vector<std::string> validate_config(const SystemConfig& cfg)
{
    std::vector<std::string> errors;
    if (cfg.cells < 1) {
        errors.emplace_back("K >= 1 violated (K = " + std::to_string(cfg.cells) + ")");
        return errors;
    }
    const auto K = static_cast<std::size_t>(cfg.cells);
    if (cfg.users_per_cell.size() != K)
        errors.emplace_back("users_per_cell must have K entries");
    else
        for (std::size_t k = 0; k < K; ++k)
            if (cfg.users_per_cell[k] < 1)
                errors.emplace_back("U >= 1 violated for cell " + std::to_string(k));

    if (cfg.cir_len.size() != K) {
        errors.emplace_back("cir_len must be a K x K matrix");
    } else {
        for (std::size_t k = 0; k < K; ++k) {
            if (cfg.cir_len[k].size() != K) {
                errors.emplace_back("cir_len row " + std::to_string(k) + " must have K entries");
                continue;
            }
            for (std::size_t i = 0; i < K; ++i)
                if (cfg.cir_len[k][i] < 1)
                    errors.emplace_back("L >= 1 violated at L[" + std::to_string(k) + "][" + std::to_string(i) +
                                        "] = " + std::to_string(cfg.cir_len[k][i]));
        }
    }
    if (cfg.subblocks < 1)
        errors.emplace_back("B >= 1 violated (B = " + std::to_string(cfg.subblocks) + ")");
    if (!std::isfinite(cfg.snr_db))
        errors.emplace_back("snr_db must be finite");
    return errors;
}

void require_valid(const SystemConfig& cfg)
{
    const auto errors = validate_config(cfg);
    if (errors.empty())
        return;
    std::ostringstream msg;
    msg << "invalid configuration:";
    for (const auto& e : errors)
        msg << "\n  " << e;
    throw std::invalid_argument(msg.str());
}

TransmissionPlan make_plan(const SystemConfig& cfg)
{
    require_valid(cfg);
    const int K = cfg.cells;
    TransmissionPlan plan;
    plan.subblocks = cfg.subblocks;
    for (int k = 0; k < K; ++k) {
        plan.max_desired_len = std::max(plan.max_desired_len, cfg.cir_len[k][k]);
        for (int i = 0; i < K; ++i)
            if (i != k)
                plan.max_ici_len = std::max(plan.max_ici_len, cfg.cir_len[k][i]);
    }
    const int LI = plan.max_ici_len;
    plan.active_users.resize(static_cast<std::size_t>(K));
    plan.symbols_per_user.resize(static_cast<std::size_t>(K));
    for (int k = 0; k < K; ++k) {
        const int excess = cfg.cir_len[k][k] - LI;
        const int U = cfg.users_per_cell[k];
        if (excess <= 0) {
            plan.active_users[k] = 0;
            plan.symbols_per_user[k] = 0;
        } else if (U <= excess) {
            plan.active_users[k] = U;
            plan.symbols_per_user[k] = std::max(excess / U, 1);
        } else {
            plan.active_users[k] = excess;
            plan.symbols_per_user[k] = 1;
        }
        plan.max_symbols = std::max(plan.max_symbols, plan.symbols_per_user[k]);
    }
    plan.core_len = std::max(plan.max_desired_len - LI + plan.max_symbols, LI);
    plan.subblock_len = plan.core_len + LI - 1;
    plan.cp_len = LI - 1;
    plan.block_len = cfg.subblocks * plan.subblock_len + std::max(plan.max_desired_len, LI) - 1;
    return plan;
}

ChannelRealization::ChannelRealization(const SystemConfig& cfg) : cells_(cfg.cells), users_(cfg.users_per_cell)
{
    offsets_.resize(static_cast<std::size_t>(cells_) * cells_);
    std::size_t next = 0;
    for (int k = 0; k < cells_; ++k)
        for (int i = 0; i < cells_; ++i) {
            offsets_[static_cast<std::size_t>(k) * cells_ + i] = next;
            for (int u = 0; u < users_[i]; ++u)
                links_.emplace_back(static_cast<std::size_t>(cfg.cir_len[k][i]), cplx{});
            next += static_cast<std::size_t>(users_[i]);
        }
}

std::size_t ChannelRealization::index(int k, int i, int u) const
{
    if (k < 0 || k >= cells_ || i < 0 || i >= cells_ || u < 0 || u >= users_[i])
        throw std::out_of_range("channel link index out of range");
    return offsets_[static_cast<std::size_t>(k) * cells_ + i] + static_cast<std::size_t>(u);
}

cplx ChannelRealization::tap(int k, int i, int u, int l) const
{
    const auto h = taps(k, i, u);
    if (l < 0 || static_cast<std::size_t>(l) >= h.size())
        return {};
    return h[static_cast<std::size_t>(l)];
}

std::uint64_t child_seed(std::uint64_t seed, std::uint64_t trial)
{
    // splitmix64 finalizer over a golden-ratio combination
    std::uint64_t z = seed ^ (trial + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

ChannelRealization sample_channel_iid(const SystemConfig& cfg, std::uint64_t rng_seed)
{
    require_valid(cfg);
    ChannelRealization ch(cfg);
    std::mt19937_64 rng(rng_seed);
    std::normal_distribution<double> gauss(0.0, std::sqrt(0.5));
    for (int k = 0; k < cfg.cells; ++k)
        for (int i = 0; i < cfg.cells; ++i)
            for (int u = 0; u < cfg.users_per_cell[i]; ++u)
                for (auto& h : ch.taps(k, i, u)) {
                    const double re = gauss(rng);
                    const double im = gauss(rng);
                    h = {re, im};
                }
    return ch;
}

double Deployment::decay(int k, int i) const
{
    if (pdp_decay.empty())
        return default_pdp_decay;
    return pdp_decay.at(static_cast<std::size_t>(k)).at(static_cast<std::size_t>(i));
}

double Deployment::noise_power_mw() const
{
    return db_to_linear(noise_density_dbm_hz) * bandwidth_hz;
}

std::vector<std::string> validate_deployment(const Deployment& dep)
{
    std::vector<std::string> errors;
    if (!(dep.pathloss_exponent > 0.0))
        errors.emplace_back("alpha > 0 violated");
    if (!(dep.site_spacing_m > 0.0))
        errors.emplace_back("D_site > 0 violated");
    if (!(dep.user_distance_m >= 0.0 && dep.user_distance_m < dep.site_spacing_m))
        errors.emplace_back("0 <= D_user < D_site violated");
    if (dep.ici_delay_taps < 0)
        errors.emplace_back("ici_delay_taps >= 0 violated");
    if (!(dep.bandwidth_hz > 0.0))
        errors.emplace_back("bandwidth_hz > 0 violated");
    return errors;
}

double pdp_variance(const Deployment& dep, int k, int i, int l, int desired_len, int ici_len)
{
    const double beta = dep.decay(k, i);
    int first = 0;
    int last = 0;  // exclusive
    if (k == i) {
        last = desired_len;
    } else {
        first = dep.ici_delay_taps;
        last = ici_len;
    }
    if (l < first || l >= last)
        return 0.0;
    double norm = 0.0;
    for (int q = first; q < last; ++q)
        norm += std::exp(-q * beta);
    return std::exp(-l * beta) / norm;
}

double Positions::distance(int k, int i, int u) const
{
    const Point& bs = base_stations.at(static_cast<std::size_t>(k));
    const Point& ue = users.at(static_cast<std::size_t>(i)).at(static_cast<std::size_t>(u));
    return std::hypot(bs.x - ue.x, bs.y - ue.y);
}

Positions hex_deployment(double site_spacing_m, double user_distance_m, std::span<const int> users_per_cell)
{
    if (!(user_distance_m < site_spacing_m))
        throw std::invalid_argument("hex_deployment: D_user must be below D_site");
    if (users_per_cell.size() != 7)
        throw std::invalid_argument("hex_deployment: seven cells expected");
    Positions pos;
    pos.base_stations.push_back({0.0, 0.0});
    for (int j = 0; j < 6; ++j) {
        const double a = kPi / 3.0 * j;
        pos.base_stations.push_back({site_spacing_m * std::cos(a), site_spacing_m * std::sin(a)});
    }
    for (std::size_t c = 0; c < 7; ++c) {
        const int U = users_per_cell[c];
        std::vector<Point> cell;
        for (int u = 0; u < U; ++u) {
            const double a = 2.0 * kPi * u / U;
            cell.push_back({pos.base_stations[c].x + user_distance_m * std::cos(a),
                            pos.base_stations[c].y + user_distance_m * std::sin(a)});
        }
        pos.users.push_back(std::move(cell));
    }
    return pos;
}

ChannelRealization sample_channel_geometric(const SystemConfig& cfg, const Deployment& dep, const Positions& pos,
                                            std::uint64_t rng_seed)
{
    require_valid(cfg);
    ChannelRealization ch(cfg);
    std::mt19937_64 rng(rng_seed);
    std::normal_distribution<double> gauss(0.0, std::sqrt(0.5));
    const double p0 = dep.ref_gain();
    for (int k = 0; k < cfg.cells; ++k)
        for (int i = 0; i < cfg.cells; ++i)
            for (int u = 0; u < cfg.users_per_cell[i]; ++u) {
                const double d = pos.distance(k, i, u);
                if (!(d > 0.0))
                    throw std::invalid_argument("sample_channel_geometric: non-positive link distance");
                const double amp = std::sqrt(p0 * std::pow(d, -dep.pathloss_exponent));
                auto h = ch.taps(k, i, u);
                const int len = static_cast<int>(h.size());
                for (int l = 0; l < len; ++l) {
                    const double re = gauss(rng);
                    const double im = gauss(rng);
                    const double g = pdp_variance(dep, k, i, l, cfg.cir_len[k][k], len);
                    h[static_cast<std::size_t>(l)] = amp * std::sqrt(g) * cplx{re, im};
                }
            }
    return ch;
}

} // namespace bim
