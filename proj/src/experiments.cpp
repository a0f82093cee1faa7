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

#include "bim/experiments.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "bim/analysis.hpp"
#include "bim/extensions.hpp"
#include "bim/parallel.hpp"
#include "bim/spectral.hpp"
#include "bim/transceiver.hpp"
#include "bim/verify.hpp"

namespace bim {

namespace {

std::string users_str(const SystemConfig& cfg)
{
    std::string s;
    for (std::size_t i = 0; i < cfg.users_per_cell.size(); ++i)
        s += (i ? ";" : "") + std::to_string(cfg.users_per_cell[i]);
    return s;
}

// Symmetric parameters (L_D, L_I, U) when the config has that shape.
struct Symmetric
{
    int desired = 0;
    int ici = 1;
    int users = 0;
};

std::optional<Symmetric> symmetric_shape(const SystemConfig& cfg)
{
    Symmetric s{cfg.cir_len[0][0], cfg.cells > 1 ? cfg.cir_len[0][1] : 1, cfg.users_per_cell[0]};
    for (int k = 0; k < cfg.cells; ++k) {
        if (cfg.users_per_cell[k] != s.users || cfg.cir_len[k][k] != s.desired)
            return std::nullopt;
        for (int i = 0; i < cfg.cells; ++i)
            if (i != k && cfg.cir_len[k][i] != s.ici)
                return std::nullopt;
    }
    return s;
}

std::vector<ExperimentConfig> sweep_points(const ExperimentSpec& spec, const ExperimentConfig& base)
{
    if (!spec.sweep)
        return {base};
    std::vector<ExperimentConfig> out;
    for (const auto& v : spec.sweep->values)
        out.push_back(with_override(base, spec.sweep->key, v));
    return out;
}

std::string point_label(const ExperimentSpec& spec, std::size_t idx)
{
    if (!spec.sweep)
        return "base";
    return spec.sweep->key + "=" + spec.sweep->values[idx];
}

std::vector<double> snr_list(const ExperimentSpec& spec, const SystemConfig& cfg)
{
    if (!spec.snr_db.empty())
        return spec.snr_db;
    return {cfg.snr_db};
}

void require_trials(const ExperimentSpec& spec)
{
    if (spec.trials < 1)
        throw std::invalid_argument("trials must be >= 1");
}

} // namespace

std::string format_number(double v)
{
    if (std::isnan(v))
        return "nan";
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc())
        throw std::runtime_error("format_number: conversion failed");
    return std::string(buf, ptr);
}

void CsvTable::write(std::ostream& os) const
{
    auto line = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i)
            os << (i ? "," : "") << cells[i];
        os << '\n';
    };
    line(header);
    for (const auto& r : rows)
        line(r);
}

std::string CsvTable::str() const
{
    std::ostringstream os;
    write(os);
    return os.str();
}

SweepAxis parse_sweep(const std::string& text)
{
    const auto eq = text.find('=');
    if (eq == std::string::npos)
        throw std::invalid_argument("sweep must look like key=v1,v2,...");
    SweepAxis axis;
    axis.key = text.substr(0, eq);
    if (!is_config_key(axis.key))
        throw std::invalid_argument("sweep key '" + axis.key + "' is not a config key");
    std::string rest = text.substr(eq + 1);
    std::stringstream ss(rest);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item.erase(0, item.find_first_not_of(" \t"));
        item.erase(item.find_last_not_of(" \t") + 1);
        if (!item.empty())
            axis.values.push_back(item);
    }
    if (axis.values.empty())
        throw std::invalid_argument("sweep list for '" + axis.key + "' is empty");
    return axis;
}

ExperimentConfig resolve_config(const ExperimentSpec& spec, const std::vector<ConfigEntry>& defaults)
{
    ExperimentConfig cfg = spec.config_path ? load_config(*spec.config_path) : build_config(defaults);
    if (spec.seed)
        cfg = with_override(cfg, "seed", std::to_string(*spec.seed));
    return cfg;
}

CsvTable run_dof(const ExperimentSpec& spec)
{
    const ExperimentConfig base = resolve_config(spec);
    CsvTable t;
    t.header = {"point", "K", "users", "L_D", "L_I", "dof_theorem1", "dof_theorem1_value", "dof_scheme",
                "dof_symmetric", "dof_ic", "dof_per_cell"};
    const auto points = sweep_points(spec, base);
    for (std::size_t p = 0; p < points.size(); ++p) {
        const SystemConfig& cfg = points[p].system;
        const TransmissionPlan plan = make_plan(cfg);
        const Fraction d = dof_theorem1(cfg);
        std::string sym;
        std::string ic;
        if (const auto s = symmetric_shape(cfg)) {
            if (dof_symmetric_applicable(s->desired, s->ici, s->users))
                sym = dof_symmetric(cfg.cells, s->desired, s->ici, s->users).str();
            if (s->desired > s->ici)
                ic = dof_interference_channel(cfg.cells, s->desired, s->ici).str();
        }
        t.rows.push_back({point_label(spec, p), std::to_string(cfg.cells), users_str(cfg),
                          std::to_string(plan.max_desired_len), std::to_string(plan.max_ici_len), d.str(),
                          format_number(d.value()), dof_scheme(cfg).str(), sym, ic,
                          format_number(d.value() / cfg.cells)});
    }
    return t;
}

CsvTable run_rate(const ExperimentSpec& spec)
{
    require_trials(spec);
    const ExperimentConfig base = resolve_config(spec);
    CsvTable t;
    t.header = {"point", "snr_db", "proposed_network", "proposed_stderr", "proposed_per_cell", "baseline_network",
                "baseline_per_cell", "dof_theorem1"};
    const auto points = sweep_points(spec, base);
    for (std::size_t p = 0; p < points.size(); ++p) {
        const SystemConfig& cfg = points[p].system;
        const auto snrs = snr_list(spec, cfg);
        const auto prop = ergodic_rate(cfg, snrs, spec.trials, Scheme::proposed, spec.workers);
        const auto base_rate = ergodic_rate(cfg, snrs, spec.trials, Scheme::tdma_ofdma, spec.workers);
        for (std::size_t s = 0; s < snrs.size(); ++s)
            t.rows.push_back({point_label(spec, p), format_number(snrs[s]), format_number(prop[s].mean),
                              format_number(prop[s].std_error), format_number(prop[s].mean / cfg.cells),
                              format_number(base_rate[s].mean), format_number(base_rate[s].mean / cfg.cells),
                              dof_theorem1(cfg).str()});
    }
    return t;
}

CsvTable run_simulate(const ExperimentSpec& spec)
{
    require_trials(spec);
    const ExperimentConfig base = resolve_config(spec);
    CsvTable t;
    t.header = {"point", "snr_db", "symbols", "mse", "symbol_error_rate", "max_abs_error"};
    const auto points = sweep_points(spec, base);
    for (std::size_t p = 0; p < points.size(); ++p) {
        const SystemConfig& cfg = points[p].system;
        const TransmissionPlan plan = make_plan(cfg);
        const auto alphabet = qpsk_alphabet();
        for (double snr : snr_list(spec, cfg)) {
            const double noise_var = 1.0 / db_to_linear(snr);
            struct TrialStats
            {
                long long symbols = 0;
                double sq_error = 0.0;
                long long errors = 0;
                double max_error = 0.0;
            };
            const auto runs = parallel_trials(
                spec.trials,
                [&](int trial) {
                    const std::uint64_t s = child_seed(cfg.seed, static_cast<std::uint64_t>(trial));
                    const ChannelRealization ch = sample_channel_iid(cfg, s);
                    const auto eff = effective_channels(plan, build_structured(cfg, plan, ch));
                    const auto symbols = draw_symbols(plan, cfg.symbol_model, child_seed(s, 1));
                    std::vector<std::vector<CVector>> tx(static_cast<std::size_t>(cfg.cells));
                    for (int k = 0; k < cfg.cells; ++k)
                        for (const auto& stream : symbols[k])
                            tx[k].push_back(precode_and_frame(plan, stream));
                    const auto y = simulate_reception(cfg, plan, ch, tx, child_seed(s, 2), noise_var);
                    TrialStats st;
                    for (int k = 0; k < cfg.cells; ++k) {
                        std::vector<CVector> yt;
                        for (int b = 0; b < plan.subblocks; ++b)
                            yt.push_back(combine(plan, remove_cp_and_stack(plan, y[k], b)));
                        const auto res = decode_block(plan, eff[k], yt, detect_zf);
                        const auto truth = stack_cell_symbols(plan, k, symbols[k]);
                        const double scale = std::sqrt(symbol_variance(plan, k));
                        for (int b = 0; b < plan.subblocks; ++b)
                            for (Eigen::Index j = 0; j < truth[b].size(); ++j) {
                                const cplx est = res.symbols[b](j);
                                const double err = std::abs(est - truth[b](j));
                                st.sq_error += err * err;
                                st.max_error = std::max(st.max_error, err);
                                ++st.symbols;
                                if (cfg.symbol_model == SymbolModel::qpsk) {
                                    cplx best = alphabet[0] * scale;
                                    for (const cplx& a : alphabet)
                                        if (std::abs(est - a * scale) < std::abs(est - best))
                                            best = a * scale;
                                    if (std::abs(best - truth[b](j)) > 1e-9 * scale)
                                        ++st.errors;
                                }
                            }
                    }
                    return st;
                },
                spec.workers);
            TrialStats tot;
            for (const auto& r : runs) {
                tot.symbols += r.symbols;
                tot.sq_error += r.sq_error;
                tot.errors += r.errors;
                tot.max_error = std::max(tot.max_error, r.max_error);
            }
            const double n = std::max<double>(static_cast<double>(tot.symbols), 1.0);
            t.rows.push_back({point_label(spec, p), format_number(snr), std::to_string(tot.symbols),
                              format_number(tot.sq_error / n),
                              cfg.symbol_model == SymbolModel::qpsk ? format_number(tot.errors / n) : "",
                              format_number(tot.max_error)});
        }
    }
    return t;
}

CsvTable run_sweep(const ExperimentSpec& spec)
{
    if (!spec.sweep)
        throw std::invalid_argument("sweep: --sweep key=list is required");
    require_trials(spec);
    const ExperimentConfig base = resolve_config(spec);
    CsvTable t;
    t.header = {spec.sweep->key, "snr_db", "dof_theorem1", "proposed_network", "baseline_network"};
    const auto points = sweep_points(spec, base);
    for (std::size_t p = 0; p < points.size(); ++p) {
        const SystemConfig& cfg = points[p].system;
        const auto snrs = snr_list(spec, cfg);
        const auto prop = ergodic_rate(cfg, snrs, spec.trials, Scheme::proposed, spec.workers);
        const auto bl = ergodic_rate(cfg, snrs, spec.trials, Scheme::tdma_ofdma, spec.workers);
        for (std::size_t s = 0; s < snrs.size(); ++s)
            t.rows.push_back({spec.sweep->values[p], format_number(snrs[s]), dof_theorem1(cfg).str(),
                              format_number(prop[s].mean), format_number(bl[s].mean)});
    }
    return t;
}

VerifyOutcome run_verify(const ExperimentSpec& spec)
{
    require_trials(spec);
    static const std::vector<ConfigEntry> defaults = {
        {"cells", "3", 0}, {"users", "3", 0}, {"desired_len", "8", 0}, {"ici_len", "2", 0}, {"subblocks", "10", 0}};
    const ExperimentConfig base = resolve_config(spec, defaults);
    VerifyOutcome out;
    out.table.header = {"point", "check", "parameters", "pass", "residual", "detail"};
    const auto points = sweep_points(spec, base);
    for (std::size_t p = 0; p < points.size(); ++p)
        for (const auto& r : run_verification_suite(points[p].system, spec.trials)) {
            out.all_pass = out.all_pass && r.pass;
            out.table.rows.push_back({point_label(spec, p), r.name, r.parameters, r.pass ? "pass" : "fail",
                                      format_number(r.residual), r.detail});
        }
    return out;
}

std::vector<Fig3Row> fig3_data(const ExperimentSpec& spec)
{
    require_trials(spec);
    static const std::vector<ConfigEntry> defaults = {
        {"cells", "1", 0}, {"users", "3", 0}, {"desired_len", "8", 0}, {"ici_len", "2", 0}, {"subblocks", "10", 0}};
    const ExperimentConfig base = resolve_config(spec, defaults);
    if (spec.sweep && spec.sweep->key != "cells")
        throw std::invalid_argument("fig3: the sweep axis must be 'cells'");
    std::vector<std::string> cells = spec.sweep ? spec.sweep->values : std::vector<std::string>{"1", "2", "3"};
    std::vector<double> snrs = spec.snr_db;
    if (snrs.empty())
        for (int s = 0; s <= 40; s += 5)
            snrs.push_back(s);

    std::vector<Fig3Row> out;
    for (const auto& kv : cells) {
        const ExperimentConfig c = with_override(base, "cells", kv);
        const auto prop = ergodic_rate(c.system, snrs, spec.trials, Scheme::proposed, spec.workers);
        const auto bl = ergodic_rate(c.system, snrs, spec.trials, Scheme::tdma_ofdma, spec.workers);
        for (std::size_t s = 0; s < snrs.size(); ++s)
            out.push_back({snrs[s], c.system.cells, prop[s].mean, bl[s].mean});
    }
    return out;
}

CsvTable run_fig3(const ExperimentSpec& spec)
{
    CsvTable t;
    t.header = {"snr_db", "K", "proposed_sum_se", "baseline_sum_se"};
    for (const auto& r : fig3_data(spec))
        t.rows.push_back({format_number(r.snr_db), std::to_string(r.cells), format_number(r.proposed),
                          format_number(r.baseline)});
    return t;
}

std::vector<ConfigEntry> fig5_defaults()
{
    return {{"cells", "7", 0},
            {"users", "3", 0},
            {"desired_len", "5", 0},
            {"ici_len", "7", 0},
            {"subblocks", "10", 0},
            {"site_spacing_m", "300", 0},
            {"pathloss_exponent", "3.5", 0},
            {"ref_loss_db", "-80", 0},
            {"pdp_decay", "0.5", 0},
            {"ici_delay_taps", "3", 0},
            {"considered_ici_len", "5", 0},
            {"tx_power_dbm", "23", 0},
            {"noise_density_dbm_hz", "-174", 0},
            {"bandwidth_hz", "1", 0}};
}

std::vector<Fig5Row> fig5_data(const ExperimentSpec& spec)
{
    require_trials(spec);
    const ExperimentConfig base = resolve_config(spec, fig5_defaults());
    SweepAxis axis;
    if (spec.sweep) {
        axis = *spec.sweep;
    } else {
        axis.key = "user_distance_m";
        for (int d = 20; d <= 140; d += 20)
            axis.values.push_back(std::to_string(d));
    }

    std::vector<Fig5Row> out;
    for (const auto& v : axis.values) {
        const ExperimentConfig c = with_override(base, axis.key, v);
        const SystemConfig& cfg = c.system;
        const Deployment& dep = c.deployment;
        if (cfg.cells != 7)
            throw std::invalid_argument("fig5: the hexagonal layout needs exactly 7 cells");
        DelayProfile dp;
        dp.delay_taps = dep.ici_delay_taps;
        dp.ici_len = make_plan(cfg).max_ici_len;
        dp.considered_ici_len = c.considered_ici_len > 0 ? c.considered_ici_len : dp.ici_len;
        const DelayedPlan plan = make_delayed_plan(cfg, dp);
        const Positions pos = hex_deployment(dep.site_spacing_m, dep.user_distance_m, cfg.users_per_cell);

        const auto runs = parallel_trials(
            spec.trials,
            [&](int t) {
                const ChannelRealization ch =
                    sample_channel_geometric(cfg, dep, pos, child_seed(cfg.seed, static_cast<std::uint64_t>(t)));
                return std::pair{rate_with_residual_ici(cfg, plan, dep, ch, dp, 0),
                                 ofdma_ici_as_noise_rate(cfg, dep, ch, 0, plan.core_len)};
            },
            spec.workers);
        Fig5Row row;
        row.user_distance_m = dep.user_distance_m;
        for (const auto& [a, b] : runs) {
            row.proposed += a;
            row.ofdma += b;
        }
        row.proposed /= spec.trials;
        row.ofdma /= spec.trials;
        out.push_back(row);
    }
    return out;
}

CsvTable run_fig5(const ExperimentSpec& spec)
{
    CsvTable t;
    t.header = {"user_distance_m", "proposed_se_per_cell", "ofdma_se_per_cell"};
    for (const auto& r : fig5_data(spec))
        t.rows.push_back({format_number(r.user_distance_m), format_number(r.proposed), format_number(r.ofdma)});
    return t;
}

} // namespace bim
