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

#include "bim/config_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace bim {

namespace {

std::string_view trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos)
        return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep)
{
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        out.push_back(trim(s.substr(start, pos == std::string_view::npos ? pos : pos - start)));
        if (pos == std::string_view::npos)
            break;
        start = pos + 1;
    }
    return out;
}

double to_double(std::string_view s, int line, const std::string& key)
{
    s = trim(s);
    double v = 0.0;
    const auto* end = s.data() + s.size();
    const auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc() || ptr != end || s.empty() || !std::isfinite(v))
        throw ConfigError(line, "'" + key + "': expected a number, got '" + std::string(s) + "'");
    return v;
}

long long to_integer(std::string_view s, int line, const std::string& key)
{
    const double v = to_double(s, line, key);
    if (v != std::floor(v) || std::abs(v) > 9.0e15)
        throw ConfigError(line, "'" + key + "': expected an integer, got '" + std::string(trim(s)) + "'");
    return static_cast<long long>(v);
}

std::uint64_t to_seed(std::string_view s, int line, const std::string& key)
{
    s = trim(s);
    std::uint64_t v = 0;
    const auto* end = s.data() + s.size();
    const auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc() || ptr != end || s.empty())
        throw ConfigError(line, "'" + key + "': expected an unsigned 64-bit integer, got '" + std::string(s) + "'");
    return v;
}

// Flat list; rows separated by ';' are concatenated.
std::vector<double> to_list(std::string_view s, int line, const std::string& key)
{
    std::vector<double> out;
    for (auto row : split(s, ';'))
        for (auto item : split(row, ','))
            out.push_back(to_double(item, line, key));
    return out;
}

struct Lookup
{
    std::map<std::string, const ConfigEntry*> by_key;

    const ConfigEntry* find(const std::string& key) const
    {
        const auto it = by_key.find(key);
        return it == by_key.end() ? nullptr : it->second;
    }
};

} // namespace

ConfigError::ConfigError(int line, const std::string& what)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line)
{
}

const std::vector<std::string>& config_keys()
{
    static const std::vector<std::string> keys = {
        "cells",          "users",          "desired_len",        "ici_len",
        "cir_len",        "snr_db",         "subblocks",          "seed",
        "symbol_model",   "site_spacing_m", "user_distance_m",    "pathloss_exponent",
        "ref_loss_db",    "pdp_decay",      "ici_delay_taps",     "considered_ici_len",
        "tx_power_dbm",   "noise_density_dbm_hz", "bandwidth_hz"};
    return keys;
}

bool is_config_key(std::string_view key)
{
    const auto& keys = config_keys();
    return std::find(keys.begin(), keys.end(), key) != keys.end();
}

std::vector<ConfigEntry> parse_config_text(std::string_view text)
{
    std::vector<ConfigEntry> out;
    int line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto nl = text.find('\n', start);
        std::string_view line = text.substr(start, nl == std::string_view::npos ? std::string_view::npos : nl - start);
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (!line.empty()) {
            const auto eq = line.find('=');
            if (eq == std::string_view::npos)
                throw ConfigError(line_no, "expected 'key = value'");
            ConfigEntry e{std::string(trim(line.substr(0, eq))), std::string(trim(line.substr(eq + 1))), line_no};
            if (e.key.empty())
                throw ConfigError(line_no, "missing key");
            if (!is_config_key(e.key))
                throw ConfigError(line_no, "unknown key '" + e.key + "'");
            if (e.value.empty())
                throw ConfigError(line_no, "missing value for '" + e.key + "'");
            for (const auto& prev : out)
                if (prev.key == e.key)
                    throw ConfigError(line_no, "duplicate key '" + e.key + "' (first set on line " +
                                                   std::to_string(prev.line) + ")");
            out.push_back(std::move(e));
        }
        if (nl == std::string_view::npos)
            break;
        start = nl + 1;
    }
    return out;
}

ExperimentConfig build_config(const std::vector<ConfigEntry>& entries)
{
    Lookup look;
    for (const auto& e : entries)
        look.by_key[e.key] = &e;

    ExperimentConfig out;
    out.entries = entries;
    SystemConfig& sys = out.system;
    Deployment& dep = out.deployment;

    auto integer = [&](const char* key, long long fallback) {
        const ConfigEntry* e = look.find(key);
        return e ? to_integer(e->value, e->line, key) : fallback;
    };
    auto real = [&](const char* key, double fallback) {
        const ConfigEntry* e = look.find(key);
        return e ? to_double(e->value, e->line, key) : fallback;
    };

    const long long K = integer("cells", 1);
    if (K < 1 || K > 64) {
        const ConfigEntry* e = look.find("cells");
        throw ConfigError(e ? e->line : 0, "K >= 1 violated (K = " + std::to_string(K) + ")");
    }
    sys.cells = static_cast<int>(K);

    sys.users_per_cell.assign(static_cast<std::size_t>(K), 1);
    if (const ConfigEntry* e = look.find("users")) {
        const auto v = to_list(e->value, e->line, "users");
        if (v.size() != 1 && v.size() != static_cast<std::size_t>(K))
            throw ConfigError(e->line, "'users' needs 1 or K = " + std::to_string(K) + " values");
        for (long long k = 0; k < K; ++k)
            sys.users_per_cell[k] = static_cast<int>(to_integer(std::to_string(v.size() == 1 ? v[0] : v[k]), e->line,
                                                                "users"));
    }

    if (const ConfigEntry* e = look.find("cir_len")) {
        const auto v = to_list(e->value, e->line, "cir_len");
        if (v.size() != static_cast<std::size_t>(K * K))
            throw ConfigError(e->line, "'cir_len' needs K x K = " + std::to_string(K * K) + " values");
        sys.cir_len.assign(static_cast<std::size_t>(K), std::vector<int>(static_cast<std::size_t>(K)));
        for (long long k = 0; k < K; ++k)
            for (long long i = 0; i < K; ++i)
                sys.cir_len[k][i] = static_cast<int>(v[k * K + i]);
    } else {
        const int ld = static_cast<int>(integer("desired_len", 1));
        const int li = static_cast<int>(integer("ici_len", 1));
        sys.cir_len.assign(static_cast<std::size_t>(K), std::vector<int>(static_cast<std::size_t>(K), li));
        for (long long k = 0; k < K; ++k)
            sys.cir_len[k][k] = ld;
    }

    sys.snr_db = real("snr_db", sys.snr_db);
    sys.subblocks = static_cast<int>(integer("subblocks", sys.subblocks));
    if (const ConfigEntry* e = look.find("seed"))
        sys.seed = to_seed(e->value, e->line, "seed");
    if (const ConfigEntry* e = look.find("symbol_model")) {
        if (e->value == "gaussian")
            sys.symbol_model = SymbolModel::gaussian;
        else if (e->value == "qpsk")
            sys.symbol_model = SymbolModel::qpsk;
        else
            throw ConfigError(e->line, "'symbol_model' must be gaussian or qpsk");
    }

    dep.site_spacing_m = real("site_spacing_m", dep.site_spacing_m);
    dep.user_distance_m = real("user_distance_m", dep.user_distance_m);
    dep.pathloss_exponent = real("pathloss_exponent", dep.pathloss_exponent);
    dep.ref_loss_db = real("ref_loss_db", dep.ref_loss_db);
    dep.ici_delay_taps = static_cast<int>(integer("ici_delay_taps", dep.ici_delay_taps));
    dep.tx_power_dbm = real("tx_power_dbm", dep.tx_power_dbm);
    dep.noise_density_dbm_hz = real("noise_density_dbm_hz", dep.noise_density_dbm_hz);
    dep.bandwidth_hz = real("bandwidth_hz", dep.bandwidth_hz);
    if (const ConfigEntry* e = look.find("pdp_decay")) {
        const auto v = to_list(e->value, e->line, "pdp_decay");
        if (v.size() == 1) {
            dep.default_pdp_decay = v[0];
        } else if (v.size() == static_cast<std::size_t>(K * K)) {
            dep.pdp_decay.assign(static_cast<std::size_t>(K), std::vector<double>(static_cast<std::size_t>(K)));
            for (long long k = 0; k < K; ++k)
                for (long long i = 0; i < K; ++i)
                    dep.pdp_decay[k][i] = v[k * K + i];
        } else {
            throw ConfigError(e->line, "'pdp_decay' needs 1 or K x K values");
        }
    }
    out.considered_ici_len = static_cast<int>(integer("considered_ici_len", 0));

    // Invariant violations are attributed to the line of the offending key when possible.
    const auto errs = validate_config(sys);
    if (!errs.empty()) {
        std::string msg;
        for (const auto& m : errs)
            msg += (msg.empty() ? "" : "; ") + m;
        // each invariant names its symbol; the first key that sets that symbol gets the blame
        static const std::vector<std::pair<std::string, std::vector<const char*>>> owners = {
            {"K >= 1", {"cells"}},
            {"U >= 1", {"users"}},
            {"users_per_cell", {"users"}},
            {"L >= 1", {"cir_len", "desired_len", "ici_len"}},
            {"cir_len", {"cir_len"}},
            {"B >= 1", {"subblocks"}}};
        int line = 0;
        for (const auto& [symbol, keys] : owners) {
            if (line != 0 || msg.find(symbol) == std::string::npos)
                continue;
            for (const char* key : keys)
                if (const ConfigEntry* e = look.find(key); e && line == 0)
                    line = e->line;
        }
        throw ConfigError(line, "invalid system configuration: " + msg);
    }
    const auto dep_errs = validate_deployment(dep);
    if (!dep_errs.empty()) {
        std::string msg;
        for (const auto& m : dep_errs)
            msg += (msg.empty() ? "" : "; ") + m;
        throw ConfigError(0, "invalid deployment: " + msg);
    }
    if (out.considered_ici_len < 0)
        throw ConfigError(look.find("considered_ici_len")->line, "'considered_ici_len' must be >= 0");
    return out;
}

ExperimentConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError(0, "cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return build_config(parse_config_text(ss.str()));
}

ExperimentConfig with_override(const ExperimentConfig& base, const std::string& key, const std::string& value)
{
    if (!is_config_key(key))
        throw ConfigError(0, "unknown key '" + key + "'");
    std::vector<ConfigEntry> entries = base.entries;
    auto it = std::find_if(entries.begin(), entries.end(), [&](const ConfigEntry& e) { return e.key == key; });
    if (it != entries.end()) {
        it->value = value;
        it->line = 0;
    } else {
        entries.push_back({key, value, 0});
    }
    // desired_len / ici_len only act when no explicit matrix is present
    if ((key == "desired_len" || key == "ici_len" || key == "cells"))
        std::erase_if(entries, [&](const ConfigEntry& e) { return e.key == "cir_len" && key != "cir_len"; });
    return build_config(entries);
}

std::vector<double> parse_number_list(std::string_view text)
{
    if (trim(text).empty())
        throw ConfigError(0, "empty value list");
    return to_list(text, 0, "list");
}

} // namespace bim
