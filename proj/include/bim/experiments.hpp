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

#ifndef BIM_EXPERIMENTS_HPP
#define BIM_EXPERIMENTS_HPP

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "bim/config_io.hpp"

namespace bim {

// Header plus rows of already-formatted cells; numbers use the shortest
// round-trip decimal form, independent of the global locale.
struct CsvTable
{
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    void write(std::ostream& os) const;
    std::string str() const;
};

std::string format_number(double v);

struct SweepAxis
{
    std::string key;
    std::vector<std::string> values;
};

// Parses "key=v1,v2,..."; the key must be a config key and the list non-empty.
SweepAxis parse_sweep(const std::string& text);

struct ExperimentSpec
{
    std::string command;
    std::optional<std::string> config_path;
    std::optional<SweepAxis> sweep;
    std::optional<std::string> out_path;
    int trials = 200;
    std::optional<std::uint64_t> seed;
    std::vector<double> snr_db;  // empty: command default
    unsigned workers = 0;        // 0: hardware concurrency
};

// Config from spec.config_path (or the given defaults) with the --seed override applied.
ExperimentConfig resolve_config(const ExperimentSpec& spec, const std::vector<ConfigEntry>& defaults = {});

CsvTable run_dof(const ExperimentSpec& spec);
CsvTable run_rate(const ExperimentSpec& spec);
CsvTable run_simulate(const ExperimentSpec& spec);
CsvTable run_sweep(const ExperimentSpec& spec);

struct VerifyOutcome
{
    CsvTable table;
    bool all_pass = true;
};
VerifyOutcome run_verify(const ExperimentSpec& spec);

struct Fig3Row
{
    double snr_db = 0.0;
    int cells = 0;
    double proposed = 0.0;
    double baseline = 0.0;
};
std::vector<Fig3Row> fig3_data(const ExperimentSpec& spec);
CsvTable run_fig3(const ExperimentSpec& spec);

struct Fig5Row
{
    double user_distance_m = 0.0;
    double proposed = 0.0;
    double ofdma = 0.0;
};
// Defaults: 7 cells, 3 users, L_D = 5, L_I = 7, L_Id = 3, L_I' = 5, B = 10 and the
// deployment constants of the hexagonal scenario; the sweep axis defaults to
// user_distance_m = 20..140 step 20.
std::vector<ConfigEntry> fig5_defaults();
std::vector<Fig5Row> fig5_data(const ExperimentSpec& spec);
CsvTable run_fig5(const ExperimentSpec& spec);

} // namespace bim

#endif
