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

#ifndef BIM_CONFIG_IO_HPP
#define BIM_CONFIG_IO_HPP

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "bim/model.hpp"

namespace bim {

// Configuration files are line-oriented `key = value` text. `#` starts a comment,
// blank lines are ignored, keys may appear once. List values are comma separated;
// matrix rows are separated by `;`.
//
//   cells = 3
//   users = 3                 # one value for every cell, or one per cell
//   desired_len = 8           # L_kk for every k (ignored when cir_len is given)
//   ici_len = 2               # L_ki for every k != i
//   cir_len = 8,2,2; 2,8,2; 2,2,8
//   snr_db = 20
//   subblocks = 10
//   seed = 1
//   symbol_model = gaussian   # or qpsk
//   site_spacing_m = 300
//   user_distance_m = 100
//   pathloss_exponent = 3.5
//   ref_loss_db = -80
//   pdp_decay = 0.5           # scalar or K x K matrix
//   ici_delay_taps = 0
//   considered_ici_len = 0    # 0 keeps every ICI tap
//   tx_power_dbm = 23
//   noise_density_dbm_hz = -174
//   bandwidth_hz = 10e6
class ConfigError : public std::runtime_error
{
public:
    ConfigError(int line, const std::string& what);
    int line() const { return line_; }

private:
    int line_;
};

struct ConfigEntry
{
    std::string key;
    std::string value;
    int line = 0;  // 0 for values injected outside a file (sweeps, flags)
};

struct ExperimentConfig
{
    SystemConfig system;
    Deployment deployment;
    int considered_ici_len = 0;
    std::vector<ConfigEntry> entries;  // source entries, kept for sweep overrides
};

const std::vector<std::string>& config_keys();
bool is_config_key(std::string_view key);

std::vector<ConfigEntry> parse_config_text(std::string_view text);
ExperimentConfig build_config(const std::vector<ConfigEntry>& entries);
ExperimentConfig load_config(const std::string& path);

// Returns a copy of `base` with `key` set to `value` and everything re-derived.
ExperimentConfig with_override(const ExperimentConfig& base, const std::string& key, const std::string& value);

std::vector<double> parse_number_list(std::string_view text);

} // namespace bim

#endif
