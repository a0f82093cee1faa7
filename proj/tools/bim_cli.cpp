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

// Experiment runner. Every command prints (or writes with --out) one CSV table.
//
//   bim_cli dof --config cfg.txt --sweep desired_len=4,8,16,32
//   bim_cli fig3 --trials 200 --out fig3.csv
//   bim_cli verify --config cfg.txt

#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "bim/experiments.hpp"

namespace {

struct Options
{
    std::string config;
    std::string out;
    std::string sweep;
    std::string snr;
    std::uint64_t seed = 0;
    int trials = 200;
    unsigned workers = 0;
};

void add_common(CLI::App* cmd, Options& o)
{
    cmd->add_option("--config", o.config, "key = value configuration file");
    cmd->add_option("--out", o.out, "write the CSV here instead of stdout");
    cmd->add_option("--seed", o.seed, "override the configured seed");
    cmd->add_option("--trials", o.trials, "Monte Carlo trials")->check(CLI::PositiveNumber);
    cmd->add_option("--snr", o.snr, "comma-separated SNR list in dB");
    cmd->add_option("--sweep", o.sweep, "key=v1,v2,... over one config key");
    cmd->add_option("--workers", o.workers, "worker threads (0 = all cores)");
}

bim::ExperimentSpec to_spec(const std::string& command, const Options& o, const CLI::App* cmd)
{
    bim::ExperimentSpec spec;
    spec.command = command;
    if (!o.config.empty())
        spec.config_path = o.config;
    if (!o.out.empty())
        spec.out_path = o.out;
    if (!o.sweep.empty())
        spec.sweep = bim::parse_sweep(o.sweep);
    if (cmd->count("--seed") > 0)
        spec.seed = o.seed;
    if (!o.snr.empty())
        spec.snr_db = bim::parse_number_list(o.snr);
    spec.trials = o.trials;
    spec.workers = o.workers;
    return spec;
}

void emit(const bim::ExperimentSpec& spec, const bim::CsvTable& table)
{
    if (!spec.out_path) {
        table.write(std::cout);
        return;
    }
    std::ofstream out(*spec.out_path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot open output file '" + *spec.out_path + "'");
    table.write(out);
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Blind interference management simulator"};
    app.require_subcommand(1);

    Options opts;
    const std::vector<std::pair<std::string, std::string>> commands = {
        {"dof", "closed-form DoF table"},
        {"rate", "ergodic sum rate of the scheme and the TDMA-OFDMA baseline"},
        {"simulate", "end-to-end precode/receive/decode run"},
        {"sweep", "ergodic rates along one config axis"},
        {"verify", "rank and decomposition checks"},
        {"fig3", "sum spectral efficiency versus SNR for several K"},
        {"fig5", "per-cell spectral efficiency versus user distance"}};
    std::vector<CLI::App*> subs;
    for (const auto& [name, help] : commands) {
        CLI::App* cmd = app.add_subcommand(name, help);
        add_common(cmd, opts);
        subs.push_back(cmd);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        for (CLI::App* cmd : subs) {
            if (!cmd->parsed())
                continue;
            const std::string name = cmd->get_name();
            const bim::ExperimentSpec spec = to_spec(name, opts, cmd);
            if (name == "dof")
                emit(spec, bim::run_dof(spec));
            else if (name == "rate")
                emit(spec, bim::run_rate(spec));
            else if (name == "simulate")
                emit(spec, bim::run_simulate(spec));
            else if (name == "sweep")
                emit(spec, bim::run_sweep(spec));
            else if (name == "fig3")
                emit(spec, bim::run_fig3(spec));
            else if (name == "fig5")
                emit(spec, bim::run_fig5(spec));
            else if (name == "verify") {
                const auto res = bim::run_verify(spec);
                emit(spec, res.table);
                if (!res.all_pass) {
                    std::cerr << "verify: at least one check failed\n";
                    return 1;
                }
            }
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
