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

#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "bim/experiments.hpp"

using namespace bim;

namespace {

int error_line(const std::string& text)
{
    try {
        build_config(parse_config_text(text));
    } catch (const ConfigError& e) {
        return e.line();
    }
    return -1;
}

} // namespace

TEST_CASE("config parsing")
{
    const std::string text = "# worked example\n"
                             "cells = 3\n"
                             "\n"
                             "users = 3, 2, 1   # per cell\n"
                             "cir_len = 8,2,2; 2,6,2; 2,2,5\n"
                             "snr_db = 12.5\n"
                             "subblocks = 4\n"
                             "seed = 18446744073709551615\n"
                             "symbol_model = qpsk\n"
                             "pdp_decay = 0.25\n";
    const ExperimentConfig c = build_config(parse_config_text(text));
    CHECK(c.system.cells == 3);
    CHECK(c.system.users_per_cell == std::vector<int>{3, 2, 1});
    CHECK(c.system.cir_len[1][1] == 6);
    CHECK(c.system.cir_len[2][0] == 2);
    CHECK(c.system.snr_db == 12.5);
    CHECK(c.system.subblocks == 4);
    CHECK(c.system.seed == 18446744073709551615ULL);
    CHECK(c.system.symbol_model == SymbolModel::qpsk);
    CHECK(c.deployment.default_pdp_decay == 0.25);
    CHECK(c.entries.size() == 8);
    CHECK(c.entries[1].line == 4);

    const ExperimentConfig sym = build_config(parse_config_text("cells=2\nusers=2\ndesired_len=4\nici_len=2\n"));
    CHECK(sym.system.cir_len == std::vector<std::vector<int>>{{4, 2}, {2, 4}});
}

TEST_CASE("config errors carry the line number")
{
    CHECK(error_line("cells = 2\nbogus = 1\n") == 2);
    CHECK(error_line("cells = 2\ncells = 3\n") == 2);
    CHECK(error_line("cells = 2\n\nusers\n") == 3);
    CHECK(error_line("cells = 2\nusers = \n") == 2);
    CHECK(error_line("cells = 2\nsnr_db = loud\n") == 2);
    CHECK(error_line("cells = 2\nsubblocks = 1.5\n") == 2);
    CHECK(error_line("cells = 0\n") == 1);
    CHECK(error_line("cells = 2\nusers = 1,2,3\n") == 2);
    CHECK(error_line("cells = 2\ncir_len = 4,2,2\n") == 2);
    CHECK(error_line("cells = 2\n# c\ndesired_len = 0\n") == 3);
    CHECK(error_line("cells = 2\nici_len = 3\nsubblocks = 0\n") == 3);
    CHECK(error_line("cells = 2\nusers = 0\n") == 2);
    CHECK(error_line("symbol_model = bpsk\n") == 1);
    CHECK(error_line("seed = -4\n") == 1);

    try {
        build_config(parse_config_text("cells = 2\nbogus = 1\n"));
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).rfind("line 2: ", 0) == 0);
    }
    CHECK_THROWS_AS(load_config("/nonexistent/config.txt"), ConfigError);
}

TEST_CASE("overrides re-derive the configuration")
{
    const ExperimentConfig base = build_config(parse_config_text("cells = 2\ncir_len = 4,2;2,4\nusers = 2\n"));
    const ExperimentConfig longer = with_override(base, "desired_len", "8");
    CHECK(longer.system.cir_len == std::vector<std::vector<int>>{{8, 1}, {1, 8}});
    const ExperimentConfig more = with_override(base, "users", "5");
    CHECK(more.system.users_per_cell == std::vector<int>{5, 5});
    CHECK(more.system.cir_len[0][1] == 2);
    CHECK_THROWS_AS(with_override(base, "nope", "1"), ConfigError);
    CHECK_THROWS_AS(with_override(base, "users", "0"), ConfigError);
}

TEST_CASE("number lists and sweeps")
{
    CHECK(parse_number_list("0, 5,10") == std::vector<double>{0.0, 5.0, 10.0});
    CHECK_THROWS_AS(parse_number_list(" "), ConfigError);
    CHECK_THROWS_AS(parse_number_list("1,,2"), ConfigError);

    const SweepAxis a = parse_sweep("desired_len=4,8,16");
    CHECK(a.key == "desired_len");
    CHECK(a.values == std::vector<std::string>{"4", "8", "16"});
    CHECK_THROWS_AS(parse_sweep("desired_len="), std::invalid_argument);
    CHECK_THROWS_AS(parse_sweep("colour=1,2"), std::invalid_argument);
    CHECK_THROWS_AS(parse_sweep("desired_len"), std::invalid_argument);
}

TEST_CASE("CSV formatting")
{
    CHECK(format_number(0.5) == "0.5");
    CHECK(format_number(2.0) == "2");
    CHECK(format_number(-1e-20) == "-1e-20");
    CsvTable t;
    t.header = {"a", "b"};
    t.rows = {{"1", "x"}, {"2", "y"}};
    CHECK(t.str() == "a,b\n1,x\n2,y\n");
}

TEST_CASE("DoF table")
{
    const std::string path = "test_config_cli_example.txt";
    {
        std::ofstream f(path);
        f << "cells = 4\nusers = 2\ndesired_len = 4\nici_len = 2\n";
    }
    ExperimentSpec spec;
    spec.command = "dof";
    spec.config_path = path;
    const CsvTable base = run_dof(spec);
    REQUIRE(base.rows.size() == 1);
    CHECK(base.rows[0][5] == "2");

    {
        std::ofstream f(path);
        f << "cells = 2\nusers = 40\nici_len = 2\n";
    }
    spec.sweep = parse_sweep("desired_len=4,8,16,32");
    const CsvTable sweep = run_dof(spec);
    REQUIRE(sweep.rows.size() == 4);
    double prev = 0.0;
    for (const auto& row : sweep.rows) {
        const double per_cell = std::stod(row.back());
        CHECK(per_cell > prev);
        CHECK(per_cell < 1.0);
        prev = per_cell;
    }
    CHECK(prev == doctest::Approx(1.0 - 2.0 / 32.0));
    std::remove(path.c_str());
}

TEST_CASE("experiments are deterministic")
{
    ExperimentSpec spec;
    spec.command = "fig3";
    spec.trials = 5;
    spec.snr_db = {0.0, 20.0};
    spec.seed = 99;
    const std::string a = run_fig3(spec).str();
    spec.workers = 1;
    CHECK(run_fig3(spec).str() == a);
    spec.seed = 100;
    CHECK(run_fig3(spec).str() != a);

    ExperimentSpec verify;
    verify.command = "verify";
    verify.trials = 10;
    const VerifyOutcome v = run_verify(verify);
    CHECK(v.all_pass);
    CHECK(v.table.rows.size() == 5);
}
