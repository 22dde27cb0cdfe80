// Copyright 2026 The dimbound Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// dimbound: steer four states from a bipartite source and certify their span.
//
//   dimbound check --scenario s.yaml
//   dimbound run   --scenario s.yaml [--out report.yaml] [--seed N] [--format structured|tabular]
//   dimbound sweep --scenario s.yaml [--out table.csv]   [--seed N] [--format structured|tabular]
//
// Exit codes: 0 success, 1 validation or parse error, 2 numerical failure.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "dimbound/errors.hpp"
#include "dimbound/harness/config.hpp"
#include "dimbound/harness/report.hpp"
#include "dimbound/harness/runner.hpp"

namespace {

using namespace dimbound;
using namespace dimbound::harness;

struct Options {
    std::string scenario;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::optional<ReportFormat> format;
};

void add_common(CLI::App* cmd, Options& opts, bool with_output) {
    cmd->add_option("--scenario", opts.scenario, "Scenario file")->required();
    cmd->add_option("--seed", opts.seed, "Override the scenario seed");
    if (with_output) {
        cmd->add_option("--out", opts.out, "Write output here instead of stdout");
        const std::map<std::string, ReportFormat> formats{{"structured", ReportFormat::structured},
                                                          {"tabular", ReportFormat::tabular}};
        cmd->add_option("--format", opts.format, "structured or tabular")
            ->transform(CLI::CheckedTransformer(formats, CLI::ignore_case));
    }
}

void write_output(const std::string& text, const std::string& path) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw ValidationError("cannot open output file '" + path + "'");
    }
    out << text;
    if (!out) {
        throw ValidationError("failed writing output file '" + path + "'");
    }
}

ScenarioConfig load(const Options& opts) {
    ScenarioConfig config = load_scenario(opts.scenario);
    if (opts.seed) {
        config.seed = *opts.seed;
    }
    return config;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Steered four-state preparation and dimension certification"};
    app.require_subcommand(1);
    Options opts;
    CLI::App* check = app.add_subcommand("check", "Validate a scenario file");
    CLI::App* run = app.add_subcommand("run", "Run one scenario and emit a report");
    CLI::App* sweep = app.add_subcommand("sweep", "Run the scenario's sweep and emit a table");
    add_common(check, opts, false);
    add_common(run, opts, true);
    add_common(sweep, opts, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        const ScenarioConfig config = load(opts);
        if (check->parsed()) {
            std::cout << "ok: " << opts.scenario << "\n";
        } else if (run->parsed()) {
            const ReportDocument doc = run_once(config);
            write_output(emit_report(doc, opts.format.value_or(ReportFormat::structured)), opts.out);
        } else if (sweep->parsed()) {
            if (!config.sweep) {
                throw ValidationError(opts.scenario + ": scenario has no 'sweep' section");
            }
            const auto records = run_sweep(config, *config.sweep);
            write_output(emit_sweep(records, opts.format.value_or(ReportFormat::tabular)), opts.out);
        }
    } catch (const ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 1;
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 1;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
