/*
 * Copyright 2026 The apeval Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "apeval/config.hpp"
#include "apeval/errors.hpp"
#include "apeval/stages.hpp"

namespace {

struct CliOptions {
    std::string config_path;
    std::vector<std::string> providers;
    std::string dataset;
    int cycles = -1;
    std::vector<std::string> with_metadata;
    bool offline = false;
};

void add_common(CLI::App* cmd, CliOptions& options) {
    cmd->add_option("--config", options.config_path, "Experiment config file (JSON)")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--providers", options.providers, "Restrict to these provider ids")
        ->delimiter(',');
    cmd->add_option("--dataset", options.dataset, "Restrict to one dataset by name");
    cmd->add_option("--cycles", options.cycles, "Override the number of AM->AO cycles");
    cmd->add_option("--with-metadata", options.with_metadata,
                    "Metadata settings to run (true,false)")
        ->delimiter(',');
    cmd->add_flag("--offline", options.offline,
                  "Forbid network use; HTTP providers fail on cache misses");
}

apeval::ExperimentConfig effective_config(const CliOptions& options) {
    apeval::ExperimentConfig config = apeval::load_config(options.config_path);
    config.provider_filter = options.providers;
    config.dataset_filter = options.dataset;
    if (options.cycles >= 0) config.n_cycles = static_cast<std::size_t>(options.cycles);
    if (!options.with_metadata.empty()) {
        config.with_metadata.clear();
        for (const std::string& flag : options.with_metadata) {
            if (flag == "true") {
                config.with_metadata.push_back(true);
            } else if (flag == "false") {
                config.with_metadata.push_back(false);
            } else {
                throw apeval::ConfigError("--with-metadata takes true and/or false, got " + flag);
            }
        }
    }
    config.offline = options.offline;
    return config;
}

int run_stage(const char* stage, const CliOptions& options,
              const std::function<apeval::StageResult(const apeval::ExperimentConfig&)>& fn) {
    try {
        const apeval::StageResult result = fn(effective_config(options));
        std::cout << result.stage << ": wrote " << result.run_dir.string() << "\n";
        for (const auto& name : result.manifest.value("outputs", nlohmann::json::array())) {
            std::cout << "  " << name.get<std::string>() << "\n";
        }
        return 0;
    } catch (const apeval::Error& e) {
        std::cerr << "apeval " << stage << ": " << e.what() << "\n";
        return 1;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Authorship-privacy evaluation harness"};
    app.require_subcommand(1);

    CliOptions options;
    int exit_code = 0;

    auto* isolate = app.add_subcommand("isolate", "Standalone AO/AM/AV scores and judges");
    add_common(isolate, options);
    isolate->callback([&] { exit_code = run_stage("isolate", options, apeval::cmd_isolate); });

    auto* pairwise = app.add_subcommand("pairwise", "OM/OV/MO/MV/VO/VM interdependency table");
    add_common(pairwise, options);
    pairwise->callback([&] { exit_code = run_stage("pairwise", options, apeval::cmd_pairwise); });

    auto* cycle = app.add_subcommand("cycle", "Iterative AM->AO trajectories");
    add_common(cycle, options);
    cycle->callback([&] { exit_code = run_stage("cycle", options, apeval::cmd_cycle); });

    auto* topics = app.add_subcommand("topics", "Per-round LDA tables and drift");
    add_common(topics, options);
    topics->callback([&] { exit_code = run_stage("topics", options, apeval::cmd_topics); });

    auto* report = app.add_subcommand("report", "Consolidated markdown + JSON summary");
    add_common(report, options);
    report->callback([&] { exit_code = run_stage("report", options, apeval::cmd_report); });

    CLI11_PARSE(app, argc, argv);
    return exit_code;
}
