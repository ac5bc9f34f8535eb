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

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "apeval/isolation.hpp"
#include "apeval/provider.hpp"
#include "apeval/scorer.hpp"

namespace apeval {

struct CorpusConfig {
    std::string name;
    std::filesystem::path path;
};

struct ProviderConfig {
    std::string id;
    std::string kind = "mock";  // mock | http
    std::string endpoint;
    std::string model;
    double temperature = 0.0;
    int max_in_flight = 1;
    // mock-only settings
    std::string rule = "identity";  // identity | word_reverse | synonym_noise | constant
    std::string verify = "oracle";  // oracle | always_yes | always_no | coin_flip | overlap | scripted
    std::uint64_t mock_seed = 0;
    std::string constant_text = "the the the";
    double overlap_threshold = 0.5;
};

struct DetectorConfig {
    std::string id = "detector";
    std::string kind = "mock_vocab";  // mock_vocab | http
    std::string endpoint;
};

struct JudgeOverride {
    std::string ao;
    std::string am;
    std::string av;
};

struct LdaStageConfig {
    std::size_t topics = 10;
    double alpha = 0.0;  // 0 = 50/K
    double beta = 0.01;
    std::size_t iterations = 500;
    std::size_t top_words = 10;
    bool stopwords = false;  // off reproduces the paper-style tables
};

/// The single structured config file driving every stage, plus the CLI
/// overrides applied on top of it. All randomness descends from `seed`.
struct ExperimentConfig {
    std::uint64_t seed = 0;
    std::filesystem::path cache_dir = "cache";
    std::filesystem::path output_dir = "out";

    std::vector<CorpusConfig> corpora;
    std::vector<ProviderConfig> providers;
    std::optional<JudgeOverride> judges;
    std::optional<DetectorConfig> detector;

    std::size_t context_samples = 5;
    std::size_t eval_docs_per_author = 2;
    std::size_t av_probes_per_class = 2;
    std::size_t pool_author_docs = 10;
    std::size_t pool_imposter_docs = 10;
    std::size_t n_cycles = 5;
    std::vector<bool> with_metadata = {true, false};
    bool isolation_with_metadata = false;
    std::optional<int> target_words;  // default: the author's mean word count
    std::size_t prompt_char_budget = 0;

    MetricParams metrics;
    LdaStageConfig lda;
    std::string am_rank_mode = "ppl_ascending";  // or ppl_ratio_to_one
    bool cycle_probe_with_step_output = false;

    // runtime flags (CLI), part of the config snapshot
    bool offline = false;
    std::vector<std::string> provider_filter;
    std::string dataset_filter;
};

ExperimentConfig load_config(const std::filesystem::path& path);

/// Canonical JSON snapshot of the effective config; its SHA-256 is the run's
/// config hash.
nlohmann::json config_snapshot(const ExperimentConfig& config);
std::string config_hash(const ExperimentConfig& config);

/// Provider handle from its config entry. Mock oracle sidecars are attached
/// by the stage once the corpora are loaded.
ProviderHandle make_provider_handle(const ProviderConfig& provider_config);

AmRankMode am_rank_mode_from_name(const std::string& name);

}  // namespace apeval
