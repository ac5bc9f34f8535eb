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

#include <filesystem>
#include <string>

#include <json.hpp>

#include "apeval/config.hpp"

namespace apeval {

/// Where a stage run landed and what it recorded. Every invocation writes
/// into a fresh timestamped directory under the configured output dir and
/// registers itself in <output_dir>/latest.json; outputs are never appended
/// to or overwritten.
struct StageResult {
    std::string stage;
    std::filesystem::path run_dir;
    nlohmann::json manifest;
};

/// Isolation scores for all providers x corpora -> isolation.csv, judges.json.
StageResult cmd_isolate(const ExperimentConfig& config);

/// Six pairwise directions x actors x datasets x metadata flags ->
/// pairwise.csv (+ verification_pool.csv). Uses judges.json from the latest
/// isolate run, the config override, or computes judges inline.
StageResult cmd_pairwise(const ExperimentConfig& config);

/// Per-document AM->AO trajectories -> cycles.csv, series.json and per-round
/// dumps under rounds/.
StageResult cmd_cycle(const ExperimentConfig& config);

/// Per-round LDA top-word tables and drift vs. the original-corpus model ->
/// topics.csv, drift.csv. Needs the rounds dumps of a cycle run.
StageResult cmd_topics(const ExperimentConfig& config);

/// Consolidated markdown + JSON summary over whatever stage outputs exist.
StageResult cmd_report(const ExperimentConfig& config);

/// Latest run directory of a stage (from latest.json). Throws
/// MissingStageOutput when the stage has not run.
std::filesystem::path latest_run_dir(const std::filesystem::path& output_dir,
                                     const std::string& stage);

/// Effective cache directory: APEVAL_CACHE_DIR overrides the config value.
std::filesystem::path effective_cache_dir(const ExperimentConfig& config);

}  // namespace apeval
