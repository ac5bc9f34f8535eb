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

#include <optional>
#include <string>
#include <vector>

#include "apeval/engine.hpp"
#include "apeval/interplay.hpp"
#include "apeval/scorer.hpp"

namespace apeval {

/// One transformation step of a trajectory. AM steps have odd step_order,
/// AO steps even; step_order = 2*(cycle_index-1) + (1 for AM, 2 for AO).
struct CycleStep {
    std::size_t cycle_index = 0;
    TaskKind step_kind = TaskKind::mimic;  // mimic = AM, obfuscate = AO
    std::size_t step_order = 0;            // 0 marks the baseline record
    TransformRecord text;
    double verification_acc = 0.0;
    double kl_vs_original = 0.0;
    double sim_vs_original = 0.0;
    std::optional<double> human_likeness;
};

/// "AM"/"AO" for steps, "original" for the baseline.
std::string step_kind_label(const CycleStep& step);

struct Trajectory {
    std::string doc_id;
    std::string author_id;
    std::string dataset;
    bool with_metadata = false;
    std::size_t n_cycles = 0;
    CycleStep original_baseline;
    std::vector<CycleStep> steps;  // 2 * n_cycles when no step failed
    std::optional<std::string> abort_reason;
};

struct CycleOptions {
    std::size_t n_cycles = 5;
    bool with_metadata = false;
    std::optional<int> target_words;
    /// Default: verify the original document with the step output as sample
    /// context. The alternative probes the step output against the author's
    /// perfect context instead.
    bool probe_with_step_output = false;
    std::size_t context_samples = 5;  // only used by the alternative probe
};

/// Alternate AM-judge mimicking and AO-judge obfuscation for n_cycles,
/// measuring verification accuracy, KL and SIM against the author's originals
/// (and detector human-likeness when configured) after every step. The step-s
/// exemplar context is the step-(s-1) output; the generation input stays the
/// original document. A failed step aborts with partial results preserved.
Trajectory run_cycles(ExperimentEnv& env, const StyleScorer& scorer, const JudgeHandles& judges,
                      const Document& doc, const CycleOptions& options,
                      const DetectorHandle* detector = nullptr);

struct StepAggregate {
    std::size_t step_order = 0;
    std::string step_kind;  // "original", "AM" or "AO"
    double acc = 0.0;
    double kl = 0.0;
    double sim = 0.0;
    std::optional<double> human_likeness;
};

/// Mean per step_order over complete trajectories (baseline included).
std::vector<StepAggregate> summarize_trajectories(const std::vector<Trajectory>& trajectories);

}  // namespace apeval
