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
#include "apeval/scorer.hpp"
#include "apeval/stylometry.hpp"

namespace apeval {

enum class Direction { OM, OV, MO, MV, VO, VM };

std::string direction_name(Direction direction);

struct JudgeHandles {
    ProviderHandle ao;
    ProviderHandle am;
    ProviderHandle av;
};

/// One cell of the pairwise tables: a direction evaluated for one actor on
/// one dataset under one metadata setting. OV/MV carry accuracy; the other
/// directions carry KL and SIM.
struct PairwiseResult {
    Direction direction = Direction::OM;
    std::string actor_provider;
    std::string judge_provider;
    std::string dataset;
    bool with_metadata = false;
    MetricReport report;
    std::optional<double> accuracy;
    std::size_t n = 0;
};

struct InterplayOptions {
    std::size_t context_samples = 5;
    std::size_t eval_docs_per_author = 2;
    std::size_t pool_author_docs = 10;
    std::size_t pool_imposter_docs = 10;
    std::optional<int> target_words;
};

/// The verifier-actor's pass over a candidate pool.
struct PoolEvaluation {
    std::vector<PoolItem> pool;
    std::vector<bool> outcomes;  // accepted as the target author
    ConfusionCounts counts;
    std::size_t unparseable = 0;
};

/// Runs the six pairwise interdependency measures with fixed judges.
class InterplayRunner {
public:
    InterplayRunner(ExperimentEnv& env, const StyleScorer& scorer, JudgeHandles judges,
                    InterplayOptions options);

    // Per-document operations. `context` is the document's perfect context;
    // the actor transforms each sample writing and the judge works from the
    // transformed context.
    MetricReport om_influence(const ProviderHandle& actor, const Document& doc,
                              const Context& context);
    double ov_influence(const ProviderHandle& actor, const Document& doc, const Context& context);
    MetricReport mo_influence(const ProviderHandle& actor, const Document& doc,
                              const Context& context);
    double mv_influence(const ProviderHandle& actor, const Document& doc, const Context& context);
    MetricReport vo_influence(const ProviderHandle& verifier_actor, const Document& doc,
                              const Context& perfect_ctx, const Context& noisy_ctx);
    MetricReport vm_influence(const ProviderHandle& verifier_actor, const Document& doc,
                              const Context& perfect_ctx, const Context& noisy_ctx);

    /// Verify every pool document as the target author; the accepted ones
    /// become the noisy context.
    PoolEvaluation evaluate_pool(const ProviderHandle& verifier, const std::string& author_id,
                                 bool with_metadata,
                                 const std::vector<std::string>& excluded_doc_ids);

    /// A full table cell, aggregated over the seeded evaluation documents of
    /// every author (doc_id order).
    PairwiseResult run_cell(Direction direction, const ProviderHandle& actor, bool with_metadata);

    /// Pool confusion counts per author, summed; emitted with precision and
    /// recall alongside the VO/VM cells.
    ConfusionCounts pool_counts(const ProviderHandle& verifier, bool with_metadata);

    /// Replace a context's samples with the actor's transforms of them.
    Context transformed_context(const ProviderHandle& actor, TaskKind task_kind,
                                const Context& context);

    std::vector<std::size_t> eval_docs(const std::string& author_id) const;
    const JudgeHandles& judges() const { return judges_; }

private:
    MetricReport aggregate_outputs(
        const std::vector<std::pair<std::string, std::string>>& author_outputs) const;
    Context perfect_context(const Document& doc, bool with_metadata) const;
    Context noisy_context_for(const ProviderHandle& verifier, const std::string& author_id,
                              bool with_metadata);
    int target_words_for(const std::string& author_id) const;

    ExperimentEnv* env_;
    const StyleScorer* scorer_;
    JudgeHandles judges_;
    InterplayOptions options_;
};

}  // namespace apeval
