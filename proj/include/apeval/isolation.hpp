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

namespace apeval {

/// One standalone-performance row: AO/AM rows carry ppl_norm and sim, AV rows
/// carry accuracy.
struct IsolationScore {
    std::string provider_id;
    TaskKind task = TaskKind::obfuscate;
    std::optional<double> ppl_norm;
    std::optional<double> sim;
    std::optional<double> accuracy;
    std::size_t n_evaluated = 0;
};

/// The per-task best performer, chosen from isolation scores.
struct JudgeAssignment {
    std::string ao_judge;
    std::string am_judge;
    std::string av_judge;
    std::string basis_kind = "isolation";  // or "override"
    std::vector<IsolationScore> basis;
};

/// How AM rows are ranked: the table arrow reads plain ascending PPL; the
/// alternative ranks by closeness of the PPL ratio to 1.
enum class AmRankMode { ppl_ascending, ppl_ratio_to_one };

/// AO judge: max ppl_norm, ties by min sim then provider id. AM judge: min
/// ppl_norm (or min |ppl_norm - 1|), ties by max sim then provider id. AV
/// judge: max accuracy, ties by provider id. Pure in the row order.
JudgeAssignment select_judges(const std::vector<IsolationScore>& scores,
                              AmRankMode am_mode = AmRankMode::ppl_ascending);

struct IsolationOptions {
    std::size_t context_samples = 5;
    std::size_t eval_docs_per_author = 2;
    std::size_t av_probes_per_class = 2;  // genuine and imposter probes per author
    bool with_metadata = false;
    std::optional<int> target_words;
};

/// Runs Eq. 1-3 for one provider over one dataset.
class IsolationRunner {
public:
    IsolationRunner(ExperimentEnv& env, const StyleScorer& scorer, IsolationOptions options);

    /// Obfuscate one document and measure d(output, D_a).
    std::pair<TransformRecord, MetricReport> run_ao(const ProviderHandle& provider,
                                                    const Document& doc, const Context& context);
    /// Mimic one document and measure d(output, D_a).
    std::pair<TransformRecord, MetricReport> run_am(const ProviderHandle& provider,
                                                    const Document& doc, const Context& context);
    /// Verify one probe against a claimed-author context.
    AvOutcome run_av(const ProviderHandle& provider, const Document& doc, const Context& context,
                     const std::string& true_author);

    /// All three isolation rows for one provider, aggregated over the seeded
    /// evaluation set (AO/AM) and balanced probe set (AV).
    std::vector<IsolationScore> evaluate_provider(const ProviderHandle& provider);

    /// The seeded per-author evaluation documents this runner uses.
    std::vector<std::size_t> eval_docs(const std::string& author_id) const;

private:
    int target_words_for(const std::string& author_id) const;

    ExperimentEnv* env_;
    const StyleScorer* scorer_;
    IsolationOptions options_;
};

}  // namespace apeval
