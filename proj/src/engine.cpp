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

#include "apeval/engine.hpp"

#include "apeval/tokenize.hpp"

namespace apeval {

TransformRecord transform_text(ExperimentEnv& env, const ProviderHandle& provider,
                               TaskKind task_kind, const Context& context,
                               const std::string& parent_id, const std::string& input_text,
                               int target_words, int step_index) {
    const RenderedPrompt prompt =
        render_prompt(task_kind, context, input_text, target_words, env.budget);
    const GenerationRecord gen = env.run(provider, prompt);

    TransformRecord record;
    record.task_kind = task_kind;
    record.provider_id = provider.provider_id;
    record.step_index = step_index;
    record.parent_id = parent_id;
    record.parent_text = input_text;
    record.output_text = gen.output_text;
    record.request_hash = gen.request_hash;
    record.retrieved_from_cache = gen.retrieved_from_cache;
    return record;
}

Context context_from_texts(const Context& base, const std::vector<std::string>& texts,
                           const std::string& id_suffix) {
    Context ctx;
    ctx.author_id = base.author_id;
    ctx.author_name = base.author_name;
    ctx.metadata_text = base.metadata_text;
    ctx.purity = Purity::perfect;
    for (std::size_t i = 0; i < texts.size(); ++i) {
        Document doc;
        doc.doc_id = (i < base.sample_docs.size() ? base.sample_docs[i].doc_id
                                                  : std::to_string(i)) +
                     id_suffix;
        doc.author_id = base.author_id;
        doc.text = texts[i];
        doc.word_count = whitespace_word_count(texts[i]);
        ctx.sample_docs.push_back(std::move(doc));
        ctx.provenance.emplace_back(ctx.sample_docs.back().doc_id, base.author_id);
    }
    return ctx;
}

AvOutcome run_verification(ExperimentEnv& env, const ProviderHandle& provider,
                           const Context& context, const std::string& probe_text,
                           const std::string& true_author) {
    const RenderedPrompt prompt =
        render_prompt(TaskKind::verify, context, probe_text, /*target_words=*/0, env.budget);
    const GenerationRecord gen = env.run(provider, prompt);

    AvOutcome outcome;
    if (auto verdict = try_parse_verdict(gen.output_text)) {
        outcome.verdict = *verdict;
        outcome.parsed = true;
    } else {
        // unparseable responses count as rejection, never as acceptance
        outcome.verdict = {false, gen.output_text};
        outcome.parsed = false;
    }
    outcome.correct = outcome.verdict.accepted == (true_author == context.author_id);
    return outcome;
}

}  // namespace apeval
