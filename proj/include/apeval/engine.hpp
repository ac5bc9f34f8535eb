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
#include <optional>
#include <string>
#include <vector>

#include "apeval/corpus.hpp"
#include "apeval/prompt.hpp"
#include "apeval/provider.hpp"

namespace apeval {

/// Routes each provider to its transport; every call is counted so stages can
/// prove cache replays never touch a backend.
class TransportSet {
public:
    TransportSet() : counting_mock_(mock_), counting_http_(http_) {}

    Transport& for_provider(const ProviderHandle& provider) {
        return provider.kind == ProviderKind::mock ? static_cast<Transport&>(counting_mock_)
                                                   : static_cast<Transport&>(counting_http_);
    }
    std::size_t total_calls() const { return counting_mock_.calls() + counting_http_.calls(); }

private:
    MockTransport mock_;
    HttpTransport http_;
    CountingTransport counting_mock_;
    CountingTransport counting_http_;
};

/// Shared machinery behind every experiment stage: the cache, transports,
/// generation options, prompt budget and the root seed for sub-seed
/// derivation.
struct ExperimentEnv {
    ExperimentEnv(const GenerationCache& cache, std::uint64_t root_seed)
        : cache(&cache), root_seed(root_seed) {}

    const GenerationCache* cache;
    TransportSet transports;
    GenerateOptions gen_options;
    PromptBudget budget;
    std::uint64_t root_seed = 0;

    GenerationRecord run(const ProviderHandle& provider, const RenderedPrompt& prompt) {
        return generate(provider, prompt, *cache, transports.for_provider(provider), gen_options);
    }
};

/// One generated text with its lineage.
struct TransformRecord {
    TaskKind task_kind = TaskKind::mimic;
    std::string provider_id;
    int step_index = 0;
    std::string parent_id;    // doc_id or synthetic step id of the input
    std::string parent_text;  // exactly what the transform consumed
    std::string output_text;
    std::string request_hash;
    bool retrieved_from_cache = false;
};

/// Apply a mimic/obfuscate prompt to input_text against the given context.
TransformRecord transform_text(ExperimentEnv& env, const ProviderHandle& provider,
                               TaskKind task_kind, const Context& context,
                               const std::string& parent_id, const std::string& input_text,
                               int target_words, int step_index = 0);

/// Context whose samples are bare texts claimed to be the author's; used when
/// transformed texts replace the original sample writings.
Context context_from_texts(const Context& base, const std::vector<std::string>& texts,
                           const std::string& id_suffix);

/// Outcome of one verification probe.
struct AvOutcome {
    Verdict verdict;
    bool parsed = false;   // false means the response was unparseable
    bool correct = false;  // accepted == (true author == claimed author)
};

AvOutcome run_verification(ExperimentEnv& env, const ProviderHandle& provider,
                           const Context& context, const std::string& probe_text,
                           const std::string& true_author);

}  // namespace apeval
