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

#include <map>
#include <string>
#include <vector>

#include "apeval/corpus.hpp"

namespace apeval {

enum class TaskKind { verify, mimic, obfuscate };

std::string task_kind_name(TaskKind kind);
TaskKind task_kind_from_name(const std::string& name);

/// The four prompt dimensions sent to a provider. Rendering is pure: the same
/// inputs always produce byte-identical specs.
struct PromptSpec {
    TaskKind task_kind = TaskKind::verify;
    std::string system_text;
    std::string instruction_text;
    std::string context_text;
    std::string task_text;
};

/// Structured view of what went into a PromptSpec. Carried alongside so mock
/// providers can act on the raw pieces without re-parsing prose; everything
/// here is already embedded in the spec's four dimensions, so it adds no
/// entropy to the request hash.
struct PromptPayload {
    std::string input_text;
    std::vector<std::string> sample_texts;
    std::vector<bool> sample_by_author;  // parallel to sample_texts
    std::string claimed_author_id;
    std::string claimed_author_name;
    int target_words = 0;
};

struct RenderedPrompt {
    PromptSpec spec;
    PromptPayload payload;
};

/// Persona sentences in fixed attribute order (sex, academic background,
/// proficiency, origin/environment). An empty attribute map renders to "".
std::string render_author_identification(const AttrMap& metadata);

/// Total characters allowed across the four prompt dimensions before sample
/// writings are shortened, longest first. 0 disables the cap.
struct PromptBudget {
    std::size_t max_chars = 0;
    std::size_t min_sample_chars = 64;
};

/// Render the task prompt from a context and an input text. target_words is
/// required (>= 1) for mimic and obfuscate and ignored for verify.
RenderedPrompt render_prompt(TaskKind task_kind, const Context& context,
                             const std::string& input_text, int target_words,
                             const PromptBudget& budget = {});

}  // namespace apeval
