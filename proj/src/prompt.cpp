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

#include "apeval/prompt.hpp"

#include <algorithm>
#include <cstddef>

#include "apeval/errors.hpp"

namespace apeval {

std::string task_kind_name(TaskKind kind) {
    switch (kind) {
        case TaskKind::verify: return "verify";
        case TaskKind::mimic: return "mimic";
        case TaskKind::obfuscate: return "obfuscate";
    }
    return "unknown";
}

TaskKind task_kind_from_name(const std::string& name) {
    if (name == "verify") return TaskKind::verify;
    if (name == "mimic") return TaskKind::mimic;
    if (name == "obfuscate") return TaskKind::obfuscate;
    throw Error("unknown task kind: " + name);
}

namespace {

struct Pronouns {
    std::string subject;     // She / He / They
    std::string possessive;  // Her / His / Their
};

Pronouns pronouns_for(const AttrMap& metadata) {
    auto it = metadata.find("sex");
    if (it != metadata.end()) {
        if (it->second == "F" || it->second == "f") return {"She", "Her"};
        if (it->second == "M" || it->second == "m") return {"He", "His"};
    }
    return {"They", "Their"};
}

std::string language_environment_expansion(const std::string& env) {
    if (env == "ESL") return "English as a Second Language";
    if (env == "EFL") return "English as a Foreign Language";
    if (env == "NS") return "Native Speaker";
    return env;
}

}  // namespace

std::string render_author_identification(const AttrMap& metadata) {
    std::vector<std::string> sentences;
    const Pronouns who = pronouns_for(metadata);

    if (auto it = metadata.find("sex"); it != metadata.end()) {
        if (it->second == "F" || it->second == "f") {
            sentences.push_back("The author is female.");
        } else if (it->second == "M" || it->second == "m") {
            sentences.push_back("The author is male.");
        } else {
            sentences.push_back("The author's sex is " + it->second + ".");
        }
    }
    if (auto it = metadata.find("academic_genre"); it != metadata.end()) {
        sentences.push_back(who.possessive + " academic background is in the " + it->second + ".");
    }
    if (auto it = metadata.find("cefr"); it != metadata.end()) {
        sentences.push_back(who.possessive + " English proficiency level is CEFR " + it->second + ".");
    }
    {
        auto country = metadata.find("country");
        auto env = metadata.find("lang_env");
        if (country != metadata.end() && env != metadata.end()) {
            sentences.push_back(who.subject + " is from " + country->second + ", an " +
                                env->second + " environment (" +
                                language_environment_expansion(env->second) + ").");
        } else if (country != metadata.end()) {
            sentences.push_back(who.subject + " is from " + country->second + ".");
        } else if (env != metadata.end()) {
            sentences.push_back(who.subject + " writes in an " + env->second + " environment (" +
                                language_environment_expansion(env->second) + ").");
        }
    }

    std::string persona;
    for (std::size_t i = 0; i < sentences.size(); ++i) {
        if (i > 0) persona.push_back(' ');
        persona += sentences[i];
    }
    return persona;
}

namespace {

std::string numbered_samples(const std::vector<std::string>& texts,
                             const std::vector<bool>& by_author, bool label) {
    std::string block;
    for (std::size_t i = 0; i < texts.size(); ++i) {
        block.push_back('\n');
        block += std::to_string(i + 1);
        block += ". ";
        if (label) {
            block += by_author[i] ? "(by the author) " : "(by others) ";
        }
        block += texts[i];
    }
    return block;
}

std::size_t spec_length(const PromptSpec& spec) {
    return spec.system_text.size() + spec.instruction_text.size() + spec.context_text.size() +
           spec.task_text.size();
}

PromptSpec assemble(TaskKind kind, const Context& context,
                    const std::vector<std::string>& samples,
                    const std::vector<bool>& by_author, const std::string& input_text,
                    int target_words) {
    PromptSpec spec;
    spec.task_kind = kind;

    std::size_t n_by_author = 0;
    for (bool b : by_author) {
        if (b) ++n_by_author;
    }
    const std::size_t n_by_others = samples.size() - n_by_author;
    const std::string k = std::to_string(samples.size());
    const std::string avg = std::to_string(target_words);

    switch (kind) {
        case TaskKind::verify:
            spec.system_text =
                "You are a judge designed to verify the attribution of a human-author written "
                "text.";
            spec.instruction_text =
                "You are given sample texts including " + std::to_string(n_by_author) +
                " writings from the author";
            if (n_by_others > 0) {
                spec.instruction_text +=
                    " and " + std::to_string(n_by_others) + " writings from others";
            }
            spec.instruction_text +=
                ". Analyze the writing styles of the input text, disregarding the differences in "
                "topic and content. Reasoning based on linguistic features such as phrasal verbs, "
                "modal verbs, punctuation, rare words, affixes, quantities, humor, sarcasm, "
                "typographical errors, and misspellings. Your task is to verify if the input text "
                "was written by " +
                context.author_name +
                ". As output, exclusively return yes or no without any accompanying explanations "
                "or comments.";
            break;
        case TaskKind::mimic:
            spec.system_text =
                "You are an emulator designed to replicate the writing style of a human author.";
            spec.instruction_text =
                "You are given " + k +
                " sample writings from the author. The goal of this task is to mimic the author's "
                "writing style while paying meticulous attention to lexical richness and "
                "diversity, sentence structure, punctuation style, special character style, "
                "expressions and idioms, overall tone, emotion, and mood, or any other relevant "
                "aspect of writing style established by the author. Your task is to generate a " +
                avg +
                "-word continuation that seamlessly blends with the provided input text. Ensure "
                "that the continuation is indistinguishable from both the input text and the " +
                k +
                " sample writings by the author. As output, exclusively return the text "
                "completion without any accompanying explanations or comments.";
            break;
        case TaskKind::obfuscate:
            spec.system_text =
                "You are an emulator designed to hide the writing style of a human author.";
            spec.instruction_text =
                "You are given " + k +
                " sample writings from an author. The goal of this task is to conceal the "
                "author's writing style by carefully modifying lexical richness and diversity, "
                "sentence structure, punctuation patterns, special character usage, expressions "
                "and idioms, overall tone, emotion, mood, and any other distinguishing stylistic "
                "elements. Your task is to generate " +
                avg +
                "-word continuation that has writing style significantly different from the "
                "provided input text. Strive to make the rewritten text distinguishable from both "
                "the input text and the " +
                k +
                " sample writings by the author. As output, exclusively return the text "
                "completion without any accompanying explanations or comments.";
            break;
    }

    if (context.metadata_text) {
        spec.context_text = "Here is some information about the author: " + *context.metadata_text +
                            ". ";
    }
    if (kind == TaskKind::verify) {
        // sample labels resolve which group each writing belongs to
        spec.context_text += "The " + k + " sample writings:" +
                             numbered_samples(samples, by_author, /*label=*/true);
    } else {
        spec.context_text += "The " + k + " sample writings from an author:" +
                             numbered_samples(samples, by_author, /*label=*/false);
    }

    spec.task_text = "The input text is: " + input_text + ".";
    return spec;
}

}  // namespace

RenderedPrompt render_prompt(TaskKind task_kind, const Context& context,
                             const std::string& input_text, int target_words,
                             const PromptBudget& budget) {
    if (context.sample_docs.empty()) {
        throw MissingSamples();
    }
    if (task_kind != TaskKind::verify && target_words < 1) {
        throw Error("target_words must be >= 1 for mimic/obfuscate");
    }

    RenderedPrompt rendered;
    rendered.payload.input_text = input_text;
    rendered.payload.claimed_author_id = context.author_id;
    rendered.payload.claimed_author_name = context.author_name;
    rendered.payload.target_words = target_words;
    for (std::size_t i = 0; i < context.sample_docs.size(); ++i) {
        rendered.payload.sample_texts.push_back(context.sample_docs[i].text);
        rendered.payload.sample_by_author.push_back(context.provenance[i].second ==
                                                    context.author_id);
    }

    rendered.spec = assemble(task_kind, context, rendered.payload.sample_texts,
                             rendered.payload.sample_by_author, input_text, target_words);

    // Shorten the longest sample until the four dimensions fit the budget.
    if (budget.max_chars > 0) {
        auto& samples = rendered.payload.sample_texts;
        while (spec_length(rendered.spec) > budget.max_chars) {
            auto longest = std::max_element(
                samples.begin(), samples.end(),
                [](const std::string& a, const std::string& b) { return a.size() < b.size(); });
            if (longest == samples.end() || longest->size() <= budget.min_sample_chars) break;
            const std::size_t cut = std::max(budget.min_sample_chars, longest->size() / 2);
            longest->resize(cut);
            rendered.spec = assemble(task_kind, context, samples,
                                     rendered.payload.sample_by_author, input_text, target_words);
        }
    }
    return rendered;
}

}  // namespace apeval
