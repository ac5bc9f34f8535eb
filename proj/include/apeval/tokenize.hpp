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

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace apeval {

// Two tokenizations coexist on purpose: word counts in corpus records are
// plain whitespace splits, while every stylometric model (TF-IDF, n-gram LM,
// LDA) shares metric_tokens so their scores stay mutually comparable.

/// Whitespace-delimited token count.
std::size_t whitespace_word_count(std::string_view text);

/// Whitespace-delimited tokens, verbatim.
std::vector<std::string> whitespace_tokens(std::string_view text);

/// Metric tokens: lowercased, split on non-alphanumeric runs. Bytes >= 0x80
/// are treated as word characters so UTF-8 sequences survive intact.
std::vector<std::string> metric_tokens(std::string_view text);

/// Sentence count: boundaries are '.', '!' or '?' followed by whitespace or
/// end of text; a trailing unterminated fragment counts as one sentence.
std::size_t sentence_count(std::string_view text);

/// Text stripped of leading/trailing whitespace.
std::string_view trimmed(std::string_view text);

}  // namespace apeval
