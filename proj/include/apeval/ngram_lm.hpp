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
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace apeval {

/// Absolute-discount interpolated n-gram language model over metric tokens.
///
/// Each document is padded with order-1 begin markers and closed with one
/// end-of-text token; the end token is part of the vocabulary and of every
/// scored sequence. Unknown words map to a reserved unk symbol, and the
/// interpolation bottoms out at the uniform distribution over
/// vocabulary + unk, so conditionals sum to one for every context.
class NgramLm {
public:
    static constexpr const char* kBos = "<s>";
    static constexpr const char* kEos = "</s>";
    static constexpr const char* kUnk = "<unk>";

    /// Train on raw document texts. discount must lie in [0, 1).
    static NgramLm train(const std::vector<std::string>& docs, std::size_t order,
                         double discount);

    /// P(word | history); history is the raw preceding tokens (most recent
    /// last), longer histories are truncated to order - 1.
    double probability(const std::string& word, const std::vector<std::string>& history) const;

    /// exp of the mean negative log probability over the text's tokens plus
    /// the end-of-text marker.
    double perplexity(const std::string& text) const;

    std::size_t order() const { return order_; }
    double discount() const { return discount_; }
    /// Distinct trained outcome tokens (end marker included, unk excluded).
    std::size_t vocab_size() const { return vocabulary_.size(); }
    bool in_vocabulary(const std::string& token) const { return vocabulary_.count(token) > 0; }

private:
    struct ContextCounts {
        std::unordered_map<std::string, std::size_t> word_counts;
        std::size_t total = 0;
    };

    double level_probability(const std::string& word, const std::vector<std::string>& padded,
                             std::size_t position, std::size_t level) const;

    std::size_t order_ = 3;
    double discount_ = 0.75;
    std::unordered_set<std::string> vocabulary_;
    // levels_[k-1] maps a (k-1)-token history (joined with '\x1f') to counts
    std::vector<std::unordered_map<std::string, ContextCounts>> levels_;
};

/// perplexity(candidate) / mean perplexity of the originals.
double ppl_normalized(const NgramLm& lm, const std::string& candidate,
                      const std::vector<std::string>& originals);

}  // namespace apeval
