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

#include "apeval/ngram_lm.hpp"

#include <cmath>

#include "apeval/errors.hpp"
#include "apeval/tokenize.hpp"

namespace apeval {

namespace {

constexpr char kSep = '\x1f';

std::string history_key(const std::vector<std::string>& padded, std::size_t position,
                        std::size_t length) {
    std::string key;
    for (std::size_t i = position - length; i < position; ++i) {
        if (!key.empty()) key.push_back(kSep);
        key += padded[i];
    }
    return key;
}

}  // namespace

NgramLm NgramLm::train(const std::vector<std::string>& docs, std::size_t order,
                       double discount) {
    if (order < 1) {
        throw Error("n-gram order must be >= 1");
    }
    if (discount < 0.0 || discount >= 1.0) {
        throw Error("discount must lie in [0, 1)");
    }

    NgramLm lm;
    lm.order_ = order;
    lm.discount_ = discount;
    lm.levels_.resize(order);

    std::size_t total_tokens = 0;
    for (const std::string& doc : docs) {
        auto tokens = metric_tokens(doc);
        total_tokens += tokens.size();
        if (tokens.empty()) continue;

        std::vector<std::string> padded(order - 1, kBos);
        padded.insert(padded.end(), std::make_move_iterator(tokens.begin()),
                      std::make_move_iterator(tokens.end()));
        padded.emplace_back(kEos);

        for (std::size_t j = order - 1; j < padded.size(); ++j) {
            lm.vocabulary_.insert(padded[j]);
            for (std::size_t k = 1; k <= order; ++k) {
                ContextCounts& ctx = lm.levels_[k - 1][history_key(padded, j, k - 1)];
                ++ctx.word_counts[padded[j]];
                ++ctx.total;
            }
        }
    }
    if (total_tokens < order) {
        throw CorpusTooSmall(total_tokens, order);
    }
    return lm;
}

double NgramLm::level_probability(const std::string& word,
                                  const std::vector<std::string>& padded, std::size_t position,
                                  std::size_t level) const {
    if (level == 0) {
        return 1.0 / static_cast<double>(vocabulary_.size() + 1);
    }
    const double lower = level_probability(word, padded, position, level - 1);
    auto ctx_it = levels_[level - 1].find(history_key(padded, position, level - 1));
    if (ctx_it == levels_[level - 1].end()) {
        return lower;  // unseen history: fall through to the shorter one
    }
    const ContextCounts& ctx = ctx_it->second;
    auto word_it = ctx.word_counts.find(word);
    const double count = word_it == ctx.word_counts.end()
                             ? 0.0
                             : static_cast<double>(word_it->second);
    const double total = static_cast<double>(ctx.total);
    const double distinct = static_cast<double>(ctx.word_counts.size());
    return std::max(count - discount_, 0.0) / total + discount_ * distinct / total * lower;
}

double NgramLm::probability(const std::string& word,
                            const std::vector<std::string>& history) const {
    std::vector<std::string> padded;
    padded.reserve(order_ - 1 + 1);
    const std::size_t keep = std::min(history.size(), order_ - 1);
    for (std::size_t i = 0; i < order_ - 1 - keep; ++i) padded.emplace_back(kBos);
    padded.insert(padded.end(), history.end() - static_cast<std::ptrdiff_t>(keep), history.end());
    padded.push_back(in_vocabulary(word) ? word : kUnk);
    return level_probability(padded.back(), padded, padded.size() - 1, order_);
}

double NgramLm::perplexity(const std::string& text) const {
    if (trimmed(text).empty()) {
        throw EmptyText();
    }
    auto tokens = metric_tokens(text);

    std::vector<std::string> padded(order_ - 1, kBos);
    for (auto& token : tokens) {
        padded.push_back(in_vocabulary(token) ? std::move(token) : kUnk);
    }
    padded.emplace_back(kEos);

    double log_sum = 0.0;
    const std::size_t t = padded.size() - (order_ - 1);
    for (std::size_t j = order_ - 1; j < padded.size(); ++j) {
        log_sum += std::log(level_probability(padded[j], padded, j, order_));
    }
    return std::exp(-log_sum / static_cast<double>(t));
}

double ppl_normalized(const NgramLm& lm, const std::string& candidate,
                      const std::vector<std::string>& originals) {
    if (originals.empty()) {
        throw EmptyText();
    }
    double mean = 0.0;
    for (const std::string& original : originals) {
        mean += lm.perplexity(original);
    }
    mean /= static_cast<double>(originals.size());
    return lm.perplexity(candidate) / mean;
}

}  // namespace apeval
