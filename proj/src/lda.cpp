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

#include "apeval/lda.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "apeval/errors.hpp"
#include "apeval/hash.hpp"
#include "apeval/rng.hpp"
#include "apeval/tokenize.hpp"

namespace apeval {

const std::vector<std::string>& english_stopwords() {
    static const std::vector<std::string> words = {
        "a",    "an",   "and",  "are",  "as",    "at",   "be",    "but",  "by",   "for",
        "from", "had",  "has",  "have", "he",    "her",  "his",   "i",    "in",   "is",
        "it",   "its",  "of",   "on",   "or",    "our",  "she",   "that", "the",  "their",
        "them", "they", "this", "to",   "was",   "we",   "were",  "will", "with", "you",
        "your", "not",  "so",   "if",   "than",  "then", "there", "when", "which"};
    return words;
}

std::vector<std::size_t> LdaModel::doc_word_ids(const std::string& text) const {
    std::vector<std::size_t> ids;
    for (const auto& token : metric_tokens(text)) {
        auto it = ids_.find(token);
        if (it != ids_.end()) ids.push_back(it->second);
    }
    return ids;
}

LdaModel LdaModel::fit(const std::vector<std::string>& docs, const LdaOptions& options,
                       const std::vector<std::string>& shared_vocabulary) {
    if (options.topics < 1) {
        throw Error("LDA needs at least one topic");
    }
    if (docs.size() < options.topics) {
        throw TooFewDocuments(docs.size(), options.topics);
    }

    LdaModel model;
    model.k_ = options.topics;
    model.alpha_ = options.alpha > 0.0 ? options.alpha
                                       : 50.0 / static_cast<double>(options.topics);
    model.beta_ = options.beta;

    std::unordered_set<std::string> stop;
    if (options.remove_stopwords) {
        stop.insert(english_stopwords().begin(), english_stopwords().end());
    }
    std::unordered_set<std::string> allowed(shared_vocabulary.begin(), shared_vocabulary.end());

    // tokenize and build the vocabulary in first-appearance order
    std::vector<std::vector<std::size_t>> token_ids(docs.size());
    for (std::size_t d = 0; d < docs.size(); ++d) {
        for (const auto& token : metric_tokens(docs[d])) {
            if (stop.count(token) > 0) continue;
            if (!allowed.empty() && allowed.count(token) == 0) continue;
            auto [it, inserted] = model.ids_.try_emplace(token, model.words_.size());
            if (inserted) model.words_.push_back(token);
            token_ids[d].push_back(it->second);
        }
    }
    const std::size_t v = model.words_.size();
    if (v == 0) {
        throw EmptyVocabulary();
    }

    const std::size_t k = model.k_;
    model.n_kw_.assign(k, std::vector<std::size_t>(v, 0));
    model.n_k_.assign(k, 0);
    model.n_dk_.assign(docs.size(), std::vector<std::size_t>(k, 0));
    model.doc_lengths_.assign(docs.size(), 0);

    SeededRng rng(options.seed);
    std::vector<std::vector<std::size_t>> assignments(docs.size());
    for (std::size_t d = 0; d < docs.size(); ++d) {
        assignments[d].resize(token_ids[d].size());
        model.doc_lengths_[d] = token_ids[d].size();
        for (std::size_t i = 0; i < token_ids[d].size(); ++i) {
            const std::size_t topic = rng.bounded(k);
            assignments[d][i] = topic;
            ++model.n_kw_[topic][token_ids[d][i]];
            ++model.n_k_[topic];
            ++model.n_dk_[d][topic];
        }
    }

    const double vbeta = static_cast<double>(v) * model.beta_;
    std::vector<double> weights(k);
    for (std::size_t sweep = 0; sweep < options.iterations; ++sweep) {
        for (std::size_t d = 0; d < docs.size(); ++d) {
            for (std::size_t i = 0; i < token_ids[d].size(); ++i) {
                const std::size_t w = token_ids[d][i];
                const std::size_t old_topic = assignments[d][i];
                --model.n_kw_[old_topic][w];
                --model.n_k_[old_topic];
                --model.n_dk_[d][old_topic];

                double total = 0.0;
                for (std::size_t t = 0; t < k; ++t) {
                    const double weight =
                        (static_cast<double>(model.n_dk_[d][t]) + model.alpha_) *
                        (static_cast<double>(model.n_kw_[t][w]) + model.beta_) /
                        (static_cast<double>(model.n_k_[t]) + vbeta);
                    weights[t] = weight;
                    total += weight;
                }
                double target = rng.uniform01() * total;
                std::size_t new_topic = k - 1;
                for (std::size_t t = 0; t < k; ++t) {
                    target -= weights[t];
                    if (target <= 0.0) {
                        new_topic = t;
                        break;
                    }
                }

                assignments[d][i] = new_topic;
                ++model.n_kw_[new_topic][w];
                ++model.n_k_[new_topic];
                ++model.n_dk_[d][new_topic];
            }
        }
    }
    return model;
}

std::vector<double> LdaModel::topic_distribution(std::size_t topic_id) const {
    if (topic_id >= k_) {
        throw TopicOutOfRange(topic_id, k_);
    }
    const double v = static_cast<double>(words_.size());
    const double denom = static_cast<double>(n_k_[topic_id]) + v * beta_;
    std::vector<double> dist(words_.size());
    for (std::size_t w = 0; w < words_.size(); ++w) {
        dist[w] = (static_cast<double>(n_kw_[topic_id][w]) + beta_) / denom;
    }
    return dist;
}

namespace {

std::vector<double> smoothed_doc_distribution(const std::vector<std::size_t>& counts,
                                              std::size_t length, double alpha) {
    const double k = static_cast<double>(counts.size());
    const double denom = static_cast<double>(length) + k * alpha;
    std::vector<double> dist(counts.size());
    for (std::size_t t = 0; t < counts.size(); ++t) {
        dist[t] = (static_cast<double>(counts[t]) + alpha) / denom;
    }
    return dist;
}

}  // namespace

std::vector<double> LdaModel::doc_distribution(std::size_t doc_index) const {
    if (doc_index >= n_dk_.size()) {
        throw Error("document index out of range");
    }
    return smoothed_doc_distribution(n_dk_[doc_index], doc_lengths_[doc_index], alpha_);
}

std::vector<double> LdaModel::mean_topic_distribution() const {
    std::vector<double> mean(k_, 0.0);
    for (std::size_t d = 0; d < n_dk_.size(); ++d) {
        const auto dist = doc_distribution(d);
        for (std::size_t t = 0; t < k_; ++t) mean[t] += dist[t];
    }
    for (double& m : mean) m /= static_cast<double>(n_dk_.size());
    return mean;
}

std::vector<std::vector<double>> LdaModel::fold_documents(const std::vector<std::string>& docs,
                                                          std::size_t iterations,
                                                          std::uint64_t seed) const {
    const double vbeta = static_cast<double>(words_.size()) * beta_;
    std::vector<std::vector<double>> out(docs.size());
    std::vector<double> weights(k_);

    for (std::size_t d = 0; d < docs.size(); ++d) {
        const auto ids = doc_word_ids(docs[d]);
        if (ids.empty()) continue;  // nothing to fold; slot stays empty

        SeededRng rng(derive_seed(seed, "fold/" + std::to_string(d)));
        std::vector<std::size_t> assignment(ids.size());
        std::vector<std::size_t> counts(k_, 0);
        for (std::size_t i = 0; i < ids.size(); ++i) {
            assignment[i] = rng.bounded(k_);
            ++counts[assignment[i]];
        }
        for (std::size_t sweep = 0; sweep < iterations; ++sweep) {
            for (std::size_t i = 0; i < ids.size(); ++i) {
                const std::size_t w = ids[i];
                --counts[assignment[i]];
                double total = 0.0;
                for (std::size_t t = 0; t < k_; ++t) {
                    // topic-word side is frozen at the trained counts
                    const double weight =
                        (static_cast<double>(counts[t]) + alpha_) *
                        (static_cast<double>(n_kw_[t][w]) + beta_) /
                        (static_cast<double>(n_k_[t]) + vbeta);
                    weights[t] = weight;
                    total += weight;
                }
                double target = rng.uniform01() * total;
                std::size_t new_topic = k_ - 1;
                for (std::size_t t = 0; t < k_; ++t) {
                    target -= weights[t];
                    if (target <= 0.0) {
                        new_topic = t;
                        break;
                    }
                }
                assignment[i] = new_topic;
                ++counts[new_topic];
            }
        }
        out[d] = smoothed_doc_distribution(counts, ids.size(), alpha_);
    }
    return out;
}

TopicSummary top_words(const LdaModel& model, std::size_t topic_id, std::size_t n) {
    const auto dist = model.topic_distribution(topic_id);  // validates topic_id

    std::vector<std::size_t> order(dist.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (dist[a] != dist[b]) return dist[a] > dist[b];
        return model.vocabulary()[a] < model.vocabulary()[b];
    });

    TopicSummary summary;
    summary.topic_id = topic_id;
    const std::size_t count = std::min(n, dist.size());
    summary.top_words.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        summary.top_words.emplace_back(model.vocabulary()[order[i]], dist[order[i]]);
    }
    return summary;
}

double topic_drift(const LdaModel& reference, const std::vector<std::string>& docs_round) {
    constexpr std::size_t kFoldIterations = 50;
    const auto folded = reference.fold_documents(docs_round, kFoldIterations, /*seed=*/1);
    const auto mean = reference.mean_topic_distribution();

    double total = 0.0;
    std::size_t counted = 0;
    for (const auto& theta : folded) {
        if (theta.empty()) continue;
        double kl = 0.0;
        for (std::size_t t = 0; t < theta.size(); ++t) {
            if (theta[t] > 0.0) kl += theta[t] * std::log(theta[t] / mean[t]);
        }
        total += std::max(kl, 0.0);
        ++counted;
    }
    if (counted == 0) {
        throw EmptyCorpus("no foldable documents in round");
    }
    return total / static_cast<double>(counted);
}

}  // namespace apeval
