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
#include <string>
#include <unordered_map>
#include <vector>

namespace apeval {

struct LdaOptions {
    std::size_t topics = 10;
    double alpha = 0.0;  // 0 means the classical default 50/K
    double beta = 0.01;
    std::size_t iterations = 500;
    std::uint64_t seed = 0;
    bool remove_stopwords = false;
};

/// LDA fitted by collapsed Gibbs sampling. The chain is sequential and
/// seeded, so a fixed seed reproduces the count matrices bit for bit. Fitted
/// models are immutable; folding new documents never touches them.
class LdaModel {
public:
    /// Fit on raw texts. When `shared_vocabulary` is non-empty only those
    /// terms are kept, which makes models across transformation rounds
    /// comparable.
    static LdaModel fit(const std::vector<std::string>& docs, const LdaOptions& options,
                        const std::vector<std::string>& shared_vocabulary = {});

    std::size_t topics() const { return k_; }
    double alpha() const { return alpha_; }
    double beta() const { return beta_; }
    const std::vector<std::string>& vocabulary() const { return words_; }

    /// Raw count matrices (K x V and D x K).
    const std::vector<std::vector<std::size_t>>& topic_word_counts() const { return n_kw_; }
    const std::vector<std::vector<std::size_t>>& doc_topic_counts() const { return n_dk_; }

    /// Smoothed word distribution of one topic (sums to 1).
    std::vector<double> topic_distribution(std::size_t topic_id) const;

    /// Smoothed topic distribution of one training document (sums to 1).
    std::vector<double> doc_distribution(std::size_t doc_index) const;

    /// Mean of doc_distribution over the training set.
    std::vector<double> mean_topic_distribution() const;

    /// Fold unseen documents into the model with the topic-word counts
    /// frozen; returns one smoothed topic distribution per input document.
    /// Documents with no in-vocabulary token are skipped (their slot is an
    /// empty vector).
    std::vector<std::vector<double>> fold_documents(const std::vector<std::string>& docs,
                                                    std::size_t iterations,
                                                    std::uint64_t seed) const;

private:
    std::size_t k_ = 0;
    double alpha_ = 0.0;
    double beta_ = 0.0;
    std::vector<std::string> words_;                    // index -> word
    std::unordered_map<std::string, std::size_t> ids_;  // word -> index
    std::vector<std::vector<std::size_t>> n_kw_;        // K x V
    std::vector<std::size_t> n_k_;                      // K
    std::vector<std::vector<std::size_t>> n_dk_;        // D x K
    std::vector<std::size_t> doc_lengths_;

    std::vector<std::size_t> doc_word_ids(const std::string& text) const;
};

struct TopicSummary {
    std::size_t topic_id = 0;
    std::vector<std::pair<std::string, double>> top_words;  // probability non-increasing
};

/// The n most probable words of a topic; ties break lexicographically.
TopicSummary top_words(const LdaModel& model, std::size_t topic_id, std::size_t n);

/// Mean KL of the folded per-document topic distributions against the
/// reference corpus mean. Higher means the round drifted further from the
/// original themes.
double topic_drift(const LdaModel& reference, const std::vector<std::string>& docs_round);

/// Built-in English stopword list used when LdaOptions::remove_stopwords is
/// set.
const std::vector<std::string>& english_stopwords();

}  // namespace apeval
