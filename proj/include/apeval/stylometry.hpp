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
#include <vector>

namespace apeval {

/// TF-IDF over metric tokens. tf is the raw in-document frequency divided by
/// document length; idf = ln((1+N)/(1+df)) + 1; vectors are L2-normalized at
/// query time. Immutable once fitted.
class TfidfModel {
public:
    static TfidfModel fit(const std::vector<std::string>& docs);

    /// Sparse tf-idf vector, L2-normalized. Out-of-vocabulary terms are
    /// dropped. The result may be empty (candidate shares no vocabulary).
    std::unordered_map<std::size_t, double> vectorize(const std::string& text) const;

    std::size_t vocabulary_size() const { return idf_.size(); }
    double idf(const std::string& term) const;

private:
    std::unordered_map<std::string, std::size_t> vocabulary_;
    std::vector<double> idf_;
};

/// Mean cosine similarity of the candidate against each reference document.
double sim(const TfidfModel& model, const std::string& candidate,
           const std::vector<std::string>& reference_docs);

/// KL(P||Q) between histogrammed score sets in log space. Shared uniform bin
/// edges span the pooled min/max; every bin gets epsilon = 1e-6 before
/// renormalization, so the result is always finite.
double kl_over_ppl(const std::vector<double>& p_scores, const std::vector<double>& q_scores,
                   std::size_t n_bins);

struct MetricReport {
    double sim = 0.0;
    double ppl = 0.0;
    double ppl_norm = 0.0;
    double kl = 0.0;
    std::size_t n_texts = 0;
};

struct ConfusionCounts {
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t tn = 0;
    std::size_t fn = 0;
};

struct ClassificationMetrics {
    double accuracy = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    bool degenerate_precision = false;  // tp + fp == 0
    bool degenerate_recall = false;     // tp + fn == 0
};

ClassificationMetrics classification_metrics(const ConfusionCounts& counts);

}  // namespace apeval
