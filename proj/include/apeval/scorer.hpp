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
#include "apeval/ngram_lm.hpp"
#include "apeval/stylometry.hpp"

namespace apeval {

struct MetricParams {
    std::size_t n_bins = 20;
    std::size_t lm_order = 3;
    double lm_discount = 0.75;
};

/// Per-dataset stylometric state: TF-IDF and the n-gram LM fitted once on the
/// original documents, plus each author's reference texts and perplexity
/// distribution. Immutable after construction; scoring is pure.
class StyleScorer {
public:
    StyleScorer(const Corpus& corpus, const MetricParams& params);

    const Corpus& corpus() const { return *corpus_; }
    const MetricParams& params() const { return params_; }
    const TfidfModel& tfidf() const { return tfidf_; }
    const NgramLm& lm() const { return lm_; }

    const std::vector<std::string>& author_texts(const std::string& author_id) const;
    const std::vector<double>& author_ppls(const std::string& author_id) const;
    double author_mean_ppl(const std::string& author_id) const;

    double similarity_to_author(const std::string& author_id, const std::string& text) const;
    double ppl(const std::string& text) const { return lm_.perplexity(text); }
    double ppl_norm(const std::string& author_id, const std::string& text) const;

    /// d(text, D_a) for one text: SIM and normalized PPL against the author's
    /// originals, KL of the single-score distribution against theirs.
    MetricReport report_for(const std::string& author_id, const std::string& text) const;

    /// Distribution-level KL of a set of transformed texts against the
    /// author's original PPL distribution.
    double kl_against_author(const std::string& author_id,
                             const std::vector<double>& transformed_ppls) const;

private:
    const Corpus* corpus_;
    MetricParams params_;
    TfidfModel tfidf_;
    NgramLm lm_;
    std::map<std::string, std::vector<std::string>> texts_;
    std::map<std::string, std::vector<double>> ppls_;
    std::map<std::string, double> mean_ppl_;
};

}  // namespace apeval
