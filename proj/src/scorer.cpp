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

#include "apeval/scorer.hpp"

#include "apeval/errors.hpp"

namespace apeval {

namespace {

std::vector<std::string> all_texts(const Corpus& corpus) {
    std::vector<std::string> texts;
    texts.reserve(corpus.documents.size());
    for (const Document& doc : corpus.documents) texts.push_back(doc.text);
    return texts;
}

}  // namespace

StyleScorer::StyleScorer(const Corpus& corpus, const MetricParams& params)
    : corpus_(&corpus),
      params_(params),
      tfidf_(TfidfModel::fit(all_texts(corpus))),
      lm_(NgramLm::train(all_texts(corpus), params.lm_order, params.lm_discount)) {
    for (const AuthorRecord& author : corpus.authors) {
        auto& texts = texts_[author.author_id];
        auto& ppls = ppls_[author.author_id];
        for (std::size_t i : corpus.docs_of(author.author_id)) {
            texts.push_back(corpus.documents[i].text);
            ppls.push_back(lm_.perplexity(corpus.documents[i].text));
        }
        double mean = 0.0;
        for (double p : ppls) mean += p;
        mean_ppl_[author.author_id] = ppls.empty() ? 1.0 : mean / static_cast<double>(ppls.size());
    }
}

const std::vector<std::string>& StyleScorer::author_texts(const std::string& author_id) const {
    auto it = texts_.find(author_id);
    if (it == texts_.end()) throw Error("unknown author: " + author_id);
    return it->second;
}

const std::vector<double>& StyleScorer::author_ppls(const std::string& author_id) const {
    auto it = ppls_.find(author_id);
    if (it == ppls_.end()) throw Error("unknown author: " + author_id);
    return it->second;
}

double StyleScorer::author_mean_ppl(const std::string& author_id) const {
    auto it = mean_ppl_.find(author_id);
    if (it == mean_ppl_.end()) throw Error("unknown author: " + author_id);
    return it->second;
}

double StyleScorer::similarity_to_author(const std::string& author_id,
                                         const std::string& text) const {
    return sim(tfidf_, text, author_texts(author_id));
}

double StyleScorer::ppl_norm(const std::string& author_id, const std::string& text) const {
    return lm_.perplexity(text) / author_mean_ppl(author_id);
}

MetricReport StyleScorer::report_for(const std::string& author_id, const std::string& text) const {
    MetricReport report;
    report.sim = similarity_to_author(author_id, text);
    report.ppl = ppl(text);
    report.ppl_norm = report.ppl / author_mean_ppl(author_id);
    report.kl = kl_against_author(author_id, {report.ppl});
    report.n_texts = 1;
    return report;
}

double StyleScorer::kl_against_author(const std::string& author_id,
                                      const std::vector<double>& transformed_ppls) const {
    return kl_over_ppl(transformed_ppls, author_ppls(author_id), params_.n_bins);
}

}  // namespace apeval
