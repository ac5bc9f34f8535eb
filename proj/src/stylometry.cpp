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

#include "apeval/stylometry.hpp"

#include <algorithm>
#include <cmath>

#include "apeval/errors.hpp"
#include "apeval/tokenize.hpp"

namespace apeval {

TfidfModel TfidfModel::fit(const std::vector<std::string>& docs) {
    std::vector<std::vector<std::string>> tokenized;
    tokenized.reserve(docs.size());
    for (const std::string& doc : docs) {
        auto tokens = metric_tokens(doc);
        if (!tokens.empty()) tokenized.push_back(std::move(tokens));
    }
    if (tokenized.empty()) {
        throw EmptyCorpus("tf-idf needs at least one non-empty document");
    }

    TfidfModel model;
    std::vector<std::size_t> df;
    for (const auto& tokens : tokenized) {
        std::vector<const std::string*> seen_here;
        for (const std::string& token : tokens) {
            auto [it, inserted] = model.vocabulary_.try_emplace(token, df.size());
            if (inserted) df.push_back(0);
            if (std::none_of(seen_here.begin(), seen_here.end(),
                             [&](const std::string* s) { return *s == token; })) {
                ++df[it->second];
                seen_here.push_back(&it->first);
            }
        }
    }

    const double n = static_cast<double>(tokenized.size());
    model.idf_.resize(df.size());
    for (std::size_t i = 0; i < df.size(); ++i) {
        model.idf_[i] = std::log((1.0 + n) / (1.0 + static_cast<double>(df[i]))) + 1.0;
    }
    return model;
}

double TfidfModel::idf(const std::string& term) const {
    auto it = vocabulary_.find(term);
    return it == vocabulary_.end() ? 0.0 : idf_[it->second];
}

std::unordered_map<std::size_t, double> TfidfModel::vectorize(const std::string& text) const {
    const auto tokens = metric_tokens(text);
    std::unordered_map<std::size_t, double> vec;
    if (tokens.empty()) return vec;

    const double len = static_cast<double>(tokens.size());
    for (const std::string& token : tokens) {
        auto it = vocabulary_.find(token);
        if (it != vocabulary_.end()) vec[it->second] += 1.0;
    }
    double norm_sq = 0.0;
    for (auto& [idx, count] : vec) {
        count = count / len * idf_[idx];
        norm_sq += count * count;
    }
    if (norm_sq > 0.0) {
        const double inv = 1.0 / std::sqrt(norm_sq);
        for (auto& [idx, weight] : vec) weight *= inv;
    }
    return vec;
}

double sim(const TfidfModel& model, const std::string& candidate,
           const std::vector<std::string>& reference_docs) {
    if (trimmed(candidate).empty()) {
        throw EmptyText();
    }
    if (reference_docs.empty()) return 0.0;

    const auto cand = model.vectorize(candidate);
    double total = 0.0;
    for (const std::string& ref : reference_docs) {
        const auto rv = model.vectorize(ref);
        const auto& small = cand.size() <= rv.size() ? cand : rv;
        const auto& large = cand.size() <= rv.size() ? rv : cand;
        double dot = 0.0;
        for (const auto& [idx, weight] : small) {
            auto it = large.find(idx);
            if (it != large.end()) dot += weight * it->second;
        }
        total += dot;  // both vectors are unit length (or zero)
    }
    return total / static_cast<double>(reference_docs.size());
}

double kl_over_ppl(const std::vector<double>& p_scores, const std::vector<double>& q_scores,
                   std::size_t n_bins) {
    if (p_scores.empty() || q_scores.empty()) {
        throw EmptyText();
    }
    if (n_bins == 0) n_bins = 1;

    auto log_scores = [](const std::vector<double>& scores) {
        std::vector<double> out;
        out.reserve(scores.size());
        for (double s : scores) out.push_back(std::log(std::max(s, 1e-300)));
        return out;
    };
    const auto lp = log_scores(p_scores);
    const auto lq = log_scores(q_scores);

    double lo = lp[0];
    double hi = lp[0];
    for (double v : lp) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    for (double v : lq) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    if (hi <= lo) return 0.0;  // all scores identical: one shared bin

    const double width = (hi - lo) / static_cast<double>(n_bins);
    auto histogram = [&](const std::vector<double>& values) {
        std::vector<double> bins(n_bins, 0.0);
        for (double v : values) {
            auto idx = static_cast<std::size_t>((v - lo) / width);
            if (idx >= n_bins) idx = n_bins - 1;
            bins[idx] += 1.0;
        }
        const double total = static_cast<double>(values.size());
        double mass = 0.0;
        for (double& b : bins) {
            b = b / total + 1e-6;
            mass += b;
        }
        for (double& b : bins) b /= mass;
        return bins;
    };

    const auto p = histogram(lp);
    const auto q = histogram(lq);
    double kl = 0.0;
    for (std::size_t i = 0; i < n_bins; ++i) {
        kl += p[i] * std::log(p[i] / q[i]);
    }
    return std::max(kl, 0.0);
}

ClassificationMetrics classification_metrics(const ConfusionCounts& counts) {
    const std::size_t total = counts.tp + counts.fp + counts.tn + counts.fn;
    ClassificationMetrics out;
    if (total == 0) {
        out.degenerate_precision = true;
        out.degenerate_recall = true;
        return out;
    }
    out.accuracy = static_cast<double>(counts.tp + counts.tn) / static_cast<double>(total);
    if (counts.tp + counts.fp == 0) {
        out.degenerate_precision = true;
    } else {
        out.precision = static_cast<double>(counts.tp) / static_cast<double>(counts.tp + counts.fp);
    }
    if (counts.tp + counts.fn == 0) {
        out.degenerate_recall = true;
    } else {
        out.recall = static_cast<double>(counts.tp) / static_cast<double>(counts.tp + counts.fn);
    }
    return out;
}

}  // namespace apeval
