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

#include "apeval/isolation.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "apeval/errors.hpp"
#include "apeval/hash.hpp"
#include "apeval/rng.hpp"

namespace apeval {

namespace {

struct ProviderTriple {
    const IsolationScore* ao = nullptr;
    const IsolationScore* am = nullptr;
    const IsolationScore* av = nullptr;
};

double require(const std::optional<double>& value, const std::string& what) {
    if (!value) throw IncompleteScores(what);
    return *value;
}

}  // namespace

JudgeAssignment select_judges(const std::vector<IsolationScore>& scores, AmRankMode am_mode) {
    std::map<std::string, ProviderTriple> by_provider;  // ordered: ties go lexicographic
    for (const IsolationScore& score : scores) {
        ProviderTriple& triple = by_provider[score.provider_id];
        switch (score.task) {
            case TaskKind::obfuscate: triple.ao = &score; break;
            case TaskKind::mimic: triple.am = &score; break;
            case TaskKind::verify: triple.av = &score; break;
        }
    }
    if (by_provider.empty()) {
        throw IncompleteScores("no scores");
    }
    for (const auto& [provider_id, triple] : by_provider) {
        if (triple.ao == nullptr || triple.am == nullptr || triple.av == nullptr) {
            throw IncompleteScores(provider_id + " is missing a task row");
        }
    }

    JudgeAssignment judges;
    judges.basis = scores;
    std::sort(judges.basis.begin(), judges.basis.end(),
              [](const IsolationScore& a, const IsolationScore& b) {
                  if (a.provider_id != b.provider_id) return a.provider_id < b.provider_id;
                  return task_kind_name(a.task) < task_kind_name(b.task);
              });

    bool first = true;
    for (const auto& [provider_id, triple] : by_provider) {
        const double ao_ppl = require(triple.ao->ppl_norm, provider_id + " AO ppl");
        const double ao_sim = require(triple.ao->sim, provider_id + " AO sim");
        const double am_ppl = require(triple.am->ppl_norm, provider_id + " AM ppl");
        const double am_sim = require(triple.am->sim, provider_id + " AM sim");
        const double av_acc = require(triple.av->accuracy, provider_id + " AV accuracy");
        const double am_key =
            am_mode == AmRankMode::ppl_ascending ? am_ppl : std::abs(am_ppl - 1.0);

        if (first) {
            judges.ao_judge = judges.am_judge = judges.av_judge = provider_id;
            first = false;
            continue;
        }
        {
            const ProviderTriple& best = by_provider.at(judges.ao_judge);
            const double best_ppl = *best.ao->ppl_norm;
            const double best_sim = *best.ao->sim;
            if (ao_ppl > best_ppl || (ao_ppl == best_ppl && ao_sim < best_sim)) {
                judges.ao_judge = provider_id;
            }
        }
        {
            const ProviderTriple& best = by_provider.at(judges.am_judge);
            const double best_ppl = *best.am->ppl_norm;
            const double best_key =
                am_mode == AmRankMode::ppl_ascending ? best_ppl : std::abs(best_ppl - 1.0);
            const double best_sim = *best.am->sim;
            if (am_key < best_key || (am_key == best_key && am_sim > best_sim)) {
                judges.am_judge = provider_id;
            }
        }
        if (av_acc > *by_provider.at(judges.av_judge).av->accuracy) {
            judges.av_judge = provider_id;
        }
    }
    return judges;
}

IsolationRunner::IsolationRunner(ExperimentEnv& env, const StyleScorer& scorer,
                                 IsolationOptions options)
    : env_(&env), scorer_(&scorer), options_(options) {}

int IsolationRunner::target_words_for(const std::string& author_id) const {
    return options_.target_words.value_or(scorer_->corpus().author_avg_words(author_id));
}

std::pair<TransformRecord, MetricReport> IsolationRunner::run_ao(const ProviderHandle& provider,
                                                                 const Document& doc,
                                                                 const Context& context) {
    TransformRecord record =
        transform_text(*env_, provider, TaskKind::obfuscate, context, doc.doc_id, doc.text,
                       target_words_for(doc.author_id));
    MetricReport report = scorer_->report_for(doc.author_id, record.output_text);
    return {std::move(record), report};
}

std::pair<TransformRecord, MetricReport> IsolationRunner::run_am(const ProviderHandle& provider,
                                                                 const Document& doc,
                                                                 const Context& context) {
    TransformRecord record = transform_text(*env_, provider, TaskKind::mimic, context, doc.doc_id,
                                            doc.text, target_words_for(doc.author_id));
    MetricReport report = scorer_->report_for(doc.author_id, record.output_text);
    return {std::move(record), report};
}

AvOutcome IsolationRunner::run_av(const ProviderHandle& provider, const Document& doc,
                                  const Context& context, const std::string& true_author) {
    return run_verification(*env_, provider, context, doc.text, true_author);
}

std::vector<std::size_t> IsolationRunner::eval_docs(const std::string& author_id) const {
    const Corpus& corpus = scorer_->corpus();
    const auto& idx = corpus.docs_of(author_id);
    SeededRng rng(derive_seed(env_->root_seed, "isolation/eval/" + corpus.name + "/" + author_id));
    std::vector<std::size_t> out;
    for (std::size_t pick : rng.sample_indices(idx.size(),
                                               std::min(options_.eval_docs_per_author, idx.size()))) {
        out.push_back(idx[pick]);
    }
    std::sort(out.begin(), out.end());  // aggregation folds in doc order
    return out;
}

std::vector<IsolationScore> IsolationRunner::evaluate_provider(const ProviderHandle& provider) {
    const Corpus& corpus = scorer_->corpus();

    double ao_sim_sum = 0.0;
    double ao_ppl_sum = 0.0;
    double am_sim_sum = 0.0;
    double am_ppl_sum = 0.0;
    std::size_t n_transformed = 0;
    std::size_t av_correct = 0;
    std::size_t av_total = 0;

    for (const AuthorRecord& author : corpus.authors) {
        const auto& author_doc_ids = corpus.docs_of(author.author_id);

        for (std::size_t doc_idx : eval_docs(author.author_id)) {
            const Document& doc = corpus.documents[doc_idx];
            const std::uint64_t ctx_seed = derive_seed(
                env_->root_seed, "isolation/ctx/" + corpus.name + "/" + doc.doc_id);
            const Context context =
                build_context(corpus, author.author_id, options_.context_samples,
                              options_.with_metadata, doc.doc_id, ctx_seed);

            const auto [ao_rec, ao_rep] = run_ao(provider, doc, context);
            ao_sim_sum += ao_rep.sim;
            ao_ppl_sum += ao_rep.ppl_norm;
            const auto [am_rec, am_rep] = run_am(provider, doc, context);
            am_sim_sum += am_rep.sim;
            am_ppl_sum += am_rep.ppl_norm;
            ++n_transformed;
        }

        // Balanced AV probe set: half genuine, half imposter inputs.
        SeededRng probe_rng(derive_seed(
            env_->root_seed, "isolation/av/" + corpus.name + "/" + author.author_id));
        const std::size_t genuine_count =
            std::min(options_.av_probes_per_class, author_doc_ids.size());
        std::vector<const Document*> probes;
        std::vector<std::string> truth;
        for (std::size_t pick : probe_rng.sample_indices(author_doc_ids.size(), genuine_count)) {
            probes.push_back(&corpus.documents[author_doc_ids[pick]]);
            truth.push_back(author.author_id);
        }
        std::vector<std::size_t> imposter_pool;
        for (std::size_t i = 0; i < corpus.documents.size(); ++i) {
            if (corpus.documents[i].author_id != author.author_id) imposter_pool.push_back(i);
        }
        const std::size_t imposter_count = std::min(genuine_count, imposter_pool.size());
        for (std::size_t pick : probe_rng.sample_indices(imposter_pool.size(), imposter_count)) {
            probes.push_back(&corpus.documents[imposter_pool[pick]]);
            truth.push_back(corpus.documents[imposter_pool[pick]].author_id);
        }

        for (std::size_t p = 0; p < probes.size(); ++p) {
            const Document& probe = *probes[p];
            const std::uint64_t ctx_seed = derive_seed(
                env_->root_seed,
                "isolation/avctx/" + corpus.name + "/" + author.author_id + "/" + probe.doc_id);
            const Context context = build_verification_context(
                corpus, author.author_id, options_.context_samples, options_.context_samples,
                options_.with_metadata, probe.doc_id, ctx_seed);
            const AvOutcome outcome = run_av(provider, probe, context, truth[p]);
            if (outcome.correct) ++av_correct;
            ++av_total;
        }
    }

    const double n = static_cast<double>(std::max<std::size_t>(n_transformed, 1));
    std::vector<IsolationScore> rows(3);
    rows[0] = {provider.provider_id, TaskKind::obfuscate, ao_ppl_sum / n, ao_sim_sum / n,
               std::nullopt, n_transformed};
    rows[1] = {provider.provider_id, TaskKind::mimic, am_ppl_sum / n, am_sim_sum / n, std::nullopt,
               n_transformed};
    rows[2] = {provider.provider_id, TaskKind::verify, std::nullopt, std::nullopt,
               av_total == 0 ? 0.0 : static_cast<double>(av_correct) / static_cast<double>(av_total),
               av_total};
    return rows;
}

}  // namespace apeval
