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

#include "apeval/interplay.hpp"

#include <algorithm>
#include <map>

#include "apeval/errors.hpp"
#include "apeval/hash.hpp"
#include "apeval/rng.hpp"

namespace apeval {

std::string direction_name(Direction direction) {
    switch (direction) {
        case Direction::OM: return "OM";
        case Direction::OV: return "OV";
        case Direction::MO: return "MO";
        case Direction::MV: return "MV";
        case Direction::VO: return "VO";
        case Direction::VM: return "VM";
    }
    return "??";
}

InterplayRunner::InterplayRunner(ExperimentEnv& env, const StyleScorer& scorer,
                                 JudgeHandles judges, InterplayOptions options)
    : env_(&env), scorer_(&scorer), judges_(std::move(judges)), options_(options) {}

int InterplayRunner::target_words_for(const std::string& author_id) const {
    return options_.target_words.value_or(scorer_->corpus().author_avg_words(author_id));
}

std::vector<std::size_t> InterplayRunner::eval_docs(const std::string& author_id) const {
    const Corpus& corpus = scorer_->corpus();
    const auto& idx = corpus.docs_of(author_id);
    SeededRng rng(derive_seed(env_->root_seed, "pairwise/eval/" + corpus.name + "/" + author_id));
    std::vector<std::size_t> out;
    for (std::size_t pick : rng.sample_indices(idx.size(),
                                               std::min(options_.eval_docs_per_author, idx.size()))) {
        out.push_back(idx[pick]);
    }
    std::sort(out.begin(), out.end());
    return out;
}

Context InterplayRunner::perfect_context(const Document& doc, bool with_metadata) const {
    const Corpus& corpus = scorer_->corpus();
    return build_context(corpus, doc.author_id, options_.context_samples, with_metadata,
                         doc.doc_id,
                         derive_seed(env_->root_seed,
                                     "pairwise/ctx/" + corpus.name + "/" + doc.doc_id));
}

Context InterplayRunner::transformed_context(const ProviderHandle& actor, TaskKind task_kind,
                                             const Context& context) {
    // one transform per original sample writing
    std::vector<std::string> transformed;
    transformed.reserve(context.sample_docs.size());
    for (const Document& sample : context.sample_docs) {
        const TransformRecord rec =
            transform_text(*env_, actor, task_kind, context, sample.doc_id, sample.text,
                           target_words_for(context.author_id));
        transformed.push_back(rec.output_text);
    }
    return context_from_texts(context, transformed, "#" + task_kind_name(task_kind));
}

MetricReport InterplayRunner::om_influence(const ProviderHandle& actor, const Document& doc,
                                           const Context& context) {
    const Context obf_ctx = transformed_context(actor, TaskKind::obfuscate, context);
    const TransformRecord mimicked =
        transform_text(*env_, judges_.am, TaskKind::mimic, obf_ctx, doc.doc_id, doc.text,
                       target_words_for(doc.author_id));
    return scorer_->report_for(doc.author_id, mimicked.output_text);
}

double InterplayRunner::ov_influence(const ProviderHandle& actor, const Document& doc,
                                     const Context& context) {
    const Context obf_ctx = transformed_context(actor, TaskKind::obfuscate, context);
    const AvOutcome outcome =
        run_verification(*env_, judges_.av, obf_ctx, doc.text, doc.author_id);
    return outcome.correct ? 1.0 : 0.0;
}

MetricReport InterplayRunner::mo_influence(const ProviderHandle& actor, const Document& doc,
                                           const Context& context) {
    const Context mim_ctx = transformed_context(actor, TaskKind::mimic, context);
    const TransformRecord obfuscated =
        transform_text(*env_, judges_.ao, TaskKind::obfuscate, mim_ctx, doc.doc_id, doc.text,
                       target_words_for(doc.author_id));
    return scorer_->report_for(doc.author_id, obfuscated.output_text);
}

double InterplayRunner::mv_influence(const ProviderHandle& actor, const Document& doc,
                                     const Context& context) {
    const Context mim_ctx = transformed_context(actor, TaskKind::mimic, context);
    const AvOutcome outcome =
        run_verification(*env_, judges_.av, mim_ctx, doc.text, doc.author_id);
    return outcome.correct ? 1.0 : 0.0;
}

namespace {

MetricReport two_output_report(const StyleScorer& scorer, const std::string& perfect_out,
                               const std::string& noisy_out) {
    MetricReport report;
    report.sim = sim(scorer.tfidf(), noisy_out, {perfect_out});
    report.ppl = scorer.ppl(noisy_out);
    const double perfect_ppl = scorer.ppl(perfect_out);
    report.ppl_norm = perfect_ppl > 0.0 ? report.ppl / perfect_ppl : 0.0;
    report.kl = kl_over_ppl({report.ppl}, {perfect_ppl}, scorer.params().n_bins);
    report.n_texts = 1;
    return report;
}

}  // namespace

MetricReport InterplayRunner::vo_influence(const ProviderHandle& /*verifier_actor*/,
                                           const Document& doc, const Context& perfect_ctx,
                                           const Context& noisy_ctx) {
    const int words = target_words_for(doc.author_id);
    const TransformRecord perfect_out = transform_text(
        *env_, judges_.ao, TaskKind::obfuscate, perfect_ctx, doc.doc_id, doc.text, words);
    const TransformRecord noisy_out = transform_text(
        *env_, judges_.ao, TaskKind::obfuscate, noisy_ctx, doc.doc_id, doc.text, words);
    return two_output_report(*scorer_, perfect_out.output_text, noisy_out.output_text);
}

MetricReport InterplayRunner::vm_influence(const ProviderHandle& /*verifier_actor*/,
                                           const Document& doc, const Context& perfect_ctx,
                                           const Context& noisy_ctx) {
    const int words = target_words_for(doc.author_id);
    const TransformRecord perfect_out = transform_text(
        *env_, judges_.am, TaskKind::mimic, perfect_ctx, doc.doc_id, doc.text, words);
    const TransformRecord noisy_out = transform_text(
        *env_, judges_.am, TaskKind::mimic, noisy_ctx, doc.doc_id, doc.text, words);
    return two_output_report(*scorer_, perfect_out.output_text, noisy_out.output_text);
}

PoolEvaluation InterplayRunner::evaluate_pool(const ProviderHandle& verifier,
                                              const std::string& author_id, bool with_metadata,
                                              const std::vector<std::string>& excluded_doc_ids) {
    const Corpus& corpus = scorer_->corpus();
    PoolEvaluation eval;
    eval.pool = sample_candidate_pool(
        corpus, author_id, options_.pool_author_docs, options_.pool_imposter_docs,
        derive_seed(env_->root_seed, "pairwise/pool/" + corpus.name + "/" + author_id),
        excluded_doc_ids);

    for (const PoolItem& item : eval.pool) {
        const Context context = build_verification_context(
            corpus, author_id, options_.context_samples, options_.context_samples, with_metadata,
            item.doc.doc_id,
            derive_seed(env_->root_seed,
                        "pairwise/poolctx/" + corpus.name + "/" + author_id + "/" +
                            item.doc.doc_id));
        const AvOutcome outcome =
            run_verification(*env_, verifier, context, item.doc.text, item.doc.author_id);
        if (!outcome.parsed) ++eval.unparseable;
        const bool accepted = outcome.verdict.accepted;
        eval.outcomes.push_back(accepted);
        if (item.from_author) {
            accepted ? ++eval.counts.tp : ++eval.counts.fn;
        } else {
            accepted ? ++eval.counts.fp : ++eval.counts.tn;
        }
    }
    return eval;
}

Context InterplayRunner::noisy_context_for(const ProviderHandle& verifier,
                                           const std::string& author_id, bool with_metadata) {
    const Corpus& corpus = scorer_->corpus();
    std::vector<std::string> excluded;
    for (std::size_t i : eval_docs(author_id)) excluded.push_back(corpus.documents[i].doc_id);

    const PoolEvaluation eval = evaluate_pool(verifier, author_id, with_metadata, excluded);
    Context ctx = build_noisy_context(eval.pool, eval.outcomes, author_id);
    const AuthorRecord& author = corpus.author(author_id);
    ctx.author_name = author.display_name;
    if (with_metadata) {
        std::string persona = render_author_identification(author.metadata);
        if (!persona.empty()) ctx.metadata_text = std::move(persona);
    }
    return ctx;
}

MetricReport InterplayRunner::aggregate_outputs(
    const std::vector<std::pair<std::string, std::string>>& author_outputs) const {
    MetricReport report;
    if (author_outputs.empty()) return report;

    std::map<std::string, std::vector<double>> ppls_by_author;
    for (const auto& [author_id, output] : author_outputs) {
        report.sim += scorer_->similarity_to_author(author_id, output);
        const double ppl = scorer_->ppl(output);
        report.ppl += ppl;
        report.ppl_norm += ppl / scorer_->author_mean_ppl(author_id);
        ppls_by_author[author_id].push_back(ppl);
    }
    const double n = static_cast<double>(author_outputs.size());
    report.sim /= n;
    report.ppl /= n;
    report.ppl_norm /= n;

    // KL compares the per-author transformed and original PPL distributions
    for (const auto& [author_id, ppls] : ppls_by_author) {
        report.kl += scorer_->kl_against_author(author_id, ppls);
    }
    report.kl /= static_cast<double>(ppls_by_author.size());
    report.n_texts = author_outputs.size();
    return report;
}

PairwiseResult InterplayRunner::run_cell(Direction direction, const ProviderHandle& actor,
                                         bool with_metadata) {
    const Corpus& corpus = scorer_->corpus();

    PairwiseResult result;
    result.direction = direction;
    result.actor_provider = actor.provider_id;
    result.dataset = corpus.name;
    result.with_metadata = with_metadata;
    switch (direction) {
        case Direction::OM: result.judge_provider = judges_.am.provider_id; break;
        case Direction::MO: result.judge_provider = judges_.ao.provider_id; break;
        case Direction::VO: result.judge_provider = judges_.ao.provider_id; break;
        case Direction::VM: result.judge_provider = judges_.am.provider_id; break;
        case Direction::OV:
        case Direction::MV: result.judge_provider = judges_.av.provider_id; break;
    }

    std::vector<std::pair<std::string, std::string>> outputs;  // (author, judge output)
    std::map<std::string, std::vector<double>> perfect_ppls;
    std::map<std::string, std::vector<double>> noisy_ppls;
    double sim_sum = 0.0;
    double ppl_sum = 0.0;
    double ppl_norm_sum = 0.0;
    double acc_sum = 0.0;
    std::size_t n = 0;

    for (const AuthorRecord& author : corpus.authors) {
        std::optional<Context> noisy_ctx;
        if (direction == Direction::VO || direction == Direction::VM) {
            noisy_ctx = noisy_context_for(actor, author.author_id, with_metadata);
        }

        for (std::size_t doc_idx : eval_docs(author.author_id)) {
            const Document& doc = corpus.documents[doc_idx];
            const Context context = perfect_context(doc, with_metadata);
            switch (direction) {
                case Direction::OM: {
                    const Context obf_ctx = transformed_context(actor, TaskKind::obfuscate, context);
                    const TransformRecord out =
                        transform_text(*env_, judges_.am, TaskKind::mimic, obf_ctx, doc.doc_id,
                                       doc.text, target_words_for(doc.author_id));
                    outputs.emplace_back(doc.author_id, out.output_text);
                    break;
                }
                case Direction::MO: {
                    const Context mim_ctx = transformed_context(actor, TaskKind::mimic, context);
                    const TransformRecord out =
                        transform_text(*env_, judges_.ao, TaskKind::obfuscate, mim_ctx, doc.doc_id,
                                       doc.text, target_words_for(doc.author_id));
                    outputs.emplace_back(doc.author_id, out.output_text);
                    break;
                }
                case Direction::OV: acc_sum += ov_influence(actor, doc, context); break;
                case Direction::MV: acc_sum += mv_influence(actor, doc, context); break;
                case Direction::VO:
                case Direction::VM: {
                    const TaskKind kind =
                        direction == Direction::VO ? TaskKind::obfuscate : TaskKind::mimic;
                    const ProviderHandle& judge =
                        direction == Direction::VO ? judges_.ao : judges_.am;
                    const int words = target_words_for(doc.author_id);
                    const TransformRecord out_p = transform_text(
                        *env_, judge, kind, context, doc.doc_id, doc.text, words);
                    const TransformRecord out_n = transform_text(
                        *env_, judge, kind, *noisy_ctx, doc.doc_id, doc.text, words);
                    sim_sum += sim(scorer_->tfidf(), out_n.output_text, {out_p.output_text});
                    const double pp = scorer_->ppl(out_p.output_text);
                    const double pn = scorer_->ppl(out_n.output_text);
                    perfect_ppls[doc.author_id].push_back(pp);
                    noisy_ppls[doc.author_id].push_back(pn);
                    ppl_sum += pn;
                    ppl_norm_sum += pp > 0.0 ? pn / pp : 0.0;
                    break;
                }
            }
            ++n;
        }
    }

    result.n = n;
    switch (direction) {
        case Direction::OM:
        case Direction::MO:
            result.report = aggregate_outputs(outputs);
            break;
        case Direction::OV:
        case Direction::MV:
            result.accuracy = n == 0 ? 0.0 : acc_sum / static_cast<double>(n);
            result.report.n_texts = n;
            break;
        case Direction::VO:
        case Direction::VM: {
            const double dn = static_cast<double>(std::max<std::size_t>(n, 1));
            result.report.sim = sim_sum / dn;
            result.report.ppl = ppl_sum / dn;
            result.report.ppl_norm = ppl_norm_sum / dn;
            double kl = 0.0;
            for (const auto& [author_id, ppls] : noisy_ppls) {
                kl += kl_over_ppl(ppls, perfect_ppls.at(author_id), scorer_->params().n_bins);
            }
            result.report.kl = noisy_ppls.empty() ? 0.0 : kl / static_cast<double>(noisy_ppls.size());
            result.report.n_texts = n;
            break;
        }
    }
    return result;
}

ConfusionCounts InterplayRunner::pool_counts(const ProviderHandle& verifier, bool with_metadata) {
    const Corpus& corpus = scorer_->corpus();
    ConfusionCounts total;
    for (const AuthorRecord& author : corpus.authors) {
        std::vector<std::string> excluded;
        for (std::size_t i : eval_docs(author.author_id)) {
            excluded.push_back(corpus.documents[i].doc_id);
        }
        const PoolEvaluation eval =
            evaluate_pool(verifier, author.author_id, with_metadata, excluded);
        total.tp += eval.counts.tp;
        total.fp += eval.counts.fp;
        total.tn += eval.counts.tn;
        total.fn += eval.counts.fn;
    }
    return total;
}

}  // namespace apeval
