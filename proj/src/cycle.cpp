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

#include "apeval/cycle.hpp"

#include "apeval/errors.hpp"
#include "apeval/hash.hpp"

namespace apeval {

std::string step_kind_label(const CycleStep& step) {
    if (step.step_order == 0) return "original";
    return step.step_kind == TaskKind::mimic ? "AM" : "AO";
}

namespace {

struct StepMetrics {
    double acc = 0.0;
    double kl = 0.0;
    double sim = 0.0;
    std::optional<double> human_likeness;
};

StepMetrics measure_step(ExperimentEnv& env, const StyleScorer& scorer,
                         const JudgeHandles& judges, const Document& doc,
                         const CycleOptions& options, const std::string& step_text,
                         const Context& author_shell, const DetectorHandle* detector) {
    StepMetrics metrics;

    if (options.probe_with_step_output) {
        // alternative reading: the step output is the probe, the author's
        // perfect context the ground truth
        const Context perfect = build_context(
            scorer.corpus(), doc.author_id, options.context_samples, options.with_metadata,
            doc.doc_id,
            derive_seed(env.root_seed, "cycle/ctx/" + scorer.corpus().name + "/" + doc.doc_id));
        const AvOutcome outcome =
            run_verification(env, judges.av, perfect, step_text, doc.author_id);
        metrics.acc = outcome.verdict.accepted ? 1.0 : 0.0;
    } else {
        const Context step_ctx = context_from_texts(author_shell, {step_text}, "#ctx");
        const AvOutcome outcome = run_verification(env, judges.av, step_ctx, doc.text,
                                                   doc.author_id);
        metrics.acc = outcome.verdict.accepted ? 1.0 : 0.0;
    }

    metrics.kl = scorer.kl_against_author(doc.author_id, {scorer.ppl(step_text)});
    metrics.sim = scorer.similarity_to_author(doc.author_id, step_text);

    if (detector != nullptr) {
        try {
            metrics.human_likeness =
                detect_human_likeness(*detector, step_text, *env.cache, env.gen_options.offline);
        } catch (const DetectorUnavailable&) {
            // trajectory proceeds with the field absent
        }
    }
    return metrics;
}

}  // namespace

Trajectory run_cycles(ExperimentEnv& env, const StyleScorer& scorer, const JudgeHandles& judges,
                      const Document& doc, const CycleOptions& options,
                      const DetectorHandle* detector) {
    const Corpus& corpus = scorer.corpus();
    const AuthorRecord& author = corpus.author(doc.author_id);

    Trajectory trajectory;
    trajectory.doc_id = doc.doc_id;
    trajectory.author_id = doc.author_id;
    trajectory.dataset = corpus.name;
    trajectory.with_metadata = options.with_metadata;
    trajectory.n_cycles = options.n_cycles;

    // Shell context carrying the author identity (and persona when enabled);
    // each step substitutes its exemplar text into it.
    Context shell;
    shell.author_id = author.author_id;
    shell.author_name = author.display_name;
    if (options.with_metadata) {
        std::string persona = render_author_identification(author.metadata);
        if (!persona.empty()) shell.metadata_text = std::move(persona);
    }

    const int target_words =
        options.target_words.value_or(corpus.author_avg_words(doc.author_id));

    trajectory.original_baseline.step_order = 0;
    trajectory.original_baseline.cycle_index = 0;
    trajectory.original_baseline.text.task_kind = TaskKind::mimic;
    trajectory.original_baseline.text.provider_id = "original";
    trajectory.original_baseline.text.parent_id = doc.doc_id;
    trajectory.original_baseline.text.parent_text = doc.text;
    trajectory.original_baseline.text.output_text = doc.text;
    {
        const StepMetrics metrics = measure_step(env, scorer, judges, doc, options, doc.text,
                                                 shell, detector);
        trajectory.original_baseline.verification_acc = metrics.acc;
        trajectory.original_baseline.kl_vs_original = metrics.kl;
        trajectory.original_baseline.sim_vs_original = metrics.sim;
        trajectory.original_baseline.human_likeness = metrics.human_likeness;
    }

    std::string previous_output = doc.text;
    std::string previous_id = doc.doc_id;
    for (std::size_t order = 1; order <= 2 * options.n_cycles; ++order) {
        const bool is_mimic = order % 2 == 1;
        const TaskKind kind = is_mimic ? TaskKind::mimic : TaskKind::obfuscate;
        const ProviderHandle& judge = is_mimic ? judges.am : judges.ao;

        CycleStep step;
        step.cycle_index = (order + 1) / 2;
        step.step_kind = kind;
        step.step_order = order;

        try {
            // previous output as style exemplar, original document as input
            const Context exemplar = context_from_texts(shell, {previous_output}, "#step");
            step.text = transform_text(env, judge, kind, exemplar, previous_id, previous_output,
                                       target_words, static_cast<int>(order));
            step.text.parent_text = previous_output;

            const StepMetrics metrics = measure_step(env, scorer, judges, doc, options,
                                                     step.text.output_text, shell, detector);
            step.verification_acc = metrics.acc;
            step.kl_vs_original = metrics.kl;
            step.sim_vs_original = metrics.sim;
            step.human_likeness = metrics.human_likeness;
        } catch (const Error& e) {
            trajectory.abort_reason = e.what();
            break;
        }

        previous_output = step.text.output_text;
        previous_id = doc.doc_id + "#s" + std::to_string(order);
        trajectory.steps.push_back(std::move(step));
    }
    return trajectory;
}

std::vector<StepAggregate> summarize_trajectories(const std::vector<Trajectory>& trajectories) {
    if (trajectories.empty()) return {};
    const std::size_t n_cycles = trajectories.front().n_cycles;
    for (const Trajectory& t : trajectories) {
        if (t.n_cycles != n_cycles) throw MixedCycleCounts();
    }

    const std::size_t points = 2 * n_cycles + 1;
    std::vector<StepAggregate> series(points);
    std::vector<std::size_t> counts(points, 0);
    std::vector<std::size_t> human_counts(points, 0);
    std::vector<double> human_sums(points, 0.0);

    auto fold = [&](const CycleStep& step) {
        StepAggregate& agg = series[step.step_order];
        agg.step_order = step.step_order;
        agg.step_kind = step_kind_label(step);
        agg.acc += step.verification_acc;
        agg.kl += step.kl_vs_original;
        agg.sim += step.sim_vs_original;
        ++counts[step.step_order];
        if (step.human_likeness) {
            human_sums[step.step_order] += *step.human_likeness;
            ++human_counts[step.step_order];
        }
    };
    for (const Trajectory& t : trajectories) {
        fold(t.original_baseline);
        for (const CycleStep& step : t.steps) fold(step);
    }

    for (std::size_t i = 0; i < points; ++i) {
        if (counts[i] == 0) continue;
        const double n = static_cast<double>(counts[i]);
        series[i].acc /= n;
        series[i].kl /= n;
        series[i].sim /= n;
        if (human_counts[i] > 0) {
            series[i].human_likeness = human_sums[i] / static_cast<double>(human_counts[i]);
        }
    }
    return series;
}

}  // namespace apeval
