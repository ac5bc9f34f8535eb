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

#include "apeval/stages.hpp"

#include "apeval/report.hpp"

#include <unistd.h>

#include <algorithm>
#include <ctime>
#include <fstream>
#include <map>
#include <memory>

#include "apeval/csv.hpp"
#include "apeval/cycle.hpp"
#include "apeval/errors.hpp"
#include "apeval/hash.hpp"
#include "apeval/interplay.hpp"
#include "apeval/lda.hpp"
#include "apeval/rng.hpp"
#include "apeval/tokenize.hpp"

namespace apeval {

namespace fs = std::filesystem;
using nlohmann::json;

std::vector<std::vector<std::string>> read_csv(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot read " + path.string());
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::string field;
        bool quoted = false;
        for (std::size_t i = 0; i < line.size(); ++i) {
            const char c = line[i];
            if (quoted) {
                if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else if (c == '"') {
                    quoted = false;
                } else {
                    field.push_back(c);
                }
            } else if (c == '"') {
                quoted = true;
            } else if (c == ',') {
                fields.push_back(std::move(field));
                field.clear();
            } else {
                field.push_back(c);
            }
        }
        fields.push_back(std::move(field));
        rows.push_back(std::move(fields));
    }
    return rows;
}

namespace {

std::string task_label(TaskKind task) {
    switch (task) {
        case TaskKind::obfuscate: return "AO";
        case TaskKind::mimic: return "AM";
        case TaskKind::verify: return "AV";
    }
    return "?";
}

void write_text_atomic(const fs::path& path, const std::string& content) {
    const auto tmp = path.string() + ".tmp" + std::to_string(::getpid());
    {
        std::ofstream out(tmp);
        if (!out) throw Error("cannot write " + tmp);
        out << content;
    }
    fs::rename(tmp, path);
}

void write_json_atomic(const fs::path& path, const json& value) {
    write_text_atomic(path, value.dump(2) + "\n");
}

std::string utc_stamp() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y%m%dT%H%M%SZ", &tm);
    return buf;
}

/// Everything a stage needs: loaded corpora with scorers, provider handles
/// with mock sidecars attached, the cache and the generation environment.
class StageContext {
public:
    explicit StageContext(const ExperimentConfig& config)
        : config_(config), cache_(effective_cache_dir(config)), env_(cache_, config.seed) {
        env_.gen_options.offline = config.offline;
        env_.budget.max_chars = config.prompt_char_budget;

        for (const CorpusConfig& cc : config.corpora) {
            if (!config.dataset_filter.empty() && cc.name != config.dataset_filter) continue;
            corpora_.push_back(std::make_unique<Corpus>(load_corpus(cc.path, cc.name)));
        }
        if (corpora_.empty()) {
            throw ConfigError(config.dataset_filter.empty()
                                  ? "no corpora loaded"
                                  : "dataset filter matches nothing: " + config.dataset_filter);
        }
        for (const auto& corpus : corpora_) {
            scorers_.push_back(std::make_unique<StyleScorer>(*corpus, config.metrics));
        }

        // oracle sidecar: every original text tagged with its author
        auto tags = std::make_shared<std::unordered_map<std::string, std::string>>();
        for (const auto& corpus : corpora_) {
            for (const Document& doc : corpus->documents) {
                tags->emplace(doc.text, doc.author_id);
            }
        }
        sidecar_ = tags;

        for (const ProviderConfig& pc : config.providers) {
            if (!config.provider_filter.empty() &&
                std::find(config.provider_filter.begin(), config.provider_filter.end(), pc.id) ==
                    config.provider_filter.end()) {
                continue;
            }
            ProviderHandle handle = make_provider_handle(pc);
            if (handle.mock) handle.mock->author_tags = sidecar_;
            providers_.push_back(std::move(handle));
        }
        if (providers_.empty()) {
            throw ConfigError("provider filter matches nothing");
        }
        for (const std::string& wanted : config.provider_filter) {
            if (std::none_of(config.providers.begin(), config.providers.end(),
                             [&](const ProviderConfig& pc) { return pc.id == wanted; })) {
                throw ConfigError("unknown provider in --providers: " + wanted);
            }
        }
    }

    const ExperimentConfig& config() const { return config_; }
    const std::vector<std::unique_ptr<Corpus>>& corpora() const { return corpora_; }
    const std::vector<std::unique_ptr<StyleScorer>>& scorers() const { return scorers_; }
    const std::vector<ProviderHandle>& providers() const { return providers_; }
    GenerationCache& cache() { return cache_; }
    ExperimentEnv& env() { return env_; }

    const ProviderHandle& provider(const std::string& id) const {
        for (const ProviderHandle& handle : providers_) {
            if (handle.provider_id == id) return handle;
        }
        throw MissingJudges("provider " + id + " is not configured (or filtered out)");
    }

private:
    ExperimentConfig config_;
    std::vector<std::unique_ptr<Corpus>> corpora_;
    std::vector<std::unique_ptr<StyleScorer>> scorers_;
    std::shared_ptr<std::unordered_map<std::string, std::string>> sidecar_;
    std::vector<ProviderHandle> providers_;
    GenerationCache cache_;
    ExperimentEnv env_;
};

/// Creates the fresh run directory and finalizes the manifest + latest.json.
class StageRun {
public:
    StageRun(const ExperimentConfig& config, const std::string& stage)
        : stage_(stage), output_dir_(config.output_dir), started_at_(utc_stamp()) {
        fs::create_directories(output_dir_);
        std::string base = stage + "_" + started_at_;
        fs::path dir = output_dir_ / base;
        for (int k = 2; fs::exists(dir); ++k) {
            dir = output_dir_ / (base + "_" + std::to_string(k));
        }
        fs::create_directories(dir);
        run_dir_ = dir;
        manifest_["stage"] = stage;
        manifest_["config_hash"] = config_hash(config);
        manifest_["started_at"] = started_at_;
        manifest_["completed"] = false;
    }

    const fs::path& dir() const { return run_dir_; }
    json& manifest() { return manifest_; }

    void record_output(const std::string& name) { manifest_["outputs"].push_back(name); }

    StageResult finish(StageContext& ctx) {
        manifest_["finished_at"] = utc_stamp();
        manifest_["cache_hits"] = ctx.cache().hits();
        manifest_["cache_misses"] = ctx.cache().misses();
        manifest_["transport_calls"] = ctx.env().transports.total_calls();
        manifest_["completed"] = true;
        write_json_atomic(run_dir_ / "manifest.json", manifest_);

        // register as the latest run of this stage
        const fs::path latest_path = output_dir_ / "latest.json";
        json latest = json::object();
        if (fs::exists(latest_path)) {
            std::ifstream in(latest_path);
            try {
                latest = json::parse(in);
            } catch (const json::exception&) {
                latest = json::object();
            }
        }
        latest[stage_] = run_dir_.filename().string();
        write_json_atomic(latest_path, latest);

        return {stage_, run_dir_, manifest_};
    }

private:
    std::string stage_;
    fs::path output_dir_;
    std::string started_at_;
    fs::path run_dir_;
    json manifest_;
};

IsolationOptions isolation_options(const ExperimentConfig& config) {
    IsolationOptions options;
    options.context_samples = config.context_samples;
    options.eval_docs_per_author = config.eval_docs_per_author;
    options.av_probes_per_class = config.av_probes_per_class;
    options.with_metadata = config.isolation_with_metadata;
    options.target_words = config.target_words;
    return options;
}

/// Isolation rows pooled over datasets (weighted by evaluation counts).
std::vector<IsolationScore> isolation_rows(StageContext& ctx) {
    struct Sums {
        double ppl = 0.0, sim = 0.0, acc = 0.0;
        std::size_t n_style = 0, n_av = 0;
    };
    std::map<std::pair<std::string, std::string>, Sums> sums;  // (provider, task label)

    for (const auto& scorer : ctx.scorers()) {
        IsolationRunner runner(ctx.env(), *scorer, isolation_options(ctx.config()));
        for (const ProviderHandle& provider : ctx.providers()) {
            for (const IsolationScore& row : runner.evaluate_provider(provider)) {
                Sums& s = sums[{row.provider_id, task_label(row.task)}];
                if (row.task == TaskKind::verify) {
                    s.acc += row.accuracy.value_or(0.0) * static_cast<double>(row.n_evaluated);
                    s.n_av += row.n_evaluated;
                } else {
                    s.ppl += row.ppl_norm.value_or(0.0) * static_cast<double>(row.n_evaluated);
                    s.sim += row.sim.value_or(0.0) * static_cast<double>(row.n_evaluated);
                    s.n_style += row.n_evaluated;
                }
            }
        }
    }

    std::vector<IsolationScore> rows;
    for (const ProviderHandle& provider : ctx.providers()) {
        for (TaskKind task : {TaskKind::obfuscate, TaskKind::mimic, TaskKind::verify}) {
            const Sums& s = sums.at({provider.provider_id, task_label(task)});
            IsolationScore row;
            row.provider_id = provider.provider_id;
            row.task = task;
            if (task == TaskKind::verify) {
                row.accuracy = s.n_av == 0 ? 0.0 : s.acc / static_cast<double>(s.n_av);
                row.n_evaluated = s.n_av;
            } else {
                const double n = static_cast<double>(std::max<std::size_t>(s.n_style, 1));
                row.ppl_norm = s.ppl / n;
                row.sim = s.sim / n;
                row.n_evaluated = s.n_style;
            }
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

JudgeAssignment judges_from_rows(const ExperimentConfig& config,
                                 const std::vector<IsolationScore>& rows) {
    if (config.judges) {
        JudgeAssignment assignment;
        assignment.ao_judge = config.judges->ao;
        assignment.am_judge = config.judges->am;
        assignment.av_judge = config.judges->av;
        assignment.basis_kind = "override";
        assignment.basis = rows;
        return assignment;
    }
    return select_judges(rows, am_rank_mode_from_name(config.am_rank_mode));
}

json judges_to_json(const JudgeAssignment& judges) {
    json scores = json::array();
    for (const IsolationScore& row : judges.basis) {
        scores.push_back({{"provider", row.provider_id},
                          {"task", task_label(row.task)},
                          {"ppl_norm", row.ppl_norm ? json(*row.ppl_norm) : json()},
                          {"sim", row.sim ? json(*row.sim) : json()},
                          {"accuracy", row.accuracy ? json(*row.accuracy) : json()},
                          {"n", row.n_evaluated}});
    }
    return json{{"ao", judges.ao_judge},
                {"am", judges.am_judge},
                {"av", judges.av_judge},
                {"basis", judges.basis_kind},
                {"scores", scores}};
}

void write_isolation_csv(const fs::path& path, const std::vector<IsolationScore>& rows) {
    CsvWriter csv(path);
    csv.row({"provider", "task", "ppl_norm", "sim", "accuracy", "n"});
    for (const IsolationScore& row : rows) {
        csv.row({row.provider_id, task_label(row.task), opt_field(row.ppl_norm),
                 opt_field(row.sim), opt_field(row.accuracy), std::to_string(row.n_evaluated)});
    }
}

/// Judges for pairwise/cycle: config override, else the latest isolate run's
/// judges.json, else computed inline from a fresh isolation pass.
JudgeAssignment resolve_judges(StageContext& ctx) {
    const ExperimentConfig& config = ctx.config();
    if (config.judges) {
        JudgeAssignment assignment;
        assignment.ao_judge = config.judges->ao;
        assignment.am_judge = config.judges->am;
        assignment.av_judge = config.judges->av;
        assignment.basis_kind = "override";
        return assignment;
    }
    try {
        const fs::path dir = latest_run_dir(config.output_dir, "isolate");
        std::ifstream in(dir / "judges.json");
        if (in) {
            const json j = json::parse(in);
            JudgeAssignment assignment;
            assignment.ao_judge = j.at("ao").get<std::string>();
            assignment.am_judge = j.at("am").get<std::string>();
            assignment.av_judge = j.at("av").get<std::string>();
            assignment.basis_kind = "isolate-run";
            return assignment;
        }
    } catch (const MissingStageOutput&) {
        // fall through to inline computation
    }
    return judges_from_rows(config, isolation_rows(ctx));
}

JudgeHandles judge_handles(const StageContext& ctx, const JudgeAssignment& judges) {
    return {ctx.provider(judges.ao_judge), ctx.provider(judges.am_judge),
            ctx.provider(judges.av_judge)};
}

InterplayOptions interplay_options(const ExperimentConfig& config) {
    InterplayOptions options;
    options.context_samples = config.context_samples;
    options.eval_docs_per_author = config.eval_docs_per_author;
    options.pool_author_docs = config.pool_author_docs;
    options.pool_imposter_docs = config.pool_imposter_docs;
    options.target_words = config.target_words;
    return options;
}

}  // namespace

fs::path effective_cache_dir(const ExperimentConfig& config) {
    const char* env = std::getenv("APEVAL_CACHE_DIR");
    if (env != nullptr && *env != '\0') return fs::path(env);
    return config.cache_dir;
}

fs::path latest_run_dir(const fs::path& output_dir, const std::string& stage) {
    const fs::path latest_path = output_dir / "latest.json";
    std::ifstream in(latest_path);
    if (!in) throw MissingStageOutput(stage);
    json latest;
    try {
        latest = json::parse(in);
    } catch (const json::exception&) {
        throw MissingStageOutput(stage);
    }
    if (!latest.contains(stage)) throw MissingStageOutput(stage);
    const fs::path dir = output_dir / latest[stage].get<std::string>();
    if (!fs::exists(dir)) throw MissingStageOutput(stage);
    return dir;
}

StageResult cmd_isolate(const ExperimentConfig& config) {
    StageContext ctx(config);
    StageRun run(config, "isolate");

    const std::vector<IsolationScore> rows = isolation_rows(ctx);
    const JudgeAssignment judges = judges_from_rows(config, rows);

    write_isolation_csv(run.dir() / "isolation.csv", rows);
    run.record_output("isolation.csv");
    write_json_atomic(run.dir() / "judges.json", judges_to_json(judges));
    run.record_output("judges.json");

    run.manifest()["factors"] = {{"providers", ctx.providers().size()},
                                 {"tasks", 3},
                                 {"datasets", ctx.corpora().size()}};
    run.manifest()["row_counts"] = {{"isolation.csv", rows.size()}};
    return run.finish(ctx);
}

StageResult cmd_pairwise(const ExperimentConfig& config) {
    StageContext ctx(config);
    StageRun run(config, "pairwise");

    const JudgeAssignment judges = resolve_judges(ctx);
    const JudgeHandles handles = judge_handles(ctx, judges);
    write_json_atomic(run.dir() / "judges.json", judges_to_json(judges));
    run.record_output("judges.json");

    static constexpr Direction kDirections[] = {Direction::OM, Direction::OV, Direction::MO,
                                                Direction::MV, Direction::VO, Direction::VM};

    CsvWriter csv(run.dir() / "pairwise.csv");
    csv.row({"direction", "actor", "judge", "dataset", "with_metadata", "kl", "sim", "acc", "n"});
    CsvWriter pool_csv(run.dir() / "verification_pool.csv");
    pool_csv.row({"verifier", "dataset", "with_metadata", "tp", "fp", "tn", "fn", "precision",
                  "recall"});

    std::size_t row_count = 0;
    for (const auto& scorer : ctx.scorers()) {
        InterplayRunner runner(ctx.env(), *scorer, handles, interplay_options(config));
        for (bool with_metadata : config.with_metadata) {
            for (Direction direction : kDirections) {
                for (const ProviderHandle& actor : ctx.providers()) {
                    const PairwiseResult cell = runner.run_cell(direction, actor, with_metadata);
                    const bool has_style = !cell.accuracy.has_value();
                    csv.row({direction_name(cell.direction), cell.actor_provider,
                             cell.judge_provider, cell.dataset,
                             cell.with_metadata ? "true" : "false",
                             has_style ? format_double(cell.report.kl) : "",
                             has_style ? format_double(cell.report.sim) : "",
                             cell.accuracy ? format_double(*cell.accuracy) : "",
                             std::to_string(cell.n)});
                    ++row_count;
                }
            }
            // the verifier-actor pool pass behind VO/VM, reported as
            // precision/recall per actor
            for (const ProviderHandle& actor : ctx.providers()) {
                const ConfusionCounts counts = runner.pool_counts(actor, with_metadata);
                const ClassificationMetrics cm = classification_metrics(counts);
                pool_csv.row({actor.provider_id, scorer->corpus().name,
                              with_metadata ? "true" : "false", std::to_string(counts.tp),
                              std::to_string(counts.fp), std::to_string(counts.tn),
                              std::to_string(counts.fn), format_double(cm.precision),
                              format_double(cm.recall)});
            }
        }
    }
    run.record_output("pairwise.csv");
    run.record_output("verification_pool.csv");

    run.manifest()["factors"] = {{"directions", 6},
                                 {"actors", ctx.providers().size()},
                                 {"datasets", ctx.corpora().size()},
                                 {"metadata_flags", config.with_metadata.size()}};
    run.manifest()["row_counts"] = {{"pairwise.csv", row_count}};
    run.manifest()["judges"] = {{"ao", judges.ao_judge},
                                {"am", judges.am_judge},
                                {"av", judges.av_judge}};
    return run.finish(ctx);
}

StageResult cmd_cycle(const ExperimentConfig& config) {
    StageContext ctx(config);
    StageRun run(config, "cycle");

    const JudgeAssignment judges = resolve_judges(ctx);
    const JudgeHandles handles = judge_handles(ctx, judges);

    CsvWriter csv(run.dir() / "cycles.csv");
    csv.row({"doc_id", "dataset", "with_metadata", "cycle", "step_kind", "step_order", "acc",
             "kl", "sim", "human_likeness"});

    json series_json;
    series_json["n_cycles"] = config.n_cycles;
    series_json["series"] = json::array();

    // rounds/<round>_<AM|AO>.jsonl, one line per generated text
    std::map<std::pair<std::size_t, std::string>, std::vector<json>> round_dumps;

    std::size_t row_count = 0;
    std::size_t aborted = 0;
    for (const auto& scorer : ctx.scorers()) {
        const Corpus& corpus = scorer->corpus();

        std::optional<DetectorHandle> detector;
        if (config.detector) {
            DetectorHandle handle;
            handle.detector_id = config.detector->id;
            if (config.detector->kind == "http") {
                handle.kind = DetectorKind::http;
                handle.endpoint = config.detector->endpoint;
            } else {
                handle.kind = DetectorKind::mock_vocab;
                auto vocab = std::make_shared<std::unordered_set<std::string>>();
                for (const Document& doc : corpus.documents) {
                    for (const auto& token : metric_tokens(doc.text)) vocab->insert(token);
                }
                handle.vocabulary = vocab;
            }
            detector = std::move(handle);
        }

        for (bool with_metadata : config.with_metadata) {
            CycleOptions options;
            options.n_cycles = config.n_cycles;
            options.with_metadata = with_metadata;
            options.target_words = config.target_words;
            options.probe_with_step_output = config.cycle_probe_with_step_output;
            options.context_samples = config.context_samples;

            std::vector<Trajectory> trajectories;
            for (const AuthorRecord& author : corpus.authors) {
                const auto& idx = corpus.docs_of(author.author_id);
                SeededRng rng(derive_seed(config.seed,
                                          "cycle/eval/" + corpus.name + "/" + author.author_id));
                std::vector<std::size_t> picks;
                for (std::size_t pick : rng.sample_indices(
                         idx.size(), std::min(config.eval_docs_per_author, idx.size()))) {
                    picks.push_back(idx[pick]);
                }
                std::sort(picks.begin(), picks.end());
                for (std::size_t doc_idx : picks) {
                    trajectories.push_back(run_cycles(ctx.env(), *scorer, handles,
                                                      corpus.documents[doc_idx], options,
                                                      detector ? &*detector : nullptr));
                }
            }

            auto emit_step = [&](const Trajectory& t, const CycleStep& step) {
                csv.row({t.doc_id, t.dataset, t.with_metadata ? "true" : "false",
                         std::to_string(step.cycle_index), step_kind_label(step),
                         std::to_string(step.step_order), format_double(step.verification_acc),
                         format_double(step.kl_vs_original), format_double(step.sim_vs_original),
                         step.human_likeness ? format_double(*step.human_likeness) : ""});
                ++row_count;
            };
            for (const Trajectory& t : trajectories) {
                emit_step(t, t.original_baseline);
                for (const CycleStep& step : t.steps) {
                    emit_step(t, step);
                    round_dumps[{step.cycle_index, step_kind_label(step)}].push_back(
                        json{{"doc_id", t.doc_id},
                             {"dataset", t.dataset},
                             {"with_metadata", t.with_metadata},
                             {"round", step.cycle_index},
                             {"step_kind", step_kind_label(step)},
                             {"text", step.text.output_text}});
                }
                if (t.abort_reason) ++aborted;
            }

            json block;
            block["dataset"] = corpus.name;
            block["with_metadata"] = with_metadata;
            block["points"] = json::array();
            for (const StepAggregate& point : summarize_trajectories(trajectories)) {
                json p{{"step_order", point.step_order},
                       {"step_kind", point.step_kind},
                       {"acc", point.acc},
                       {"kl", point.kl},
                       {"sim", point.sim}};
                if (point.human_likeness) p["human_likeness"] = *point.human_likeness;
                block["points"].push_back(std::move(p));
            }
            series_json["series"].push_back(std::move(block));
        }
    }

    write_json_atomic(run.dir() / "series.json", series_json);
    run.record_output("cycles.csv");
    run.record_output("series.json");

    const fs::path rounds_dir = run.dir() / "rounds";
    fs::create_directories(rounds_dir);
    for (const auto& [key, lines] : round_dumps) {
        std::string content;
        for (const json& line : lines) {
            content += line.dump();
            content.push_back('\n');
        }
        const std::string name = std::to_string(key.first) + "_" + key.second + ".jsonl";
        write_text_atomic(rounds_dir / name, content);
        run.record_output("rounds/" + name);
    }

    run.manifest()["factors"] = {{"datasets", ctx.corpora().size()},
                                 {"metadata_flags", config.with_metadata.size()},
                                 {"steps_per_doc", 2 * config.n_cycles + 1}};
    run.manifest()["row_counts"] = {{"cycles.csv", row_count}};
    run.manifest()["aborted_trajectories"] = aborted;
    run.manifest()["judges"] = {{"ao", judges.ao_judge},
                                {"am", judges.am_judge},
                                {"av", judges.av_judge}};
    return run.finish(ctx);
}

StageResult cmd_topics(const ExperimentConfig& config) {
    StageContext ctx(config);
    StageRun run(config, "topics");

    const fs::path cycle_dir = latest_run_dir(config.output_dir, "cycle");
    const fs::path rounds_dir = cycle_dir / "rounds";
    if (!fs::exists(rounds_dir)) {
        throw MissingRounds(rounds_dir.string());
    }

    // round texts per dataset, keyed by (round, step kind)
    std::map<std::pair<std::size_t, std::string>,
             std::map<std::string, std::vector<std::string>>>
        rounds;
    bool any_round = false;
    for (const auto& entry : fs::directory_iterator(rounds_dir)) {
        if (entry.path().extension() != ".jsonl") continue;
        std::ifstream in(entry.path());
        std::string line;
        while (std::getline(in, line)) {
            if (trimmed(line).empty()) continue;
            const json record = json::parse(line);
            rounds[{record.at("round").get<std::size_t>(),
                    record.at("step_kind").get<std::string>()}]
                  [record.at("dataset").get<std::string>()]
                      .push_back(record.at("text").get<std::string>());
            any_round = true;
        }
    }
    if (!any_round) {
        throw MissingRounds(rounds_dir.string());
    }

    CsvWriter topics_csv(run.dir() / "topics.csv");
    topics_csv.row({"dataset", "round", "step", "topic_id", "rank", "word", "probability"});
    CsvWriter drift_csv(run.dir() / "drift.csv");
    drift_csv.row({"dataset", "round", "step", "drift", "baseline"});

    auto emit_topics = [&](const std::string& dataset, std::size_t round, const std::string& step,
                           const LdaModel& model, std::size_t n_words) {
        for (std::size_t topic = 0; topic < model.topics(); ++topic) {
            const TopicSummary summary = top_words(model, topic, n_words);
            for (std::size_t rank = 0; rank < summary.top_words.size(); ++rank) {
                topics_csv.row({dataset, std::to_string(round), step, std::to_string(topic),
                                std::to_string(rank + 1), summary.top_words[rank].first,
                                format_double(summary.top_words[rank].second)});
            }
        }
    };

    std::size_t skipped_rounds = 0;
    for (const auto& scorer : ctx.scorers()) {
        const Corpus& corpus = scorer->corpus();
        std::vector<std::string> original_texts;
        for (const Document& doc : corpus.documents) original_texts.push_back(doc.text);

        LdaOptions table_options;
        table_options.topics = config.lda.topics;
        table_options.alpha = config.lda.alpha;
        table_options.beta = config.lda.beta;
        table_options.iterations = config.lda.iterations;
        table_options.remove_stopwords = config.lda.stopwords;
        table_options.seed = derive_seed(config.seed, "topics/" + corpus.name + "/original");

        const LdaModel original_model = LdaModel::fit(original_texts, table_options);
        emit_topics(corpus.name, 0, "original", original_model, config.lda.top_words);

        // drift always scores with stopwords removed so function words do not
        // mask thematic movement
        LdaOptions drift_options = table_options;
        drift_options.remove_stopwords = true;
        drift_options.seed = derive_seed(config.seed, "topics/" + corpus.name + "/drift-ref");
        const LdaModel drift_model = LdaModel::fit(original_texts, drift_options);
        const double baseline = topic_drift(drift_model, original_texts);
        drift_csv.row({corpus.name, "0", "original", format_double(baseline),
                       format_double(baseline)});

        for (const auto& [key, by_dataset] : rounds) {
            auto it = by_dataset.find(corpus.name);
            if (it == by_dataset.end()) continue;
            const std::vector<std::string>& texts = it->second;

            if (texts.size() >= config.lda.topics) {
                LdaOptions round_options = table_options;
                round_options.seed =
                    derive_seed(config.seed, "topics/" + corpus.name + "/" +
                                                 std::to_string(key.first) + "/" + key.second);
                // shared vocabulary keeps per-round models comparable
                const LdaModel round_model =
                    LdaModel::fit(texts, round_options, original_model.vocabulary());
                emit_topics(corpus.name, key.first, key.second, round_model,
                            config.lda.top_words);
            } else {
                ++skipped_rounds;
            }
            drift_csv.row({corpus.name, std::to_string(key.first), key.second,
                           format_double(topic_drift(drift_model, texts)),
                           format_double(baseline)});
        }
    }
    run.record_output("topics.csv");
    run.record_output("drift.csv");

    run.manifest()["factors"] = {{"datasets", ctx.corpora().size()},
                                 {"topics", config.lda.topics},
                                 {"top_words", config.lda.top_words}};
    run.manifest()["skipped_rounds"] = skipped_rounds;
    return run.finish(ctx);
}

StageResult cmd_report(const ExperimentConfig& config) {
    StageContext ctx(config);
    StageRun run(config, "report");

    const auto result = render_report(config);
    write_text_atomic(run.dir() / "report.md", result.first);
    write_json_atomic(run.dir() / "summary.json", result.second);
    run.record_output("report.md");
    run.record_output("summary.json");
    return run.finish(ctx);
}

}  // namespace apeval
