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

#include "apeval/config.hpp"

#include <fstream>
#include <set>

#include "apeval/errors.hpp"
#include "apeval/hash.hpp"

namespace apeval {

using nlohmann::json;

namespace {

TextRule text_rule_from_name(const std::string& name) {
    if (name == "identity") return TextRule::identity;
    if (name == "word_reverse") return TextRule::word_reverse;
    if (name == "synonym_noise") return TextRule::synonym_noise;
    if (name == "constant") return TextRule::constant;
    throw ConfigError("unknown mock rule: " + name);
}

VerifyRule verify_rule_from_name(const std::string& name) {
    if (name == "oracle") return VerifyRule::oracle;
    if (name == "always_yes") return VerifyRule::always_yes;
    if (name == "always_no") return VerifyRule::always_no;
    if (name == "coin_flip") return VerifyRule::coin_flip;
    if (name == "overlap") return VerifyRule::overlap;
    if (name == "scripted") return VerifyRule::scripted;
    throw ConfigError("unknown mock verify rule: " + name);
}

template <typename T>
T get_or(const json& obj, const char* key, T fallback) {
    if (!obj.contains(key)) return fallback;
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
    }
}

}  // namespace

AmRankMode am_rank_mode_from_name(const std::string& name) {
    if (name == "ppl_ascending") return AmRankMode::ppl_ascending;
    if (name == "ppl_ratio_to_one") return AmRankMode::ppl_ratio_to_one;
    throw ConfigError("unknown am_rank_mode: " + name);
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file: " + path.string());
    }
    json root;
    try {
        root = json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("parse error: ") + e.what());
    }
    if (!root.is_object()) {
        throw ConfigError("config must be a JSON object");
    }
    if (!root.contains("seed")) {
        throw ConfigError("seed is required; implicit randomness is not allowed");
    }

    ExperimentConfig config;
    config.seed = get_or<std::uint64_t>(root, "seed", 0);
    config.cache_dir = get_or<std::string>(root, "cache_dir", "cache");
    config.output_dir = get_or<std::string>(root, "output_dir", "out");

    if (!root.contains("corpora") || !root["corpora"].is_array() || root["corpora"].empty()) {
        throw ConfigError("at least one corpus is required");
    }
    for (const json& entry : root["corpora"]) {
        CorpusConfig corpus;
        corpus.name = get_or<std::string>(entry, "name", "");
        corpus.path = get_or<std::string>(entry, "path", "");
        if (corpus.name.empty() || corpus.path.empty()) {
            throw ConfigError("every corpus needs a name and a path");
        }
        config.corpora.push_back(std::move(corpus));
    }

    if (!root.contains("providers") || !root["providers"].is_array() ||
        root["providers"].empty()) {
        throw ConfigError("at least one provider is required");
    }
    std::set<std::string> seen_providers;
    for (const json& entry : root["providers"]) {
        ProviderConfig provider;
        provider.id = get_or<std::string>(entry, "id", "");
        if (provider.id.empty()) {
            throw ConfigError("every provider needs an id");
        }
        if (!seen_providers.insert(provider.id).second) {
            throw ConfigError("duplicate provider id: " + provider.id);
        }
        provider.kind = get_or<std::string>(entry, "kind", "mock");
        if (provider.kind != "mock" && provider.kind != "http") {
            throw ConfigError("provider kind must be mock or http: " + provider.id);
        }
        provider.endpoint = get_or<std::string>(entry, "endpoint", "");
        provider.model = get_or<std::string>(entry, "model", provider.id);
        provider.temperature = get_or<double>(entry, "temperature", 0.0);
        provider.max_in_flight = get_or<int>(entry, "max_in_flight", 1);
        provider.rule = get_or<std::string>(entry, "rule", "identity");
        provider.verify = get_or<std::string>(entry, "verify", "oracle");
        provider.mock_seed = get_or<std::uint64_t>(entry, "mock_seed", 0);
        provider.constant_text = get_or<std::string>(entry, "constant_text", "the the the");
        provider.overlap_threshold = get_or<double>(entry, "overlap_threshold", 0.5);
        if (provider.kind == "http" && provider.endpoint.empty()) {
            throw ConfigError("http provider needs an endpoint: " + provider.id);
        }
        text_rule_from_name(provider.rule);      // validate early
        verify_rule_from_name(provider.verify);  // validate early
        config.providers.push_back(std::move(provider));
    }

    if (root.contains("judges")) {
        const json& judges = root["judges"];
        JudgeOverride over;
        over.ao = get_or<std::string>(judges, "ao", "");
        over.am = get_or<std::string>(judges, "am", "");
        over.av = get_or<std::string>(judges, "av", "");
        for (const std::string& id : {over.ao, over.am, over.av}) {
            if (seen_providers.count(id) == 0) {
                throw ConfigError("judge override references unknown provider: " + id);
            }
        }
        config.judges = over;
    }

    if (root.contains("detector")) {
        const json& detector = root["detector"];
        DetectorConfig det;
        det.id = get_or<std::string>(detector, "id", "detector");
        det.kind = get_or<std::string>(detector, "kind", "mock_vocab");
        det.endpoint = get_or<std::string>(detector, "endpoint", "");
        if (det.kind != "mock_vocab" && det.kind != "http") {
            throw ConfigError("detector kind must be mock_vocab or http");
        }
        if (det.kind == "http" && det.endpoint.empty()) {
            throw ConfigError("http detector needs an endpoint");
        }
        config.detector = det;
    }

    config.context_samples = get_or<std::size_t>(root, "context_samples", 5);
    config.eval_docs_per_author = get_or<std::size_t>(root, "eval_docs_per_author", 2);
    config.av_probes_per_class = get_or<std::size_t>(root, "av_probes_per_class", 2);
    config.pool_author_docs = get_or<std::size_t>(root, "pool_author_docs", 10);
    config.pool_imposter_docs = get_or<std::size_t>(root, "pool_imposter_docs", 10);
    config.n_cycles = get_or<std::size_t>(root, "n_cycles", 5);
    config.isolation_with_metadata = get_or<bool>(root, "isolation_with_metadata", false);
    config.prompt_char_budget = get_or<std::size_t>(root, "prompt_char_budget", 0);
    if (root.contains("target_words")) {
        config.target_words = get_or<int>(root, "target_words", 0);
    }
    if (root.contains("with_metadata")) {
        config.with_metadata.clear();
        for (const json& flag : root["with_metadata"]) {
            config.with_metadata.push_back(flag.get<bool>());
        }
        if (config.with_metadata.empty()) {
            throw ConfigError("with_metadata must not be empty");
        }
    }

    if (root.contains("metrics")) {
        const json& metrics = root["metrics"];
        config.metrics.n_bins = get_or<std::size_t>(metrics, "n_bins", 20);
        config.metrics.lm_order = get_or<std::size_t>(metrics, "lm_order", 3);
        config.metrics.lm_discount = get_or<double>(metrics, "lm_discount", 0.75);
    }
    if (root.contains("lda")) {
        const json& lda = root["lda"];
        config.lda.topics = get_or<std::size_t>(lda, "topics", 10);
        config.lda.alpha = get_or<double>(lda, "alpha", 0.0);
        config.lda.beta = get_or<double>(lda, "beta", 0.01);
        config.lda.iterations = get_or<std::size_t>(lda, "iterations", 500);
        config.lda.top_words = get_or<std::size_t>(lda, "top_words", 10);
        config.lda.stopwords = get_or<bool>(lda, "stopwords", false);
    }
    config.am_rank_mode = get_or<std::string>(root, "am_rank_mode", "ppl_ascending");
    am_rank_mode_from_name(config.am_rank_mode);  // validate
    config.cycle_probe_with_step_output =
        get_or<bool>(root, "cycle_probe_with_step_output", false);

    return config;
}

json config_snapshot(const ExperimentConfig& config) {
    json snap;
    snap["seed"] = config.seed;
    snap["cache_dir"] = config.cache_dir.string();
    snap["output_dir"] = config.output_dir.string();
    snap["corpora"] = json::array();
    for (const CorpusConfig& corpus : config.corpora) {
        snap["corpora"].push_back({{"name", corpus.name}, {"path", corpus.path.string()}});
    }
    snap["providers"] = json::array();
    for (const ProviderConfig& provider : config.providers) {
        snap["providers"].push_back({{"id", provider.id},
                                     {"kind", provider.kind},
                                     {"endpoint", provider.endpoint},
                                     {"model", provider.model},
                                     {"temperature", provider.temperature},
                                     {"max_in_flight", provider.max_in_flight},
                                     {"rule", provider.rule},
                                     {"verify", provider.verify},
                                     {"mock_seed", provider.mock_seed},
                                     {"constant_text", provider.constant_text},
                                     {"overlap_threshold", provider.overlap_threshold}});
    }
    if (config.judges) {
        snap["judges"] = {{"ao", config.judges->ao},
                          {"am", config.judges->am},
                          {"av", config.judges->av}};
    }
    if (config.detector) {
        snap["detector"] = {{"id", config.detector->id},
                            {"kind", config.detector->kind},
                            {"endpoint", config.detector->endpoint}};
    }
    snap["context_samples"] = config.context_samples;
    snap["eval_docs_per_author"] = config.eval_docs_per_author;
    snap["av_probes_per_class"] = config.av_probes_per_class;
    snap["pool_author_docs"] = config.pool_author_docs;
    snap["pool_imposter_docs"] = config.pool_imposter_docs;
    snap["n_cycles"] = config.n_cycles;
    snap["with_metadata"] = config.with_metadata;
    snap["isolation_with_metadata"] = config.isolation_with_metadata;
    if (config.target_words) snap["target_words"] = *config.target_words;
    snap["prompt_char_budget"] = config.prompt_char_budget;
    snap["metrics"] = {{"n_bins", config.metrics.n_bins},
                       {"lm_order", config.metrics.lm_order},
                       {"lm_discount", config.metrics.lm_discount}};
    snap["lda"] = {{"topics", config.lda.topics},
                   {"alpha", config.lda.alpha},
                   {"beta", config.lda.beta},
                   {"iterations", config.lda.iterations},
                   {"top_words", config.lda.top_words},
                   {"stopwords", config.lda.stopwords}};
    snap["am_rank_mode"] = config.am_rank_mode;
    snap["cycle_probe_with_step_output"] = config.cycle_probe_with_step_output;
    snap["offline"] = config.offline;
    snap["provider_filter"] = config.provider_filter;
    snap["dataset_filter"] = config.dataset_filter;
    return snap;
}

std::string config_hash(const ExperimentConfig& config) {
    return sha256_hex(config_snapshot(config).dump());
}

ProviderHandle make_provider_handle(const ProviderConfig& provider_config) {
    ProviderHandle handle;
    handle.provider_id = provider_config.id;
    handle.endpoint = provider_config.endpoint;
    handle.model_name = provider_config.model;
    handle.max_in_flight = provider_config.max_in_flight;
    handle.temperature = provider_config.temperature;
    if (provider_config.kind == "http") {
        handle.kind = ProviderKind::http;
        return handle;
    }
    handle.kind = ProviderKind::mock;
    MockBehavior mock;
    mock.text_rule = text_rule_from_name(provider_config.rule);
    mock.verify_rule = verify_rule_from_name(provider_config.verify);
    mock.seed = provider_config.mock_seed;
    mock.constant_text = provider_config.constant_text;
    mock.overlap_threshold = provider_config.overlap_threshold;
    handle.mock = std::move(mock);
    return handle;
}

}  // namespace apeval
