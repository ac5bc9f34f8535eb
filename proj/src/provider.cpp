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

#include "apeval/provider.hpp"

#include <unistd.h>

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <thread>

#include <httplib.h>

#include "apeval/errors.hpp"
#include "apeval/hash.hpp"
#include "apeval/rng.hpp"
#include "apeval/tokenize.hpp"

namespace apeval {

using nlohmann::json;

std::string canonical_request(const ProviderHandle& provider, const PromptSpec& prompt) {
    // nlohmann objects serialize with sorted keys, so this is stable
    json canon{{"context_text", prompt.context_text},
               {"instruction_text", prompt.instruction_text},
               {"model_name", provider.model_name},
               {"provider_id", provider.provider_id},
               {"system_text", prompt.system_text},
               {"task_kind", task_kind_name(prompt.task_kind)},
               {"task_text", prompt.task_text},
               {"temperature", provider.temperature}};
    return canon.dump();
}

std::string request_hash(const ProviderHandle& provider, const PromptSpec& prompt) {
    return sha256_hex(canonical_request(provider, prompt));
}

Verdict parse_verdict(const std::string& raw_response) {
    std::string token;
    for (unsigned char c : raw_response) {
        if (std::isalpha(c) != 0) {
            token.push_back(static_cast<char>(std::tolower(c)));
            if (token.size() > 3) break;
        } else if (!token.empty()) {
            break;
        }
    }
    if (token == "yes") return {true, raw_response};
    if (token == "no") return {false, raw_response};
    throw UnparseableVerdict(raw_response);
}

std::optional<Verdict> try_parse_verdict(const std::string& raw_response) {
    try {
        return parse_verdict(raw_response);
    } catch (const UnparseableVerdict&) {
        return std::nullopt;
    }
}

std::string credential_env_var(const std::string& provider_id) {
    std::string var = "APEVAL_";
    for (unsigned char c : provider_id) {
        var.push_back(std::isalnum(c) != 0 ? static_cast<char>(std::toupper(c)) : '_');
    }
    var += "_API_KEY";
    return var;
}

// -- mock transport ---------------------------------------------------------

namespace {

std::string reverse_words(const std::string& text) {
    auto words = whitespace_tokens(text);
    std::string out;
    for (auto it = words.rbegin(); it != words.rend(); ++it) {
        if (!out.empty()) out.push_back(' ');
        out += *it;
    }
    return out;
}

std::string synonym_noise(const std::string& text, std::uint64_t seed) {
    static constexpr char kAlphabet[] = "abcdefghijklmnopqrstuvwxyz";
    auto words = whitespace_tokens(text);
    std::string out;
    for (const std::string& word : words) {
        if (!out.empty()) out.push_back(' ');
        const std::uint64_t h = fnv1a64(word, 0xcbf29ce484222325ULL ^ (seed * 0x9e3779b97f4a7c15ULL));
        if (h % 4 == 0) {
            // deterministic out-of-vocabulary replacement token
            std::string synth = "zq";
            std::uint64_t v = h >> 2;
            for (int i = 0; i < 6; ++i) {
                synth.push_back(kAlphabet[v % 26]);
                v /= 26;
            }
            out += synth;
        } else {
            out += word;
        }
    }
    return out.empty() ? text : out;
}

std::unordered_set<std::string> word_bigrams(const std::string& text) {
    const auto tokens = metric_tokens(text);
    std::unordered_set<std::string> grams;
    if (tokens.size() < 2) {
        grams.insert(tokens.begin(), tokens.end());
        return grams;
    }
    for (std::size_t i = 0; i + 1 < tokens.size(); ++i) {
        grams.insert(tokens[i] + ' ' + tokens[i + 1]);
    }
    return grams;
}

/// Fraction of the input's word bigrams that appear in the claimed-author
/// sample block. Degrades to unigrams for one-word inputs.
double sample_overlap(const PromptPayload& payload) {
    const auto input_grams = word_bigrams(payload.input_text);
    if (input_grams.empty()) return 0.0;
    std::unordered_set<std::string> sample_grams;
    for (std::size_t i = 0; i < payload.sample_texts.size(); ++i) {
        if (!payload.sample_by_author[i]) continue;
        auto grams = word_bigrams(payload.sample_texts[i]);
        sample_grams.merge(grams);
    }
    std::size_t shared = 0;
    for (const auto& gram : input_grams) {
        if (sample_grams.count(gram) > 0) ++shared;
    }
    return static_cast<double>(shared) / static_cast<double>(input_grams.size());
}

std::string mock_verify(const MockBehavior& mock, const ProviderHandle& provider,
                        const RenderedPrompt& prompt) {
    switch (mock.verify_rule) {
        case VerifyRule::always_yes:
            return "yes";
        case VerifyRule::always_no:
            return "no";
        case VerifyRule::coin_flip: {
            const std::uint64_t h =
                fnv1a64(canonical_request(provider, prompt.spec), mock.seed * 2 + 1);
            return (h & 1) != 0 ? "yes" : "no";
        }
        case VerifyRule::overlap:
            return sample_overlap(prompt.payload) >= mock.overlap_threshold ? "yes" : "no";
        case VerifyRule::scripted:
            return mock.accept_texts && mock.accept_texts->count(prompt.payload.input_text) > 0
                       ? "yes"
                       : "no";
        case VerifyRule::oracle: {
            if (!mock.author_tags) return "no";
            auto it = mock.author_tags->find(prompt.payload.input_text);
            if (it == mock.author_tags->end()) return "no";
            return it->second == prompt.payload.claimed_author_id ||
                           it->second == prompt.payload.claimed_author_name
                       ? "yes"
                       : "no";
        }
    }
    return "no";
}

}  // namespace

std::string MockTransport::complete(const ProviderHandle& provider,
                                    const RenderedPrompt& prompt) {
    if (provider.kind != ProviderKind::mock || !provider.mock) {
        throw Error("mock transport got a non-mock provider: " + provider.provider_id);
    }
    const MockBehavior& mock = *provider.mock;
    if (prompt.spec.task_kind == TaskKind::verify) {
        return mock_verify(mock, provider, prompt);
    }
    switch (mock.text_rule) {
        case TextRule::identity: return prompt.payload.input_text;
        case TextRule::word_reverse: return reverse_words(prompt.payload.input_text);
        case TextRule::synonym_noise: return synonym_noise(prompt.payload.input_text, mock.seed);
        case TextRule::constant: return mock.constant_text;
    }
    return prompt.payload.input_text;
}

ProviderHandle make_mock_provider(TextRule rule, const std::string& provider_id,
                                  std::uint64_t seed, const std::string& constant_text) {
    ProviderHandle provider;
    provider.provider_id = provider_id;
    provider.model_name = "mock";
    provider.kind = ProviderKind::mock;
    MockBehavior mock;
    mock.text_rule = rule;
    mock.seed = seed;
    mock.constant_text = constant_text;
    provider.mock = std::move(mock);
    return provider;
}

// -- HTTP transport ----------------------------------------------------------

namespace {

struct ParsedUrl {
    std::string base;  // scheme://host[:port]
    std::string path;
};

ParsedUrl split_url(const std::string& endpoint) {
    const auto scheme_end = endpoint.find("://");
    if (scheme_end == std::string::npos) {
        throw Error("endpoint must include a scheme: " + endpoint);
    }
    const auto path_start = endpoint.find('/', scheme_end + 3);
    if (path_start == std::string::npos) {
        return {endpoint, "/"};
    }
    return {endpoint.substr(0, path_start), endpoint.substr(path_start)};
}

}  // namespace

std::string HttpTransport::complete(const ProviderHandle& provider,
                                    const RenderedPrompt& prompt) {
    const std::string var = credential_env_var(provider.provider_id);
    const char* key = std::getenv(var.c_str());
    if (key == nullptr || *key == '\0') {
        throw AuthMissing(var);
    }
    if (provider.endpoint.empty()) {
        throw Error("provider " + provider.provider_id + " has no endpoint");
    }

    const ParsedUrl url = split_url(provider.endpoint);
    httplib::Client client(url.base);
    client.set_connection_timeout(30, 0);
    client.set_read_timeout(120, 0);

    const json body{
        {"model", provider.model_name},
        {"temperature", provider.temperature},
        {"messages",
         json::array({json{{"role", "system"}, {"content", prompt.spec.system_text}},
                      json{{"role", "user"},
                           {"content", prompt.spec.instruction_text + "\n\n" +
                                           prompt.spec.context_text + "\n\n" +
                                           prompt.spec.task_text}}})}};

    httplib::Headers headers{{"Authorization", std::string("Bearer ") + key}};
    auto res = client.Post(url.path, headers, body.dump(), "application/json");
    if (!res) {
        throw Error("transport error: " + httplib::to_string(res.error()));
    }
    if (res->status != 200) {
        throw Error("HTTP " + std::to_string(res->status) + " from " + provider.provider_id);
    }

    try {
        const json reply = json::parse(res->body);
        return reply.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const json::exception& e) {
        throw Error(std::string("malformed completion response: ") + e.what());
    }
}

// -- cache -------------------------------------------------------------------

GenerationCache::GenerationCache(std::filesystem::path root) : root_(std::move(root)) {
    std::filesystem::create_directories(root_);
}

std::filesystem::path GenerationCache::entry_path(const std::string& hash) const {
    return root_ / hash.substr(0, 2) / (hash + ".json");
}

std::optional<json> GenerationCache::lookup(const std::string& hash) const {
    const auto path = entry_path(hash);
    std::ifstream in(path);
    if (!in) {
        misses_.fetch_add(1, std::memory_order_relaxed);
        return std::nullopt;
    }
    try {
        json entry = json::parse(in);
        hits_.fetch_add(1, std::memory_order_relaxed);
        return entry;
    } catch (const json::exception& e) {
        throw Error("corrupt cache entry " + path.string() + ": " + e.what());
    }
}

void GenerationCache::insert(const std::string& hash, const json& entry) const {
    const auto path = entry_path(hash);
    if (std::filesystem::exists(path)) {
        return;  // write-once
    }
    std::filesystem::create_directories(path.parent_path());
    const auto tmp = path.string() + ".tmp" + std::to_string(::getpid());
    {
        std::ofstream out(tmp);
        if (!out) {
            throw Error("cannot write cache entry: " + tmp);
        }
        out << entry.dump(2) << '\n';
    }
    std::filesystem::rename(tmp, path);
}

// -- generate ----------------------------------------------------------------

namespace {

std::string utc_timestamp() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace

GenerationRecord generate(const ProviderHandle& provider, const RenderedPrompt& prompt,
                          const GenerationCache& cache, Transport& transport,
                          const GenerateOptions& options) {
    GenerationRecord record;
    record.request_hash = request_hash(provider, prompt.spec);
    record.provider_id = provider.provider_id;
    record.prompt = prompt.spec;

    if (auto entry = cache.lookup(record.request_hash)) {
        record.output_text = entry->at("response").at("output_text").get<std::string>();
        record.latency_ms = entry->at("response").value("latency_ms", 0.0);
        record.retrieved_from_cache = true;
        return record;
    }
    if (options.offline && provider.kind == ProviderKind::http) {
        throw OfflineCacheMiss(record.request_hash);
    }

    std::string last_error;
    for (int attempt = 0; attempt <= options.retry.max_retries; ++attempt) {
        if (attempt > 0) {
            std::this_thread::sleep_for(options.retry.base_backoff * (1 << (attempt - 1)));
        }
        const auto start = std::chrono::steady_clock::now();
        try {
            record.output_text = transport.complete(provider, prompt);
            record.latency_ms = std::chrono::duration<double, std::milli>(
                                    std::chrono::steady_clock::now() - start)
                                    .count();
            last_error.clear();
            break;
        } catch (const AuthMissing&) {
            throw;  // retrying cannot conjure a credential
        } catch (const Error& e) {
            last_error = e.what();
        }
    }
    if (!last_error.empty()) {
        throw ProviderUnavailable(provider.provider_id, last_error);
    }
    if (trimmed(record.output_text).empty()) {
        throw EmptyCompletion(provider.provider_id);
    }

    const json entry{{"request",
                      {{"provider_id", provider.provider_id},
                       {"model_name", provider.model_name},
                       {"temperature", provider.temperature},
                       {"task_kind", task_kind_name(prompt.spec.task_kind)},
                       {"system_text", prompt.spec.system_text},
                       {"instruction_text", prompt.spec.instruction_text},
                       {"context_text", prompt.spec.context_text},
                       {"task_text", prompt.spec.task_text}}},
                     {"response",
                      {{"output_text", record.output_text}, {"latency_ms", record.latency_ms}}},
                     {"timestamp", utc_timestamp()}};
    cache.insert(record.request_hash, entry);
    return record;
}

// -- detector ----------------------------------------------------------------

double detect_human_likeness(const DetectorHandle& detector, const std::string& text,
                             const GenerationCache& cache, bool offline) {
    const json canon{{"detector_id", detector.detector_id}, {"task", "detect"}, {"text", text}};
    const std::string hash = sha256_hex(canon.dump());

    if (auto entry = cache.lookup(hash)) {
        return entry->at("response").at("human_probability").get<double>();
    }

    double score = 0.0;
    if (detector.kind == DetectorKind::mock_vocab) {
        const auto tokens = metric_tokens(text);
        if (!tokens.empty() && detector.vocabulary) {
            std::size_t known = 0;
            for (const auto& token : tokens) {
                if (detector.vocabulary->count(token) > 0) ++known;
            }
            score = static_cast<double>(known) / static_cast<double>(tokens.size());
        }
    } else {
        if (offline) {
            throw DetectorUnavailable("offline mode and no cache entry");
        }
        const std::string var = credential_env_var(detector.detector_id);
        const char* key = std::getenv(var.c_str());
        if (key == nullptr || *key == '\0') {
            throw DetectorUnavailable("no credential; set " + var);
        }
        try {
            const ParsedUrl url = split_url(detector.endpoint);
            httplib::Client client(url.base);
            client.set_connection_timeout(30, 0);
            client.set_read_timeout(60, 0);
            httplib::Headers headers{{"Authorization", std::string("Bearer ") + key}};
            const json body{{"text", text}};
            auto res = client.Post(url.path, headers, body.dump(), "application/json");
            if (!res || res->status != 200) {
                throw DetectorUnavailable(res ? "HTTP " + std::to_string(res->status)
                                              : httplib::to_string(res.error()));
            }
            score = json::parse(res->body).at("human_probability").get<double>();
        } catch (const json::exception& e) {
            throw DetectorUnavailable(std::string("malformed response: ") + e.what());
        }
    }
    score = std::min(1.0, std::max(0.0, score));

    const json entry{{"request", canon},
                     {"response", {{"human_probability", score}}},
                     {"timestamp", utc_timestamp()}};
    cache.insert(hash, entry);
    return score;
}

}  // namespace apeval
