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

#include <atomic>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "apeval/prompt.hpp"

namespace apeval {

enum class ProviderKind { http, mock };

enum class TextRule { identity, word_reverse, synonym_noise, constant };

enum class VerifyRule { oracle, always_yes, always_no, coin_flip, overlap, scripted };

/// Deterministic stand-in for a text-generation service. Mimic/obfuscate
/// requests run the text rule over the prompt's input text; verify requests
/// answer per the verify rule. Everything is a pure function of the prompt.
struct MockBehavior {
    TextRule text_rule = TextRule::identity;
    VerifyRule verify_rule = VerifyRule::oracle;
    std::uint64_t seed = 0;
    std::string constant_text = "the the the";
    double overlap_threshold = 0.5;
    /// oracle sidecar: exact text -> true author (id or display name)
    std::shared_ptr<const std::unordered_map<std::string, std::string>> author_tags;
    /// scripted verifier: texts to accept
    std::shared_ptr<const std::unordered_set<std::string>> accept_texts;
};

struct ProviderHandle {
    std::string provider_id;
    std::string endpoint;
    std::string model_name;
    int max_in_flight = 1;
    double temperature = 0.0;
    ProviderKind kind = ProviderKind::mock;
    std::optional<MockBehavior> mock;
};

struct GenerationRecord {
    std::string request_hash;
    std::string provider_id;
    PromptSpec prompt;
    std::string output_text;
    double latency_ms = 0.0;
    bool retrieved_from_cache = false;
};

struct Verdict {
    bool accepted = false;
    std::string raw_response;
};

/// Canonical serialization of everything that identifies a request; the
/// request hash is the SHA-256 of this string.
std::string canonical_request(const ProviderHandle& provider, const PromptSpec& prompt);
std::string request_hash(const ProviderHandle& provider, const PromptSpec& prompt);

/// Strict prefix parse: the first alphabetic token decides, case-insensitive,
/// regardless of surrounding whitespace or punctuation. Anything else throws
/// UnparseableVerdict; callers that must not fail treat that as a rejection.
Verdict parse_verdict(const std::string& raw_response);
std::optional<Verdict> try_parse_verdict(const std::string& raw_response);

class Transport {
public:
    virtual ~Transport() = default;
    virtual std::string complete(const ProviderHandle& provider,
                                 const RenderedPrompt& prompt) = 0;
};

class MockTransport : public Transport {
public:
    std::string complete(const ProviderHandle& provider, const RenderedPrompt& prompt) override;
};

/// Chat-completion style HTTP exchange: system + user message in, one text
/// choice out. Credentials come from APEVAL_<PROVIDER_ID>_API_KEY.
class HttpTransport : public Transport {
public:
    std::string complete(const ProviderHandle& provider, const RenderedPrompt& prompt) override;
};

/// Wraps another transport and counts completions; used to prove that cache
/// hits never reach the wire.
class CountingTransport : public Transport {
public:
    explicit CountingTransport(Transport& inner) : inner_(inner) {}
    std::string complete(const ProviderHandle& provider, const RenderedPrompt& prompt) override {
        calls_.fetch_add(1, std::memory_order_relaxed);
        return inner_.complete(provider, prompt);
    }
    std::size_t calls() const { return calls_.load(std::memory_order_relaxed); }

private:
    Transport& inner_;
    std::atomic<std::size_t> calls_{0};
};

/// Content-addressed, write-once response store: one JSON file per request at
/// <root>/<first-2-hex>/<hash>.json. Concurrent readers are safe; insertion
/// goes through a temp file + rename, and an existing entry is never
/// rewritten.
class GenerationCache {
public:
    explicit GenerationCache(std::filesystem::path root);

    std::optional<nlohmann::json> lookup(const std::string& hash) const;
    void insert(const std::string& hash, const nlohmann::json& entry) const;

    std::size_t hits() const { return hits_.load(std::memory_order_relaxed); }
    std::size_t misses() const { return misses_.load(std::memory_order_relaxed); }
    const std::filesystem::path& root() const { return root_; }

private:
    std::filesystem::path entry_path(const std::string& hash) const;

    std::filesystem::path root_;
    mutable std::atomic<std::size_t> hits_{0};
    mutable std::atomic<std::size_t> misses_{0};
};

struct RetryPolicy {
    int max_retries = 3;  // after the initial attempt
    std::chrono::milliseconds base_backoff{1000};
};

struct GenerateOptions {
    RetryPolicy retry;
    bool offline = false;  // forbid network; HTTP providers fail on cache miss
};

/// Serve the request from the cache when possible; otherwise call the
/// transport with bounded retries and store the result write-once.
GenerationRecord generate(const ProviderHandle& provider, const RenderedPrompt& prompt,
                          const GenerationCache& cache, Transport& transport,
                          const GenerateOptions& options = {});

ProviderHandle make_mock_provider(TextRule rule, const std::string& provider_id = "mock",
                                  std::uint64_t seed = 0,
                                  const std::string& constant_text = "the the the");

/// Env var name holding the provider's credential.
std::string credential_env_var(const std::string& provider_id);

// -- external detector -----------------------------------------------------

enum class DetectorKind { http, mock_vocab };

struct DetectorHandle {
    std::string detector_id;
    DetectorKind kind = DetectorKind::mock_vocab;
    std::string endpoint;
    /// mock rule: score = fraction of the text's tokens present here
    std::shared_ptr<const std::unordered_set<std::string>> vocabulary;
};

/// Human-likeness probability in [0, 1], cached like any generation.
double detect_human_likeness(const DetectorHandle& detector, const std::string& text,
                             const GenerationCache& cache, bool offline = false);

}  // namespace apeval
