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

#include <cstddef>
#include <stdexcept>
#include <string>

namespace apeval {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// -- corpus --------------------------------------------------------------

class MalformedRecord : public Error {
public:
    MalformedRecord(std::size_t line_no, const std::string& detail)
        : Error("malformed record at line " + std::to_string(line_no) + ": " + detail),
          line_no(line_no) {}
    std::size_t line_no;
};

class DuplicateId : public Error {
public:
    explicit DuplicateId(const std::string& id)
        : Error("duplicate doc_id: " + id), id(id) {}
    std::string id;
};

class EmptyCorpus : public Error {
public:
    explicit EmptyCorpus(const std::string& detail) : Error("empty corpus: " + detail) {}
};

class InsufficientDocuments : public Error {
public:
    InsufficientDocuments(const std::string& author_id, std::size_t requested, std::size_t available)
        : Error("author " + author_id + " has " + std::to_string(available) +
                " eligible documents, need " + std::to_string(requested)),
          author_id(author_id), requested(requested), available(available) {}
    std::string author_id;
    std::size_t requested;
    std::size_t available;
};

class NoAcceptedDocuments : public Error {
public:
    explicit NoAcceptedDocuments(const std::string& author_id)
        : Error("verifier accepted no documents for author " + author_id) {}
};

// -- prompting / providers -----------------------------------------------

class MissingSamples : public Error {
public:
    MissingSamples() : Error("context has no sample writings") {}
};

class ProviderUnavailable : public Error {
public:
    ProviderUnavailable(const std::string& provider_id, const std::string& detail)
        : Error("provider " + provider_id + " unavailable: " + detail) {}
};

class AuthMissing : public Error {
public:
    explicit AuthMissing(const std::string& env_var)
        : Error("no credential configured; set " + env_var), env_var(env_var) {}
    std::string env_var;
};

class EmptyCompletion : public Error {
public:
    explicit EmptyCompletion(const std::string& provider_id)
        : Error("provider " + provider_id + " returned an empty completion") {}
};

class UnparseableVerdict : public Error {
public:
    explicit UnparseableVerdict(const std::string& raw)
        : Error("response is neither yes nor no: \"" + raw + "\""), raw(raw) {}
    std::string raw;
};

class OfflineCacheMiss : public Error {
public:
    explicit OfflineCacheMiss(const std::string& hash)
        : Error("offline mode forbids provider calls and the cache has no entry " + hash) {}
};

class DetectorUnavailable : public Error {
public:
    explicit DetectorUnavailable(const std::string& detail)
        : Error("detector unavailable: " + detail) {}
};

// -- stylometrics / topics -----------------------------------------------

class EmptyText : public Error {
public:
    EmptyText() : Error("text is empty") {}
};

class CorpusTooSmall : public Error {
public:
    CorpusTooSmall(std::size_t tokens, std::size_t order)
        : Error("training corpus has " + std::to_string(tokens) +
                " tokens, need at least " + std::to_string(order)) {}
};

class TooFewDocuments : public Error {
public:
    TooFewDocuments(std::size_t docs, std::size_t topics)
        : Error("need at least " + std::to_string(topics) + " documents, got " +
                std::to_string(docs)) {}
};

class EmptyVocabulary : public Error {
public:
    EmptyVocabulary() : Error("no vocabulary left after filtering") {}
};

class TopicOutOfRange : public Error {
public:
    TopicOutOfRange(std::size_t topic_id, std::size_t k)
        : Error("topic " + std::to_string(topic_id) + " out of range, K=" + std::to_string(k)) {}
};

// -- orchestration -------------------------------------------------------

class IncompleteScores : public Error {
public:
    explicit IncompleteScores(const std::string& detail)
        : Error("incomplete isolation scores: " + detail) {}
};

class MixedCycleCounts : public Error {
public:
    MixedCycleCounts() : Error("trajectories have differing cycle counts") {}
};

class MissingJudges : public Error {
public:
    explicit MissingJudges(const std::string& detail) : Error("missing judges: " + detail) {}
};

class MissingRounds : public Error {
public:
    explicit MissingRounds(const std::string& path)
        : Error("no round dumps found under " + path) {}
};

class MissingStageOutput : public Error {
public:
    explicit MissingStageOutput(const std::string& stage)
        : Error("stage output not found: " + stage + " (run that stage first)"), stage(stage) {}
    std::string stage;
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& detail) : Error("config: " + detail) {}
};

}  // namespace apeval
