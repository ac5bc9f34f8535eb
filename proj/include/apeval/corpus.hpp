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

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace apeval {

using AttrMap = std::map<std::string, std::string>;

struct AuthorRecord {
    std::string author_id;
    std::string display_name;  // metadata "name" when present, else author_id
    AttrMap metadata;
};

struct Document {
    std::string doc_id;
    std::string author_id;
    std::string text;
    std::size_t word_count = 0;  // whitespace tokens of text
};

/// Author-labeled document collection. Immutable after construction; safe to
/// share across concurrent readers.
struct Corpus {
    std::string name;
    std::vector<AuthorRecord> authors;
    std::vector<Document> documents;

    const AuthorRecord& author(const std::string& author_id) const;
    const AuthorRecord* find_author(const std::string& author_id) const;
    const Document* find_document(const std::string& doc_id) const;

    /// Indices into `documents` for one author, in file order.
    const std::vector<std::size_t>& docs_of(const std::string& author_id) const;

    /// Mean whitespace word count over the author's documents, rounded to the
    /// nearest positive integer. Feeds the {avg}-word prompt clause.
    int author_avg_words(const std::string& author_id) const;

    // populated by load_corpus / finalize()
    std::unordered_map<std::string, std::size_t> author_index;
    std::unordered_map<std::string, std::size_t> doc_index;
    std::unordered_map<std::string, std::vector<std::size_t>> author_docs;

    void finalize();
};

enum class Purity { perfect, noisy };

/// The sample-writings bundle handed to a provider about one author.
struct Context {
    std::string author_id;
    std::string author_name;
    std::vector<Document> sample_docs;
    std::optional<std::string> metadata_text;  // rendered persona
    Purity purity = Purity::perfect;
    /// (doc_id, true_author_id) for every sample, in sample order.
    std::vector<std::pair<std::string, std::string>> provenance;
};

struct CorpusStats {
    std::size_t n_docs = 0;
    std::size_t n_authors = 0;
    double avg_doc_words = 0.0;
    double avg_sentence_words = 0.0;
    double avg_sentences_per_doc = 0.0;
};

struct PoolItem {
    Document doc;
    bool from_author = false;  // true label: document really is the target author's
};

/// Parse a line-delimited corpus file. Each line is a JSON object with
/// doc_id, author_id, text and an optional metadata map (attached to the
/// author on first sight). Rejects duplicate doc_ids and empty files.
Corpus load_corpus(const std::filesystem::path& path, const std::string& name);

/// Write a corpus back out in the same line-delimited format.
void save_corpus(const Corpus& corpus, const std::filesystem::path& path);

CorpusStats corpus_stats(const Corpus& corpus);

/// Draw k of the author's documents (never exclude_doc) without replacement.
/// The result is a perfect context; metadata_text is rendered iff
/// include_metadata and the author has attributes.
Context build_context(const Corpus& corpus, const std::string& author_id, std::size_t k,
                      bool include_metadata, const std::string& exclude_doc,
                      std::uint64_t seed);

/// Verification context: k_author of the author's documents plus k_imposter
/// documents sampled uniformly over all other authors (the "writings from
/// others" block of the verification prompt). The probe document is excluded
/// from both draws.
Context build_verification_context(const Corpus& corpus, const std::string& author_id,
                                   std::size_t k_author, std::size_t k_imposter,
                                   bool include_metadata, const std::string& exclude_doc,
                                   std::uint64_t seed);

/// n_author docs from the target author plus n_imposter docs drawn uniformly
/// over all other authors' documents, both without replacement. Documents
/// listed in `excluded_doc_ids` are never drawn.
std::vector<PoolItem> sample_candidate_pool(const Corpus& corpus, const std::string& author_id,
                                            std::size_t n_author, std::size_t n_imposter,
                                            std::uint64_t seed,
                                            const std::vector<std::string>& excluded_doc_ids = {});

/// Keep every pool document the verifier accepted as the target author
/// (true and false positives alike). Purity is noisy iff any accepted
/// document is really someone else's.
Context build_noisy_context(const std::vector<PoolItem>& pool,
                            const std::vector<bool>& av_outcomes,
                            const std::string& author_id);

}  // namespace apeval
