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

#include "apeval/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "apeval/errors.hpp"
#include "apeval/hash.hpp"
#include "apeval/prompt.hpp"
#include "apeval/rng.hpp"
#include "apeval/tokenize.hpp"

namespace apeval {

using nlohmann::json;

const AuthorRecord& Corpus::author(const std::string& author_id) const {
    auto it = author_index.find(author_id);
    if (it == author_index.end()) {
        throw Error("unknown author: " + author_id);
    }
    return authors[it->second];
}

const AuthorRecord* Corpus::find_author(const std::string& author_id) const {
    auto it = author_index.find(author_id);
    return it == author_index.end() ? nullptr : &authors[it->second];
}

const Document* Corpus::find_document(const std::string& doc_id) const {
    auto it = doc_index.find(doc_id);
    return it == doc_index.end() ? nullptr : &documents[it->second];
}

const std::vector<std::size_t>& Corpus::docs_of(const std::string& author_id) const {
    static const std::vector<std::size_t> empty;
    auto it = author_docs.find(author_id);
    return it == author_docs.end() ? empty : it->second;
}

int Corpus::author_avg_words(const std::string& author_id) const {
    const auto& idx = docs_of(author_id);
    if (idx.empty()) return 1;
    std::size_t total = 0;
    for (std::size_t i : idx) total += documents[i].word_count;
    const long avg = std::lround(static_cast<double>(total) / static_cast<double>(idx.size()));
    return static_cast<int>(std::max(1L, avg));
}

void Corpus::finalize() {
    author_index.clear();
    doc_index.clear();
    author_docs.clear();
    for (std::size_t i = 0; i < authors.size(); ++i) {
        author_index.emplace(authors[i].author_id, i);
    }
    for (std::size_t i = 0; i < documents.size(); ++i) {
        doc_index.emplace(documents[i].doc_id, i);
        author_docs[documents[i].author_id].push_back(i);
    }
}

Corpus load_corpus(const std::filesystem::path& path, const std::string& name) {
    std::ifstream in(path);
    if (!in) {
        throw Error("cannot open corpus file: " + path.string());
    }

    Corpus corpus;
    corpus.name = name;

    std::unordered_map<std::string, std::size_t> seen_authors;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trimmed(line).empty()) continue;

        json record;
        try {
            record = json::parse(line);
        } catch (const json::exception& e) {
            throw MalformedRecord(line_no, e.what());
        }
        if (!record.is_object() || !record.contains("doc_id") || !record.contains("author_id") ||
            !record.contains("text") || !record["doc_id"].is_string() ||
            !record["author_id"].is_string() || !record["text"].is_string()) {
            throw MalformedRecord(line_no, "need string fields doc_id, author_id, text");
        }

        Document doc;
        doc.doc_id = record["doc_id"].get<std::string>();
        doc.author_id = record["author_id"].get<std::string>();
        doc.text = record["text"].get<std::string>();
        if (trimmed(doc.text).empty()) {
            throw MalformedRecord(line_no, "text is empty");
        }
        doc.word_count = whitespace_word_count(doc.text);

        if (corpus.doc_index.count(doc.doc_id) > 0) {
            throw DuplicateId(doc.doc_id);
        }
        corpus.doc_index.emplace(doc.doc_id, corpus.documents.size());

        auto author_it = seen_authors.find(doc.author_id);
        if (author_it == seen_authors.end()) {
            AuthorRecord author;
            author.author_id = doc.author_id;
            author.display_name = doc.author_id;
            seen_authors.emplace(doc.author_id, corpus.authors.size());
            corpus.authors.push_back(std::move(author));
            author_it = seen_authors.find(doc.author_id);
        }
        if (record.contains("metadata")) {
            if (!record["metadata"].is_object()) {
                throw MalformedRecord(line_no, "metadata must be an object");
            }
            AuthorRecord& author = corpus.authors[author_it->second];
            for (const auto& [key, value] : record["metadata"].items()) {
                if (!value.is_string()) {
                    throw MalformedRecord(line_no, "metadata values must be strings");
                }
                // first record wins on conflicting keys
                author.metadata.emplace(key, value.get<std::string>());
            }
            auto name_it = author.metadata.find("name");
            if (name_it != author.metadata.end()) {
                author.display_name = name_it->second;
            }
        }

        corpus.documents.push_back(std::move(doc));
    }

    if (corpus.documents.empty()) {
        throw EmptyCorpus(path.string());
    }
    corpus.finalize();
    return corpus;
}

void save_corpus(const Corpus& corpus, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw Error("cannot write corpus file: " + path.string());
    }
    for (std::size_t i = 0; i < corpus.documents.size(); ++i) {
        const Document& doc = corpus.documents[i];
        json record{{"doc_id", doc.doc_id}, {"author_id", doc.author_id}, {"text", doc.text}};
        // emit the author's metadata once, on their first document
        const auto& idx = corpus.docs_of(doc.author_id);
        if (!idx.empty() && idx.front() == i) {
            const AuthorRecord& author = corpus.author(doc.author_id);
            if (!author.metadata.empty()) {
                record["metadata"] = author.metadata;
            }
        }
        out << record.dump() << '\n';
    }
}

CorpusStats corpus_stats(const Corpus& corpus) {
    if (corpus.documents.empty()) {
        throw EmptyCorpus(corpus.name);
    }
    CorpusStats stats;
    stats.n_docs = corpus.documents.size();
    stats.n_authors = corpus.authors.size();
    std::size_t total_words = 0;
    std::size_t total_sentences = 0;
    for (const Document& doc : corpus.documents) {
        total_words += doc.word_count;
        total_sentences += sentence_count(doc.text);
    }
    const double n = static_cast<double>(stats.n_docs);
    stats.avg_doc_words = static_cast<double>(total_words) / n;
    stats.avg_sentences_per_doc = static_cast<double>(total_sentences) / n;
    stats.avg_sentence_words =
        total_sentences == 0 ? 0.0
                             : static_cast<double>(total_words) / static_cast<double>(total_sentences);
    return stats;
}

Context build_context(const Corpus& corpus, const std::string& author_id, std::size_t k,
                      bool include_metadata, const std::string& exclude_doc,
                      std::uint64_t seed) {
    const AuthorRecord& author = corpus.author(author_id);

    std::vector<std::size_t> eligible;
    for (std::size_t i : corpus.docs_of(author_id)) {
        if (corpus.documents[i].doc_id != exclude_doc) eligible.push_back(i);
    }
    if (eligible.size() < k) {
        throw InsufficientDocuments(author_id, k, eligible.size());
    }

    SeededRng rng(seed);
    Context ctx;
    ctx.author_id = author_id;
    ctx.author_name = author.display_name;
    ctx.purity = Purity::perfect;
    for (std::size_t pick : rng.sample_indices(eligible.size(), k)) {
        const Document& doc = corpus.documents[eligible[pick]];
        ctx.sample_docs.push_back(doc);
        ctx.provenance.emplace_back(doc.doc_id, doc.author_id);
    }
    if (include_metadata) {
        std::string persona = render_author_identification(author.metadata);
        if (!persona.empty()) ctx.metadata_text = std::move(persona);
    }
    return ctx;
}

Context build_verification_context(const Corpus& corpus, const std::string& author_id,
                                   std::size_t k_author, std::size_t k_imposter,
                                   bool include_metadata, const std::string& exclude_doc,
                                   std::uint64_t seed) {
    Context ctx = build_context(corpus, author_id, k_author, include_metadata, exclude_doc, seed);
    if (k_imposter == 0) return ctx;

    std::vector<std::size_t> others;
    for (std::size_t i = 0; i < corpus.documents.size(); ++i) {
        const Document& doc = corpus.documents[i];
        if (doc.author_id != author_id && doc.doc_id != exclude_doc) others.push_back(i);
    }
    if (others.size() < k_imposter) {
        throw InsufficientDocuments("imposters of " + author_id, k_imposter, others.size());
    }
    SeededRng rng(derive_seed(seed, "verification-imposters"));
    for (std::size_t pick : rng.sample_indices(others.size(), k_imposter)) {
        const Document& doc = corpus.documents[others[pick]];
        ctx.sample_docs.push_back(doc);
        ctx.provenance.emplace_back(doc.doc_id, doc.author_id);
    }
    ctx.purity = Purity::noisy;  // contains writings from others by construction
    return ctx;
}

std::vector<PoolItem> sample_candidate_pool(const Corpus& corpus, const std::string& author_id,
                                            std::size_t n_author, std::size_t n_imposter,
                                            std::uint64_t seed,
                                            const std::vector<std::string>& excluded_doc_ids) {
    corpus.author(author_id);  // validates the id

    auto excluded = [&](const Document& doc) {
        return std::find(excluded_doc_ids.begin(), excluded_doc_ids.end(), doc.doc_id) !=
               excluded_doc_ids.end();
    };

    std::vector<std::size_t> own;
    std::vector<std::size_t> others;
    for (std::size_t i = 0; i < corpus.documents.size(); ++i) {
        if (excluded(corpus.documents[i])) continue;
        (corpus.documents[i].author_id == author_id ? own : others).push_back(i);
    }
    if (own.size() < n_author) {
        throw InsufficientDocuments(author_id, n_author, own.size());
    }
    if (others.size() < n_imposter) {
        throw InsufficientDocuments("imposters of " + author_id, n_imposter, others.size());
    }

    SeededRng rng(seed);
    std::vector<PoolItem> pool;
    pool.reserve(n_author + n_imposter);
    for (std::size_t pick : rng.sample_indices(own.size(), n_author)) {
        pool.push_back({corpus.documents[own[pick]], true});
    }
    for (std::size_t pick : rng.sample_indices(others.size(), n_imposter)) {
        pool.push_back({corpus.documents[others[pick]], false});
    }
    return pool;
}

Context build_noisy_context(const std::vector<PoolItem>& pool,
                            const std::vector<bool>& av_outcomes,
                            const std::string& author_id) {
    if (av_outcomes.size() != pool.size()) {
        throw Error("av_outcomes must cover every pool document");
    }
    Context ctx;
    ctx.author_id = author_id;
    ctx.author_name = author_id;
    ctx.purity = Purity::perfect;
    for (std::size_t i = 0; i < pool.size(); ++i) {
        if (!av_outcomes[i]) continue;
        ctx.sample_docs.push_back(pool[i].doc);
        ctx.provenance.emplace_back(pool[i].doc.doc_id, pool[i].doc.author_id);
        if (pool[i].doc.author_id != author_id) ctx.purity = Purity::noisy;
    }
    if (ctx.sample_docs.empty()) {
        throw NoAcceptedDocuments(author_id);
    }
    return ctx;
}

}  // namespace apeval
