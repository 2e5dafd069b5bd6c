// Token-frequency content indexing and relevance scoring: a per-document
// term-frequency matrix, per-query semantic coverage, and the divergence
// relevance score, plus corpus ranking and index persistence.
//
// A built ContentIndex is immutable; scoring and ranking are safe for any
// number of concurrent readers.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace relq {

struct TokenizerConfig {
    enum class Delimiters { whitespace, whitespace_and_punct };

    bool lowercase = false;
    Delimiters delimiters = Delimiters::whitespace;

    bool operator==(const TokenizerConfig&) const = default;
};

/// Deterministic split of UTF-8 text into tokens. Delimiter runs collapse;
/// case folding is ASCII-only. Throws parse_error on invalid UTF-8.
std::vector<std::string> tokenize(std::string_view text, const TokenizerConfig& config = {});

/// Term-frequency view of one document: total token count n, distinct term
/// count s (at least 2, so the semantic mean 1/s stays below 1), and the
/// per-term occurrence counts.
class DocumentIndex {
public:
    DocumentIndex(std::string doc_id, std::map<std::string, std::uint64_t> term_counts);

    static DocumentIndex from_tokens(std::string doc_id, std::span<const std::string> tokens);

    const std::string& doc_id() const noexcept { return doc_id_; }
    const std::map<std::string, std::uint64_t>& term_counts() const noexcept {
        return term_counts_;
    }
    std::uint64_t total_tokens() const noexcept { return total_tokens_; }
    std::uint64_t distinct_terms() const noexcept { return term_counts_.size(); }

    double semantic_mean() const noexcept {
        return 1.0 / static_cast<double>(distinct_terms());
    }
    double term_frequency(const std::string& term) const noexcept;

    bool operator==(const DocumentIndex&) const = default;

private:
    std::string doc_id_;
    std::map<std::string, std::uint64_t> term_counts_;
    std::uint64_t total_tokens_ = 0;
};

/// The content query semantics matrix: every indexed document plus the
/// tokenizer configuration the corpus was built with.
struct ContentIndex {
    TokenizerConfig tokenizer;
    std::map<std::string, DocumentIndex> documents;

    bool operator==(const ContentIndex&) const = default;
};

/// Indexes (doc_id, text) pairs. Rejects duplicate ids, empty documents,
/// and single-term documents.
ContentIndex build_index(std::span<const std::pair<std::string, std::string>> docs,
                         const TokenizerConfig& config = {});

/// Sum of the document frequencies of the distinct query terms; duplicates
/// in the query count once, absent terms contribute zero.
double query_coverage(const DocumentIndex& index, std::span<const std::string> query_tokens);

enum class RelevanceMode { discovery, recovery, irrelevant };

std::string_view relevance_mode_name(RelevanceMode mode);

struct RelevanceScore {
    double relevance = 0.0;
    double coverage = 0.0;
    double semantic_mean = 0.0;
    RelevanceMode mode = RelevanceMode::irrelevant;
};

/// Scores a tokenized query against one document. Coverage below the
/// semantic mean discovers, above it recovers, exactly at it the score is
/// zero. Throws std::domain_error on an empty query.
RelevanceScore score_query(const DocumentIndex& index, std::span<const std::string> query_tokens);

/// Scores the query against every document, sorted by relevance descending
/// with doc-id ascending as the tie break.
std::vector<std::pair<std::string, RelevanceScore>> rank(const ContentIndex& index,
                                                         std::string_view query_text);

void save_index(const ContentIndex& index, std::ostream& out);
ContentIndex load_index(std::istream& in, const std::string& source_name = "index");

}  // namespace relq
