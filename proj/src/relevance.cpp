#include "relq/relevance.hpp"

#include <algorithm>
#include <cctype>
#include <istream>
#include <ostream>
#include <set>
#include <stdexcept>

#include "json.hpp"

#include "relq/core_law.hpp"
#include "relq/errors.hpp"

namespace relq {

namespace {

using nlohmann::json;

void require(bool ok, const std::string& message) {
    if (!ok) throw std::domain_error(message);
}

// Minimal UTF-8 well-formedness scan (RFC 3629: no overlongs, no surrogates,
// max U+10FFFF).
bool valid_utf8(std::string_view text) {
    std::size_t i = 0;
    const std::size_t n = text.size();
    while (i < n) {
        const auto byte = static_cast<unsigned char>(text[i]);
        std::size_t extra = 0;
        unsigned min_code = 0;
        if (byte < 0x80) {
            ++i;
            continue;
        } else if ((byte & 0xE0) == 0xC0) {
            extra = 1;
            min_code = 0x80;
        } else if ((byte & 0xF0) == 0xE0) {
            extra = 2;
            min_code = 0x800;
        } else if ((byte & 0xF8) == 0xF0) {
            extra = 3;
            min_code = 0x10000;
        } else {
            return false;
        }
        if (i + extra >= n) return false;
        unsigned code = byte & (0x7Fu >> (extra + 1));
        for (std::size_t k = 1; k <= extra; ++k) {
            const auto cont = static_cast<unsigned char>(text[i + k]);
            if ((cont & 0xC0) != 0x80) return false;
            code = (code << 6) | (cont & 0x3Fu);
        }
        if (code < min_code || code > 0x10FFFF || (code >= 0xD800 && code <= 0xDFFF)) {
            return false;
        }
        i += extra + 1;
    }
    return true;
}

bool is_delimiter(unsigned char byte, TokenizerConfig::Delimiters delimiters) {
    if (byte >= 0x80) return false;  // multibyte sequences are token content
    if (std::isspace(byte)) return true;
    return delimiters == TokenizerConfig::Delimiters::whitespace_and_punct && std::ispunct(byte);
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text, const TokenizerConfig& config) {
    if (!valid_utf8(text)) {
        throw parse_error("tokenize: input is not valid UTF-8");
    }
    std::vector<std::string> tokens;
    std::string current;
    for (char ch : text) {
        const auto byte = static_cast<unsigned char>(ch);
        if (is_delimiter(byte, config.delimiters)) {
            if (!current.empty()) {
                tokens.push_back(std::move(current));
                current.clear();
            }
            continue;
        }
        current.push_back(config.lowercase && byte < 0x80
                              ? static_cast<char>(std::tolower(byte))
                              : ch);
    }
    if (!current.empty()) tokens.push_back(std::move(current));
    return tokens;
}

DocumentIndex::DocumentIndex(std::string doc_id, std::map<std::string, std::uint64_t> term_counts)
    : doc_id_(std::move(doc_id)), term_counts_(std::move(term_counts)) {
    require(!term_counts_.empty(), "document '" + doc_id_ + "': no terms");
    for (const auto& [term, count] : term_counts_) {
        require(!term.empty(), "document '" + doc_id_ + "': empty term");
        require(count >= 1, "document '" + doc_id_ + "': term '" + term + "' has zero count");
        total_tokens_ += count;
    }
    require(term_counts_.size() >= 2,
            "document '" + doc_id_ +
                "': a single distinct term puts the semantic mean at 1, which cannot be scored");
}

DocumentIndex DocumentIndex::from_tokens(std::string doc_id,
                                         std::span<const std::string> tokens) {
    std::map<std::string, std::uint64_t> counts;
    for (const auto& token : tokens) ++counts[token];
    return DocumentIndex(std::move(doc_id), std::move(counts));
}

double DocumentIndex::term_frequency(const std::string& term) const noexcept {
    const auto it = term_counts_.find(term);
    if (it == term_counts_.end()) return 0.0;
    return static_cast<double>(it->second) / static_cast<double>(total_tokens_);
}

ContentIndex build_index(std::span<const std::pair<std::string, std::string>> docs,
                         const TokenizerConfig& config) {
    require(!docs.empty(), "index: document list must be non-empty");
    ContentIndex index;
    index.tokenizer = config;
    for (const auto& [doc_id, text] : docs) {
        require(!index.documents.contains(doc_id), "index: duplicate document id '" + doc_id + "'");
        const auto tokens = tokenize(text, config);
        require(!tokens.empty(), "document '" + doc_id + "': no terms");
        index.documents.emplace(doc_id, DocumentIndex::from_tokens(doc_id, tokens));
    }
    return index;
}

double query_coverage(const DocumentIndex& index, std::span<const std::string> query_tokens) {
    std::set<std::string_view> distinct;
    for (const auto& token : query_tokens) distinct.insert(token);
    double coverage = 0.0;
    for (const auto term : distinct) {
        coverage += index.term_frequency(std::string(term));
    }
    return std::min(coverage, 1.0);
}

std::string_view relevance_mode_name(RelevanceMode mode) {
    switch (mode) {
        case RelevanceMode::discovery: return "discovery";
        case RelevanceMode::recovery: return "recovery";
        case RelevanceMode::irrelevant: return "irrelevant";
    }
    return "unknown";
}

RelevanceScore score_query(const DocumentIndex& index,
                           std::span<const std::string> query_tokens) {
    require(!query_tokens.empty(), "query: empty after tokenization");
    RelevanceScore score;
    score.coverage = query_coverage(index, query_tokens);
    score.semantic_mean = index.semantic_mean();
    score.relevance = relevance(static_cast<double>(index.total_tokens()), score.coverage,
                                score.semantic_mean);
    if (score.coverage < score.semantic_mean) {
        score.mode = RelevanceMode::discovery;
    } else if (score.coverage > score.semantic_mean) {
        score.mode = RelevanceMode::recovery;
    } else {
        score.mode = RelevanceMode::irrelevant;
    }
    return score;
}

std::vector<std::pair<std::string, RelevanceScore>> rank(const ContentIndex& index,
                                                         std::string_view query_text) {
    const auto tokens = tokenize(query_text, index.tokenizer);
    require(!tokens.empty(), "query: empty after tokenization");
    std::vector<std::pair<std::string, RelevanceScore>> scored;
    scored.reserve(index.documents.size());
    for (const auto& [doc_id, doc] : index.documents) {
        scored.emplace_back(doc_id, score_query(doc, tokens));
    }
    std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
        if (a.second.relevance != b.second.relevance) {
            return a.second.relevance > b.second.relevance;
        }
        return a.first < b.first;
    });
    return scored;
}

void save_index(const ContentIndex& index, std::ostream& out) {
    json tokenizer{{"lowercase", index.tokenizer.lowercase},
                   {"delimiters", index.tokenizer.delimiters ==
                                          TokenizerConfig::Delimiters::whitespace
                                      ? "ws"
                                      : "ws+punct"}};
    json documents = json::object();
    for (const auto& [doc_id, doc] : index.documents) {
        json terms = json::object();
        for (const auto& [term, count] : doc.term_counts()) terms[term] = count;
        documents[doc_id] = json{{"n", doc.total_tokens()}, {"terms", std::move(terms)}};
    }
    out << json{{"tokenizer", std::move(tokenizer)}, {"documents", std::move(documents)}}.dump(2)
        << '\n';
}

ContentIndex load_index(std::istream& in, const std::string& source_name) {
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw parse_error(source_name + ": " + e.what());
    }
    const auto fail = [&](const std::string& path, const std::string& what) -> void {
        throw parse_error(source_name + ": " + path + ": " + what);
    };

    if (!doc.is_object()) fail("$", "document must be a JSON object");
    ContentIndex index;
    if (doc.contains("tokenizer")) {
        const auto& tok = doc.at("tokenizer");
        if (!tok.is_object()) fail("tokenizer", "must be an object");
        index.tokenizer.lowercase = tok.value("lowercase", false);
        const std::string delimiters = tok.value("delimiters", "ws");
        if (delimiters == "ws") {
            index.tokenizer.delimiters = TokenizerConfig::Delimiters::whitespace;
        } else if (delimiters == "ws+punct") {
            index.tokenizer.delimiters = TokenizerConfig::Delimiters::whitespace_and_punct;
        } else {
            fail("tokenizer.delimiters", "must be \"ws\" or \"ws+punct\"");
        }
    }
    if (!doc.contains("documents") || !doc.at("documents").is_object()) {
        fail("documents", "must be an object");
    }
    for (const auto& [doc_id, entry] : doc.at("documents").items()) {
        const std::string path = "documents." + doc_id;
        if (!entry.is_object()) fail(path, "must be an object");
        if (!entry.contains("n") || !entry.at("n").is_number_unsigned()) {
            fail(path + ".n", "must be a positive integer");
        }
        if (!entry.contains("terms") || !entry.at("terms").is_object()) {
            fail(path + ".terms", "must be an object");
        }
        std::map<std::string, std::uint64_t> counts;
        std::uint64_t sum = 0;
        for (const auto& [term, count] : entry.at("terms").items()) {
            if (!count.is_number_unsigned() || count.get<std::uint64_t>() < 1) {
                fail(path + ".terms." + term, "count must be a positive integer");
            }
            counts[term] = count.get<std::uint64_t>();
            sum += counts[term];
        }
        if (sum != entry.at("n").get<std::uint64_t>()) {
            fail(path, "term counts sum to " + std::to_string(sum) + " but n is " +
                           std::to_string(entry.at("n").get<std::uint64_t>()));
        }
        try {
            index.documents.emplace(doc_id, DocumentIndex(doc_id, std::move(counts)));
        } catch (const std::domain_error& e) {
            fail(path, e.what());
        }
    }
    if (index.documents.empty()) fail("documents", "must contain at least one document");
    return index;
}

}  // namespace relq
