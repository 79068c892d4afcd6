#pragma once

#include "coasim/corpus.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

namespace coasim {

// Global article index: every distinct cited article mapped to a column id,
// ordered by (act, article, sub).
class ArticleIndex {
public:
    static ArticleIndex build(const Corpus& corpus);

    std::size_t dimension() const { return refs_.size(); }
    std::optional<std::uint32_t> column(const ArticleRef& ref) const;
    const ArticleRef& ref(std::uint32_t column) const { return refs_.at(column); }
    const std::vector<ArticleRef>& refs() const { return refs_; }

    std::string to_csv() const;
    static ArticleIndex from_csv(const std::string& text);

private:
    std::vector<ArticleRef> refs_;              // column -> article
    std::map<ArticleRef, std::uint32_t> cols_;  // article -> column
};

// Sparse binary vector over the article index: sorted set of column ids.
struct CitationVector {
    std::vector<std::uint32_t> columns; // sorted, unique

    std::size_t popcount() const { return columns.size(); }
    bool operator==(const CitationVector&) const = default;
};

// Sparse count vector: sorted (column, count>=1) pairs.
struct CountVector {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> entries;

    bool operator==(const CountVector&) const = default;
};

using Histogram = std::map<std::size_t, std::size_t>; // citation count -> cases

CitationVector case_vector(const CaseRecord& rec, const ArticleIndex& index);
CountVector aggregate_vector(std::span<const CitationVector> vectors);
CitationVector binarize(const CountVector& u);
Histogram citation_histogram(const Corpus& corpus, const ExclusionList* excl = nullptr);

std::size_t intersection_size(const CitationVector& a, const CitationVector& b);

} // namespace coasim
