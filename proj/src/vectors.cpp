#include "coasim/vectors.hpp"

#include "coasim/util.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace coasim {

ArticleIndex ArticleIndex::build(const Corpus& corpus) {
    std::set<ArticleRef> all;
    for (const auto& c : corpus.cases) all.insert(c.citations.begin(), c.citations.end());
    ArticleIndex idx;
    idx.refs_.assign(all.begin(), all.end());
    for (std::uint32_t i = 0; i < idx.refs_.size(); ++i) idx.cols_[idx.refs_[i]] = i;
    return idx;
}

std::optional<std::uint32_t> ArticleIndex::column(const ArticleRef& ref) const {
    auto it = cols_.find(ref);
    if (it == cols_.end()) return std::nullopt;
    return it->second;
}

std::string ArticleIndex::to_csv() const {
    std::string out = "column_id,act,article,sub\n";
    for (std::uint32_t i = 0; i < refs_.size(); ++i) {
        const auto& r = refs_[i];
        out += std::to_string(i);
        out += ',';
        out += csv_escape(r.act);
        out += ',';
        out += std::to_string(r.article);
        out += ',';
        if (r.sub) out += std::to_string(*r.sub);
        out += '\n';
    }
    return out;
}

ArticleIndex ArticleIndex::from_csv(const std::string& text) {
    ArticleIndex idx;
    bool header = true;
    for (const auto& line : split(text, '\n')) {
        if (trim(line).empty()) continue;
        if (header) {
            header = false;
            continue;
        }
        auto f = csv_split_record(line);
        if (f.size() != 4) throw std::runtime_error("bad article index row: " + line);
        ArticleRef r;
        r.act = f[1];
        r.article = std::stoi(f[2]);
        if (!f[3].empty()) r.sub = std::stoi(f[3]);
        std::uint32_t col = static_cast<std::uint32_t>(std::stoul(f[0]));
        if (col != idx.refs_.size()) throw std::runtime_error("non-contiguous article index");
        idx.refs_.push_back(r);
        idx.cols_[r] = col;
    }
    return idx;
}

CitationVector case_vector(const CaseRecord& rec, const ArticleIndex& index) {
    CitationVector v;
    v.columns.reserve(rec.citations.size());
    for (const auto& ref : rec.citations) {
        auto col = index.column(ref);
        if (!col)
            throw std::runtime_error("citation not in article index: " + format_citation(ref) +
                                     " (case " + rec.case_id + ")");
        v.columns.push_back(*col);
    }
    std::sort(v.columns.begin(), v.columns.end());
    return v;
}

CountVector aggregate_vector(std::span<const CitationVector> vectors) {
    std::map<std::uint32_t, std::uint32_t> acc;
    for (const auto& v : vectors)
        for (auto col : v.columns) ++acc[col];
    CountVector u;
    u.entries.assign(acc.begin(), acc.end());
    return u;
}

CitationVector binarize(const CountVector& u) {
    CitationVector v;
    v.columns.reserve(u.entries.size());
    for (const auto& [col, cnt] : u.entries) v.columns.push_back(col);
    return v;
}

Histogram citation_histogram(const Corpus& corpus, const ExclusionList* excl) {
    Histogram h;
    for (const auto& c : corpus.cases) {
        std::size_t k = 0;
        for (const auto& ref : c.citations)
            if (!excl || !excl->acts.count(ref.act)) ++k;
        ++h[k];
    }
    return h;
}

std::size_t intersection_size(const CitationVector& a, const CitationVector& b) {
    std::size_t count = 0;
    auto ia = a.columns.begin(), ib = b.columns.begin();
    while (ia != a.columns.end() && ib != b.columns.end()) {
        if (*ia < *ib)
            ++ia;
        else if (*ib < *ia)
            ++ib;
        else {
            ++count;
            ++ia;
            ++ib;
        }
    }
    return count;
}

} // namespace coasim
