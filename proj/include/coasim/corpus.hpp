#pragma once

#include "coasim/citation.hpp"

#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace coasim {

struct CaseRecord {
    std::string case_id;
    std::string coa;
    std::string claim_text;
    std::set<ArticleRef> citations;
};

struct Corpus {
    std::vector<CaseRecord> cases;
    // coa label -> indexes into `cases`, in insertion order
    std::map<std::string, std::vector<std::size_t>> coa_index;

    void add(CaseRecord rec);
    std::size_t size() const { return cases.size(); }
};

struct ExclusionList {
    std::set<std::string> acts;

    // The two procedural codes excluded by default.
    static ExclusionList defaults() {
        return ExclusionList{{"民事訴訟法", "刑事訴訟法"}};
    }
};

struct LoadError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class CorpusFormat { jsonl, csv };

// Loads a corpus file. JSONL records carry case_id/coa/claim_text/citations
// (structured objects or raw strings) and optionally body_text, which is
// scanned for citations when the citations field is absent. CSV carries
// case_id,coa,claim_text,citations with a semicolon-joined citation list.
Corpus load_corpus(const std::string& path, CorpusFormat format, const AliasTable& aliases = {});

// Drops every citation whose act is excluded. Cases are kept even when their
// citation set becomes empty.
Corpus apply_exclusions(const Corpus& corpus, const ExclusionList& excl);

// Seeded uniform sample without replacement: n cases for each of the m
// eligible COAs with the most cases (ties by lexicographic label).
// Per-COA sampling streams depend only on (seed, label, sorted case ids), so
// the result commutes with citation filtering.
Corpus sample_cases(const Corpus& corpus, std::size_t m, std::size_t n, std::uint64_t seed);

std::string corpus_to_jsonl(const Corpus& corpus);

} // namespace coasim
