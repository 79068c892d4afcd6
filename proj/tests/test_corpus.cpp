#include "coasim/corpus.hpp"

#include "coasim/util.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

using namespace coasim;
namespace fs = std::filesystem;

namespace {

std::string write_temp(const std::string& name, const std::string& content) {
    fs::path p = fs::temp_directory_path() / name;
    std::ofstream(p, std::ios::binary) << content;
    return p.string();
}

Corpus make_corpus(std::size_t coas, std::size_t per_coa, std::uint64_t seed = 1) {
    std::mt19937_64 rng(seed);
    Corpus c;
    for (std::size_t t = 0; t < coas; ++t) {
        for (std::size_t i = 0; i < per_coa; ++i) {
            CaseRecord rec;
            rec.coa = "coa" + std::to_string(t);
            rec.case_id = rec.coa + "_" + std::to_string(i);
            int k = 1 + static_cast<int>(rng() % 4);
            for (int j = 0; j < k; ++j)
                rec.citations.insert(ArticleRef{"民法", 1 + static_cast<int>(rng() % 30), std::nullopt});
            c.add(std::move(rec));
        }
    }
    return c;
}

} // namespace

TEST_CASE("load_corpus jsonl") {
    auto path = write_temp("corpus_ok.jsonl",
        R"({"case_id":"a","coa":"x","claim_text":"t","citations":["民法第229條","民法第229條"]})" "\n"
        R"({"case_id":"b","coa":"y","citations":[{"act":"刑法","article":185,"sub":3}]})" "\n");
    Corpus c = load_corpus(path, CorpusFormat::jsonl);
    REQUIRE(c.cases.size() == 2);
    CHECK(c.cases[0].citations.size() == 1); // duplicates collapse
    CHECK(c.cases[1].citations.count(ArticleRef{"刑法", 185, 3}) == 1);
    CHECK(c.coa_index.size() == 2);
}

TEST_CASE("load_corpus scans body_text when citations absent") {
    auto path = write_temp("corpus_body.jsonl",
        R"({"case_id":"a","coa":"x","body_text":"依民法第229條與民法第233條判決"})" "\n");
    Corpus c = load_corpus(path, CorpusFormat::jsonl);
    REQUIRE(c.cases.size() == 1);
    CHECK(c.cases[0].citations.size() == 2);
}

TEST_CASE("load_corpus errors name the line") {
    auto missing = write_temp("corpus_nocoa.jsonl",
        R"({"case_id":"a","coa":"x"})" "\n" R"({"case_id":"b"})" "\n");
    CHECK_THROWS_WITH_AS(load_corpus(missing, CorpusFormat::jsonl), doctest::Contains("line 2"),
                         LoadError);

    auto dup = write_temp("corpus_dup.jsonl",
        R"({"case_id":"a","coa":"x"})" "\n" R"({"case_id":"a","coa":"y"})" "\n");
    CHECK_THROWS_WITH_AS(load_corpus(dup, CorpusFormat::jsonl), doctest::Contains("duplicate"),
                         LoadError);
}

TEST_CASE("load_corpus csv") {
    auto path = write_temp("corpus.csv",
                           "case_id,coa,claim_text,citations\n"
                           "a,x,hello,民法第229條;刑法185-3\n"
                           "b,y,\"with, comma\",\n");
    Corpus c = load_corpus(path, CorpusFormat::csv);
    REQUIRE(c.cases.size() == 2);
    CHECK(c.cases[0].citations.size() == 2);
    CHECK(c.cases[1].claim_text == "with, comma");
    CHECK(c.cases[1].citations.empty());
}

TEST_CASE("apply_exclusions removes procedural citations, keeps cases") {
    Corpus c;
    CaseRecord r1;
    r1.case_id = "a";
    r1.coa = "x";
    r1.citations = {ArticleRef{"民事訴訟法", 78, std::nullopt}, ArticleRef{"民法", 229, std::nullopt}};
    c.add(r1);
    CaseRecord r2;
    r2.case_id = "b";
    r2.coa = "x";
    r2.citations = {ArticleRef{"刑事訴訟法", 1, std::nullopt}};
    c.add(r2);

    Corpus out = apply_exclusions(c, ExclusionList::defaults());
    REQUIRE(out.cases.size() == 2);
    CHECK(out.cases[0].citations == std::set<ArticleRef>{ArticleRef{"民法", 229, std::nullopt}});
    CHECK(out.cases[1].citations.empty()); // retained with empty set

    Corpus same = apply_exclusions(c, ExclusionList{});
    CHECK(same.cases[0].citations == r1.citations);

    // idempotence
    Corpus twice = apply_exclusions(out, ExclusionList::defaults());
    CHECK(twice.cases[0].citations == out.cases[0].citations);
}

TEST_CASE("sample_cases is deterministic and exact") {
    Corpus c = make_corpus(5, 10);
    Corpus s1 = sample_cases(c, 3, 4, 42);
    Corpus s2 = sample_cases(c, 3, 4, 42);
    REQUIRE(s1.cases.size() == 12);
    CHECK(s1.coa_index.size() == 3);
    for (const auto& [label, idxs] : s1.coa_index) CHECK(idxs.size() == 4);
    REQUIRE(s2.cases.size() == s1.cases.size());
    for (std::size_t i = 0; i < s1.cases.size(); ++i)
        CHECK(s1.cases[i].case_id == s2.cases[i].case_id);

    Corpus s3 = sample_cases(c, 3, 4, 43);
    bool same = true;
    for (std::size_t i = 0; i < s1.cases.size(); ++i)
        if (s1.cases[i].case_id != s3.cases[i].case_id) same = false;
    CHECK(!same); // overwhelmingly likely with 5x10 corpus

    Corpus tiny = sample_cases(c, 2, 1, 0);
    CHECK(tiny.cases.size() == 2);
}

TEST_CASE("sample_cases reports shortfall") {
    Corpus c = make_corpus(2, 3);
    CHECK_THROWS_WITH(sample_cases(c, 3, 2, 0), doctest::Contains("found 2"));
    CHECK_THROWS(sample_cases(c, 2, 4, 0));
}

TEST_CASE("sampled cases are subsets of their COA") {
    Corpus c = make_corpus(4, 8);
    Corpus s = sample_cases(c, 4, 5, 9);
    for (const auto& rec : s.cases) {
        bool found = false;
        for (auto idx : c.coa_index.at(rec.coa))
            if (c.cases[idx].case_id == rec.case_id) found = true;
        CHECK(found);
    }
}

TEST_CASE("exclusion commutes with sampling") {
    Corpus c = make_corpus(4, 8, 3);
    // add procedural citations to some cases
    for (std::size_t i = 0; i < c.cases.size(); i += 3)
        c.cases[i].citations.insert(ArticleRef{"民事訴訟法", 78, std::nullopt});
    ExclusionList excl = ExclusionList::defaults();

    Corpus a = apply_exclusions(sample_cases(c, 4, 5, 77), excl);
    Corpus b = sample_cases(apply_exclusions(c, excl), 4, 5, 77);
    REQUIRE(a.cases.size() == b.cases.size());
    for (std::size_t i = 0; i < a.cases.size(); ++i) {
        CHECK(a.cases[i].case_id == b.cases[i].case_id);
        CHECK(a.cases[i].citations == b.cases[i].citations);
    }
}
