#include "coasim/vectors.hpp"

#include <doctest.h>

#include <random>

using namespace coasim;

namespace {

CaseRecord make_case(const std::string& id, const std::string& coa,
                     std::initializer_list<int> articles) {
    CaseRecord rec;
    rec.case_id = id;
    rec.coa = coa;
    for (int a : articles) rec.citations.insert(ArticleRef{"民法", a, std::nullopt});
    return rec;
}

} // namespace

TEST_CASE("build_article_index dedups and orders") {
    Corpus c;
    c.add(make_case("a", "x", {3, 1}));
    c.add(make_case("b", "x", {1}));
    auto idx = ArticleIndex::build(c);
    CHECK(idx.dimension() == 2);
    CHECK(idx.ref(0).article == 1);
    CHECK(idx.ref(1).article == 3);

    Corpus empty;
    empty.add(make_case("a", "x", {}));
    CHECK(ArticleIndex::build(empty).dimension() == 0);
}

TEST_CASE("case_vector maps citations to sorted columns") {
    Corpus c;
    c.add(make_case("a", "x", {1, 2, 3, 4}));
    c.add(make_case("b", "x", {1, 3}));
    auto idx = ArticleIndex::build(c);
    auto v = case_vector(c.cases[1], idx);
    CHECK(v.columns == std::vector<std::uint32_t>{0, 2});

    auto all = case_vector(c.cases[0], idx);
    CHECK(all.columns.size() == 4);

    CaseRecord none = make_case("c", "x", {});
    CHECK(case_vector(none, idx).columns.empty());

    CaseRecord outside = make_case("d", "x", {99});
    CHECK_THROWS(case_vector(outside, idx));
}

TEST_CASE("aggregate and binarize") {
    CitationVector v1{{0, 1}}, v2{{1, 2}};
    std::vector<CitationVector> vs{v1, v2};
    auto u = aggregate_vector(vs);
    CHECK(u.entries ==
          std::vector<std::pair<std::uint32_t, std::uint32_t>>{{0, 1}, {1, 2}, {2, 1}});

    auto single = aggregate_vector(std::span<const CitationVector>(&v1, 1));
    for (const auto& [col, cnt] : single.entries) CHECK(cnt == 1);
    CHECK(binarize(single) == v1);

    std::vector<CitationVector> copies(5, v2);
    for (const auto& [col, cnt] : aggregate_vector(copies).entries) CHECK(cnt == 5);

    CHECK(binarize(CountVector{}).columns.empty());
    CountVector counts{{{0, 5}, {7, 1}}};
    CHECK(binarize(counts).columns == std::vector<std::uint32_t>{0, 7});
}

TEST_CASE("binarize(aggregate) equals union, permutation-invariant") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 100; ++trial) {
        std::size_t count = 1 + rng() % 6;
        std::vector<CitationVector> vs(count);
        std::set<std::uint32_t> expected_union;
        for (auto& v : vs) {
            std::set<std::uint32_t> cols;
            std::size_t k = rng() % 5;
            for (std::size_t i = 0; i < k; ++i) cols.insert(static_cast<std::uint32_t>(rng() % 10));
            v.columns.assign(cols.begin(), cols.end());
            expected_union.insert(cols.begin(), cols.end());
        }
        auto u = aggregate_vector(vs);
        CHECK(binarize(u).columns ==
              std::vector<std::uint32_t>(expected_union.begin(), expected_union.end()));

        auto shuffled = vs;
        std::shuffle(shuffled.begin(), shuffled.end(), rng);
        CHECK(aggregate_vector(shuffled) == u);
    }
}

TEST_CASE("citation_histogram counts per-case citations") {
    Corpus c;
    c.add(make_case("a", "x", {1, 2}));
    c.add(make_case("b", "x", {3, 4}));
    c.add(make_case("c", "y", {1, 2, 3, 4, 5}));
    auto h = citation_histogram(c);
    CHECK(h == Histogram{{2, 2}, {5, 1}});

    CHECK(citation_histogram(Corpus{}).empty());

    ExclusionList none; // excludes nothing
    CHECK(citation_histogram(c, &none) == h);

    // mass balance: sum k*hist[k] = total citations
    std::size_t total = 0;
    for (const auto& [k, cnt] : h) total += k * cnt;
    CHECK(total == 9);
}

TEST_CASE("article index csv round-trip") {
    Corpus c;
    c.add(make_case("a", "x", {1, 5}));
    c.cases[0].citations.insert(ArticleRef{"刑法", 185, 3});
    auto idx = ArticleIndex::build(c);
    auto round = ArticleIndex::from_csv(idx.to_csv());
    REQUIRE(round.dimension() == idx.dimension());
    for (std::uint32_t i = 0; i < idx.dimension(); ++i) CHECK(round.ref(i) == idx.ref(i));
}
