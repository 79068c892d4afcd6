#include "coasim/citation.hpp"

#include <doctest.h>

#include <random>

using namespace coasim;

TEST_CASE("parse_citation handles the standard forms") {
    auto r = parse_citation("民法第229條");
    REQUIRE(r.has_value());
    CHECK(r->act == "民法");
    CHECK(r->article == 229);
    CHECK(!r->sub.has_value());

    r = parse_citation("刑法185-3");
    REQUIRE(r.has_value());
    CHECK(r->act == "刑法");
    CHECK(r->article == 185);
    CHECK(r->sub == 3);

    r = parse_citation("刑法第185-3條");
    REQUIRE(r.has_value());
    CHECK(r->sub == 3);

    r = parse_citation("刑法第185條之3");
    REQUIRE(r.has_value());
    CHECK(r->article == 185);
    CHECK(r->sub == 3);
}

TEST_CASE("parse_citation rejects non-citations") {
    CHECK(!parse_citation("").has_value());
    CHECK(!parse_citation("   ").has_value());
    CHECK(!parse_citation("第229條").has_value());       // no act
    CHECK(!parse_citation("民法第條").has_value());       // no number
    CHECK(!parse_citation("民法第0條").has_value());      // article must be positive
    CHECK(!parse_citation("民法229條餘").has_value());    // trailing junk
    CHECK(!parse_citation("12345").has_value());
}

TEST_CASE("full-width digits normalize to half-width") {
    auto r = parse_citation("民法第２２９條");
    REQUIRE(r.has_value());
    CHECK(r->article == 229);
}

TEST_CASE("aliases resolve act names") {
    AliasTable aliases{{"民訴", "民事訴訟法"}};
    auto r = parse_citation("民訴第78條", aliases);
    REQUIRE(r.has_value());
    CHECK(r->act == "民事訴訟法");
}

TEST_CASE("parse is idempotent under re-serialization") {
    std::mt19937_64 rng(7);
    const std::vector<std::string> acts = {"民法", "刑法", "銀行法", "民事訴訟法", "公司法"};
    for (int i = 0; i < 500; ++i) {
        ArticleRef ref;
        ref.act = acts[rng() % acts.size()];
        ref.article = 1 + static_cast<int>(rng() % 2000);
        if (rng() % 2) ref.sub = static_cast<int>(rng() % 20);
        auto round = parse_citation(format_citation(ref));
        REQUIRE(round.has_value());
        CHECK(*round == ref);
    }
}

TEST_CASE("extract_citations scans running text") {
    auto refs = extract_citations("依民法第229條及第184條之1，並參照銀行法第125條。");
    // 第184條 has no act prefix directly before it, so only two hits
    REQUIRE(refs.size() == 2);
    CHECK(refs[0] == ArticleRef{"民法", 229, std::nullopt});
    CHECK(refs[1] == ArticleRef{"銀行法", 125, std::nullopt});
}
