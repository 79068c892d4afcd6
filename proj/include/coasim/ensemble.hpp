#pragma once

#include "coasim/similarity.hpp"

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace coasim {

using CoaPair = std::pair<std::string, std::string>; // first < second

inline CoaPair make_pair_canonical(std::string a, std::string b) {
    if (b < a) std::swap(a, b);
    return {std::move(a), std::move(b)};
}

struct RankList {
    // canonical pair -> fractional rank (1 = most similar)
    std::map<CoaPair, double> ranks;
    // present for ensembles: canonical pair -> summed base ranks
    std::map<CoaPair, double> totals;
    std::string source;

    std::string to_csv() const;
    static RankList from_csv(const std::string& text);
};

// Ranks a score table descending by score; tied scores share the average of
// the positions they span.
RankList rank_pairs(const PairScoreTable& table);

// Rank-sum ensemble: pairs re-ranked ascending by totalled rank, fractional
// ranks on ties. All lists must cover the same pair set.
RankList ensemble_ranks(std::span<const RankList> lists);

// Pearson correlation of two rank vectors over the shared pair set.
double ranking_pcc(const RankList& a, const RankList& b);

} // namespace coasim
