#include "coasim/ensemble.hpp"

#include "coasim/util.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace coasim {

namespace {

// Assigns fractional ranks to values already sorted best-first.
// key(i) must be equal for tied items.
template <typename Key>
std::vector<double> fractional_ranks(const std::vector<Key>& sorted_keys) {
    const std::size_t n = sorted_keys.size();
    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && sorted_keys[j + 1] == sorted_keys[i]) ++j;
        double r = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
        for (std::size_t k = i; k <= j; ++k) ranks[k] = r;
        i = j + 1;
    }
    return ranks;
}

} // namespace

RankList rank_pairs(const PairScoreTable& table) {
    std::vector<std::size_t> order(table.scores.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    // higher score = better rank; ties broken for position only by pair label
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const auto& pa = table.scores[a];
        const auto& pb = table.scores[b];
        if (pa.score != pb.score) return pa.score > pb.score;
        return std::tie(pa.coa_a, pa.coa_b) < std::tie(pb.coa_a, pb.coa_b);
    });
    std::vector<double> keys(order.size());
    for (std::size_t i = 0; i < order.size(); ++i) keys[i] = -table.scores[order[i]].score;
    auto ranks = fractional_ranks(keys);
    RankList out;
    out.source = measure_name(table.measure);
    for (std::size_t i = 0; i < order.size(); ++i) {
        const auto& p = table.scores[order[i]];
        out.ranks[{p.coa_a, p.coa_b}] = ranks[i];
    }
    return out;
}

RankList ensemble_ranks(std::span<const RankList> lists) {
    if (lists.empty()) throw std::runtime_error("ensemble of zero rank lists");
    const auto& first = lists.front();
    std::map<CoaPair, double> totals;
    for (const auto& [pair, rank] : first.ranks) totals[pair] = rank;
    for (std::size_t i = 1; i < lists.size(); ++i) {
        if (lists[i].ranks.size() != first.ranks.size())
            throw std::runtime_error("rank lists cover different pair sets");
        for (const auto& [pair, rank] : lists[i].ranks) {
            auto it = totals.find(pair);
            if (it == totals.end()) throw std::runtime_error("rank lists cover different pair sets");
            it->second += rank;
        }
    }
    std::vector<std::pair<CoaPair, double>> order(totals.begin(), totals.end());
    std::sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second < b.second; // lower total = better
        return a.first < b.first;
    });
    std::vector<double> keys(order.size());
    for (std::size_t i = 0; i < order.size(); ++i) keys[i] = order[i].second;
    auto ranks = fractional_ranks(keys);
    RankList out;
    out.source = "ensemble";
    for (std::size_t i = 0; i < order.size(); ++i) {
        out.ranks[order[i].first] = ranks[i];
        out.totals[order[i].first] = order[i].second;
    }
    return out;
}

double ranking_pcc(const RankList& a, const RankList& b) {
    if (a.ranks.size() != b.ranks.size() || a.ranks.size() < 2)
        throw std::runtime_error("ranking_pcc needs two rankings over the same pairs, N >= 2");
    double n = static_cast<double>(a.ranks.size());
    double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
    auto ib = b.ranks.begin();
    for (auto ia = a.ranks.begin(); ia != a.ranks.end(); ++ia, ++ib) {
        if (ia->first != ib->first) throw std::runtime_error("ranking_pcc: mismatched pair sets");
        double x = ia->second, y = ib->second;
        sx += x;
        sy += y;
        sxx += x * x;
        syy += y * y;
        sxy += x * y;
    }
    double var_x = sxx - sx * sx / n;
    double var_y = syy - sy * sy / n;
    if (var_x <= 0 || var_y <= 0)
        throw UndefinedCorrelation("ranking_pcc undefined: fully tied ranking");
    double r = (sxy - sx * sy / n) / std::sqrt(var_x * var_y);
    return std::clamp(r, -1.0, 1.0);
}

std::string RankList::to_csv() const {
    bool has_totals = !totals.empty();
    std::string out = has_totals ? "coa_a,coa_b,rank,total_rank,source\n" : "coa_a,coa_b,rank,source\n";
    for (const auto& [pair, rank] : ranks) {
        out += csv_escape(pair.first);
        out += ',';
        out += csv_escape(pair.second);
        out += ',';
        out += format_double(rank);
        out += ',';
        if (has_totals) {
            out += format_double(totals.at(pair));
            out += ',';
        }
        out += source;
        out += '\n';
    }
    return out;
}

RankList RankList::from_csv(const std::string& text) {
    RankList out;
    bool header = true;
    bool has_totals = false;
    for (const auto& line : split(text, '\n')) {
        if (trim(line).empty()) continue;
        auto f = csv_split_record(line);
        if (header) {
            header = false;
            has_totals = f.size() == 5;
            continue;
        }
        if (f.size() != (has_totals ? 5u : 4u)) throw std::runtime_error("bad rank row: " + line);
        CoaPair pair{f[0], f[1]};
        out.ranks[pair] = std::stod(f[2]);
        if (has_totals) out.totals[pair] = std::stod(f[3]);
        out.source = f.back();
    }
    return out;
}

} // namespace coasim
