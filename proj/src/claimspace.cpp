#include "coasim/claimspace.hpp"

#include "coasim/kernels.hpp"
#include "coasim/util.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <random>
#include <stdexcept>

#include <json.hpp>

namespace coasim {

using nlohmann::json;

const char* metric_name(DistanceMetric m) {
    return m == DistanceMetric::cosine ? "cosine" : "euclidean";
}

DistanceMetric metric_from_name(const std::string& name) {
    if (name == "cosine") return DistanceMetric::cosine;
    if (name == "euclidean") return DistanceMetric::euclidean;
    throw std::runtime_error("unknown distance metric: " + name);
}

ClusterAssignment epsilon_cluster(const EmbeddingSet& emb, double epsilon, int min_pts,
                                  DistanceMetric metric) {
    if (emb.entries.empty()) throw std::runtime_error("epsilon_cluster over empty embedding set");
    if (epsilon <= 0) throw std::runtime_error("epsilon must be positive");
    if (min_pts < 1) throw std::runtime_error("min_pts must be >= 1");

    // sorted by case_id via the map
    std::vector<const Embedding*> pts;
    pts.reserve(emb.entries.size());
    for (const auto& [id, e] : emb.entries) pts.push_back(&e);
    const std::size_t n = pts.size();

    auto dist = [&](std::size_t i, std::size_t j) {
        std::span<const float> a(pts[i]->vector), b(pts[j]->vector);
        return metric == DistanceMetric::cosine ? kernels::cosine_distance(a, b)
                                                : kernels::euclidean_distance(a, b);
    };

    // neighbor lists include the point itself
    std::vector<std::vector<std::size_t>> nbrs(n);
    for (std::size_t i = 0; i < n; ++i) nbrs[i].push_back(i);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (dist(i, j) <= epsilon) {
                nbrs[i].push_back(j);
                nbrs[j].push_back(i);
            }

    std::vector<int> label(n, -2); // -2 unvisited, -1 noise
    int next = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (label[i] != -2) continue;
        if (nbrs[i].size() < static_cast<std::size_t>(min_pts)) {
            label[i] = -1;
            continue;
        }
        int cluster = next++;
        label[i] = cluster;
        std::deque<std::size_t> queue(nbrs[i].begin(), nbrs[i].end());
        while (!queue.empty()) {
            std::size_t q = queue.front();
            queue.pop_front();
            if (label[q] == -1) label[q] = cluster; // border point
            if (label[q] != -2) continue;
            label[q] = cluster;
            if (nbrs[q].size() >= static_cast<std::size_t>(min_pts))
                queue.insert(queue.end(), nbrs[q].begin(), nbrs[q].end());
        }
    }

    // renumber clusters by smallest contained case_id (= first appearance,
    // since pts is sorted by case_id)
    std::vector<int> remap(next, -1);
    int compact = 0;
    for (std::size_t i = 0; i < n; ++i)
        if (label[i] >= 0 && remap[label[i]] == -1) remap[label[i]] = compact++;

    ClusterAssignment out;
    out.epsilon = epsilon;
    out.min_pts = min_pts;
    out.metric = metric;
    out.cluster_count = compact;
    for (std::size_t i = 0; i < n; ++i)
        out.assignment[pts[i]->case_id] = label[i] >= 0 ? remap[label[i]] : -1;
    return out;
}

SimilarityRelation similarity_relation(const ClusterAssignment& assign, const Corpus& corpus,
                                       double lambda, std::size_t n) {
    if (n == 0) throw std::runtime_error("similarity_relation needs n >= 1");
    // cluster -> per-COA case counts (noise points contribute nothing)
    std::map<int, std::map<std::string, std::size_t>> members;
    for (const auto& c : corpus.cases) {
        auto it = assign.assignment.find(c.case_id);
        if (it == assign.assignment.end())
            throw std::runtime_error("case not assigned to a cluster: " + c.case_id);
        if (it->second >= 0) ++members[it->second][c.coa];
    }

    // evidence.first counts cases of the lexicographically smaller COA
    std::map<CoaPair, std::pair<std::size_t, std::size_t>> evidence;
    for (const auto& [cluster, counts] : members) {
        for (auto ia = counts.begin(); ia != counts.end(); ++ia) {
            auto ib = ia;
            for (++ib; ib != counts.end(); ++ib) {
                auto& ev = evidence[{ia->first, ib->first}];
                ev.first += ia->second;
                ev.second += ib->second;
            }
        }
    }

    SimilarityRelation rel;
    rel.lambda = lambda;
    const double need = lambda * static_cast<double>(n) - 1e-9;
    for (const auto& [pair, ev] : evidence) {
        if (static_cast<double>(ev.first) >= need && static_cast<double>(ev.second) >= need)
            rel.pairs[pair] = PairEvidence{ev.first, ev.second, n};
    }
    return rel;
}

namespace {

std::map<CoaPair, double> score_lookup(const PairScoreTable& table) {
    std::map<CoaPair, double> out;
    for (const auto& p : table.scores) out[{p.coa_a, p.coa_b}] = p.score;
    return out;
}

UtilityResult utility_impl(const SimilarityRelation& rel, const std::map<CoaPair, double>& dice) {
    UtilityResult res;
    res.lambda = rel.lambda;
    res.relation = rel;
    if (rel.pairs.empty()) return res;
    std::set<std::string> coas;
    double sum = 0.0;
    for (const auto& [pair, ev] : rel.pairs) {
        auto it = dice.find(pair);
        if (it == dice.end())
            throw std::runtime_error("pair missing from dice table: " + pair.first + " / " +
                                     pair.second);
        sum += it->second;
        coas.insert(pair.first);
        coas.insert(pair.second);
    }
    res.coa_set_size = coas.size();
    res.utility = static_cast<double>(coas.size()) * sum / static_cast<double>(rel.pairs.size());
    return res;
}

} // namespace

UtilityResult utility(const SimilarityRelation& rel, const PairScoreTable& dice_table) {
    return utility_impl(rel, score_lookup(dice_table));
}

std::vector<double> make_lambda_grid(double start, double step, double end) {
    if (step <= 0 || start <= 0 || end < start) throw std::runtime_error("invalid lambda grid");
    std::vector<double> grid;
    for (std::size_t k = 0;; ++k) {
        double v = start + static_cast<double>(k) * step;
        if (v > end + step * 1e-9) break;
        // snap accumulated float noise (0.05*3 -> 0.15000000000000002)
        grid.push_back(std::round(v * 1e12) / 1e12);
    }
    return grid;
}

AnnealResult anneal(const std::function<double(double, double)>& objective, double eps_lo,
                    double eps_hi, std::span<const double> lambda_grid, std::uint64_t seed,
                    std::size_t budget) {
    if (!(eps_lo > 0) || !(eps_hi > eps_lo)) throw std::runtime_error("invalid epsilon bounds");
    if (lambda_grid.empty()) throw std::runtime_error("empty lambda grid");
    if (budget == 0) throw std::runtime_error("budget must be >= 1");

    std::mt19937_64 rng(seed);
    auto uniform = [&] { return (rng() >> 11) * 0x1.0p-53; };
    auto gaussian = [&] {
        double u1 = uniform(), u2 = uniform();
        if (u1 <= 0) u1 = 0x1.0p-53;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
    };

    const double range = eps_hi - eps_lo;
    double eps = eps_lo + uniform() * range;
    std::size_t li = static_cast<std::size_t>(rng() % lambda_grid.size());

    AnnealResult res;
    double cur = objective(eps, lambda_grid[li]);
    res.trace.push_back({0, eps, lambda_grid[li], cur, true});
    res.best_epsilon = eps;
    res.best_lambda = lambda_grid[li];
    res.best_value = cur;

    double temp = std::max(1.0, 0.1 * std::abs(cur));
    for (std::size_t it = 1; it < budget; ++it) {
        double cand_eps = std::clamp(eps + gaussian() * 0.05 * range, eps_lo, eps_hi);
        std::size_t cand_li = li;
        if (rng() & 1) {
            if (cand_li + 1 < lambda_grid.size()) ++cand_li;
        } else {
            if (cand_li > 0) --cand_li;
        }
        double value = objective(cand_eps, lambda_grid[cand_li]);
        double delta = value - cur;
        bool accept = delta >= 0 || uniform() < std::exp(delta / temp);
        res.trace.push_back({it, cand_eps, lambda_grid[cand_li], value, accept});
        if (accept) {
            eps = cand_eps;
            li = cand_li;
            cur = value;
        }
        if (value > res.best_value) {
            res.best_value = value;
            res.best_epsilon = cand_eps;
            res.best_lambda = lambda_grid[cand_li];
        }
        temp *= 0.95;
    }
    return res;
}

UtilityResult optimize(const EmbeddingSet& emb, const Corpus& corpus,
                       const PairScoreTable& dice_table, double eps_lo, double eps_hi,
                       std::span<const double> lambda_grid, std::uint64_t seed, std::size_t budget,
                       DistanceMetric metric, int min_pts, std::vector<SaTracePoint>* trace) {
    std::size_t n = 0;
    for (const auto& [label, idxs] : corpus.coa_index) n = std::max(n, idxs.size());
    if (n == 0) throw std::runtime_error("optimize over empty corpus");

    auto dice = score_lookup(dice_table);
    std::map<long long, ClusterAssignment> cluster_memo;
    std::map<std::pair<long long, double>, double> value_memo;

    auto objective = [&](double eps, double lambda) {
        long long cell = std::llround(eps * 1e4);
        auto key = std::make_pair(cell, lambda);
        if (auto it = value_memo.find(key); it != value_memo.end()) return it->second;
        auto cit = cluster_memo.find(cell);
        if (cit == cluster_memo.end())
            cit = cluster_memo.emplace(cell, epsilon_cluster(emb, eps, min_pts, metric)).first;
        auto rel = similarity_relation(cit->second, corpus, lambda, n);
        double value = utility_impl(rel, dice).utility;
        value_memo[key] = value;
        return value;
    };

    AnnealResult best = anneal(objective, eps_lo, eps_hi, lambda_grid, seed, budget);
    if (trace) *trace = best.trace;

    auto assign = epsilon_cluster(emb, best.best_epsilon, min_pts, metric);
    auto rel = similarity_relation(assign, corpus, best.best_lambda, n);
    UtilityResult res = utility_impl(rel, dice);
    res.epsilon = best.best_epsilon;
    res.lambda = best.best_lambda;
    return res;
}

std::string UtilityResult::to_json() const {
    json j;
    j["epsilon"] = epsilon;
    j["lambda"] = lambda;
    j["utility"] = utility;
    j["coa_set_size"] = coa_set_size;
    j["pair_count"] = relation.pairs.size();
    json pairs = json::array();
    for (const auto& [pair, ev] : relation.pairs) {
        json p;
        p["coa_a"] = pair.first;
        p["coa_b"] = pair.second;
        p["s"] = ev.s;
        p["t"] = ev.t;
        p["n"] = ev.n;
        pairs.push_back(std::move(p));
    }
    j["pairs"] = std::move(pairs);
    return j.dump(2) + "\n";
}

namespace {

double quantile(const std::vector<double>& sorted, double p) {
    if (sorted.empty()) throw std::runtime_error("quantile of empty set");
    double pos = p * static_cast<double>(sorted.size() - 1);
    std::size_t lo = static_cast<std::size_t>(pos);
    std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

} // namespace

ThresholdReport determine_threshold(const SimilarityRelation& rel, const RankList& ensemble,
                                    OutlierRule rule, const std::set<double>& manual_exclusions) {
    if (rel.pairs.empty()) throw std::runtime_error("determine_threshold over empty relation");
    std::vector<double> ranks;
    ranks.reserve(rel.pairs.size());
    for (const auto& [pair, ev] : rel.pairs) {
        auto it = ensemble.ranks.find(pair);
        if (it == ensemble.ranks.end())
            throw std::runtime_error("relation pair missing from ensemble ranking: " + pair.first +
                                     " / " + pair.second);
        ranks.push_back(it->second);
    }
    std::sort(ranks.begin(), ranks.end());

    ThresholdReport rep;
    if (rule == OutlierRule::none) {
        rep.kept_ranks = ranks;
    } else if (rule == OutlierRule::manual) {
        for (double r : ranks) {
            bool excluded = false;
            for (double e : manual_exclusions)
                if (std::abs(r - e) < 1e-9) {
                    excluded = true;
                    break;
                }
            (excluded ? rep.outlier_ranks : rep.kept_ranks).push_back(r);
        }
    } else {
        double q1 = quantile(ranks, 0.25);
        double q3 = quantile(ranks, 0.75);
        double fence = q3 + 1.5 * (q3 - q1);
        for (double r : ranks) (r > fence ? rep.outlier_ranks : rep.kept_ranks).push_back(r);
    }
    if (rep.kept_ranks.empty())
        throw std::runtime_error("outlier rule excluded every rank");

    double sum = 0.0;
    for (double r : rep.kept_ranks) sum += r;
    rep.mu = sum / static_cast<double>(rep.kept_ranks.size());
    double ss = 0.0;
    for (double r : rep.kept_ranks) ss += (r - rep.mu) * (r - rep.mu);
    rep.sigma = std::sqrt(ss / static_cast<double>(rep.kept_ranks.size()));
    rep.threshold = rep.mu + 2.0 * rep.sigma;
    return rep;
}

std::string ThresholdReport::to_json() const {
    json j;
    j["mu"] = mu;
    j["sigma"] = sigma;
    j["threshold"] = threshold;
    j["kept_ranks"] = kept_ranks;
    j["outlier_ranks"] = outlier_ranks;
    return j.dump(2) + "\n";
}

} // namespace coasim
