#pragma once

#include "coasim/embedding.hpp"
#include "coasim/ensemble.hpp"
#include "coasim/similarity.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace coasim {

enum class DistanceMetric { cosine, euclidean };

const char* metric_name(DistanceMetric m);
DistanceMetric metric_from_name(const std::string& name);

struct ClusterAssignment {
    double epsilon = 0.0;
    int min_pts = 1;
    DistanceMetric metric = DistanceMetric::cosine;
    // case_id -> cluster id; -1 marks noise (only possible when min_pts > 1).
    std::map<std::string, int> assignment;
    int cluster_count = 0;
};

// DBSCAN over the embedding set. With min_pts = 1 every point is core and the
// clusters are exactly the connected components of the epsilon-neighborhood
// graph. Cluster ids are renumbered by smallest contained case_id.
ClusterAssignment epsilon_cluster(const EmbeddingSet& emb, double epsilon, int min_pts = 1,
                                  DistanceMetric metric = DistanceMetric::cosine);

struct PairEvidence {
    std::size_t s = 0; // cases of coa_a in clusters shared with coa_b
    std::size_t t = 0; // symmetric
    std::size_t n = 0;
};

struct SimilarityRelation {
    double lambda = 0.0;
    std::map<CoaPair, PairEvidence> pairs;
};

// Co-clustering relation: a distinct COA pair is included iff s/n >= lambda
// and t/n >= lambda, where s counts cases of one COA lying in clusters that
// also contain at least one case of the other.
SimilarityRelation similarity_relation(const ClusterAssignment& assign, const Corpus& corpus,
                                       double lambda, std::size_t n);

struct UtilityResult {
    double epsilon = 0.0;
    double lambda = 0.0;
    double utility = 0.0;
    SimilarityRelation relation;
    std::size_t coa_set_size = 0; // |T_sim|

    std::string to_json() const;
};

// U = |T_sim| * mean individual-Dice over the relation's pairs; 0 when empty.
UtilityResult utility(const SimilarityRelation& rel, const PairScoreTable& dice_table);

struct SaTracePoint {
    std::size_t iteration = 0;
    double epsilon = 0.0;
    double lambda = 0.0;
    double utility = 0.0;
    bool accepted = false;
};

struct AnnealResult {
    double best_epsilon = 0.0;
    double best_lambda = 0.0;
    double best_value = 0.0;
    std::vector<SaTracePoint> trace;
};

// Simulated annealing over continuous epsilon in [lo, hi] and lambda snapped
// to a grid. Geometric cooling (0.95/iteration), Gaussian epsilon steps with
// sigma = 5% of the range, +-1 grid steps in lambda; worse moves accepted
// with probability exp(delta/T). Deterministic for a fixed seed.
AnnealResult anneal(const std::function<double(double, double)>& objective, double eps_lo,
                    double eps_hi, std::span<const double> lambda_grid, std::uint64_t seed,
                    std::size_t budget);

std::vector<double> make_lambda_grid(double start, double step, double end);

// Full parameter search: clusters the embeddings per proposed epsilon and
// maximizes the co-clustering utility. Evaluations are memoized per
// (epsilon rounded to 1e-4, lambda) cell.
UtilityResult optimize(const EmbeddingSet& emb, const Corpus& corpus,
                       const PairScoreTable& dice_table, double eps_lo, double eps_hi,
                       std::span<const double> lambda_grid, std::uint64_t seed, std::size_t budget,
                       DistanceMetric metric = DistanceMetric::cosine, int min_pts = 1,
                       std::vector<SaTracePoint>* trace = nullptr);

enum class OutlierRule { tukey, manual, none };

struct ThresholdReport {
    std::vector<double> kept_ranks;
    std::vector<double> outlier_ranks;
    double mu = 0.0;
    double sigma = 0.0; // population standard deviation
    double threshold = 0.0; // mu + 2 sigma

    std::string to_json() const;
};

// Collects the ensemble ranks of the relation's pairs, drops outliers
// (Tukey fences by default, or an explicit rank list), and reports
// mu + 2 sigma over the kept ranks.
ThresholdReport determine_threshold(const SimilarityRelation& rel, const RankList& ensemble,
                                    OutlierRule rule = OutlierRule::tukey,
                                    const std::set<double>& manual_exclusions = {});

} // namespace coasim
