#pragma once

#include "coasim/ensemble.hpp"

#include <map>
#include <set>
#include <string>
#include <vector>

namespace coasim {

struct CoaGraph {
    std::vector<std::string> labels; // node id -> COA label, ids dense from 0
    // undirected edges, (a < b), carrying the pair's ensemble rank
    std::map<std::pair<int, int>, double> edges;

    std::size_t node_count() const { return labels.size(); }
    bool operator==(const CoaGraph&) const = default;
};

// Nodes = COAs in at least one pair with rank <= cutoff; node ids assigned by
// first appearance in rank order (pair label as presentation tie-break).
CoaGraph build_graph(const RankList& ensemble, double cutoff);

// Connected components, ordered by smallest node id; nodes within a
// component sorted ascending.
std::vector<std::vector<int>> components(const CoaGraph& g);

// All maximal cliques of size >= min_size (Bron-Kerbosch with pivoting),
// sorted for deterministic output. Refuses graphs over 10,000 nodes.
std::vector<std::vector<int>> cliques(const CoaGraph& g, std::size_t min_size = 3);

// Writes nodes.csv (Id,Label), edges.csv (Source,Target,Type,Weight=1/rank)
// and graph.gexf (GEXF 1.3, undirected, UTF-8) into out_dir.
void export_gephi(const CoaGraph& g, const std::string& out_dir);

std::string to_gexf(const CoaGraph& g);
CoaGraph from_gexf(const std::string& xml);

} // namespace coasim
