#include "coasim/graph.hpp"

#include "coasim/util.hpp"

#include <algorithm>
#include <filesystem>
#include <functional>
#include <stdexcept>

namespace coasim {

CoaGraph build_graph(const RankList& ensemble, double cutoff) {
    std::vector<std::pair<double, CoaPair>> order;
    for (const auto& [pair, rank] : ensemble.ranks)
        if (rank <= cutoff) order.emplace_back(rank, pair);
    std::sort(order.begin(), order.end());

    CoaGraph g;
    std::map<std::string, int> ids;
    auto node = [&](const std::string& label) {
        auto it = ids.find(label);
        if (it != ids.end()) return it->second;
        int id = static_cast<int>(g.labels.size());
        g.labels.push_back(label);
        ids[label] = id;
        return id;
    };
    for (const auto& [rank, pair] : order) {
        int a = node(pair.first);
        int b = node(pair.second);
        if (a == b) continue;
        if (b < a) std::swap(a, b);
        g.edges[{a, b}] = rank;
    }
    return g;
}

std::vector<std::vector<int>> components(const CoaGraph& g) {
    const int n = static_cast<int>(g.node_count());
    std::vector<std::vector<int>> adj(n);
    for (const auto& [e, rank] : g.edges) {
        adj[e.first].push_back(e.second);
        adj[e.second].push_back(e.first);
    }
    std::vector<int> comp(n, -1);
    std::vector<std::vector<int>> out;
    for (int i = 0; i < n; ++i) {
        if (comp[i] != -1) continue;
        std::vector<int> stack{i}, members;
        comp[i] = static_cast<int>(out.size());
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            members.push_back(v);
            for (int w : adj[v])
                if (comp[w] == -1) {
                    comp[w] = comp[i];
                    stack.push_back(w);
                }
        }
        std::sort(members.begin(), members.end());
        out.push_back(std::move(members));
    }
    return out;
}

std::vector<std::vector<int>> cliques(const CoaGraph& g, std::size_t min_size) {
    if (g.node_count() > 10000)
        throw std::runtime_error("graph too large for clique enumeration; raise the rank cutoff");
    const int n = static_cast<int>(g.node_count());
    std::vector<std::set<int>> adj(n);
    for (const auto& [e, rank] : g.edges) {
        adj[e.first].insert(e.second);
        adj[e.second].insert(e.first);
    }

    std::vector<std::vector<int>> found;
    std::vector<int> r;
    // Bron-Kerbosch with pivoting
    std::function<void(std::set<int>, std::set<int>)> expand = [&](std::set<int> p, std::set<int> x) {
        if (p.empty() && x.empty()) {
            if (r.size() >= min_size) {
                auto clique = r;
                std::sort(clique.begin(), clique.end());
                found.push_back(std::move(clique));
            }
            return;
        }
        // pivot: vertex of P union X with most neighbors in P
        int pivot = -1;
        std::size_t best = 0;
        for (const auto& cand : {std::cref(p), std::cref(x)})
            for (int u : cand.get()) {
                std::size_t cnt = 0;
                for (int w : adj[u])
                    if (p.count(w)) ++cnt;
                if (pivot == -1 || cnt > best) {
                    pivot = u;
                    best = cnt;
                }
            }
        std::vector<int> candidates;
        for (int v : p)
            if (!adj[pivot].count(v)) candidates.push_back(v);
        for (int v : candidates) {
            std::set<int> np, nx;
            for (int w : p)
                if (adj[v].count(w)) np.insert(w);
            for (int w : x)
                if (adj[v].count(w)) nx.insert(w);
            r.push_back(v);
            expand(std::move(np), std::move(nx));
            r.pop_back();
            p.erase(v);
            x.insert(v);
        }
    };
    std::set<int> p, x;
    for (int i = 0; i < n; ++i) p.insert(i);
    expand(std::move(p), std::move(x));
    std::sort(found.begin(), found.end());
    return found;
}

namespace {

std::string xml_escape(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            case '\'': out += "&apos;"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

std::string xml_unescape(std::string_view s) {
    std::string out;
    for (std::size_t i = 0; i < s.size();) {
        if (s[i] == '&') {
            auto end = s.find(';', i);
            if (end != std::string_view::npos) {
                auto ent = s.substr(i + 1, end - i - 1);
                i = end + 1;
                if (ent == "amp") out += '&';
                else if (ent == "lt") out += '<';
                else if (ent == "gt") out += '>';
                else if (ent == "quot") out += '"';
                else if (ent == "apos") out += '\'';
                else out += "&" + std::string(ent) + ";";
                continue;
            }
        }
        out.push_back(s[i++]);
    }
    return out;
}

std::optional<std::string> attr(std::string_view tag, std::string_view name) {
    std::string needle = std::string(name) + "=\"";
    auto pos = tag.find(needle);
    if (pos == std::string_view::npos) return std::nullopt;
    pos += needle.size();
    auto end = tag.find('"', pos);
    if (end == std::string_view::npos) return std::nullopt;
    return xml_unescape(tag.substr(pos, end - pos));
}

} // namespace

std::string to_gexf(const CoaGraph& g) {
    std::string out;
    out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out += "<gexf xmlns=\"http://gexf.net/1.3\" version=\"1.3\">\n";
    out += "  <graph defaultedgetype=\"undirected\" mode=\"static\">\n";
    out += "    <attributes class=\"edge\">\n";
    out += "      <attribute id=\"0\" title=\"rank\" type=\"double\"/>\n";
    out += "    </attributes>\n";
    out += "    <nodes>\n";
    for (std::size_t i = 0; i < g.labels.size(); ++i)
        out += "      <node id=\"" + std::to_string(i) + "\" label=\"" + xml_escape(g.labels[i]) +
               "\"/>\n";
    out += "    </nodes>\n";
    out += "    <edges>\n";
    std::size_t eid = 0;
    for (const auto& [e, rank] : g.edges) {
        out += "      <edge id=\"" + std::to_string(eid++) + "\" source=\"" +
               std::to_string(e.first) + "\" target=\"" + std::to_string(e.second) +
               "\" weight=\"" + format_double(1.0 / rank) + "\">\n";
        out += "        <attvalues><attvalue for=\"0\" value=\"" + format_double(rank) +
               "\"/></attvalues>\n";
        out += "      </edge>\n";
    }
    out += "    </edges>\n";
    out += "  </graph>\n";
    out += "</gexf>\n";
    return out;
}

CoaGraph from_gexf(const std::string& xml) {
    CoaGraph g;
    std::size_t pos = 0;
    while ((pos = xml.find("<node ", pos)) != std::string::npos) {
        auto end = xml.find('>', pos);
        if (end == std::string::npos) break;
        std::string_view tag(xml.data() + pos, end - pos);
        auto id = attr(tag, "id");
        auto label = attr(tag, "label");
        if (!id || !label) throw std::runtime_error("gexf node missing id or label");
        std::size_t nid = std::stoul(*id);
        if (g.labels.size() <= nid) g.labels.resize(nid + 1);
        g.labels[nid] = *label;
        pos = end;
    }
    pos = 0;
    while ((pos = xml.find("<edge ", pos)) != std::string::npos) {
        auto end = xml.find('>', pos);
        if (end == std::string::npos) break;
        std::string_view tag(xml.data() + pos, end - pos);
        auto src = attr(tag, "source");
        auto dst = attr(tag, "target");
        if (!src || !dst) throw std::runtime_error("gexf edge missing endpoints");
        int a = std::stoi(*src), b = std::stoi(*dst);
        if (b < a) std::swap(a, b);
        double rank = 0.0;
        // rank is carried as edge attvalue 0; fall back to 1/weight
        auto close = xml.find("</edge>", end);
        auto self_close = tag.rfind('/');
        bool has_body = !(self_close != std::string_view::npos && self_close == tag.size() - 1);
        if (has_body && close != std::string::npos) {
            std::string_view body(xml.data() + end, close - end);
            auto av = body.find("<attvalue ");
            if (av != std::string_view::npos) {
                auto avend = body.find('>', av);
                auto value = attr(body.substr(av, avend - av), "value");
                if (value) rank = std::stod(*value);
            }
        }
        if (rank == 0.0) {
            auto w = attr(tag, "weight");
            if (w) rank = 1.0 / std::stod(*w);
        }
        g.edges[{a, b}] = rank;
        pos = end;
    }
    return g;
}

void export_gephi(const CoaGraph& g, const std::string& out_dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw std::runtime_error("cannot create directory " + out_dir + ": " + ec.message());

    std::string nodes = "Id,Label\n";
    for (std::size_t i = 0; i < g.labels.size(); ++i)
        nodes += std::to_string(i) + "," + csv_escape(g.labels[i]) + "\n";
    std::string edges = "Source,Target,Type,Weight\n";
    for (const auto& [e, rank] : g.edges)
        edges += std::to_string(e.first) + "," + std::to_string(e.second) + ",Undirected," +
                 format_double(1.0 / rank) + "\n";
    try {
        write_file_atomic((fs::path(out_dir) / "nodes.csv").string(), nodes);
        write_file_atomic((fs::path(out_dir) / "edges.csv").string(), edges);
        write_file_atomic((fs::path(out_dir) / "graph.gexf").string(), to_gexf(g));
    } catch (const std::exception& e) {
        throw std::runtime_error(std::string("gephi export failed: ") + e.what());
    }
}

} // namespace coasim
