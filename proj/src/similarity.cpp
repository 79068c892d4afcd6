#include "coasim/similarity.hpp"

#include "coasim/util.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

namespace coasim {

const char* measure_name(Measure m) {
    switch (m) {
        case Measure::individual_dice: return "individual_dice";
        case Measure::wholistic_pcc: return "wholistic_pcc";
        case Measure::wholistic_dice: return "wholistic_dice";
    }
    return "?";
}

Measure measure_from_name(const std::string& name) {
    if (name == "individual_dice") return Measure::individual_dice;
    if (name == "wholistic_pcc") return Measure::wholistic_pcc;
    if (name == "wholistic_dice") return Measure::wholistic_dice;
    throw std::runtime_error("unknown measure: " + name);
}

double dice(const CitationVector& a, const CitationVector& b) {
    std::size_t total = a.popcount() + b.popcount();
    if (total == 0) return 0.0; // no shared evidence
    return 2.0 * static_cast<double>(intersection_size(a, b)) / static_cast<double>(total);
}

double pcc(const CountVector& a, const CountVector& b, std::size_t dim) {
    if (dim == 0) throw UndefinedCorrelation("pcc over zero dimensions");
    // Integer moments keep the zero-variance test exact.
    std::int64_t sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
    for (const auto& [c, v] : a.entries) {
        sx += v;
        sxx += static_cast<std::int64_t>(v) * v;
    }
    for (const auto& [c, v] : b.entries) {
        sy += v;
        syy += static_cast<std::int64_t>(v) * v;
    }
    auto ia = a.entries.begin();
    auto ib = b.entries.begin();
    while (ia != a.entries.end() && ib != b.entries.end()) {
        if (ia->first < ib->first)
            ++ia;
        else if (ib->first < ia->first)
            ++ib;
        else {
            sxy += static_cast<std::int64_t>(ia->second) * ib->second;
            ++ia;
            ++ib;
        }
    }
    const auto d = static_cast<std::int64_t>(dim);
    std::int64_t var_x = d * sxx - sx * sx;
    std::int64_t var_y = d * syy - sy * sy;
    if (var_x == 0 || var_y == 0)
        throw UndefinedCorrelation("pcc undefined: constant vector over all coordinates");
    double cov = static_cast<double>(d) * static_cast<double>(sxy) -
                 static_cast<double>(sx) * static_cast<double>(sy);
    return cov / (std::sqrt(static_cast<double>(var_x)) * std::sqrt(static_cast<double>(var_y)));
}

double avg_pairwise_dice(std::span<const CitationVector> xs, std::span<const CitationVector> ys) {
    if (xs.empty() || ys.empty()) throw std::runtime_error("avg_pairwise_dice over empty case set");
    double sum = 0.0;
    for (const auto& x : xs)
        for (const auto& y : ys) sum += dice(x, y);
    return sum / (static_cast<double>(xs.size()) * static_cast<double>(ys.size()));
}

double wholistic_dice(std::span<const CitationVector> xs, std::span<const CitationVector> ys) {
    return dice(binarize(aggregate_vector(xs)), binarize(aggregate_vector(ys)));
}

std::string PairScoreTable::to_csv() const {
    std::string out = "coa_a,coa_b,score,flags\n";
    for (const auto& p : scores) {
        out += csv_escape(p.coa_a);
        out += ',';
        out += csv_escape(p.coa_b);
        out += ',';
        out += format_double(p.score);
        out += ',';
        out += p.flags;
        out += '\n';
    }
    return out;
}

PairScoreTable PairScoreTable::from_csv(const std::string& text, Measure measure) {
    PairScoreTable table;
    table.measure = measure;
    bool header = true;
    for (const auto& line : split(text, '\n')) {
        if (trim(line).empty()) continue;
        if (header) {
            header = false;
            continue;
        }
        auto f = csv_split_record(line);
        if (f.size() != 4) throw std::runtime_error("bad pair score row: " + line);
        table.scores.push_back(PairScore{f[0], f[1], std::stod(f[2]), f[3]});
    }
    return table;
}

PairScoreTable pair_table(const Corpus& corpus, const ArticleIndex& index, Measure measure) {
    // Per-COA case vectors, in coa_index (sorted label) order.
    std::vector<std::string> labels;
    std::vector<std::vector<CitationVector>> case_vecs;
    for (const auto& [label, idxs] : corpus.coa_index) {
        labels.push_back(label);
        std::vector<CitationVector> vs;
        vs.reserve(idxs.size());
        for (auto i : idxs) vs.push_back(case_vector(corpus.cases[i], index));
        case_vecs.push_back(std::move(vs));
    }
    std::vector<CountVector> sums;
    std::vector<CitationVector> unions;
    if (measure != Measure::individual_dice) {
        for (const auto& vs : case_vecs) {
            sums.push_back(aggregate_vector(vs));
            unions.push_back(binarize(sums.back()));
        }
    }

    PairScoreTable table;
    table.measure = measure;
    const std::size_t m = labels.size();
    table.scores.reserve(m * (m - 1) / 2);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = i + 1; j < m; ++j) {
            PairScore p;
            p.coa_a = labels[i];
            p.coa_b = labels[j];
            switch (measure) {
                case Measure::individual_dice:
                    p.score = avg_pairwise_dice(case_vecs[i], case_vecs[j]);
                    break;
                case Measure::wholistic_dice:
                    p.score = dice(unions[i], unions[j]);
                    break;
                case Measure::wholistic_pcc:
                    try {
                        p.score = pcc(sums[i], sums[j], index.dimension());
                    } catch (const UndefinedCorrelation&) {
                        p.score = -1.0;
                        p.flags = "undefined_pcc";
                    }
                    break;
            }
            table.scores.push_back(std::move(p));
        }
    }
    return table;
}

} // namespace coasim
