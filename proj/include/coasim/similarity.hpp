#pragma once

#include "coasim/vectors.hpp"

#include <string>
#include <vector>

namespace coasim {

enum class Measure { individual_dice, wholistic_pcc, wholistic_dice };

const char* measure_name(Measure m);
Measure measure_from_name(const std::string& name);

struct PairScore {
    std::string coa_a; // coa_a < coa_b lexicographically
    std::string coa_b;
    double score = 0.0;
    std::string flags; // e.g. "undefined_pcc"
};

struct PairScoreTable {
    Measure measure = Measure::individual_dice;
    std::vector<PairScore> scores; // canonical pair order, all m(m-1)/2 pairs

    std::string to_csv() const;
    static PairScoreTable from_csv(const std::string& text, Measure measure);
};

struct UndefinedCorrelation : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Dice coefficient of two citation sets; 0 when both are empty.
double dice(const CitationVector& a, const CitationVector& b);

// Pearson correlation of two sparse count vectors under dense length-dim
// semantics (implicit zeros included). Throws UndefinedCorrelation when
// either vector is constant over all dim coordinates.
double pcc(const CountVector& a, const CountVector& b, std::size_t dim);

// Mean Dice over all |X|*|Y| ordered case pairs.
double avg_pairwise_dice(std::span<const CitationVector> xs, std::span<const CitationVector> ys);

// Dice of the binarized per-COA sums.
double wholistic_dice(std::span<const CitationVector> xs, std::span<const CitationVector> ys);

// Scores every unordered COA pair of a sampled corpus under one measure.
// Undefined correlations score -1 with an "undefined_pcc" flag instead of
// aborting the table.
PairScoreTable pair_table(const Corpus& corpus, const ArticleIndex& index, Measure measure);

} // namespace coasim
