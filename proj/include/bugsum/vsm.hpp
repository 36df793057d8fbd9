#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "bugsum/corpus.hpp"

namespace bugsum::vsm {

// Sparse tf-idf vector.  Ordered map so sums and dumps are term-order
// deterministic.
using TfIdfVector = std::map<std::string, double>;

// Document-frequency statistics over a universe of units (sentences by
// default).  idf uses natural log; a term present in every unit gets weight 0
// but is kept in vectors.
class CorpusStats {
public:
    CorpusStats() = default;
    CorpusStats(std::size_t n_units, std::map<std::string, std::size_t> doc_freq)
        : n_units_(n_units), doc_freq_(std::move(doc_freq)) {}

    std::size_t n_units() const { return n_units_; }
    const std::map<std::string, std::size_t>& doc_freq() const { return doc_freq_; }

    // Unseen terms fall back to document frequency 1.
    double idf(const std::string& term) const;

    bool operator==(const CorpusStats&) const = default;

private:
    std::size_t n_units_ = 0;
    std::map<std::string, std::size_t> doc_freq_;
};

// Build stats with each token list as one unit.  Errors on an empty universe.
CorpusStats build_stats(const std::vector<std::vector<std::string>>& units);

// Build stats over every sentence of every report.
CorpusStats build_stats(const std::vector<BugReport>& reports);

// tf-idf vector of one token list: raw count x idf.
TfIdfVector vectorize(const std::vector<std::string>& tokens, const CorpusStats& stats);

// Sum of member tf vectors, then idf weighting (equivalently: sum of member
// tf-idf vectors).  Used for whole-report / description / turn vectors.
TfIdfVector aggregate(const std::vector<const std::vector<std::string>*>& token_lists,
                      const CorpusStats& stats);

double cosine(const TfIdfVector& a, const TfIdfVector& b);

double weight_sum(const TfIdfVector& v);
double norm(const TfIdfVector& v);

// Stats cache file: {"format":"bugsum-stats-v1","n_units":...,"doc_freq":{...}}.
void save_stats(const CorpusStats& stats, const std::string& path);
CorpusStats load_stats(const std::string& path);

} // namespace bugsum::vsm
