#pragma once

#include <vector>

#include "bugsum/corpus.hpp"
#include "bugsum/vsm.hpp"

namespace bugsum::baselines {

struct WalkConfig {
    double damping = 0.85;
    double tol = 1e-10;
    int max_iters = 10000;
};

// Pairwise sentence cosine similarities; symmetric, zero diagonal.
struct SentenceGraph {
    std::size_t n = 0;
    std::vector<double> w; // row-major n*n

    double at(std::size_t i, std::size_t j) const { return w[i * n + j]; }
    static SentenceGraph build(const BugReport& T, const vsm::CorpusStats& stats);
};

// Damped random-walk stationary distribution over the graph.  Rows with no
// similarity mass become uniform.  personalization, when given, replaces the
// uniform teleport target (renormalized internally).
std::vector<double> stationary_distribution(const SentenceGraph& g, const WalkConfig& cfg,
                                            const std::vector<double>* personalization = nullptr);

// Rank by similarity to the mean sentence vector.
std::vector<RankedSentence> centroid_rank(const BugReport& T, const vsm::CorpusStats& stats);

// Maximal marginal relevance: centroid similarity traded against similarity
// to already-picked sentences.
std::vector<RankedSentence> mmr_rank(const BugReport& T, const vsm::CorpusStats& stats,
                                     double lambda_mmr = 0.5);

// First pick by stationary probability; later picks by expected visit counts
// with all previous picks turned into absorbing states.
std::vector<RankedSentence> grasshopper_rank(const BugReport& T, const vsm::CorpusStats& stats,
                                             const WalkConfig& cfg = {});

// Reinforced walk: transition mass into a node scales with its accumulated
// visit count.
std::vector<RankedSentence> divrank_rank(const BugReport& T, const vsm::CorpusStats& stats,
                                         const WalkConfig& cfg = {});

// Personalized PageRank; restart mass proportional to title similarity +
// description membership + non-negative sentiment.
std::vector<RankedSentence> hurried_rank(const BugReport& T, const vsm::CorpusStats& stats,
                                         const WalkConfig& cfg = {});

} // namespace bugsum::baselines
