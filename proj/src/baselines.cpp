#include "bugsum/baselines.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "bugsum/errors.hpp"
#include "bugsum/features.hpp"
#include "bugsum/text.hpp"

namespace bugsum::baselines {

namespace {

std::vector<std::string> sentence_ids(const BugReport& T) {
    std::vector<std::string> ids;
    for (const Sentence* s : T.flat_sentences()) ids.push_back(s->id);
    return ids;
}

std::vector<vsm::TfIdfVector> sentence_vectors(const BugReport& T,
                                               const vsm::CorpusStats& stats) {
    std::vector<vsm::TfIdfVector> vecs;
    for (const Sentence* s : T.flat_sentences())
        vecs.push_back(vsm::vectorize(s->tokens, stats));
    return vecs;
}

// Row-stochastic base transition matrix; similarity-free rows spread uniformly.
std::vector<double> base_transitions(const SentenceGraph& g) {
    const std::size_t n = g.n;
    std::vector<double> p(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < n; ++j) row += g.at(i, j);
        if (row > 0.0) {
            for (std::size_t j = 0; j < n; ++j) p[i * n + j] = g.at(i, j) / row;
        } else {
            for (std::size_t j = 0; j < n; ++j) p[i * n + j] = 1.0 / static_cast<double>(n);
        }
    }
    return p;
}

std::size_t argmax_lowest(const std::vector<double>& v) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < v.size(); ++i)
        if (v[i] > v[best]) best = i;
    return best;
}

void normalize_l1(std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    if (s > 0.0)
        for (double& x : v) x /= s;
}

} // namespace

SentenceGraph SentenceGraph::build(const BugReport& T, const vsm::CorpusStats& stats) {
    const std::vector<vsm::TfIdfVector> vecs = sentence_vectors(T, stats);
    SentenceGraph g;
    g.n = vecs.size();
    g.w.assign(g.n * g.n, 0.0);
    for (std::size_t i = 0; i < g.n; ++i)
        for (std::size_t j = i + 1; j < g.n; ++j) {
            const double c = vsm::cosine(vecs[i], vecs[j]);
            g.w[i * g.n + j] = c;
            g.w[j * g.n + i] = c;
        }
    return g;
}

std::vector<double> stationary_distribution(const SentenceGraph& g, const WalkConfig& cfg,
                                            const std::vector<double>* personalization) {
    const std::size_t n = g.n;
    if (n == 0) return {};
    std::vector<double> restart(n, 1.0 / static_cast<double>(n));
    if (personalization) {
        if (personalization->size() != n)
            throw DataError("stationary_distribution: personalization width mismatch");
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            restart[i] = std::max(0.0, (*personalization)[i]);
            s += restart[i];
        }
        if (s > 0.0)
            for (double& x : restart) x /= s;
        else
            restart.assign(n, 1.0 / static_cast<double>(n));
    }
    const std::vector<double> p = base_transitions(g);
    std::vector<double> pi(n, 1.0 / static_cast<double>(n)), next(n);
    for (int it = 0; it < cfg.max_iters; ++it) {
        for (std::size_t j = 0; j < n; ++j) next[j] = (1.0 - cfg.damping) * restart[j];
        for (std::size_t i = 0; i < n; ++i) {
            const double pii = cfg.damping * pi[i];
            for (std::size_t j = 0; j < n; ++j) next[j] += pii * p[i * n + j];
        }
        normalize_l1(next);
        double diff = 0.0;
        for (std::size_t j = 0; j < n; ++j) diff += std::abs(next[j] - pi[j]);
        pi.swap(next);
        if (diff <= cfg.tol) break;
    }
    return pi;
}

std::vector<RankedSentence> centroid_rank(const BugReport& T, const vsm::CorpusStats& stats) {
    const std::vector<vsm::TfIdfVector> vecs = sentence_vectors(T, stats);
    std::vector<const std::vector<std::string>*> all;
    for (const Sentence* s : T.flat_sentences()) all.push_back(&s->tokens);
    vsm::TfIdfVector pseudo = vsm::aggregate(all, stats);
    const double inv = all.empty() ? 0.0 : 1.0 / static_cast<double>(all.size());
    for (auto& [term, w] : pseudo) w *= inv; // mean vector; cosine unaffected
    std::vector<double> scores;
    scores.reserve(vecs.size());
    for (const auto& v : vecs) scores.push_back(vsm::cosine(v, pseudo));
    return order_by_score(sentence_ids(T), scores);
}

std::vector<RankedSentence> mmr_rank(const BugReport& T, const vsm::CorpusStats& stats,
                                     double lambda_mmr) {
    const std::vector<vsm::TfIdfVector> vecs = sentence_vectors(T, stats);
    const std::size_t n = vecs.size();
    std::vector<const std::vector<std::string>*> all;
    for (const Sentence* s : T.flat_sentences()) all.push_back(&s->tokens);
    const vsm::TfIdfVector pseudo = vsm::aggregate(all, stats);
    std::vector<double> rel(n);
    for (std::size_t i = 0; i < n; ++i) rel[i] = vsm::cosine(vecs[i], pseudo);

    const std::vector<std::string> ids = sentence_ids(T);
    std::vector<char> picked(n, 0);
    std::vector<double> max_sim(n, 0.0); // to already-picked sentences
    std::vector<RankedSentence> out;
    out.reserve(n);
    for (std::size_t round = 0; round < n; ++round) {
        std::size_t best = n;
        double best_score = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (picked[i]) continue;
            const double redundancy = round == 0 ? 0.0 : max_sim[i];
            const double score = lambda_mmr * rel[i] - (1.0 - lambda_mmr) * redundancy;
            if (best == n || score > best_score) {
                best = i;
                best_score = score;
            }
        }
        picked[best] = 1;
        out.push_back({ids[best], best_score});
        for (std::size_t i = 0; i < n; ++i)
            if (!picked[i])
                max_sim[i] = std::max(max_sim[i], vsm::cosine(vecs[i], vecs[best]));
    }
    return out;
}

std::vector<RankedSentence> grasshopper_rank(const BugReport& T, const vsm::CorpusStats& stats,
                                             const WalkConfig& cfg) {
    const SentenceGraph g = SentenceGraph::build(T, stats);
    const std::size_t n = g.n;
    const std::vector<std::string> ids = sentence_ids(T);
    if (n == 0) return {};
    std::vector<double> pi = stationary_distribution(g, cfg);
    std::vector<RankedSentence> out;
    out.reserve(n);
    const std::size_t first = argmax_lowest(pi);
    out.push_back({ids[first], pi[first]});
    if (n == 1) return out;

    // Damped transition matrix; picked states become absorbing, and the
    // expected visits of the surviving states come from the fundamental
    // matrix, maintained by rank-one downdates as states are absorbed.
    const std::vector<double> p = base_transitions(g);
    std::vector<std::size_t> remaining;
    for (std::size_t i = 0; i < n; ++i)
        if (i != first) remaining.push_back(i);

    const std::size_t m0 = remaining.size();
    Eigen::MatrixXd A(m0, m0);
    for (std::size_t a = 0; a < m0; ++a)
        for (std::size_t b = 0; b < m0; ++b) {
            const double damped = cfg.damping * p[remaining[a] * n + remaining[b]] +
                                  (1.0 - cfg.damping) / static_cast<double>(n);
            A(a, b) = (a == b ? 1.0 : 0.0) - damped;
        }
    Eigen::MatrixXd N = A.partialPivLu().inverse();

    while (!remaining.empty()) {
        const std::size_t m = remaining.size();
        // Expected visits from a uniform start over the remaining states:
        // column sums of the fundamental matrix, scaled by 1/m.
        std::vector<double> visits(m, 0.0);
        for (std::size_t b = 0; b < m; ++b) {
            double col = 0.0;
            for (std::size_t a = 0; a < m; ++a) col += N(a, b);
            visits[b] = col / static_cast<double>(m);
        }
        const std::size_t k = argmax_lowest(visits);
        out.push_back({ids[remaining[k]], visits[k]});
        if (m == 1) break;

        Eigen::MatrixXd next(m - 1, m - 1);
        const double nkk = N(k, k);
        for (std::size_t a = 0, ar = 0; a < m; ++a) {
            if (a == k) continue;
            for (std::size_t b = 0, bc = 0; b < m; ++b) {
                if (b == k) continue;
                next(ar, bc) = N(a, b) - N(a, k) * N(k, b) / nkk;
                ++bc;
            }
            ++ar;
        }
        N = std::move(next);
        remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(k));
    }
    return out;
}

std::vector<RankedSentence> divrank_rank(const BugReport& T, const vsm::CorpusStats& stats,
                                         const WalkConfig& cfg) {
    const SentenceGraph g = SentenceGraph::build(T, stats);
    const std::size_t n = g.n;
    const std::vector<std::string> ids = sentence_ids(T);
    if (n == 0) return {};
    const std::vector<double> p0 = base_transitions(g);
    // Damped edge probabilities (uniform teleport folded in).
    std::vector<double> pstar(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            pstar[i * n + j] =
                cfg.damping * p0[i * n + j] + (1.0 - cfg.damping) / static_cast<double>(n);

    std::vector<double> visits(n, 1.0);
    std::vector<double> pi(n, 1.0 / static_cast<double>(n)), next(n);
    for (int it = 0; it < cfg.max_iters; ++it) {
        std::fill(next.begin(), next.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            double denom = 0.0;
            for (std::size_t j = 0; j < n; ++j) denom += pstar[i * n + j] * visits[j];
            if (denom <= 0.0) continue;
            const double scale = pi[i] / denom;
            for (std::size_t j = 0; j < n; ++j)
                next[j] += scale * pstar[i * n + j] * visits[j];
        }
        normalize_l1(next);
        double diff = 0.0;
        for (std::size_t j = 0; j < n; ++j) diff += std::abs(next[j] - pi[j]);
        pi.swap(next);
        for (std::size_t j = 0; j < n; ++j) visits[j] += pi[j];
        if (diff <= cfg.tol) break;
    }
    return order_by_score(ids, pi);
}

std::vector<RankedSentence> hurried_rank(const BugReport& T, const vsm::CorpusStats& stats,
                                         const WalkConfig& cfg) {
    const SentenceGraph g = SentenceGraph::build(T, stats);
    const std::vector<std::string> ids = sentence_ids(T);
    if (g.n == 0) return {};
    const vsm::TfIdfVector title_vec = vsm::vectorize(text::preprocess(T.title), stats);
    std::vector<double> restart;
    restart.reserve(g.n);
    for (const Turn& turn : T.turns) {
        for (const Sentence& s : turn.sentences) {
            const double title_sim =
                vsm::cosine(vsm::vectorize(s.tokens, stats), title_vec);
            const double desc = turn.kind == TurnKind::description ? 1.0 : 0.0;
            const double senti = std::max(0, features::sentiment(s));
            restart.push_back(title_sim + desc + senti + 1e-6);
        }
    }
    const std::vector<double> pi = stationary_distribution(g, cfg, &restart);
    return order_by_score(ids, pi);
}

} // namespace bugsum::baselines
