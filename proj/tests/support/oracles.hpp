#pragma once

// Test-local reference implementations and fixture builders.  Everything here
// is written independently of the library code paths it checks: brute-force
// loops, direct linear solves, and exhaustive enumeration.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "bugsum/corpus.hpp"

namespace testsup {

// ---- fixture builders ---------------------------------------------------

inline bugsum::RawReport raw_report(const std::string& id, const std::string& title,
                                    const std::string& reporter,
                                    const std::string& description,
                                    std::optional<std::int64_t> ts = std::nullopt) {
    bugsum::RawReport r;
    r.report_id = id;
    r.title = title;
    r.reporter = reporter;
    r.description = description;
    r.timestamp = ts;
    return r;
}

inline void add_comment(bugsum::RawReport& r, const std::string& author,
                        const std::string& text,
                        std::optional<std::int64_t> ts = std::nullopt) {
    bugsum::RawComment c;
    c.author = author;
    c.text = text;
    c.timestamp = ts;
    r.comments.push_back(std::move(c));
}

// ---- vector-space oracles ----------------------------------------------

// ln(N / n_t) document-frequency weighting over sentence units; unseen terms
// count as occurring in one unit.
inline double oracle_idf(const std::vector<std::vector<std::string>>& units,
                         const std::string& term) {
    std::size_t n = 0;
    for (const auto& u : units)
        if (std::find(u.begin(), u.end(), term) != u.end()) ++n;
    if (n == 0) n = 1;
    return std::log(static_cast<double>(units.size()) / static_cast<double>(n));
}

inline std::map<std::string, double> oracle_tfidf(
    const std::vector<std::string>& tokens,
    const std::vector<std::vector<std::string>>& units) {
    std::map<std::string, int> tf;
    for (const std::string& t : tokens) ++tf[t];
    std::map<std::string, double> v;
    for (const auto& [t, c] : tf) v[t] = c * oracle_idf(units, t);
    return v;
}

inline double oracle_cosine(const std::map<std::string, double>& a,
                            const std::map<std::string, double>& b) {
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (const auto& [t, w] : a) {
        na += w * w;
        auto it = b.find(t);
        if (it != b.end()) dot += w * it->second;
    }
    for (const auto& [t, w] : b) nb += w * w;
    if (na == 0.0 || nb == 0.0) return 0.0;
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

// ---- linear-algebra oracles --------------------------------------------

// Solve A x = b by Gaussian elimination with partial pivoting.
inline std::vector<double> solve_linear(std::vector<std::vector<double>> A,
                                        std::vector<double> b) {
    const std::size_t n = A.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(A[r][col]) > std::abs(A[piv][col])) piv = r;
        std::swap(A[col], A[piv]);
        std::swap(b[col], b[piv]);
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = A[r][col] / A[col][col];
            for (std::size_t c = col; c < n; ++c) A[r][c] -= f * A[col][c];
            b[r] -= f * b[col];
        }
    }
    std::vector<double> x(n, 0.0);
    for (std::size_t ri = n; ri-- > 0;) {
        double s = b[ri];
        for (std::size_t c = ri + 1; c < n; ++c) s -= A[ri][c] * x[c];
        x[ri] = s / A[ri][ri];
    }
    return x;
}

// Row-normalize a similarity matrix; all-zero rows become uniform.
inline std::vector<std::vector<double>> row_normalize(
    const std::vector<std::vector<double>>& W) {
    const std::size_t n = W.size();
    std::vector<std::vector<double>> P(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        double row = 0.0;
        for (double w : W[i]) row += w;
        for (std::size_t j = 0; j < n; ++j)
            P[i][j] = row > 0.0 ? W[i][j] / row : 1.0 / static_cast<double>(n);
    }
    return P;
}

// Stationary distribution of the damped walk: pi = d P^T pi + (1-d) r,
// computed by a direct linear solve (independent of power iteration).
inline std::vector<double> oracle_stationary(const std::vector<std::vector<double>>& W,
                                             double damping,
                                             const std::vector<double>* restart = nullptr) {
    const std::size_t n = W.size();
    const auto P = row_normalize(W);
    std::vector<double> r(n, 1.0 / static_cast<double>(n));
    if (restart) {
        double sum = 0.0;
        for (double v : *restart) sum += std::max(0.0, v);
        for (std::size_t i = 0; i < n; ++i)
            r[i] = sum > 0.0 ? std::max(0.0, (*restart)[i]) / sum
                             : 1.0 / static_cast<double>(n);
    }
    // (I - d P^T) pi = (1-d) r
    std::vector<std::vector<double>> A(n, std::vector<double>(n, 0.0));
    std::vector<double> b(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) A[i][j] = (i == j ? 1.0 : 0.0) - damping * P[j][i];
        b[i] = (1.0 - damping) * r[i];
    }
    std::vector<double> pi = solve_linear(A, b);
    double sum = 0.0;
    for (double v : pi) sum += v;
    for (double& v : pi) v /= sum;
    return pi;
}

// ---- statistics oracles -------------------------------------------------

inline std::vector<double> oracle_midranks(const std::vector<double>& v) {
    const std::size_t n = v.size();
    std::vector<double> r(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double less = 0.0, equal = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (v[j] < v[i]) ++less;
            if (v[j] == v[i]) ++equal;
        }
        r[i] = less + (equal + 1.0) / 2.0;
    }
    return r;
}

inline double oracle_pearson(const std::vector<double>& a, const std::vector<double>& b) {
    const double n = static_cast<double>(a.size());
    double ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= n;
    mb /= n;
    double cov = 0.0, va = 0.0, vb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        cov += (a[i] - ma) * (b[i] - mb);
        va += (a[i] - ma) * (a[i] - ma);
        vb += (b[i] - mb) * (b[i] - mb);
    }
    if (va == 0.0 || vb == 0.0) return 0.0;
    return cov / std::sqrt(va * vb);
}

inline double oracle_spearman(const std::vector<double>& x, const std::vector<double>& y) {
    return oracle_pearson(oracle_midranks(x), oracle_midranks(y));
}

// Exact two-sided signed-rank p-value by enumerating every sign assignment.
inline double oracle_wilcoxon_p(const std::vector<double>& diffs) {
    std::vector<double> d;
    for (double v : diffs)
        if (v != 0.0) d.push_back(v);
    const std::size_t n = d.size();
    if (n == 0) return 1.0;
    std::vector<double> absd(n);
    for (std::size_t i = 0; i < n; ++i) absd[i] = std::abs(d[i]);
    const std::vector<double> ranks = oracle_midranks(absd);
    double wp = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        if (d[i] > 0.0) wp += ranks[i];
    long le = 0, ge = 0;
    const std::uint64_t total = 1ull << n;
    for (std::uint64_t mask = 0; mask < total; ++mask) {
        double w = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            if (mask & (1ull << i)) w += ranks[i];
        if (w <= wp + 1e-12) ++le;
        if (w >= wp - 1e-12) ++ge;
    }
    const double denom = static_cast<double>(total);
    return std::min(1.0, 2.0 * std::min(le / denom, ge / denom));
}

// ---- chi-squared survival function --------------------------------------

inline double gamma_p_series(double a, double x) {
    double ap = a, sum = 1.0 / a, del = sum;
    for (int i = 0; i < 1000; ++i) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::abs(del) < std::abs(sum) * 1e-15) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

inline double gamma_q_cf(double a, double x) {
    double b = x + 1.0 - a, c = 1e300, d = 1.0 / b, h = d;
    for (int i = 1; i <= 1000; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < 1e-300) d = 1e-300;
        c = b + an / c;
        if (std::abs(c) < 1e-300) c = 1e-300;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-15) break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

// P(Chi2_k >= x).
inline double chi2_sf(double x, double k) {
    if (x <= 0.0) return 1.0;
    const double a = k / 2.0, xx = x / 2.0;
    return xx < a + 1.0 ? 1.0 - gamma_p_series(a, xx) : gamma_q_cf(a, xx);
}

// ---- misc ---------------------------------------------------------------

inline long long binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    long long r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

} // namespace testsup
