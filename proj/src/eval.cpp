#include "bugsum/eval.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include "bugsum/errors.hpp"
#include "bugsum/log.hpp"
#include "bugsum/util.hpp"

namespace bugsum::eval {

GoldStandard gold_standard(const std::string& report_id,
                           const std::vector<AnnotationSet>& annotators) {
    if (annotators.empty())
        throw DataError("gold standard: no annotators for report " + report_id);
    GoldStandard gs;
    gs.report_id = report_id;
    for (const AnnotationSet& a : annotators)
        for (const std::string& sid : a.selected) ++gs.votes[sid];
    const double half = static_cast<double>(annotators.size()) / 2.0;
    for (const auto& [sid, v] : gs.votes)
        if (v > half) gs.gss.insert(sid);
    return gs;
}

double precision(const std::vector<std::string>& selected, const std::set<std::string>& gss) {
    if (selected.empty()) return 0.0;
    std::size_t hits = 0;
    for (const std::string& sid : selected) hits += gss.count(sid);
    return static_cast<double>(hits) / static_cast<double>(selected.size());
}

double recall(const std::vector<std::string>& selected, const std::set<std::string>& gss) {
    if (gss.empty()) throw DataError("recall: empty gold standard");
    std::size_t hits = 0;
    for (const std::string& sid : selected) hits += gss.count(sid);
    return static_cast<double>(hits) / static_cast<double>(gss.size());
}

double f_score(double p, double r) {
    return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0;
}

PyramidMode pyramid_mode_from_string(const std::string& name) {
    if (name == "sentences") return PyramidMode::sentences;
    if (name == "words") return PyramidMode::words;
    throw UsageError("unknown pyramid mode \"" + name + "\" (expected sentences|words)");
}

namespace {

long best_vote_mass_sentences(const GoldStandard& gold, std::size_t cardinality) {
    std::vector<int> vals;
    vals.reserve(gold.votes.size());
    for (const auto& [sid, v] : gold.votes) vals.push_back(v);
    std::sort(vals.begin(), vals.end(), std::greater<int>());
    long best = 0;
    for (std::size_t i = 0; i < vals.size() && i < cardinality; ++i) best += vals[i];
    return best;
}

long best_vote_mass_words(const GoldStandard& gold, const BugReport& T, int capacity) {
    if (capacity < 0) capacity = 0;
    std::vector<long> dp(static_cast<std::size_t>(capacity) + 1, 0);
    for (const Sentence* s : T.flat_sentences()) {
        auto it = gold.votes.find(s->id);
        if (it == gold.votes.end() || it->second <= 0) continue;
        const int wc = std::max(0, s->word_count);
        const long v = it->second;
        if (wc == 0) {
            for (long& cell : dp) cell += v;
            continue;
        }
        for (int w = capacity; w >= wc; --w)
            dp[w] = std::max(dp[w], dp[w - wc] + v);
    }
    return dp[static_cast<std::size_t>(capacity)];
}

} // namespace

double pyramid(const summarizer::Summary& summary, const GoldStandard& gold,
               const BugReport& T, PyramidMode mode) {
    long total = 0;
    for (const std::string& sid : summary.selected) {
        auto it = gold.votes.find(sid);
        if (it != gold.votes.end()) total += it->second;
    }
    const long best = mode == PyramidMode::sentences
                          ? best_vote_mass_sentences(gold, summary.selected.size())
                          : best_vote_mass_words(gold, T, summary.words_used);
    if (best == 0) return 1.0;
    return static_cast<double>(total) / static_cast<double>(best);
}

double hit_rate(const std::map<std::string, summarizer::Summary>& results,
                const std::map<std::string, std::string>& injected) {
    if (injected.empty()) return 0.0;
    std::size_t hits = 0;
    for (const auto& [rid, sid] : injected) {
        auto it = results.find(rid);
        if (it == results.end())
            throw DataError("hit rate: no summary for report " + rid);
        const auto& sel = it->second.selected;
        if (std::find(sel.begin(), sel.end(), sid) != sel.end()) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(injected.size());
}

double fisher_score(const std::vector<double>& values, const std::vector<int>& labels) {
    if (values.size() != labels.size())
        throw DataError("fisher score: value/label length mismatch");
    std::vector<double> pos, neg;
    for (std::size_t i = 0; i < values.size(); ++i)
        (labels[i] ? pos : neg).push_back(values[i]);
    if (pos.size() < 2 || neg.size() < 2)
        throw DataError("fisher score: each class needs at least 2 instances");
    auto mean = [](const std::vector<double>& v) {
        return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    };
    auto var_unbiased = [&](const std::vector<double>& v, double m) {
        double s = 0.0;
        for (double x : v) s += (x - m) * (x - m);
        return s / static_cast<double>(v.size() - 1);
    };
    const double mp = mean(pos), mn = mean(neg);
    const double num = (mp - mn) * (mp - mn);
    const double den = var_unbiased(pos, mp) + var_unbiased(neg, mn);
    if (den == 0.0) return num == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return num / den;
}

namespace {

std::vector<double> midranks(const std::vector<double>& v) {
    const std::size_t n = v.size();
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(),
              [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> ranks(n, 0.0);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && v[idx[j + 1]] == v[idx[i]]) ++j;
        const double r = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
        for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = r;
        i = j + 1;
    }
    return ranks;
}

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
    const std::size_t n = a.size();
    double ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= static_cast<double>(n);
    mb /= static_cast<double>(n);
    double cov = 0.0, va = 0.0, vb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        cov += (a[i] - ma) * (b[i] - mb);
        va += (a[i] - ma) * (a[i] - ma);
        vb += (b[i] - mb) * (b[i] - mb);
    }
    if (va == 0.0 || vb == 0.0) return 0.0;
    return cov / std::sqrt(va * vb);
}

} // namespace

double spearman_rho(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw DataError("spearman: need two equal-length series of length >= 2");
    return pearson(midranks(x), midranks(y));
}

std::vector<Merge> attribute_cluster(const std::vector<std::vector<double>>& columns) {
    const std::size_t n = columns.size();
    if (n < 2) throw DataError("clustering: need at least 2 attribute columns");
    std::vector<std::vector<double>> sim(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            sim[i][j] = sim[j][i] = std::abs(spearman_rho(columns[i], columns[j]));

    struct Cluster {
        int id;
        std::vector<std::size_t> members;
    };
    std::vector<Cluster> active;
    for (std::size_t i = 0; i < n; ++i)
        active.push_back({static_cast<int>(i), {i}});

    std::vector<Merge> merges;
    int next_id = static_cast<int>(n);
    while (active.size() > 1) {
        std::size_t bi = 0, bj = 1;
        double best = -1.0;
        for (std::size_t i = 0; i < active.size(); ++i)
            for (std::size_t j = i + 1; j < active.size(); ++j) {
                double s = 0.0;
                for (std::size_t a : active[i].members)
                    for (std::size_t b : active[j].members) s += sim[a][b];
                s /= static_cast<double>(active[i].members.size() * active[j].members.size());
                if (s > best) {
                    best = s;
                    bi = i;
                    bj = j;
                }
            }
        Merge m{active[bi].id, active[bj].id, best};
        merges.push_back(m);
        Cluster merged{next_id++, active[bi].members};
        merged.members.insert(merged.members.end(), active[bj].members.begin(),
                              active[bj].members.end());
        active.erase(active.begin() + static_cast<std::ptrdiff_t>(bj));
        active.erase(active.begin() + static_cast<std::ptrdiff_t>(bi));
        active.push_back(std::move(merged));
    }
    return merges;
}

WilcoxonResult wilcoxon_signed_rank(const std::vector<double>& a,
                                    const std::vector<double>& b) {
    if (a.size() != b.size()) throw DataError("wilcoxon: unequal series lengths");
    std::vector<double> d;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double diff = a[i] - b[i];
        if (diff != 0.0) d.push_back(diff);
    }
    WilcoxonResult res;
    res.n_used = static_cast<int>(d.size());
    if (d.empty()) {
        res.exact = true;
        return res; // no informative pairs; p = 1
    }
    const std::size_t n = d.size();
    std::vector<double> absd(n);
    for (std::size_t i = 0; i < n; ++i) absd[i] = std::abs(d[i]);
    const std::vector<double> ranks = midranks(absd);
    double wp = 0.0, wm = 0.0;
    for (std::size_t i = 0; i < n; ++i) (d[i] > 0.0 ? wp : wm) += ranks[i];
    res.statistic = std::min(wp, wm);

    if (n <= 20) {
        res.exact = true;
        // Doubled mid-ranks are integers; count sign assignments by their
        // doubled positive-rank sum.
        std::vector<long> r2(n);
        long total2 = 0;
        for (std::size_t i = 0; i < n; ++i) {
            r2[i] = std::lround(2.0 * ranks[i]);
            total2 += r2[i];
        }
        std::vector<double> dp(static_cast<std::size_t>(total2) + 1, 0.0);
        dp[0] = 1.0;
        for (long r : r2)
            for (long w = total2; w >= r; --w)
                dp[static_cast<std::size_t>(w)] += dp[static_cast<std::size_t>(w - r)];
        const double denom = std::pow(2.0, static_cast<double>(n));
        const long w2 = std::lround(2.0 * wp);
        double ple = 0.0, pge = 0.0;
        for (long w = 0; w <= total2; ++w) {
            if (w <= w2) ple += dp[static_cast<std::size_t>(w)];
            if (w >= w2) pge += dp[static_cast<std::size_t>(w)];
        }
        res.p_two_sided = std::min(1.0, 2.0 * std::min(ple, pge) / denom);
        return res;
    }

    // Normal approximation with tie correction and continuity correction.
    const double nn = static_cast<double>(n);
    const double mu = nn * (nn + 1.0) / 4.0;
    double tie_term = 0.0;
    {
        std::vector<double> sorted = absd;
        std::sort(sorted.begin(), sorted.end());
        std::size_t i = 0;
        while (i < sorted.size()) {
            std::size_t j = i;
            while (j + 1 < sorted.size() && sorted[j + 1] == sorted[i]) ++j;
            const double t = static_cast<double>(j - i + 1);
            tie_term += t * t * t - t;
            i = j + 1;
        }
    }
    const double var = nn * (nn + 1.0) * (2.0 * nn + 1.0) / 24.0 - tie_term / 48.0;
    if (var <= 0.0) {
        res.p_two_sided = 1.0;
        return res;
    }
    double z = wp - mu;
    z -= z > 0.0 ? 0.5 : (z < 0.0 ? -0.5 : 0.0);
    z /= std::sqrt(var);
    res.p_two_sided = std::min(1.0, std::erfc(std::abs(z) / std::sqrt(2.0)));
    return res;
}

// ---- evaluation harness -------------------------------------------------

namespace {

struct Folds {
    std::vector<const BugReport*> reports;
    std::map<std::string, GoldStandard> golds;
    std::vector<std::string> skipped;
};

Folds build_folds(const AnnotatedCorpus& corpus) {
    Folds f;
    for (const BugReport& r : corpus.reports) {
        auto it = corpus.annotations.find(r.report_id);
        if (it == corpus.annotations.end()) continue;
        GoldStandard gs = gold_standard(r.report_id, it->second);
        if (gs.gss.empty()) {
            f.skipped.push_back(r.report_id);
            continue;
        }
        f.reports.push_back(&r);
        f.golds.emplace(r.report_id, std::move(gs));
    }
    return f;
}

MetricRow score_summary(const summarizer::Summary& s, const GoldStandard& gold,
                        const BugReport& T, PyramidMode mode) {
    MetricRow row;
    row.precision = precision(s.selected, gold.gss);
    row.recall = recall(s.selected, gold.gss);
    row.f = f_score(row.precision, row.recall);
    row.pyramid = pyramid(s, gold, T, mode);
    return row;
}

struct MicroTally {
    long hits = 0, selected = 0, gss = 0, links = 0, max_links = 0;
};

MetricRow evaluate_ranked(const std::map<std::string, std::vector<RankedSentence>>& ranked,
                          const Folds& folds, const EvalOptions& opt,
                          std::map<std::string, MetricRow>* per_report_out) {
    MetricRow macro;
    MicroTally tally;
    std::size_t count = 0;
    for (const BugReport* r : folds.reports) {
        auto it = ranked.find(r->report_id);
        if (it == ranked.end())
            throw DataError("evaluate: no ranking for report " + r->report_id);
        const summarizer::Summary s =
            summarizer::select_budgeted(it->second, *r, opt.budget_fraction);
        const GoldStandard& gold = folds.golds.at(r->report_id);
        const MetricRow row = score_summary(s, gold, *r, opt.pyramid_mode);
        if (per_report_out) (*per_report_out)[r->report_id] = row;
        macro.precision += row.precision;
        macro.recall += row.recall;
        macro.f += row.f;
        macro.pyramid += row.pyramid;
        ++count;
        long h = 0, links = 0;
        for (const std::string& sid : s.selected) {
            h += gold.gss.count(sid);
            auto v = gold.votes.find(sid);
            if (v != gold.votes.end()) links += v->second;
        }
        tally.hits += h;
        tally.selected += static_cast<long>(s.selected.size());
        tally.gss += static_cast<long>(gold.gss.size());
        tally.links += links;
        tally.max_links += opt.pyramid_mode == PyramidMode::sentences
                               ? best_vote_mass_sentences(gold, s.selected.size())
                               : best_vote_mass_words(gold, *r, s.words_used);
    }
    if (count == 0) throw DataError("evaluate: no usable annotated reports");
    if (!opt.micro) {
        const double c = static_cast<double>(count);
        return {macro.precision / c, macro.recall / c, macro.f / c, macro.pyramid / c};
    }
    MetricRow micro;
    micro.precision =
        tally.selected > 0 ? static_cast<double>(tally.hits) / tally.selected : 0.0;
    micro.recall = tally.gss > 0 ? static_cast<double>(tally.hits) / tally.gss : 0.0;
    micro.f = f_score(micro.precision, micro.recall);
    micro.pyramid =
        tally.max_links > 0 ? static_cast<double>(tally.links) / tally.max_links : 1.0;
    return micro;
}

std::vector<int> columns_after_drop(features::Schema schema,
                                    const std::vector<std::string>& drop) {
    if (drop.empty()) return {};
    const std::vector<std::string>& names = features::schema_attributes(schema);
    std::vector<int> cols;
    for (std::size_t j = 0; j < names.size(); ++j) {
        if (std::find(drop.begin(), drop.end(), names[j]) == drop.end())
            cols.push_back(static_cast<int>(j));
    }
    if (cols.size() == names.size())
        throw UsageError("drop-attribute names not found in schema " +
                         features::schema_to_string(schema));
    if (cols.empty()) throw UsageError("cannot drop every attribute");
    return cols;
}

Json options_json(const EvalOptions& opt) {
    Json c;
    c["budget_fraction"] = opt.budget_fraction;
    c["dup_threshold"] = opt.dup_threshold;
    c["pyramid_mode"] = opt.pyramid_mode == PyramidMode::sentences ? "sentences" : "words";
    c["avg"] = opt.micro ? "micro" : "macro";
    c["l2_lambda"] = opt.train.l2_lambda;
    c["max_iters"] = opt.train.max_iters;
    c["tol"] = opt.train.tol;
    c["damping"] = opt.walk.damping;
    c["walk_tol"] = opt.walk.tol;
    c["walk_max_iters"] = opt.walk.max_iters;
    c["mmr_lambda"] = opt.mmr_lambda;
    c["idf"] = "natural-log";
    c["budget_crossing_sentence"] = "included";
    c["drop_attributes"] = opt.drop_attributes;
    return c;
}

const char* metric_names[] = {"precision", "recall", "f_score", "pyramid"};

double metric_value(const MetricRow& row, const std::string& name) {
    if (name == "precision") return row.precision;
    if (name == "recall") return row.recall;
    if (name == "f_score") return row.f;
    return row.pyramid;
}

} // namespace

EvalReport loo_evaluate(const AnnotatedCorpus& corpus,
                        const std::vector<summarizer::Method>& methods,
                        const EvalOptions& opt) {
    if (methods.empty()) throw UsageError("loo_evaluate: no methods requested");
    const Folds folds = build_folds(corpus);
    if (folds.reports.empty())
        throw DataError("loo_evaluate: no annotated reports with a non-empty gold standard");
    const vsm::CorpusStats corpus_stats = vsm::build_stats(corpus.reports);

    summarizer::SummarizeOptions sopt;
    sopt.budget_fraction = opt.budget_fraction;
    sopt.dup_threshold = opt.dup_threshold;
    sopt.mmr_lambda = opt.mmr_lambda;
    sopt.walk = opt.walk;

    EvalReport report;
    for (summarizer::Method m : methods) {
        MethodEval me;
        me.method = m;
        std::map<std::string, std::vector<RankedSentence>> ranked;
        if (summarizer::is_supervised(m)) {
            const features::Schema schema = summarizer::schema_for(m);
            ranked = ranking::leave_one_out_masked(
                corpus, schema, columns_after_drop(schema, opt.drop_attributes), opt.train,
                opt.dup_threshold, opt.threads);
        } else {
            for (const BugReport* r : folds.reports)
                ranked[r->report_id] =
                    summarizer::rank_sentences(*r, m, corpus_stats, nullptr, sopt);
        }
        me.aggregate = evaluate_ranked(ranked, folds, opt, &me.per_report);
        report.methods.push_back(std::move(me));
    }

    // Paired significance of every method against the supervised ranker.
    const MethodEval* lrca = nullptr;
    for (const MethodEval& me : report.methods)
        if (me.method == summarizer::Method::lrca) lrca = &me;
    if (lrca && report.methods.size() > 1) {
        for (const MethodEval& me : report.methods) {
            if (&me == lrca) continue;
            std::map<std::string, double> per_metric;
            for (const char* metric : metric_names) {
                std::vector<double> a, b;
                for (const auto& [rid, row] : lrca->per_report) {
                    auto it = me.per_report.find(rid);
                    if (it == me.per_report.end()) continue;
                    a.push_back(metric_value(row, metric));
                    b.push_back(metric_value(it->second, metric));
                }
                per_metric[metric] = wilcoxon_signed_rank(a, b).p_two_sided;
            }
            report.wilcoxon_vs_lrca[summarizer::method_to_string(me.method)] =
                std::move(per_metric);
        }
    }

    report.config = options_json(opt);
    report.config["n_reports"] = corpus.reports.size();
    report.config["n_evaluated"] = folds.reports.size();
    report.config["skipped_reports"] = folds.skipped;
    bool fallback = false;
    for (const BugReport* r : folds.reports)
        if (features::uses_time_fallback(*r)) fallback = true;
    report.config["time_fallback_used"] = fallback;
    return report;
}

Json eval_report_to_json(const EvalReport& report) {
    Json j;
    j["config"] = report.config;
    Json methods = Json::array();
    for (const MethodEval& me : report.methods) {
        Json jm;
        jm["method"] = summarizer::method_to_string(me.method);
        jm["aggregate"] = Json{{"precision", me.aggregate.precision},
                               {"recall", me.aggregate.recall},
                               {"f_score", me.aggregate.f},
                               {"pyramid", me.aggregate.pyramid}};
        Json per = Json::object();
        for (const auto& [rid, row] : me.per_report)
            per[rid] = Json{{"precision", row.precision},
                            {"recall", row.recall},
                            {"f_score", row.f},
                            {"pyramid", row.pyramid}};
        jm["per_report"] = std::move(per);
        methods.push_back(std::move(jm));
    }
    j["methods"] = std::move(methods);
    Json w = Json::object();
    for (const auto& [method, metrics] : report.wilcoxon_vs_lrca) {
        Json jm = Json::object();
        for (const auto& [metric, p] : metrics) jm[metric] = p;
        w[method] = std::move(jm);
    }
    j["wilcoxon_vs_lrca"] = std::move(w);
    return j;
}

std::string eval_table_text(const EvalReport& report) {
    std::ostringstream out;
    char line[128];
    std::snprintf(line, sizeof(line), "%-12s %9s %9s %9s %9s\n", "Method", "Precision",
                  "Recall", "F-score", "Pyramid");
    out << line;
    for (const MethodEval& me : report.methods) {
        std::snprintf(line, sizeof(line), "%-12s %9.2f %9.2f %9.2f %9.2f\n",
                      summarizer::method_to_string(me.method).c_str(),
                      100.0 * me.aggregate.precision, 100.0 * me.aggregate.recall,
                      100.0 * me.aggregate.f, 100.0 * me.aggregate.pyramid);
        out << line;
    }
    return out.str();
}

// ---- volunteer ablation -------------------------------------------------

VolunteerMatrix load_volunteer_matrix(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("volunteer matrix: cannot open " + path);
    std::string line;
    if (!std::getline(in, line))
        throw DataError("volunteer matrix " + path + ": empty file");
    auto split = [](const std::string& s) {
        std::vector<std::string> parts;
        std::string cur;
        for (char c : s) {
            if (c == ',') {
                parts.push_back(std::string(trim_view(cur)));
                cur.clear();
            } else if (c != '\r') {
                cur.push_back(c);
            }
        }
        parts.push_back(std::string(trim_view(cur)));
        return parts;
    };
    VolunteerMatrix m;
    const std::vector<std::string> header = split(line);
    if (header.size() < 2)
        throw DataError("volunteer matrix " + path + ": header needs attribute columns");
    m.attributes.assign(header.begin() + 1, header.end());
    while (std::getline(in, line)) {
        if (trim_view(line).empty()) continue;
        const std::vector<std::string> parts = split(line);
        if (parts.size() != header.size())
            throw DataError("volunteer matrix " + path + ": row width mismatch for \"" +
                            parts.front() + "\"");
        m.volunteer_ids.push_back(parts.front());
        std::uint32_t mask = 0;
        for (std::size_t j = 1; j < parts.size(); ++j) {
            if (parts[j] == "1")
                mask |= 1u << (j - 1);
            else if (parts[j] != "0")
                throw DataError("volunteer matrix " + path + ": cell must be 0 or 1, got \"" +
                                parts[j] + "\"");
        }
        m.contributed.push_back(mask);
    }
    if (m.volunteer_ids.empty())
        throw DataError("volunteer matrix " + path + ": no volunteers");
    return m;
}

std::vector<std::uint32_t> distinct_attribute_sets(const VolunteerMatrix& matrix) {
    const std::size_t n = matrix.volunteer_ids.size();
    if (n > 24) throw NumericError("volunteer enumeration limited to 24 volunteers");
    const std::uint32_t full = n == 32 ? 0xffffffffu : (1u << n) - 1u;
    std::set<std::uint32_t> seen;
    std::vector<std::uint32_t> or_of(static_cast<std::size_t>(full) + 1, 0);
    for (std::uint32_t mask = 1; mask <= full; ++mask) {
        const std::uint32_t low = mask & (mask - 1u);
        const unsigned bit = std::countr_zero(mask);
        or_of[mask] = or_of[low] | matrix.contributed[bit];
        seen.insert(or_of[mask]);
    }
    return std::vector<std::uint32_t>(seen.begin(), seen.end());
}

AblationResult ablate_volunteers(const VolunteerMatrix& matrix,
                                 const AnnotatedCorpus& corpus, const EvalOptions& opt) {
    const std::size_t nv = matrix.volunteer_ids.size();
    if (nv == 0 || nv > 24)
        throw DataError("ablation: volunteer count out of range");
    // Column coverage: every attribute must have a contributor.
    std::uint32_t unions = 0;
    for (std::uint32_t m : matrix.contributed) unions |= m;
    const std::uint32_t all_attrs = (1u << matrix.attributes.size()) - 1u;
    if (unions != all_attrs)
        throw DataError("ablation: some attributes have no contributing volunteer");
    // Map matrix columns onto supervised schema columns.
    const std::vector<std::string>& schema_names =
        features::schema_attributes(features::Schema::lrca11);
    std::vector<int> schema_col(matrix.attributes.size(), -1);
    for (std::size_t j = 0; j < matrix.attributes.size(); ++j) {
        auto it = std::find(schema_names.begin(), schema_names.end(), matrix.attributes[j]);
        if (it == schema_names.end())
            throw DataError("ablation: unknown attribute column \"" + matrix.attributes[j] +
                            "\"");
        schema_col[j] = static_cast<int>(it - schema_names.begin());
    }

    AblationResult result;
    result.baselines = {"centroid", "mmr", "grasshopper", "divrank", "hurried", "brc"};

    // Aggregate metrics of every baseline, once.
    std::map<std::string, MetricRow> baseline_rows;
    {
        const std::vector<summarizer::Method> ms = {
            summarizer::Method::centroid,   summarizer::Method::mmr,
            summarizer::Method::grasshopper, summarizer::Method::divrank,
            summarizer::Method::hurried,    summarizer::Method::brc};
        EvalOptions base_opt = opt;
        base_opt.drop_attributes.clear();
        const EvalReport base = loo_evaluate(corpus, ms, base_opt);
        for (const MethodEval& me : base.methods)
            baseline_rows[summarizer::method_to_string(me.method)] = me.aggregate;
    }

    const Folds folds = build_folds(corpus);
    const std::vector<std::uint32_t> sets = distinct_attribute_sets(matrix);
    result.distinct_sets = sets.size();
    log_info("ablation: " + std::to_string(sets.size()) + " distinct attribute sets");
    for (std::uint32_t attrs : sets) {
        std::vector<int> cols;
        for (std::size_t j = 0; j < matrix.attributes.size(); ++j)
            if (attrs & (1u << j)) cols.push_back(schema_col[j]);
        std::sort(cols.begin(), cols.end());
        const auto ranked = ranking::leave_one_out_masked(
            corpus, features::Schema::lrca11, cols, opt.train, opt.dup_threshold,
            opt.threads);
        result.per_set[attrs] = evaluate_ranked(ranked, folds, opt, nullptr);
    }

    // Tally winning combinations per size.
    const std::uint32_t full = (1u << nv) - 1u;
    std::vector<std::uint32_t> or_of(static_cast<std::size_t>(full) + 1, 0);
    std::vector<long> denom(nv, 0);
    std::map<std::string, std::vector<std::vector<long>>> wins;
    for (const std::string& metric : {std::string("precision"), std::string("recall"),
                                      std::string("f_score"), std::string("pyramid")})
        wins[metric].assign(result.baselines.size(), std::vector<long>(nv, 0));
    for (std::uint32_t mask = 1; mask <= full; ++mask) {
        const std::uint32_t low = mask & (mask - 1u);
        const unsigned bit = std::countr_zero(mask);
        or_of[mask] = or_of[low] | matrix.contributed[bit];
        const int k = std::popcount(mask);
        ++denom[k - 1];
        const MetricRow& row = result.per_set.at(or_of[mask]);
        for (std::size_t b = 0; b < result.baselines.size(); ++b) {
            const MetricRow& base = baseline_rows.at(result.baselines[b]);
            for (auto& [metric, table] : wins)
                if (metric_value(row, metric) > metric_value(base, metric))
                    ++table[b][k - 1];
        }
    }
    for (auto& [metric, table] : wins) {
        std::vector<std::vector<double>> pct(result.baselines.size(),
                                             std::vector<double>(nv, 0.0));
        for (std::size_t b = 0; b < table.size(); ++b)
            for (std::size_t k = 0; k < nv; ++k)
                pct[b][k] = denom[k] > 0
                                ? 100.0 * static_cast<double>(table[b][k]) / denom[k]
                                : 0.0;
        result.winning[metric] = std::move(pct);
    }

    result.config = options_json(opt);
    result.config["volunteers"] = matrix.volunteer_ids;
    result.config["distinct_sets"] = result.distinct_sets;
    Json base_json = Json::object();
    for (const auto& [name, row] : baseline_rows)
        base_json[name] = Json{{"precision", row.precision},
                               {"recall", row.recall},
                               {"f_score", row.f},
                               {"pyramid", row.pyramid}};
    result.config["baseline_aggregates"] = std::move(base_json);
    return result;
}

void write_winning_csv(const AblationResult& result, const std::string& metric,
                       const std::string& path) {
    auto it = result.winning.find(metric);
    if (it == result.winning.end())
        throw UsageError("winning table: unknown metric \"" + metric + "\"");
    std::ofstream out(path);
    if (!out) throw DataError("winning table: cannot write " + path);
    const std::size_t nv = it->second.empty() ? 0 : it->second.front().size();
    out << "baseline";
    for (std::size_t k = 1; k <= nv; ++k) out << ",k=" << k;
    out << "\n";
    char cell[32];
    for (std::size_t b = 0; b < result.baselines.size(); ++b) {
        out << result.baselines[b];
        for (std::size_t k = 0; k < nv; ++k) {
            std::snprintf(cell, sizeof(cell), ",%.1f", it->second[b][k]);
            out << cell;
        }
        out << "\n";
    }
}

} // namespace bugsum::eval
