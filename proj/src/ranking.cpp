#include "bugsum/ranking.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <thread>

#include "bugsum/errors.hpp"
#include "bugsum/eval.hpp"
#include "bugsum/log.hpp"
#include "bugsum/util.hpp"

namespace bugsum::ranking {

namespace {

double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

// log(1 + exp(z)) - y*z, computed without overflow.
double sample_loss(double z, int y) {
    const double soft = z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
    return soft - y * z;
}

std::vector<double> linear_scores(const Matrix& X, const std::vector<double>& w, double b) {
    std::vector<double> z(X.size(), b);
    for (std::size_t i = 0; i < X.size(); ++i)
        for (std::size_t j = 0; j < w.size(); ++j) z[i] += w[j] * X[i][j];
    return z;
}

} // namespace

std::string TrainConfig::hash() const {
    std::string key = "l2=" + std::to_string(l2_lambda) + ";it=" + std::to_string(max_iters) +
                      ";tol=" + std::to_string(tol);
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(key)));
    return buf;
}

double penalized_loss(const Matrix& X, const std::vector<int>& y,
                      const std::vector<double>& w, double b, double lambda) {
    const std::vector<double> z = linear_scores(X, w, b);
    double loss = 0.0;
    for (std::size_t i = 0; i < X.size(); ++i) loss += sample_loss(z[i], y[i]);
    loss /= static_cast<double>(X.size());
    double pen = 0.0;
    for (double wj : w) pen += wj * wj;
    return loss + 0.5 * lambda * pen;
}

void penalized_gradient(const Matrix& X, const std::vector<int>& y,
                        const std::vector<double>& w, double b, double lambda,
                        std::vector<double>& grad_w, double& grad_b) {
    const std::size_t n = X.size(), d = w.size();
    grad_w.assign(d, 0.0);
    grad_b = 0.0;
    const std::vector<double> z = linear_scores(X, w, b);
    for (std::size_t i = 0; i < n; ++i) {
        const double r = sigmoid(z[i]) - y[i];
        for (std::size_t j = 0; j < d; ++j) grad_w[j] += r * X[i][j];
        grad_b += r;
    }
    for (std::size_t j = 0; j < d; ++j)
        grad_w[j] = grad_w[j] / static_cast<double>(n) + lambda * w[j];
    grad_b /= static_cast<double>(n);
}

RankModel train(const Matrix& X, const std::vector<int>& y, features::Schema schema,
                const TrainConfig& cfg, const std::vector<std::string>* sentence_ids) {
    const std::size_t n = X.size();
    if (n < 2 || y.size() != n)
        throw DataError("train: need at least 2 labeled rows with matching labels");
    const std::size_t d = X.front().size();
    bool has_pos = false, has_neg = false;
    for (std::size_t i = 0; i < n; ++i) {
        if (X[i].size() != d) throw DataError("train: ragged feature matrix");
        for (std::size_t j = 0; j < d; ++j)
            if (!std::isfinite(X[i][j]))
                throw NumericError(
                    "train: non-finite feature" +
                    (sentence_ids ? " for sentence " + (*sentence_ids)[i] : std::string()));
        (y[i] ? has_pos : has_neg) = true;
    }
    if (!has_pos || !has_neg)
        throw DataError("train: labels contain a single class; both classes required");

    RankModel model;
    model.schema = schema;
    model.config_hash = cfg.hash();
    model.means.assign(d, 0.0);
    model.stds.assign(d, 1.0);
    for (std::size_t j = 0; j < d; ++j) {
        double m = 0.0;
        for (std::size_t i = 0; i < n; ++i) m += X[i][j];
        m /= static_cast<double>(n);
        double v = 0.0;
        for (std::size_t i = 0; i < n; ++i) v += (X[i][j] - m) * (X[i][j] - m);
        v /= static_cast<double>(n);
        model.means[j] = m;
        model.stds[j] = v > 0.0 ? std::sqrt(v) : 1.0;
    }
    Matrix Xs(n, std::vector<double>(d));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < d; ++j)
            Xs[i][j] = (X[i][j] - model.means[j]) / model.stds[j];

    std::vector<double> w(d, 0.0), grad_w;
    double b = 0.0, grad_b = 0.0;
    double f = penalized_loss(Xs, y, w, b, cfg.l2_lambda);
    constexpr double armijo_c = 1e-4;
    for (int iter = 0; iter < cfg.max_iters; ++iter) {
        penalized_gradient(Xs, y, w, b, cfg.l2_lambda, grad_w, grad_b);
        double gnorm2 = grad_b * grad_b;
        for (double g : grad_w) gnorm2 += g * g;
        if (gnorm2 == 0.0) break;

        double alpha = 1.0;
        std::vector<double> w_new(d);
        double b_new = 0.0, f_new = f;
        bool accepted = false;
        while (alpha > 1e-20) {
            for (std::size_t j = 0; j < d; ++j) w_new[j] = w[j] - alpha * grad_w[j];
            b_new = b - alpha * grad_b;
            f_new = penalized_loss(Xs, y, w_new, b_new, cfg.l2_lambda);
            if (f_new <= f - armijo_c * alpha * gnorm2) {
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if (!accepted) break;
        w.swap(w_new);
        b = b_new;
        const double drop = f - f_new;
        f = f_new;
        if (drop <= cfg.tol * std::max(1.0, std::abs(f))) break;
    }
    if (!std::isfinite(f)) throw NumericError("train: loss diverged");
    model.weights = std::move(w);
    model.bias = b;
    return model;
}

double predict(const RankModel& model, const std::vector<double>& x) {
    if (x.size() != model.weights.size())
        throw DataError("predict: feature width " + std::to_string(x.size()) +
                        " does not match model width " +
                        std::to_string(model.weights.size()));
    double z = model.bias;
    for (std::size_t j = 0; j < x.size(); ++j)
        z += model.weights[j] * (x[j] - model.means[j]) / model.stds[j];
    return sigmoid(z);
}

namespace {

std::vector<double> mask_row(const std::vector<double>& row, const std::vector<int>& cols) {
    if (cols.empty()) return row;
    std::vector<double> out;
    out.reserve(cols.size());
    for (int c : cols) out.push_back(row[static_cast<std::size_t>(c)]);
    return out;
}

} // namespace

std::map<std::string, std::vector<RankedSentence>> leave_one_out_masked(
    const AnnotatedCorpus& corpus, features::Schema schema,
    const std::vector<int>& column_subset, const TrainConfig& cfg, double dup_threshold,
    int threads) {
    // Folds: annotated reports with a non-empty gold standard, corpus order.
    std::vector<const BugReport*> folds;
    std::map<std::string, std::set<std::string>> gss_by_report;
    for (const BugReport& r : corpus.reports) {
        auto it = corpus.annotations.find(r.report_id);
        if (it == corpus.annotations.end()) continue;
        eval::GoldStandard gs = eval::gold_standard(r.report_id, it->second);
        if (gs.gss.empty()) {
            log_info("leave-one-out: report " + r.report_id +
                     " has an empty gold standard; skipped");
            continue;
        }
        folds.push_back(&r);
        gss_by_report[r.report_id] = std::move(gs.gss);
    }
    if (folds.size() < 2)
        throw DataError("leave-one-out: need at least 2 annotated reports, have " +
                        std::to_string(folds.size()));

    std::vector<std::vector<RankedSentence>> results(folds.size());
    auto run_fold = [&](std::size_t fi) {
        std::vector<std::vector<std::string>> units;
        for (std::size_t k = 0; k < folds.size(); ++k) {
            if (k == fi) continue;
            for (const Turn& t : folds[k]->turns)
                for (const Sentence& s : t.sentences) units.push_back(s.tokens);
        }
        const vsm::CorpusStats stats = vsm::build_stats(units);

        Matrix X;
        std::vector<int> y;
        std::vector<std::string> ids;
        for (std::size_t k = 0; k < folds.size(); ++k) {
            if (k == fi) continue;
            const std::set<std::string>& gss = gss_by_report[folds[k]->report_id];
            for (features::SentenceFeatures& f :
                 features::extract_all(*folds[k], stats, schema, dup_threshold)) {
                X.push_back(mask_row(f.values, column_subset));
                y.push_back(gss.count(f.sentence_id) ? 1 : 0);
                ids.push_back(folds[k]->report_id + ":" + f.sentence_id);
            }
        }
        const RankModel model = train(X, y, schema, cfg, &ids);

        std::vector<std::string> test_ids;
        std::vector<double> scores;
        for (features::SentenceFeatures& f :
             features::extract_all(*folds[fi], stats, schema, dup_threshold)) {
            test_ids.push_back(f.sentence_id);
            scores.push_back(predict(model, mask_row(f.values, column_subset)));
        }
        results[fi] = order_by_score(test_ids, scores);
    };

    if (threads <= 1) {
        for (std::size_t fi = 0; fi < folds.size(); ++fi) run_fold(fi);
    } else {
        std::vector<std::thread> pool;
        std::size_t per = (folds.size() + threads - 1) / threads;
        for (int t = 0; t < threads; ++t) {
            std::size_t lo = t * per, hi = std::min(folds.size(), lo + per);
            if (lo >= hi) break;
            pool.emplace_back([&, lo, hi] {
                for (std::size_t fi = lo; fi < hi; ++fi) run_fold(fi);
            });
        }
        for (std::thread& th : pool) th.join();
    }

    std::map<std::string, std::vector<RankedSentence>> out;
    for (std::size_t fi = 0; fi < folds.size(); ++fi)
        out[folds[fi]->report_id] = std::move(results[fi]);
    return out;
}

std::map<std::string, std::vector<RankedSentence>> leave_one_out(
    const AnnotatedCorpus& corpus, features::Schema schema, const TrainConfig& cfg,
    double dup_threshold, int threads) {
    return leave_one_out_masked(corpus, schema, {}, cfg, dup_threshold, threads);
}

void save_model(const RankModel& model, const std::string& path) {
    Json j;
    j["schema"] = features::schema_to_string(model.schema);
    j["weights"] = model.weights;
    j["bias"] = model.bias;
    j["means"] = model.means;
    j["stds"] = model.stds;
    j["config_hash"] = model.config_hash;
    std::ofstream out(path);
    if (!out) throw DataError("model: cannot write " + path);
    out << j.dump(2) << "\n";
}

RankModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("model: cannot open " + path);
    Json j;
    try {
        j = Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw DataError("model " + path + ": " + e.what());
    }
    RankModel m;
    try {
        m.schema = features::schema_from_string(j.at("schema").get<std::string>());
        m.weights = j.at("weights").get<std::vector<double>>();
        m.bias = j.at("bias").get<double>();
        m.means = j.at("means").get<std::vector<double>>();
        m.stds = j.at("stds").get<std::vector<double>>();
        m.config_hash = j.value("config_hash", "");
    } catch (const nlohmann::json::exception& e) {
        throw DataError("model " + path + ": " + e.what());
    }
    if (m.means.size() != m.weights.size() || m.stds.size() != m.weights.size())
        throw DataError("model " + path + ": inconsistent vector widths");
    for (double s : m.stds)
        if (!(s > 0.0)) throw DataError("model " + path + ": non-positive std");
    return m;
}

} // namespace bugsum::ranking
