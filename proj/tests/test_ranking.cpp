#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <random>
#include <set>

#include "bugsum/errors.hpp"
#include "bugsum/ranking.hpp"
#include "support/oracles.hpp"

using namespace bugsum;
using ranking::Matrix;

namespace {

// Random binary-labeled dataset where the label leans on the first column.
void random_dataset(std::mt19937& rng, std::size_t n, std::size_t d, Matrix& X,
                    std::vector<int>& y) {
    std::uniform_real_distribution<double> unif(-2.0, 2.0);
    std::bernoulli_distribution flip(0.2);
    X.assign(n, std::vector<double>(d, 0.0));
    y.assign(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < d; ++j) X[i][j] = unif(rng);
        const int clean = X[i][0] > 0.0 ? 1 : 0;
        y[i] = flip(rng) ? 1 - clean : clean;
    }
    // Guarantee both classes.
    y[0] = 0;
    y[1] = 1;
}

double model_nll(const ranking::RankModel& m, const Matrix& X, const std::vector<int>& y) {
    double nll = 0.0;
    for (std::size_t i = 0; i < X.size(); ++i) {
        const double p = std::clamp(ranking::predict(m, X[i]), 1e-15, 1.0 - 1e-15);
        nll -= y[i] == 1 ? std::log(p) : std::log(1.0 - p);
    }
    return nll / static_cast<double>(X.size());
}

AnnotatedCorpus toy_annotated_corpus() {
    AnnotatedCorpus corpus;
    const char* bodies[3] = {
        "Crash happens on save. Restart does not help. Attaching logs now. Thanks a lot.",
        "Editor freezes on paste. Memory usage explodes. Reverting helps somewhat. Closing this soon.",
        "Build fails on linux. The linker reports errors. Patch attached below. Please review patch.",
    };
    for (int k = 0; k < 3; ++k) {
        RawReport raw = testsup::raw_report("r" + std::to_string(k + 1), "title words",
                                            "alice", bodies[k]);
        testsup::add_comment(raw, "bob", "Confirming the same behavior here today.");
        corpus.reports.push_back(ingest_report(raw));
    }
    for (int k = 0; k < 3; ++k) {
        const std::string id = "r" + std::to_string(k + 1);
        corpus.annotations[id] = {
            {"a1", {"1.1", "1.2"}},
            {"a2", {"1.1"}},
            {"a3", {"1.2", "2.1"}},
        };
        // votes: 1.1 -> 2, 1.2 -> 2, 2.1 -> 1; majority of 3 keeps {1.1, 1.2}.
    }
    return corpus;
}

} // namespace

TEST_CASE("analytic gradient matches central finite differences") {
    std::mt19937 rng(20240817);
    const double h = 1e-5;
    for (int trial = 0; trial < 10; ++trial) {
        Matrix X;
        std::vector<int> y;
        random_dataset(rng, 12, 4, X, y);
        std::uniform_real_distribution<double> unif(-1.0, 1.0);
        std::vector<double> w(4);
        for (double& v : w) v = unif(rng);
        double b = unif(rng);
        const double lambda = trial % 2 == 0 ? 0.0 : 0.3;

        std::vector<double> grad_w;
        double grad_b = 0.0;
        ranking::penalized_gradient(X, y, w, b, lambda, grad_w, grad_b);
        REQUIRE(grad_w.size() == w.size());

        for (std::size_t j = 0; j < w.size(); ++j) {
            std::vector<double> wp = w, wm = w;
            wp[j] += h;
            wm[j] -= h;
            const double fd = (ranking::penalized_loss(X, y, wp, b, lambda) -
                               ranking::penalized_loss(X, y, wm, b, lambda)) /
                              (2.0 * h);
            const double rel = std::fabs(fd - grad_w[j]) /
                               std::max(1.0, std::fabs(grad_w[j]));
            CHECK(rel < 1e-6);
        }
        const double fdb = (ranking::penalized_loss(X, y, w, b + h, lambda) -
                            ranking::penalized_loss(X, y, w, b - h, lambda)) /
                           (2.0 * h);
        CHECK(std::fabs(fdb - grad_b) / std::max(1.0, std::fabs(grad_b)) < 1e-6);
    }
}

TEST_CASE("penalty applies to weights but not the bias") {
    const Matrix X = {{1.0}, {-1.0}, {2.0}, {-2.0}};
    const std::vector<int> y = {1, 0, 1, 0};
    const std::vector<double> w = {0.7};
    const double b = 0.4;
    const double base = ranking::penalized_loss(X, y, w, b, 0.0);
    const double pen = ranking::penalized_loss(X, y, w, b, 2.0);
    CHECK(pen == doctest::Approx(base + 0.5 * 2.0 * 0.7 * 0.7).epsilon(1e-12));
    // Changing only the bias changes both losses by the same amount.
    const double base2 = ranking::penalized_loss(X, y, w, 1.5, 0.0);
    const double pen2 = ranking::penalized_loss(X, y, w, 1.5, 2.0);
    CHECK(pen2 - base2 == doctest::Approx(pen - base).epsilon(1e-12));
}

TEST_CASE("separable two-point problem reaches full accuracy") {
    const Matrix X = {{0.0}, {1.0}};
    const std::vector<int> y = {0, 1};
    const ranking::RankModel m = ranking::train(X, y, features::Schema::lrca11);
    CHECK(ranking::predict(m, {0.0}) < 0.5);
    CHECK(ranking::predict(m, {1.0}) > 0.5);
}

TEST_CASE("nested models with more columns never fit worse (lambda = 0)") {
    ranking::TrainConfig cfg;
    cfg.l2_lambda = 0.0;
    cfg.max_iters = 3000;
    cfg.tol = 1e-14;
    std::mt19937 rng(977);
    for (int trial = 0; trial < 20; ++trial) {
        Matrix X;
        std::vector<int> y;
        random_dataset(rng, 40, 3, X, y);
        double prev = std::numeric_limits<double>::infinity();
        for (std::size_t d = 1; d <= 3; ++d) {
            Matrix sub(X.size());
            for (std::size_t i = 0; i < X.size(); ++i)
                sub[i] = std::vector<double>(X[i].begin(), X[i].begin() + d);
            const ranking::RankModel m =
                ranking::train(sub, y, features::Schema::lrca11, cfg);
            const double nll = model_nll(m, sub, y);
            CHECK(nll <= prev + 1e-6);
            prev = nll;
        }
    }
}

TEST_CASE("training is deterministic") {
    std::mt19937 rng(5);
    Matrix X;
    std::vector<int> y;
    random_dataset(rng, 30, 5, X, y);
    const ranking::RankModel a = ranking::train(X, y, features::Schema::lrca11);
    const ranking::RankModel b = ranking::train(X, y, features::Schema::lrca11);
    REQUIRE(a.weights.size() == b.weights.size());
    for (std::size_t j = 0; j < a.weights.size(); ++j)
        CHECK(a.weights[j] == b.weights[j]); // bitwise
    CHECK(a.bias == b.bias);
    CHECK(a.means == b.means);
    CHECK(a.stds == b.stds);
    CHECK(a.config_hash == b.config_hash);
}

TEST_CASE("constant columns survive standardization") {
    Matrix X = {{1.0, 5.0}, {2.0, 5.0}, {3.0, 5.0}, {4.0, 5.0}};
    const std::vector<int> y = {0, 0, 1, 1};
    const ranking::RankModel m = ranking::train(X, y, features::Schema::lrca11);
    REQUIRE(m.stds.size() == 2);
    CHECK(m.stds[1] == 1.0); // constant column pinned to unit scale
    CHECK(std::isfinite(ranking::predict(m, {2.5, 5.0})));
}

TEST_CASE("train validation errors") {
    CHECK_THROWS_AS(ranking::train({{1.0}}, {1}, features::Schema::lrca11), DataError);
    CHECK_THROWS_AS(
        ranking::train({{1.0}, {2.0}}, {1, 1}, features::Schema::lrca11), DataError);
    CHECK_THROWS_AS(
        ranking::train({{1.0, 2.0}, {2.0}}, {1, 0}, features::Schema::lrca11), DataError);
    CHECK_THROWS_AS(ranking::train({{1.0}, {2.0}, {3.0}}, {1, 0},
                                   features::Schema::lrca11),
                    DataError); // row/label count mismatch
}

TEST_CASE("predict rejects width mismatches") {
    const ranking::RankModel m =
        ranking::train({{0.0}, {1.0}}, {0, 1}, features::Schema::lrca11);
    CHECK_THROWS_AS(ranking::predict(m, {0.0, 1.0}), DataError);
}

TEST_CASE("model save/load round trip preserves predictions bitwise") {
    std::mt19937 rng(11);
    Matrix X;
    std::vector<int> y;
    random_dataset(rng, 25, 4, X, y);
    const ranking::RankModel m = ranking::train(X, y, features::Schema::lrca11);
    const std::string path = "/tmp/bugsum_test_model.json";
    ranking::save_model(m, path);
    const ranking::RankModel loaded = ranking::load_model(path);
    std::remove(path.c_str());
    CHECK(loaded.schema == m.schema);
    CHECK(loaded.config_hash == m.config_hash);
    for (const auto& row : X)
        CHECK(ranking::predict(loaded, row) == ranking::predict(m, row));
}

TEST_CASE("load_model rejects missing and malformed files") {
    CHECK_THROWS_AS(ranking::load_model("/tmp/bugsum_no_such_model.json"), DataError);
    const std::string path = "/tmp/bugsum_bad_model.json";
    {
        std::ofstream out(path);
        out << "{\"weights\": [1, 2], \"means\": [0]}";
    }
    CHECK_THROWS_AS(ranking::load_model(path), DataError);
    std::remove(path.c_str());
}

TEST_CASE("config hash separates different settings") {
    ranking::TrainConfig a, b;
    b.l2_lambda = 0.5;
    CHECK(a.hash() == ranking::TrainConfig{}.hash());
    CHECK(a.hash() != b.hash());
}

TEST_CASE("leave-one-out ranks every sentence of every annotated report") {
    const AnnotatedCorpus corpus = toy_annotated_corpus();
    const auto ranked = ranking::leave_one_out(corpus, features::Schema::lrca11);
    REQUIRE(ranked.size() == 3);
    for (const BugReport& r : corpus.reports) {
        REQUIRE(ranked.count(r.report_id) == 1);
        const auto& list = ranked.at(r.report_id);
        REQUIRE(list.size() == r.sentence_count());
        std::set<std::string> seen;
        for (const auto& rs : list) {
            seen.insert(rs.id);
            CHECK(rs.score >= 0.0);
            CHECK(rs.score <= 1.0);
        }
        CHECK(seen.size() == r.sentence_count());
        for (std::size_t i = 1; i < list.size(); ++i)
            CHECK(list[i - 1].score >= list[i].score);
    }
}

TEST_CASE("leave-one-out is deterministic and thread-count independent") {
    const AnnotatedCorpus corpus = toy_annotated_corpus();
    const auto a = ranking::leave_one_out(corpus, features::Schema::lrca11, {}, 0.8, 1);
    const auto b = ranking::leave_one_out(corpus, features::Schema::lrca11, {}, 0.8, 4);
    REQUIRE(a.size() == b.size());
    for (const auto& [id, list] : a) {
        const auto& other = b.at(id);
        REQUIRE(list.size() == other.size());
        for (std::size_t i = 0; i < list.size(); ++i) {
            CHECK(list[i].id == other[i].id);
            CHECK(list[i].score == other[i].score); // bitwise
        }
    }
}

TEST_CASE("empty column mask means all columns") {
    const AnnotatedCorpus corpus = toy_annotated_corpus();
    const auto all = ranking::leave_one_out(corpus, features::Schema::lrca11);
    const auto masked =
        ranking::leave_one_out_masked(corpus, features::Schema::lrca11, {});
    REQUIRE(all.size() == masked.size());
    for (const auto& [id, list] : all) {
        const auto& other = masked.at(id);
        REQUIRE(list.size() == other.size());
        for (std::size_t i = 0; i < list.size(); ++i) {
            CHECK(list[i].id == other[i].id);
            CHECK(list[i].score == other[i].score);
        }
    }
}

TEST_CASE("masked leave-one-out works on a strict column subset") {
    const AnnotatedCorpus corpus = toy_annotated_corpus();
    const auto ranked = ranking::leave_one_out_masked(
        corpus, features::Schema::lrca11, {3, 5}); // SLEN and SLOC only
    REQUIRE(ranked.size() == 3);
    for (const BugReport& r : corpus.reports)
        CHECK(ranked.at(r.report_id).size() == r.sentence_count());
}

TEST_CASE("leave-one-out needs at least two annotated reports") {
    AnnotatedCorpus corpus = toy_annotated_corpus();
    corpus.annotations.erase("r2");
    corpus.annotations.erase("r3");
    CHECK_THROWS_AS(ranking::leave_one_out(corpus, features::Schema::lrca11), DataError);
}

TEST_CASE("order_by_score is stable under permutation of equal scores") {
    const std::vector<std::string> ids = {"1.1", "1.2", "1.3"};
    const std::vector<double> scores = {0.5, 0.9, 0.5};
    const auto ranked = order_by_score(ids, scores);
    REQUIRE(ranked.size() == 3);
    CHECK(ranked[0].id == "1.2");
    CHECK(ranked[1].id == "1.1"); // earlier position wins the tie
    CHECK(ranked[2].id == "1.3");
}
