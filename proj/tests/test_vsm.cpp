#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <random>

#include "bugsum/errors.hpp"
#include "bugsum/vsm.hpp"
#include "support/oracles.hpp"

using namespace bugsum;

namespace {

std::vector<std::vector<std::string>> random_units(std::mt19937_64& rng, int n_units,
                                                   int max_len) {
    static const std::vector<std::string> vocab = {"alpha", "beta",  "gamma", "delta",
                                                   "epsil", "zeta",  "eta",   "theta",
                                                   "iota",  "kappa"};
    std::uniform_int_distribution<int> len(1, max_len);
    std::uniform_int_distribution<std::size_t> pick(0, vocab.size() - 1);
    std::vector<std::vector<std::string>> units(n_units);
    for (auto& u : units) {
        const int m = len(rng);
        for (int i = 0; i < m; ++i) u.push_back(vocab[pick(rng)]);
    }
    return units;
}

} // namespace

TEST_CASE("tf-idf weights match a brute-force oracle on random corpora") {
    std::mt19937_64 rng(42);
    for (int round = 0; round < 25; ++round) {
        const auto units = random_units(rng, 2 + round % 7, 6);
        const vsm::CorpusStats stats = vsm::build_stats(units);
        REQUIRE(stats.n_units() == units.size());
        for (const auto& u : units) {
            const vsm::TfIdfVector got = vsm::vectorize(u, stats);
            const auto want = testsup::oracle_tfidf(u, units);
            REQUIRE(got.size() == want.size());
            for (const auto& [term, w] : want)
                CHECK(got.at(term) == doctest::Approx(w).epsilon(1e-12));
        }
    }
}

TEST_CASE("idf edge cases") {
    const std::vector<std::vector<std::string>> units = {
        {"everywhere", "rare"}, {"everywhere"}, {"everywhere"}};
    const vsm::CorpusStats stats = vsm::build_stats(units);
    // Present in all units: weight 0, key kept.
    const vsm::TfIdfVector v = vsm::vectorize({"everywhere", "rare"}, stats);
    REQUIRE(v.count("everywhere") == 1);
    CHECK(v.at("everywhere") == 0.0);
    CHECK(v.at("rare") == doctest::Approx(std::log(3.0)).epsilon(1e-12));
    // Unseen term: document frequency 1.
    const vsm::TfIdfVector u = vsm::vectorize({"novel", "novel"}, stats);
    CHECK(u.at("novel") == doctest::Approx(2.0 * std::log(3.0)).epsilon(1e-12));
    CHECK(stats.idf("novel") == doctest::Approx(std::log(3.0)).epsilon(1e-12));
}

TEST_CASE("empty universe is rejected") {
    CHECK_THROWS_AS(vsm::build_stats(std::vector<std::vector<std::string>>{}), DataError);
}

TEST_CASE("aggregate equals vectorizing the concatenation") {
    std::mt19937_64 rng(7);
    const auto units = random_units(rng, 5, 5);
    const vsm::CorpusStats stats = vsm::build_stats(units);
    const std::vector<const std::vector<std::string>*> members = {&units[0], &units[2],
                                                                  &units[4]};
    std::vector<std::string> concat;
    for (const auto* m : members) concat.insert(concat.end(), m->begin(), m->end());
    const vsm::TfIdfVector agg = vsm::aggregate(members, stats);
    const vsm::TfIdfVector direct = vsm::vectorize(concat, stats);
    REQUIRE(agg.size() == direct.size());
    for (const auto& [term, w] : direct)
        CHECK(agg.at(term) == doctest::Approx(w).epsilon(1e-12));
}

TEST_CASE("cosine matches the oracle and handles zero vectors") {
    std::mt19937_64 rng(11);
    const auto units = random_units(rng, 6, 6);
    const vsm::CorpusStats stats = vsm::build_stats(units);
    for (std::size_t i = 0; i < units.size(); ++i)
        for (std::size_t j = 0; j < units.size(); ++j) {
            const auto a = vsm::vectorize(units[i], stats);
            const auto b = vsm::vectorize(units[j], stats);
            CHECK(vsm::cosine(a, b) ==
                  doctest::Approx(testsup::oracle_cosine(a, b)).epsilon(1e-12));
        }
    CHECK(vsm::cosine({}, {}) == 0.0);
    CHECK(vsm::cosine({{"x", 1.0}}, {}) == 0.0);
    // All-zero weights (term in every unit) behave like an empty vector.
    const std::vector<std::vector<std::string>> all = {{"same"}, {"same"}};
    const vsm::CorpusStats s2 = vsm::build_stats(all);
    CHECK(vsm::cosine(vsm::vectorize({"same"}, s2), vsm::vectorize({"same"}, s2)) == 0.0);
}

TEST_CASE("cosine of identical non-degenerate vectors is 1") {
    const std::vector<std::vector<std::string>> units = {{"aa", "bb"}, {"cc"}};
    const vsm::CorpusStats stats = vsm::build_stats(units);
    const auto v = vsm::vectorize({"aa", "bb"}, stats);
    CHECK(vsm::cosine(v, v) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("weight_sum and norm") {
    const vsm::TfIdfVector v = {{"a", 3.0}, {"b", 4.0}};
    CHECK(vsm::weight_sum(v) == doctest::Approx(7.0));
    CHECK(vsm::norm(v) == doctest::Approx(5.0));
    CHECK(vsm::weight_sum({}) == 0.0);
    CHECK(vsm::norm({}) == 0.0);
}

TEST_CASE("stats cache round trip") {
    std::mt19937_64 rng(3);
    const auto units = random_units(rng, 4, 5);
    const vsm::CorpusStats stats = vsm::build_stats(units);
    const std::string path = "/tmp/bugsum_test_stats.json";
    vsm::save_stats(stats, path);
    const vsm::CorpusStats back = vsm::load_stats(path);
    CHECK(back == stats);
    std::remove(path.c_str());
}

TEST_CASE("per-sentence universe over reports") {
    RawReport a = testsup::raw_report("1", "t", "u", "Crash happens. Crash repeats.");
    RawReport b = testsup::raw_report("2", "t", "u", "Nothing shared.");
    const std::vector<BugReport> reports = {ingest_report(a), ingest_report(b)};
    const vsm::CorpusStats stats = vsm::build_stats(reports);
    CHECK(stats.n_units() == 3); // sentences, not reports
    CHECK(stats.doc_freq().at("crash") == 2);
}
