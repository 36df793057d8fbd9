#include <doctest.h>

#include <string>
#include <vector>

#include "bugsum/errors.hpp"
#include "bugsum/summarizer.hpp"
#include "support/oracles.hpp"

using namespace bugsum;
using summarizer::Method;

namespace {

std::vector<std::vector<std::string>> sentence_units(const BugReport& r) {
    std::vector<std::vector<std::string>> units;
    for (const Sentence* s : r.flat_sentences()) units.push_back(s->tokens);
    return units;
}

// Four sentences of exactly ten words each.
BugReport four_by_ten() {
    const std::string s =
        "alpha beta gamma delta epsilon zeta eta theta iota kappa.\n";
    RawReport raw = testsup::raw_report(
        "r", "t", "a",
        "one two three four five six seven eight nine ten.\n" + s + s +
            "red orange yellow green blue indigo violet cyan magenta black.\n");
    BugReport r = ingest_report(raw);
    REQUIRE(r.sentence_count() == 4);
    for (const Sentence* sp : r.flat_sentences()) REQUIRE(sp->word_count == 10);
    return r;
}

std::vector<RankedSentence> ranked_ids(const std::vector<std::string>& ids) {
    std::vector<RankedSentence> out;
    double score = 1.0;
    for (const auto& id : ids) out.push_back({id, score -= 0.01});
    return out;
}

} // namespace

TEST_CASE("quarter budget on a 40-word report keeps only the top sentence") {
    const BugReport r = four_by_ten();
    const auto ranked = ranked_ids({"1.3", "1.1", "1.2", "1.4"});
    const auto s = summarizer::select_budgeted(ranked, r, 0.25);
    CHECK(s.word_budget == 10);
    CHECK(s.selected == std::vector<std::string>{"1.3"});
    CHECK(s.words_used == 10);
    CHECK_FALSE(s.crossed_budget);
}

TEST_CASE("full budget keeps every sentence in document order") {
    const BugReport r = four_by_ten();
    const auto ranked = ranked_ids({"1.4", "1.2", "1.3", "1.1"});
    const auto s = summarizer::select_budgeted(ranked, r, 1.0);
    CHECK(s.word_budget == 40);
    CHECK(s.selected == std::vector<std::string>{"1.1", "1.2", "1.3", "1.4"});
    CHECK(s.words_used == 40);
    CHECK_FALSE(s.crossed_budget);
}

TEST_CASE("the crossing sentence is included and flagged") {
    RawReport raw = testsup::raw_report(
        "r", "t", "a",
        "one two three four five six.\n"
        "seven eight nine ten eleven twelve.\n"
        "apple pear plum fig cherry quince.\n");
    const BugReport r = ingest_report(raw);
    const auto ranked = ranked_ids({"1.1", "1.2", "1.3"});
    const auto s = summarizer::select_budgeted(ranked, r, 0.5);
    CHECK(s.word_budget == 9); // floor of 18 * 0.5
    CHECK(s.selected == std::vector<std::string>{"1.1", "1.2"});
    CHECK(s.words_used == 12);
    CHECK(s.crossed_budget);
}

TEST_CASE("a tiny budget still selects the leading ranked sentence") {
    const BugReport r = four_by_ten();
    const auto ranked = ranked_ids({"1.2", "1.1", "1.3", "1.4"});
    const auto s = summarizer::select_budgeted(ranked, r, 0.01);
    CHECK(s.word_budget == 0);
    CHECK(s.selected == std::vector<std::string>{"1.2"});
    CHECK(s.words_used == 10);
    CHECK(s.crossed_budget);
}

TEST_CASE("selection output is document order, not rank order") {
    const BugReport r = four_by_ten();
    const auto ranked = ranked_ids({"1.4", "1.1", "1.2", "1.3"});
    const auto s = summarizer::select_budgeted(ranked, r, 0.5);
    CHECK(s.word_budget == 20);
    CHECK(s.selected == std::vector<std::string>{"1.1", "1.4"});
}

TEST_CASE("unknown ranked ids are rejected") {
    const BugReport r = four_by_ten();
    const auto ranked = ranked_ids({"9.9", "1.1"});
    CHECK_THROWS_AS(summarizer::select_budgeted(ranked, r, 0.5), DataError);
}

TEST_CASE("summary json carries the expected fields in order") {
    const BugReport r = four_by_ten();
    const auto s = summarizer::select_budgeted(ranked_ids({"1.1", "1.2", "1.3", "1.4"}), r, 0.25);
    const Json j = summarizer::summary_to_json(s, Method::centroid, 0.25);
    const std::vector<std::string> want_keys = {
        "report_id", "method",        "budget_fraction", "word_budget",
        "words_used", "crossed_budget", "selected"};
    std::vector<std::string> keys;
    for (auto it = j.begin(); it != j.end(); ++it) keys.push_back(it.key());
    CHECK(keys == want_keys);
    CHECK(j["report_id"] == "r");
    CHECK(j["method"] == "centroid");
    CHECK(j["budget_fraction"] == 0.25);
    CHECK(j["selected"].is_array());
}

TEST_CASE("method names round trip and classify correctly") {
    using summarizer::method_from_string;
    using summarizer::method_to_string;
    const std::vector<std::string> names = {"lrca",        "brc",     "combine",
                                            "centroid",    "mmr",     "grasshopper",
                                            "divrank",     "hurried"};
    for (const std::string& name : names)
        CHECK(method_to_string(method_from_string(name)) == name);
    CHECK_THROWS_AS(method_from_string("pagerank"), UsageError);
    CHECK(summarizer::is_supervised(Method::lrca));
    CHECK(summarizer::is_supervised(Method::brc));
    CHECK(summarizer::is_supervised(Method::combine));
    CHECK_FALSE(summarizer::is_supervised(Method::centroid));
    CHECK_FALSE(summarizer::is_supervised(Method::hurried));
    CHECK(summarizer::schema_for(Method::lrca) == features::Schema::lrca11);
    CHECK(summarizer::schema_for(Method::brc) == features::Schema::brc24);
    CHECK(summarizer::schema_for(Method::combine) == features::Schema::combine27);
}

TEST_CASE("supervised ranking requires a model with a matching schema") {
    const BugReport r = four_by_ten();
    const vsm::CorpusStats stats = vsm::build_stats(sentence_units(r));
    CHECK_THROWS_AS(summarizer::rank_sentences(r, Method::lrca, stats, nullptr),
                    UsageError);
    ranking::RankModel model = ranking::train(
        {{0.0, 0.0}, {1.0, 1.0}, {0.5, 0.2}}, {0, 1, 0}, features::Schema::brc24);
    try {
        summarizer::rank_sentences(r, Method::lrca, stats, &model);
        FAIL("expected a schema-mismatch error");
    } catch (const DataError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("lrca11") != std::string::npos);
        CHECK(msg.find("brc24") != std::string::npos);
    }
}

TEST_CASE("unsupervised summarize dispatch produces budgeted summaries") {
    RawReport raw = testsup::raw_report("r7", "crash title", "a",
                                        "Crash happens on save every time now. "
                                        "Restart does not help at all today. "
                                        "Attaching the full logs for review here.");
    testsup::add_comment(raw, "b", "Confirming the crash on save here as well.");
    const BugReport r = ingest_report(raw);
    const vsm::CorpusStats stats = vsm::build_stats(sentence_units(r));
    for (const Method m : {Method::centroid, Method::mmr, Method::grasshopper,
                           Method::divrank, Method::hurried}) {
        const auto s = summarizer::summarize(r, m, stats);
        CHECK(s.report_id == "r7");
        CHECK(!s.selected.empty());
        CHECK(s.words_used > 0);
        // Document order within the selection.
        for (std::size_t i = 1; i < s.selected.size(); ++i)
            CHECK(s.selected[i - 1] < s.selected[i]);
    }
}

TEST_CASE("supervised summarize runs end to end with a trained model") {
    AnnotatedCorpus corpus;
    for (int k = 0; k < 2; ++k) {
        RawReport raw = testsup::raw_report(
            "r" + std::to_string(k + 1), "title", "alice",
            "Crash happens on save. Restart does not help. Logs attached below.");
        testsup::add_comment(raw, "bob", "Same behavior over here.");
        corpus.reports.push_back(ingest_report(raw));
    }
    const vsm::CorpusStats stats = vsm::build_stats(corpus.reports);
    // Labels: first description sentence positive everywhere.
    ranking::Matrix X;
    std::vector<int> y;
    for (const BugReport& r : corpus.reports)
        for (const auto& f : features::extract_all(r, stats, features::Schema::lrca11)) {
            X.push_back(f.values);
            y.push_back(f.sentence_id == "1.1" ? 1 : 0);
        }
    const ranking::RankModel model = ranking::train(X, y, features::Schema::lrca11);
    const auto s = summarizer::summarize(corpus.reports[0], Method::lrca, stats, &model);
    CHECK(!s.selected.empty());
    const std::string text = summarizer::summary_to_text(s, corpus.reports[0]);
    CHECK(text.find(s.selected.front()) != std::string::npos);
}
