#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bugsum/baselines.hpp"
#include "bugsum/corpus.hpp"
#include "bugsum/ranking.hpp"

namespace bugsum::summarizer {

enum class Method { lrca, brc, combine, centroid, mmr, grasshopper, divrank, hurried };

Method method_from_string(const std::string& name);
std::string method_to_string(Method m);
bool is_supervised(Method m);
// Schema a supervised method's model must carry.
features::Schema schema_for(Method m);

struct Summary {
    std::string report_id;
    std::vector<std::string> selected; // document order
    int word_budget = 0;               // floor of fraction * total words
    int words_used = 0;
    bool crossed_budget = false; // final sentence crossed the budget line
};

struct SummarizeOptions {
    double budget_fraction = 0.25;
    double dup_threshold = 0.8;
    double mmr_lambda = 0.5;
    baselines::WalkConfig walk;
};

// Ranked list for one report under the given method.  Supervised methods need
// a model whose schema matches.
std::vector<RankedSentence> rank_sentences(const BugReport& T, Method method,
                                           const vsm::CorpusStats& stats,
                                           const ranking::RankModel* model,
                                           const SummarizeOptions& opt = {});

// Walk the ranked order, adding sentences while the word budget is not yet
// reached; the sentence that crosses the budget is included, then selection
// stops.  At least one sentence is always selected for non-empty reports.
Summary select_budgeted(const std::vector<RankedSentence>& ranked, const BugReport& T,
                        double budget_fraction = 0.25);

Summary summarize(const BugReport& T, Method method, const vsm::CorpusStats& stats,
                  const ranking::RankModel* model = nullptr,
                  const SummarizeOptions& opt = {});

Json summary_to_json(const Summary& summary, Method method, double budget_fraction);
// Human-readable rendering with the selected sentence texts.
std::string summary_to_text(const Summary& summary, const BugReport& T);

} // namespace bugsum::summarizer
