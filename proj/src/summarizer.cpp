#include "bugsum/summarizer.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "bugsum/errors.hpp"

namespace bugsum::summarizer {

Method method_from_string(const std::string& name) {
    static const std::map<std::string, Method> table = {
        {"lrca", Method::lrca},
        {"brc", Method::brc},
        {"combine", Method::combine},
        {"centroid", Method::centroid},
        {"mmr", Method::mmr},
        {"grasshopper", Method::grasshopper},
        {"divrank", Method::divrank},
        {"hurried", Method::hurried},
    };
    auto it = table.find(name);
    if (it == table.end())
        throw UsageError("unknown method \"" + name +
                         "\" (expected lrca|brc|combine|centroid|mmr|grasshopper|divrank|hurried)");
    return it->second;
}

std::string method_to_string(Method m) {
    switch (m) {
        case Method::lrca: return "lrca";
        case Method::brc: return "brc";
        case Method::combine: return "combine";
        case Method::centroid: return "centroid";
        case Method::mmr: return "mmr";
        case Method::grasshopper: return "grasshopper";
        case Method::divrank: return "divrank";
        case Method::hurried: return "hurried";
    }
    return "?";
}

bool is_supervised(Method m) {
    return m == Method::lrca || m == Method::brc || m == Method::combine;
}

features::Schema schema_for(Method m) {
    switch (m) {
        case Method::lrca: return features::Schema::lrca11;
        case Method::brc: return features::Schema::brc24;
        case Method::combine: return features::Schema::combine27;
        default:
            throw UsageError("method " + method_to_string(m) + " has no feature schema");
    }
}

std::vector<RankedSentence> rank_sentences(const BugReport& T, Method method,
                                           const vsm::CorpusStats& stats,
                                           const ranking::RankModel* model,
                                           const SummarizeOptions& opt) {
    if (is_supervised(method)) {
        if (!model)
            throw UsageError("method " + method_to_string(method) + " requires a model");
        if (model->schema != schema_for(method))
            throw DataError("model schema " + features::schema_to_string(model->schema) +
                            " does not match method " + method_to_string(method) +
                            " (expected " +
                            features::schema_to_string(schema_for(method)) + ")");
        std::vector<std::string> ids;
        std::vector<double> scores;
        for (features::SentenceFeatures& f :
             features::extract_all(T, stats, model->schema, opt.dup_threshold)) {
            ids.push_back(f.sentence_id);
            scores.push_back(ranking::predict(*model, f.values));
        }
        return order_by_score(ids, scores);
    }
    switch (method) {
        case Method::centroid: return baselines::centroid_rank(T, stats);
        case Method::mmr: return baselines::mmr_rank(T, stats, opt.mmr_lambda);
        case Method::grasshopper: return baselines::grasshopper_rank(T, stats, opt.walk);
        case Method::divrank: return baselines::divrank_rank(T, stats, opt.walk);
        case Method::hurried: return baselines::hurried_rank(T, stats, opt.walk);
        default: break;
    }
    throw UsageError("unhandled method");
}

Summary select_budgeted(const std::vector<RankedSentence>& ranked, const BugReport& T,
                        double budget_fraction) {
    Summary summary;
    summary.report_id = T.report_id;
    const double budget = budget_fraction * T.total_words();
    summary.word_budget = static_cast<int>(std::floor(budget + 1e-9));
    if (ranked.empty()) return summary;

    std::map<std::string, int> word_count;
    std::map<std::string, std::size_t> position;
    {
        std::size_t i = 0;
        for (const Sentence* s : T.flat_sentences()) {
            word_count[s->id] = s->word_count;
            position[s->id] = i++;
        }
    }
    std::vector<std::string> chosen;
    int used = 0;
    for (const RankedSentence& r : ranked) {
        if (!chosen.empty() && used >= budget) break;
        auto wc = word_count.find(r.id);
        if (wc == word_count.end())
            throw DataError("select: ranked sentence " + r.id + " not in report " +
                            T.report_id);
        chosen.push_back(r.id);
        used += wc->second;
    }
    summary.crossed_budget = used > budget;
    summary.words_used = used;
    std::sort(chosen.begin(), chosen.end(), [&](const std::string& a, const std::string& b) {
        return position[a] < position[b];
    });
    summary.selected = std::move(chosen);
    return summary;
}

Summary summarize(const BugReport& T, Method method, const vsm::CorpusStats& stats,
                  const ranking::RankModel* model, const SummarizeOptions& opt) {
    return select_budgeted(rank_sentences(T, method, stats, model, opt), T,
                           opt.budget_fraction);
}

Json summary_to_json(const Summary& summary, Method method, double budget_fraction) {
    Json j;
    j["report_id"] = summary.report_id;
    j["method"] = method_to_string(method);
    j["budget_fraction"] = budget_fraction;
    j["word_budget"] = summary.word_budget;
    j["words_used"] = summary.words_used;
    j["crossed_budget"] = summary.crossed_budget;
    j["selected"] = summary.selected;
    return j;
}

std::string summary_to_text(const Summary& summary, const BugReport& T) {
    std::ostringstream out;
    out << "== " << summary.report_id << " (" << summary.words_used << "/"
        << summary.word_budget << " words) ==\n";
    for (const std::string& id : summary.selected) {
        const Sentence* s = T.find_sentence(id);
        out << "  [" << id << "] " << (s ? s->text : "?") << "\n";
    }
    return out.str();
}

} // namespace bugsum::summarizer
