#include "bugsum/vsm.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "bugsum/errors.hpp"

namespace bugsum::vsm {

double CorpusStats::idf(const std::string& term) const {
    auto it = doc_freq_.find(term);
    std::size_t n_t = it == doc_freq_.end() ? 1 : it->second;
    return std::log(static_cast<double>(n_units_) / static_cast<double>(n_t));
}

CorpusStats build_stats(const std::vector<std::vector<std::string>>& units) {
    if (units.empty()) throw DataError("stats: empty unit universe");
    std::map<std::string, std::size_t> df;
    std::set<std::string> seen;
    for (const auto& unit : units) {
        seen.clear();
        for (const std::string& tok : unit)
            if (seen.insert(tok).second) ++df[tok];
    }
    return CorpusStats(units.size(), std::move(df));
}

CorpusStats build_stats(const std::vector<BugReport>& reports) {
    std::vector<std::vector<std::string>> units;
    for (const BugReport& r : reports)
        for (const Turn& t : r.turns)
            for (const Sentence& s : t.sentences) units.push_back(s.tokens);
    if (units.empty()) throw DataError("stats: corpus has no sentences");
    return build_stats(units);
}

TfIdfVector vectorize(const std::vector<std::string>& tokens, const CorpusStats& stats) {
    std::map<std::string, int> tf;
    for (const std::string& tok : tokens) ++tf[tok];
    TfIdfVector v;
    for (const auto& [term, count] : tf)
        v.emplace(term, count * stats.idf(term));
    return v;
}

TfIdfVector aggregate(const std::vector<const std::vector<std::string>*>& token_lists,
                      const CorpusStats& stats) {
    std::map<std::string, int> tf;
    for (const auto* tokens : token_lists)
        for (const std::string& tok : *tokens) ++tf[tok];
    TfIdfVector v;
    for (const auto& [term, count] : tf)
        v.emplace(term, count * stats.idf(term));
    return v;
}

double cosine(const TfIdfVector& a, const TfIdfVector& b) {
    const TfIdfVector& small = a.size() <= b.size() ? a : b;
    const TfIdfVector& big = a.size() <= b.size() ? b : a;
    double dot = 0.0;
    for (const auto& [term, w] : small) {
        auto it = big.find(term);
        if (it != big.end()) dot += w * it->second;
    }
    double na = norm(a), nb = norm(b);
    if (na == 0.0 || nb == 0.0) return 0.0;
    return dot / (na * nb);
}

double weight_sum(const TfIdfVector& v) {
    double s = 0.0;
    for (const auto& [term, w] : v) s += w;
    return s;
}

double norm(const TfIdfVector& v) {
    double s = 0.0;
    for (const auto& [term, w] : v) s += w * w;
    return std::sqrt(s);
}

void save_stats(const CorpusStats& stats, const std::string& path) {
    Json j;
    j["format"] = "bugsum-stats-v1";
    j["n_units"] = stats.n_units();
    Json df = Json::object();
    for (const auto& [term, n] : stats.doc_freq()) df[term] = n;
    j["doc_freq"] = std::move(df);
    std::ofstream out(path);
    if (!out) throw DataError("stats: cannot write " + path);
    out << j.dump(2) << "\n";
}

CorpusStats load_stats(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("stats: cannot open " + path);
    Json j;
    try {
        j = Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw DataError("stats " + path + ": " + e.what());
    }
    if (!j.contains("format") || j["format"] != "bugsum-stats-v1")
        throw DataError("stats " + path + ": unknown or missing format tag");
    std::map<std::string, std::size_t> df;
    for (const auto& [term, n] : j.at("doc_freq").items())
        df[term] = n.get<std::size_t>();
    return CorpusStats(j.at("n_units").get<std::size_t>(), std::move(df));
}

} // namespace bugsum::vsm
