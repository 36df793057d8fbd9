#include "bugsum/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "bugsum/errors.hpp"
#include "bugsum/log.hpp"
#include "bugsum/text.hpp"
#include "bugsum/util.hpp"

namespace bugsum {

namespace {

bool contains_ci(const std::string& lowered, std::string_view needle) {
    return lowered.find(needle) != std::string::npos;
}

// "if" later followed by "(" with anything in between.
bool has_if_paren(const std::string& lowered) {
    std::size_t i = lowered.find("if");
    if (i == std::string::npos) return false;
    return lowered.find('(', i + 2) != std::string::npos;
}

} // namespace

bool looks_like_code(const std::string& line) {
    std::string_view t = trim_view(line);
    if (t.empty()) return false;
    std::string low = lowercase_ascii(t);
    for (std::string_view pre : {"db2", "proc", "public", ">", "/*", "//"})
        if (low.rfind(pre, 0) == 0) return true;
    if (t.back() == ';') return true;
    for (std::string_view pat : {"<", "{", "}", "public static", "=", "sql"})
        if (contains_ci(low, pat)) return true;
    return has_if_paren(low);
}

std::vector<std::string> segment_sentences(const std::string& text) {
    std::vector<std::string> out;
    auto push = [&](std::string_view piece) {
        std::string_view t = trim_view(piece);
        if (!t.empty()) out.emplace_back(t);
    };

    std::string line;
    std::istringstream lines(text);
    while (std::getline(lines, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim_view(line).empty()) continue;
        if (looks_like_code(line)) {
            push(line);
            continue;
        }
        std::size_t start = 0;
        for (std::size_t i = 0; i < line.size(); ++i) {
            char c = line[i];
            if (c != '.' && c != '!' && c != '?') continue;
            std::size_t end = i;
            while (end + 1 < line.size() &&
                   (line[end + 1] == '.' || line[end + 1] == '!' || line[end + 1] == '?'))
                ++end;
            bool at_eol = end + 1 >= line.size();
            bool before_space = !at_eol && std::isspace(static_cast<unsigned char>(line[end + 1]));
            if (at_eol || before_space) {
                push(std::string_view(line).substr(start, end + 1 - start));
                start = end + 1;
            }
            i = end;
        }
        if (start < line.size()) push(std::string_view(line).substr(start));
    }
    return out;
}

void refresh_derived(BugReport& report) {
    for (Turn& turn : report.turns) {
        for (Sentence& s : turn.sentences) {
            s.tokens = text::preprocess(s.text);
            s.char_len = static_cast<int>(s.text.size());
            s.word_count = text::count_words(s.text);
        }
    }
}

BugReport ingest_report(const RawReport& raw) {
    if (raw.report_id.empty()) throw DataError("ingest: empty report_id");
    BugReport report;
    report.report_id = raw.report_id;
    report.title = raw.title;
    report.reporter = raw.reporter;
    report.status = raw.status;

    auto add_turn = [&](const std::string& author, std::optional<std::int64_t> ts,
                        TurnKind kind, const std::string& body) {
        std::vector<std::string> pieces = segment_sentences(body);
        if (pieces.empty()) return false;
        Turn turn;
        turn.turn_no = static_cast<int>(report.turns.size()) + 1;
        turn.author = author;
        turn.timestamp = ts;
        turn.kind = kind;
        int idx = 0;
        for (std::string& piece : pieces) {
            Sentence s;
            s.id = std::to_string(turn.turn_no) + "." + std::to_string(++idx);
            s.text = std::move(piece);
            turn.sentences.push_back(std::move(s));
        }
        report.turns.push_back(std::move(turn));
        return true;
    };

    if (!add_turn(raw.reporter, raw.timestamp, TurnKind::description, raw.description))
        throw DataError("ingest: report " + raw.report_id + " has an empty description");
    for (const RawComment& c : raw.comments) {
        if (!add_turn(c.author, c.timestamp, TurnKind::comment, c.text))
            log_debug("ingest: dropped empty comment in report " + raw.report_id);
    }
    refresh_derived(report);
    return report;
}

int BugReport::total_words() const {
    int n = 0;
    for (const Turn& t : turns)
        for (const Sentence& s : t.sentences) n += s.word_count;
    return n;
}

std::size_t BugReport::sentence_count() const {
    std::size_t n = 0;
    for (const Turn& t : turns) n += t.sentences.size();
    return n;
}

std::vector<const Sentence*> BugReport::flat_sentences() const {
    std::vector<const Sentence*> out;
    out.reserve(sentence_count());
    for (const Turn& t : turns)
        for (const Sentence& s : t.sentences) out.push_back(&s);
    return out;
}

std::vector<RankedSentence> order_by_score(const std::vector<std::string>& ids,
                                           const std::vector<double>& scores) {
    std::vector<std::size_t> idx(ids.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        if (scores[a] != scores[b]) return scores[a] > scores[b];
        return a < b;
    });
    std::vector<RankedSentence> out;
    out.reserve(ids.size());
    for (std::size_t i : idx) out.push_back({ids[i], scores[i]});
    return out;
}

const Sentence* BugReport::find_sentence(const std::string& id) const {
    for (const Turn& t : turns)
        for (const Sentence& s : t.sentences)
            if (s.id == id) return &s;
    return nullptr;
}

Json report_to_json(const BugReport& report) {
    Json j;
    j["report_id"] = report.report_id;
    j["title"] = report.title;
    j["reporter"] = report.reporter;
    if (!report.status.empty()) j["status"] = report.status;
    Json turns = Json::array();
    for (const Turn& t : report.turns) {
        Json jt;
        jt["turn_no"] = t.turn_no;
        jt["author"] = t.author;
        if (t.timestamp) jt["timestamp"] = *t.timestamp;
        jt["kind"] = t.kind == TurnKind::description ? "description" : "comment";
        Json sentences = Json::array();
        for (const Sentence& s : t.sentences)
            sentences.push_back(Json{{"id", s.id}, {"text", s.text}});
        jt["sentences"] = std::move(sentences);
        turns.push_back(std::move(jt));
    }
    j["turns"] = std::move(turns);
    return j;
}

namespace {

const Json& require(const Json& j, const char* key, const std::string& where) {
    auto it = j.find(key);
    if (it == j.end())
        throw DataError(where + ": missing field \"" + key + "\"");
    return *it;
}

std::string require_string(const Json& j, const char* key, const std::string& where) {
    const Json& v = require(j, key, where);
    if (!v.is_string())
        throw DataError(where + ": field \"" + key + "\" must be a string");
    return v.get<std::string>();
}

} // namespace

BugReport report_from_json(const Json& j) {
    if (!j.is_object()) throw DataError("report: not a JSON object");
    BugReport report;
    report.report_id = require_string(j, "report_id", "report");
    if (report.report_id.empty()) throw DataError("report: empty report_id");
    const std::string where = "report " + report.report_id;
    report.title = require_string(j, "title", where);
    report.reporter = require_string(j, "reporter", where);
    if (j.contains("status")) report.status = j["status"].get<std::string>();

    const Json& turns = require(j, "turns", where);
    if (!turns.is_array() || turns.empty())
        throw DataError(where + ": \"turns\" must be a non-empty array");

    std::unordered_set<std::string> seen_ids;
    int expected_no = 0;
    for (const Json& jt : turns) {
        Turn turn;
        turn.turn_no = require(jt, "turn_no", where).get<int>();
        if (turn.turn_no != ++expected_no)
            throw DataError(where + ": turn numbers must be contiguous from 1 (got " +
                            std::to_string(turn.turn_no) + ", expected " +
                            std::to_string(expected_no) + ")");
        turn.author = require_string(jt, "author", where);
        if (jt.contains("timestamp")) {
            if (!jt["timestamp"].is_number_integer())
                throw DataError(where + ": timestamp must be an integer");
            turn.timestamp = jt["timestamp"].get<std::int64_t>();
        }
        std::string kind = require_string(jt, "kind", where);
        if (kind == "description") turn.kind = TurnKind::description;
        else if (kind == "comment") turn.kind = TurnKind::comment;
        else throw DataError(where + ": unknown turn kind \"" + kind + "\"");
        if ((turn.turn_no == 1) != (turn.kind == TurnKind::description))
            throw DataError(where + ": turn 1 must be the description and only turn 1");

        const Json& sentences = require(jt, "sentences", where);
        if (!sentences.is_array() || sentences.empty())
            throw DataError(where + ": turn " + std::to_string(turn.turn_no) +
                            " has no sentences");
        int idx = 0;
        for (const Json& js : sentences) {
            Sentence s;
            s.id = require_string(js, "id", where);
            s.text = require_string(js, "text", where);
            std::string expect =
                std::to_string(turn.turn_no) + "." + std::to_string(++idx);
            if (s.id != expect)
                throw DataError(where + ": sentence id \"" + s.id +
                                "\" does not match its position (expected " + expect + ")");
            if (!seen_ids.insert(s.id).second)
                throw DataError(where + ": duplicate sentence id " + s.id);
            turn.sentences.push_back(std::move(s));
        }
        report.turns.push_back(std::move(turn));
    }
    refresh_derived(report);
    return report;
}

namespace {

template <class Fn>
void for_each_ndjson_line(const std::string& path, const char* what, Fn&& fn) {
    std::ifstream in(path);
    if (!in) throw DataError(std::string(what) + ": cannot open " + path);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim_view(line).empty()) continue;
        Json j;
        try {
            j = Json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw DataError(std::string(what) + " " + path + " line " +
                            std::to_string(line_no) + ": " + e.what());
        }
        fn(j, line_no);
    }
}

} // namespace

std::vector<BugReport> load_corpus(const std::string& path) {
    std::vector<BugReport> reports;
    std::unordered_set<std::string> ids;
    for_each_ndjson_line(path, "corpus", [&](const Json& j, std::size_t line_no) {
        BugReport r = report_from_json(j);
        if (!ids.insert(r.report_id).second)
            throw DataError("corpus " + path + " line " + std::to_string(line_no) +
                            ": duplicate report_id " + r.report_id);
        reports.push_back(std::move(r));
    });
    if (reports.empty()) throw DataError("corpus " + path + ": no reports");
    log_info("loaded " + std::to_string(reports.size()) + " reports from " + path);
    return reports;
}

void save_corpus(const std::vector<BugReport>& reports, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("corpus: cannot write " + path);
    for (const BugReport& r : reports) out << report_to_json(r).dump() << "\n";
}

std::vector<RawReport> load_raw_reports(const std::string& path) {
    std::vector<RawReport> raws;
    for_each_ndjson_line(path, "raw corpus", [&](const Json& j, std::size_t) {
        RawReport r;
        r.report_id = require_string(j, "report_id", "raw report");
        const std::string where = "raw report " + r.report_id;
        r.title = require_string(j, "title", where);
        r.reporter = require_string(j, "reporter", where);
        r.description = require_string(j, "description", where);
        if (j.contains("status")) r.status = j["status"].get<std::string>();
        if (j.contains("timestamp")) r.timestamp = j["timestamp"].get<std::int64_t>();
        if (j.contains("comments")) {
            for (const Json& jc : j["comments"]) {
                RawComment c;
                c.author = require_string(jc, "author", where);
                c.text = require_string(jc, "text", where);
                if (jc.contains("timestamp")) c.timestamp = jc["timestamp"].get<std::int64_t>();
                r.comments.push_back(std::move(c));
            }
        }
        raws.push_back(std::move(r));
    });
    if (raws.empty()) throw DataError("raw corpus " + path + ": no reports");
    return raws;
}

std::map<std::string, std::vector<AnnotationSet>> load_annotations(const std::string& path) {
    std::map<std::string, std::vector<AnnotationSet>> ann;
    for_each_ndjson_line(path, "annotations", [&](const Json& j, std::size_t line_no) {
        std::string report_id = require_string(j, "report_id", "annotations");
        const std::string where = "annotations for " + report_id;
        if (ann.count(report_id))
            throw DataError("annotations " + path + " line " + std::to_string(line_no) +
                            ": duplicate report_id " + report_id);
        std::vector<AnnotationSet> sets;
        const Json& annotators = require(j, "annotators", where);
        if (!annotators.is_array() || annotators.empty())
            throw DataError(where + ": \"annotators\" must be a non-empty array");
        std::unordered_set<std::string> seen;
        for (const Json& ja : annotators) {
            AnnotationSet a;
            a.annotator_id = require_string(ja, "annotator_id", where);
            if (!seen.insert(a.annotator_id).second)
                throw DataError(where + ": duplicate annotator " + a.annotator_id);
            for (const Json& js : require(ja, "selected", where))
                a.selected.insert(js.get<std::string>());
            sets.push_back(std::move(a));
        }
        ann.emplace(std::move(report_id), std::move(sets));
    });
    return ann;
}

void save_annotations(const std::map<std::string, std::vector<AnnotationSet>>& ann,
                      const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("annotations: cannot write " + path);
    for (const auto& [report_id, sets] : ann) {
        Json j;
        j["report_id"] = report_id;
        Json annotators = Json::array();
        for (const AnnotationSet& a : sets) {
            Json ja;
            ja["annotator_id"] = a.annotator_id;
            ja["selected"] = a.selected;
            annotators.push_back(std::move(ja));
        }
        j["annotators"] = std::move(annotators);
        out << j.dump() << "\n";
    }
}

AnnotatedCorpus load_annotated_corpus(const std::string& corpus_path,
                                      const std::string& annotations_path) {
    AnnotatedCorpus c;
    c.reports = load_corpus(corpus_path);
    c.annotations = load_annotations(annotations_path);
    std::map<std::string, const BugReport*> by_id;
    for (const BugReport& r : c.reports) by_id[r.report_id] = &r;
    for (const auto& [report_id, sets] : c.annotations) {
        auto it = by_id.find(report_id);
        if (it == by_id.end())
            throw DataError("annotations reference unknown report " + report_id);
        for (const AnnotationSet& a : sets)
            for (const std::string& sid : a.selected)
                if (!it->second->find_sentence(sid))
                    throw DataError("annotations for " + report_id +
                                    " reference unknown sentence " + sid);
    }
    return c;
}

} // namespace bugsum
