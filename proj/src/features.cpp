#include "bugsum/features.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <unordered_set>

#include "bugsum/errors.hpp"
#include "bugsum/text.hpp"
#include "bugsum/util.hpp"

namespace bugsum::features {

namespace {

const std::unordered_set<std::string_view>& positive_lexicon() {
    static const std::unordered_set<std::string_view> words = {
        "good", "great", "nice", "excel", "perfect", "thank", "awesom", "love",
        "correct", "improv", "success", "glad", "happi", "easi", "fine",
        "resolv", "solv", "pass", "stabl",
    };
    return words;
}

const std::unordered_set<std::string_view>& negative_lexicon() {
    static const std::unordered_set<std::string_view> words = {
        "bad", "crash", "fail", "failur", "broken", "broke", "break", "wrong",
        "error", "hang", "freez", "corrupt", "regress", "terribl", "horribl",
        "annoy", "slow", "leak", "deadlock", "except", "unfortun",
    };
    return words;
}

bool has_hyperlink(const std::string& raw) {
    std::string low = lowercase_ascii(raw);
    for (std::string_view pre : {"http://", "https://", "www.", "ftp://"})
        if (low.find(pre) != std::string::npos) return true;
    return false;
}

// Flat-position lookup of s inside T; identity by sentence id.
std::size_t flat_index(const Sentence& s, const BugReport& T) {
    std::size_t i = 0;
    for (const Turn& t : T.turns)
        for (const Sentence& x : t.sentences) {
            if (x.id == s.id) return i;
            ++i;
        }
    throw DataError("features: sentence " + s.id + " not in report " + T.report_id);
}

// Everything per-report extraction needs, computed once.
struct Ctx {
    const BugReport& T;
    const vsm::CorpusStats& stats;
    std::vector<const Sentence*> flat;
    std::vector<std::size_t> turn_of;     // turn index per flat position
    std::vector<int> pos_in_turn;         // 1-based
    std::vector<vsm::TfIdfVector> vecs;
    std::vector<double> wsums;
    double max_wsum = 0.0;
    int max_char = 0;
    int max_words = 0;
    std::vector<int> turn_chars;
    std::vector<int> turn_max_words;
    int max_turn_chars = 0;
    vsm::TfIdfVector report_vec, desc_vec, title_vec;
    // conversation-structure tables
    std::map<std::string, int> term_total;
    std::map<std::string, std::map<std::string, int>> author_term;
    std::vector<std::map<std::string, int>> turn_term;
    std::map<std::string, int> author_words;
    int total_words = 0;
    std::vector<std::unordered_set<std::string>> turn_term_set;
    // time positions per turn
    bool time_fallback = false;
    std::vector<double> tpos, ppau, spau;

    Ctx(const BugReport& report, const vsm::CorpusStats& st) : T(report), stats(st) {
        const std::size_t n_turns = T.turns.size();
        turn_term.resize(n_turns);
        turn_term_set.resize(n_turns);
        turn_chars.assign(n_turns, 0);
        turn_max_words.assign(n_turns, 0);

        std::vector<const std::vector<std::string>*> all_tokens, desc_tokens;
        for (std::size_t ti = 0; ti < n_turns; ++ti) {
            const Turn& turn = T.turns[ti];
            int pos = 0;
            for (const Sentence& s : turn.sentences) {
                flat.push_back(&s);
                turn_of.push_back(ti);
                pos_in_turn.push_back(++pos);
                all_tokens.push_back(&s.tokens);
                if (turn.kind == TurnKind::description) desc_tokens.push_back(&s.tokens);
                max_char = std::max(max_char, s.char_len);
                max_words = std::max(max_words, s.word_count);
                turn_chars[ti] += s.char_len;
                turn_max_words[ti] = std::max(turn_max_words[ti], s.word_count);
                total_words += s.word_count;
                author_words[std::string(trim_view(turn.author))] += s.word_count;
                for (const std::string& tok : s.tokens) {
                    ++term_total[tok];
                    ++author_term[std::string(trim_view(turn.author))][tok];
                    ++turn_term[ti][tok];
                    turn_term_set[ti].insert(tok);
                }
            }
        }
        for (int c : turn_chars) max_turn_chars = std::max(max_turn_chars, c);

        vecs.reserve(flat.size());
        wsums.reserve(flat.size());
        for (const Sentence* s : flat) {
            vecs.push_back(vsm::vectorize(s->tokens, stats));
            wsums.push_back(vsm::weight_sum(vecs.back()));
            max_wsum = std::max(max_wsum, wsums.back());
        }
        report_vec = vsm::aggregate(all_tokens, stats);
        desc_vec = vsm::aggregate(desc_tokens, stats);
        title_vec = vsm::vectorize(text::preprocess(T.title), stats);

        build_time_axis();
    }

    void build_time_axis() {
        const std::size_t n = T.turns.size();
        tpos.assign(n, 0.0);
        ppau.assign(n, 0.0);
        spau.assign(n, 0.0);
        bool complete = true;
        for (const Turn& t : T.turns)
            if (!t.timestamp) complete = false;
        if (n == 1) {
            time_fallback = !complete;
            return;
        }
        double span = 0.0;
        if (complete)
            span = static_cast<double>(*T.turns.back().timestamp - *T.turns.front().timestamp);
        if (!complete || span <= 0.0) {
            time_fallback = true;
            const double step = 1.0 / static_cast<double>(n - 1);
            for (std::size_t i = 0; i < n; ++i) {
                tpos[i] = static_cast<double>(i) * step;
                ppau[i] = i == 0 ? 0.0 : step;
                spau[i] = i + 1 == n ? 0.0 : step;
            }
            return;
        }
        const double t0 = static_cast<double>(*T.turns.front().timestamp);
        for (std::size_t i = 0; i < n; ++i) {
            const double ti = static_cast<double>(*T.turns[i].timestamp);
            tpos[i] = (ti - t0) / span;
            if (i > 0) ppau[i] = (ti - static_cast<double>(*T.turns[i - 1].timestamp)) / span;
            if (i + 1 < n)
                spau[i] = (static_cast<double>(*T.turns[i + 1].timestamp) - ti) / span;
        }
    }

    double sprob(const std::string& term, const std::string& author) const {
        auto tot = term_total.find(term);
        if (tot == term_total.end() || tot->second == 0) return 0.0;
        auto at = author_term.find(author);
        if (at == author_term.end()) return 0.0;
        auto cnt = at->second.find(term);
        if (cnt == at->second.end()) return 0.0;
        return static_cast<double>(cnt->second) / static_cast<double>(tot->second);
    }

    double tprob(const std::string& term, std::size_t turn) const {
        auto tot = term_total.find(term);
        if (tot == term_total.end() || tot->second == 0) return 0.0;
        auto cnt = turn_term[turn].find(term);
        if (cnt == turn_term[turn].end()) return 0.0;
        return static_cast<double>(cnt->second) / static_cast<double>(tot->second);
    }

    std::string author_of(std::size_t flat_idx) const {
        return std::string(trim_view(T.turns[turn_of[flat_idx]].author));
    }

    // Sprob-weighted (by_author) or Tprob-weighted term vector of flat range [a, b).
    vsm::TfIdfVector prob_vector(std::size_t a, std::size_t b, bool by_author) const {
        vsm::TfIdfVector v;
        for (std::size_t i = a; i < b; ++i) {
            const std::string author = author_of(i);
            for (const std::string& tok : flat[i]->tokens)
                v[tok] += by_author ? sprob(tok, author) : tprob(tok, turn_of[i]);
        }
        return v;
    }

    double entropy(std::size_t a, std::size_t b) const {
        std::map<std::string, int> counts;
        int total = 0;
        for (std::size_t i = a; i < b; ++i)
            for (const std::string& tok : flat[i]->tokens) {
                ++counts[tok];
                ++total;
            }
        if (total == 0) return 0.0;
        double h = 0.0;
        for (const auto& [term, c] : counts) {
            const double p = static_cast<double>(c) / total;
            h -= p * std::log(p);
        }
        return h;
    }
};

std::vector<double> lrca_row(const Ctx& c, std::size_t i, double dup_threshold) {
    const Sentence& s = *c.flat[i];
    const std::size_t n = c.flat.size();
    std::vector<double> v(11, 0.0);
    v[0] = vsm::cosine(c.vecs[i], c.report_vec);
    v[1] = c.T.turns[c.turn_of[i]].kind == TurnKind::description
               ? 1.0
               : vsm::cosine(c.vecs[i], c.desc_vec);
    for (std::size_t j = 0; j < i; ++j)
        if (vsm::cosine(c.vecs[i], c.vecs[j]) > dup_threshold) {
            v[2] = 1.0;
            break;
        }
    v[3] = c.max_char > 0 ? static_cast<double>(s.char_len) / c.max_char : 0.0;
    v[4] = c.max_wsum > 0.0 ? c.wsums[i] / c.max_wsum : 0.0;
    v[5] = static_cast<double>(i + 1) / static_cast<double>(n);
    v[6] = c.max_turn_chars > 0
               ? static_cast<double>(c.turn_chars[c.turn_of[i]]) / c.max_turn_chars
               : 0.0;
    v[7] = c.T.turns[c.turn_of[i]].kind == TurnKind::description ? 1.0 : 0.0;
    if (has_hyperlink(s.text))
        v[8] = 0.0;
    else if (std::find(s.tokens.begin(), s.tokens.end(), "problem") != s.tokens.end())
        v[8] = 1.0;
    else
        v[8] = 0.5;
    v[9] = looks_like_code(s.text) ? 1.0 : 0.0;
    v[10] = trim_view(c.T.turns[c.turn_of[i]].author) == trim_view(c.T.reporter) ? 1.0 : 0.0;
    return v;
}

std::vector<double> brc_row(const Ctx& c, std::size_t i) {
    const Sentence& s = *c.flat[i];
    const std::size_t n = c.flat.size();
    const std::size_t ti = c.turn_of[i];
    const std::string author = c.author_of(i);
    std::vector<double> v(24, 0.0);

    // 0-5: Sprob / Tprob aggregates over the sentence's tokens
    if (!s.tokens.empty()) {
        double mxs = 0.0, sms = 0.0, mxt = 0.0, smt = 0.0;
        for (const std::string& tok : s.tokens) {
            const double sp = c.sprob(tok, author);
            const double tp = c.tprob(tok, ti);
            mxs = std::max(mxs, sp);
            sms += sp;
            mxt = std::max(mxt, tp);
            smt += tp;
        }
        v[0] = mxs;
        v[1] = sms / static_cast<double>(s.tokens.size());
        v[2] = sms;
        v[3] = mxt;
        v[4] = smt / static_cast<double>(s.tokens.size());
        v[5] = smt;
    }
    // 6-9: positions and lengths
    v[6] = static_cast<double>(c.pos_in_turn[i]) /
           static_cast<double>(c.T.turns[ti].sentences.size());
    v[7] = static_cast<double>(i + 1) / static_cast<double>(n);
    v[8] = c.max_words > 0 ? static_cast<double>(s.word_count) / c.max_words : 0.0;
    v[9] = c.turn_max_words[ti] > 0
               ? static_cast<double>(s.word_count) / c.turn_max_words[ti]
               : 0.0;
    // 10-13: time
    if (c.T.turns.size() > 1) {
        v[10] = c.tpos[ti];
        v[11] = 1.0 - c.tpos[ti];
        v[12] = c.ppau[ti];
        v[13] = c.spau[ti];
    }
    // 14-17: conversation-split and centroid cosines
    v[14] = vsm::cosine(c.prob_vector(0, i, true), c.prob_vector(i + 1, n, true));
    v[15] = vsm::cosine(c.prob_vector(0, i, false), c.prob_vector(i + 1, n, false));
    v[16] = vsm::cosine(c.prob_vector(i, i + 1, true), c.prob_vector(0, n, true));
    v[17] = vsm::cosine(c.prob_vector(i, i + 1, false), c.prob_vector(0, n, false));
    // 18-20: entropies
    v[18] = c.entropy(0, i + 1);
    v[19] = c.entropy(i + 1, n);
    v[20] = c.entropy(i, i + 1);
    // 21-23: speaker dominance, reporter flag, adjacent-turn term overlap
    auto aw = c.author_words.find(author);
    v[21] = (c.total_words > 0 && aw != c.author_words.end())
                ? static_cast<double>(aw->second) / c.total_words
                : 0.0;
    v[22] = trim_view(c.T.turns[ti].author) == trim_view(c.T.reporter) ? 1.0 : 0.0;
    std::unordered_set<std::string> distinct(s.tokens.begin(), s.tokens.end());
    int shared = 0;
    for (const std::string& tok : distinct) {
        const bool in_prev = ti > 0 && c.turn_term_set[ti - 1].count(tok);
        const bool in_next = ti + 1 < c.T.turns.size() && c.turn_term_set[ti + 1].count(tok);
        if (in_prev || in_next) ++shared;
    }
    v[23] = shared;
    return v;
}

int sentiment_of_tokens(const std::vector<std::string>& tokens) {
    int pos = 0, neg = 0;
    for (const std::string& tok : tokens) {
        if (positive_lexicon().count(tok)) ++pos;
        if (negative_lexicon().count(tok)) ++neg;
    }
    return pos > neg ? 1 : pos < neg ? -1 : 0;
}

std::vector<double> hurried_row(const Ctx& c, std::size_t i) {
    const Sentence& s = *c.flat[i];
    return {vsm::cosine(c.vecs[i], c.title_vec),
            c.T.turns[c.turn_of[i]].kind == TurnKind::description ? 1.0 : 0.0,
            static_cast<double>(sentiment_of_tokens(s.tokens))};
}

std::vector<double> row_for(const Ctx& c, std::size_t i, Schema schema, double dup_threshold) {
    switch (schema) {
        case Schema::lrca11: return lrca_row(c, i, dup_threshold);
        case Schema::brc24: return brc_row(c, i);
        case Schema::hurried3: return hurried_row(c, i);
        case Schema::combine27: {
            std::vector<double> v = brc_row(c, i);
            for (double x : hurried_row(c, i)) v.push_back(x);
            return v;
        }
    }
    throw UsageError("unknown feature schema");
}

std::string fmt_double(double v) {
    char buf[32];
    auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, p);
}

} // namespace

Schema schema_from_string(const std::string& name) {
    if (name == "lrca11") return Schema::lrca11;
    if (name == "brc24") return Schema::brc24;
    if (name == "hurried3") return Schema::hurried3;
    if (name == "combine27") return Schema::combine27;
    throw UsageError("unknown feature schema \"" + name +
                     "\" (expected lrca11|brc24|hurried3|combine27)");
}

std::string schema_to_string(Schema schema) {
    switch (schema) {
        case Schema::lrca11: return "lrca11";
        case Schema::brc24: return "brc24";
        case Schema::hurried3: return "hurried3";
        case Schema::combine27: return "combine27";
    }
    return "?";
}

const std::vector<std::string>& schema_attributes(Schema schema) {
    static const std::vector<std::string> lrca = {
        "SWT", "SWD", "DUP", "SLEN", "SI", "SLOC", "CLEN", "DES", "CCW", "CODE", "REP"};
    static const std::vector<std::string> brc = {
        "MXS",  "MNS",  "SMS",  "MXT",   "MNT",   "SMT",     "TLOC", "CLOC",
        "SLEN", "SLEN2", "TPOS1", "TPOS2", "PPAU",  "SPAU",    "COS1", "COS2",
        "CENT1", "CENT2", "PENT", "SENT",  "THISENT", "DOM",   "BEGAUTH", "CWS"};
    static const std::vector<std::string> hurried = {"TSIM", "DES", "SENTI"};
    static const std::vector<std::string> combine = [] {
        std::vector<std::string> v = brc;
        v.insert(v.end(), hurried.begin(), hurried.end());
        return v;
    }();
    switch (schema) {
        case Schema::lrca11: return lrca;
        case Schema::brc24: return brc;
        case Schema::hurried3: return hurried;
        case Schema::combine27: return combine;
    }
    return lrca;
}

double swt(const Sentence& s, const BugReport& T, const vsm::CorpusStats& stats) {
    Ctx c(T, stats);
    return lrca_row(c, flat_index(s, T), 0.8)[0];
}

double swd(const Sentence& s, const BugReport& T, const vsm::CorpusStats& stats) {
    Ctx c(T, stats);
    return lrca_row(c, flat_index(s, T), 0.8)[1];
}

int dup(const Sentence& s, const BugReport& T, const vsm::CorpusStats& stats,
        double threshold) {
    Ctx c(T, stats);
    return static_cast<int>(lrca_row(c, flat_index(s, T), threshold)[2]);
}

double slen(const Sentence& s, const BugReport& T) {
    int max_char = 0;
    for (const Turn& t : T.turns)
        for (const Sentence& x : t.sentences) max_char = std::max(max_char, x.char_len);
    return max_char > 0 ? static_cast<double>(s.char_len) / max_char : 0.0;
}

double si(const Sentence& s, const BugReport& T, const vsm::CorpusStats& stats) {
    Ctx c(T, stats);
    return lrca_row(c, flat_index(s, T), 0.8)[4];
}

double sloc(const Sentence& s, const BugReport& T) {
    return static_cast<double>(flat_index(s, T) + 1) /
           static_cast<double>(T.sentence_count());
}

double clen(const Sentence& s, const BugReport& T) {
    int max_turn = 0, my_turn = 0;
    for (const Turn& t : T.turns) {
        int chars = 0;
        bool mine = false;
        for (const Sentence& x : t.sentences) {
            chars += x.char_len;
            if (x.id == s.id) mine = true;
        }
        max_turn = std::max(max_turn, chars);
        if (mine) my_turn = chars;
    }
    return max_turn > 0 ? static_cast<double>(my_turn) / max_turn : 0.0;
}

int des(const Sentence& s, const BugReport& T) {
    std::size_t idx = flat_index(s, T);
    std::size_t i = 0;
    for (const Turn& t : T.turns)
        for (std::size_t k = 0; k < t.sentences.size(); ++k, ++i)
            if (i == idx) return t.kind == TurnKind::description ? 1 : 0;
    return 0;
}

double ccw(const Sentence& s) {
    if (has_hyperlink(s.text)) return 0.0;
    if (std::find(s.tokens.begin(), s.tokens.end(), "problem") != s.tokens.end()) return 1.0;
    return 0.5;
}

int code(const Sentence& s) { return looks_like_code(s.text) ? 1 : 0; }

int rep(const Sentence& s, const BugReport& T) {
    std::size_t idx = flat_index(s, T);
    std::size_t i = 0;
    for (const Turn& t : T.turns)
        for (std::size_t k = 0; k < t.sentences.size(); ++k, ++i)
            if (i == idx)
                return trim_view(t.author) == trim_view(T.reporter) ? 1 : 0;
    return 0;
}

int sentiment(const Sentence& s) { return sentiment_of_tokens(s.tokens); }

SentenceFeatures extract_lrca(const Sentence& s, const BugReport& T,
                              const vsm::CorpusStats& stats, double dup_threshold) {
    Ctx c(T, stats);
    return {s.id, Schema::lrca11, lrca_row(c, flat_index(s, T), dup_threshold)};
}

SentenceFeatures extract_brc(const Sentence& s, const BugReport& T,
                             const vsm::CorpusStats& stats) {
    Ctx c(T, stats);
    return {s.id, Schema::brc24, brc_row(c, flat_index(s, T))};
}

SentenceFeatures extract_hurried(const Sentence& s, const BugReport& T,
                                 const vsm::CorpusStats& stats) {
    Ctx c(T, stats);
    return {s.id, Schema::hurried3, hurried_row(c, flat_index(s, T))};
}

std::vector<SentenceFeatures> extract_all(const BugReport& T, const vsm::CorpusStats& stats,
                                          Schema schema, double dup_threshold) {
    Ctx c(T, stats);
    std::vector<SentenceFeatures> out;
    out.reserve(c.flat.size());
    for (std::size_t i = 0; i < c.flat.size(); ++i) {
        std::vector<double> row = row_for(c, i, schema, dup_threshold);
        for (double v : row)
            if (!std::isfinite(v))
                throw NumericError("non-finite feature for sentence " + c.flat[i]->id +
                                   " in report " + T.report_id);
        out.push_back({c.flat[i]->id, schema, std::move(row)});
    }
    return out;
}

bool uses_time_fallback(const BugReport& T) {
    for (const Turn& t : T.turns)
        if (!t.timestamp) return true;
    if (T.turns.size() > 1 &&
        *T.turns.back().timestamp <= *T.turns.front().timestamp)
        return true;
    return false;
}

void dump_features_csv(const std::vector<BugReport>& reports, const vsm::CorpusStats& stats,
                       Schema schema, const std::string& path,
                       const std::map<std::string, std::map<std::string, int>>* labels,
                       double dup_threshold) {
    std::ofstream out(path);
    if (!out) throw DataError("features: cannot write " + path);
    out << "sentence_id";
    if (labels) out << ",label";
    for (const std::string& name : schema_attributes(schema)) out << "," << name;
    out << "\n";
    for (const BugReport& r : reports) {
        const std::map<std::string, int>* rl = nullptr;
        if (labels) {
            auto it = labels->find(r.report_id);
            if (it != labels->end()) rl = &it->second;
        }
        for (const SentenceFeatures& f : extract_all(r, stats, schema, dup_threshold)) {
            out << r.report_id << ":" << f.sentence_id;
            if (labels) {
                int label = 0;
                if (rl) {
                    auto it = rl->find(f.sentence_id);
                    if (it != rl->end()) label = it->second;
                }
                out << "," << label;
            }
            for (double v : f.values) out << "," << fmt_double(v);
            out << "\n";
        }
    }
}

} // namespace bugsum::features
