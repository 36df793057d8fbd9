#include "bugsum/text.hpp"

#include <array>
#include <cctype>
#include <unordered_set>

#include "bugsum/util.hpp"

namespace bugsum::text {

namespace {

bool is_alnum_ascii(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
}

// Classic Porter stemmer.  Steps follow the original algorithm; within a step
// the longest matching suffix decides, and a failed condition ends the step.
class Porter {
public:
    explicit Porter(std::string word) : w_(std::move(word)) {}

    std::string run() {
        if (w_.size() <= 2) return w_;
        step1a();
        step1b();
        step1c();
        step2();
        step3();
        step4();
        step5();
        return w_;
    }

private:
    std::string w_;

    bool is_cons(std::size_t i) const {
        char c = w_[i];
        switch (c) {
            case 'a': case 'e': case 'i': case 'o': case 'u': return false;
            case 'y': return i == 0 ? true : !is_cons(i - 1);
            default: return true;
        }
    }

    // Number of VC sequences in w_[0..len): [C](VC)^m[V].
    int measure(std::size_t len) const {
        int m = 0;
        std::size_t i = 0;
        while (i < len && is_cons(i)) ++i;
        while (true) {
            if (i >= len) return m;
            while (i < len && !is_cons(i)) ++i;
            if (i >= len) return m;
            while (i < len && is_cons(i)) ++i;
            ++m;
        }
    }

    bool has_vowel(std::size_t len) const {
        for (std::size_t i = 0; i < len; ++i)
            if (!is_cons(i)) return true;
        return false;
    }

    bool ends_double_cons() const {
        std::size_t n = w_.size();
        return n >= 2 && w_[n - 1] == w_[n - 2] && is_cons(n - 1);
    }

    // *o condition on w_[0..len): ends consonant-vowel-consonant, final not w/x/y.
    bool cvc(std::size_t len) const {
        if (len < 3) return false;
        if (!is_cons(len - 3) || is_cons(len - 2) || !is_cons(len - 1)) return false;
        char c = w_[len - 3 + 2];
        return c != 'w' && c != 'x' && c != 'y';
    }

    bool ends(std::string_view suf) const {
        return w_.size() >= suf.size() &&
               std::string_view(w_).substr(w_.size() - suf.size()) == suf;
    }

    void set_suffix(std::size_t suf_len, std::string_view rep) {
        w_.resize(w_.size() - suf_len);
        w_.append(rep);
    }

    void step1a() {
        if (ends("sses")) set_suffix(4, "ss");
        else if (ends("ies")) set_suffix(3, "i");
        else if (ends("ss")) {}
        else if (ends("s")) w_.pop_back();
    }

    void step1b() {
        if (ends("eed")) {
            if (measure(w_.size() - 3) > 0) w_.pop_back();
            return;
        }
        if (ends("ed")) {
            if (!has_vowel(w_.size() - 2)) return;
            w_.resize(w_.size() - 2);
        } else if (ends("ing")) {
            if (!has_vowel(w_.size() - 3)) return;
            w_.resize(w_.size() - 3);
        } else {
            return;
        }
        if (ends("at") || ends("bl") || ends("iz")) {
            w_.push_back('e');
        } else if (ends_double_cons()) {
            char c = w_.back();
            if (c != 'l' && c != 's' && c != 'z') w_.pop_back();
        } else if (measure(w_.size()) == 1 && cvc(w_.size())) {
            w_.push_back('e');
        }
    }

    void step1c() {
        if (ends("y") && has_vowel(w_.size() - 1)) w_.back() = 'i';
    }

    struct Rule {
        std::string_view suf, rep;
    };

    // First string match wins; the replacement happens only when the stem's
    // measure exceeds min_m, and either way the step is over.
    void apply(const Rule* rules, std::size_t n, int min_m) {
        for (std::size_t r = 0; r < n; ++r) {
            if (!ends(rules[r].suf)) continue;
            std::size_t stem = w_.size() - rules[r].suf.size();
            if (measure(stem) > min_m) set_suffix(rules[r].suf.size(), rules[r].rep);
            return;
        }
    }

    void step2() {
        static constexpr Rule list[] = {
            {"ization", "ize"}, {"iveness", "ive"}, {"fulness", "ful"},
            {"ousness", "ous"}, {"ational", "ate"}, {"tional", "tion"},
            {"biliti", "ble"},  {"entli", "ent"},   {"ousli", "ous"},
            {"aliti", "al"},    {"iviti", "ive"},   {"ation", "ate"},
            {"alism", "al"},    {"enci", "ence"},   {"anci", "ance"},
            {"izer", "ize"},    {"abli", "able"},   {"alli", "al"},
            {"ator", "ate"},    {"eli", "e"},
        };
        apply(list, std::size(list), 0);
    }

    void step3() {
        static constexpr Rule list[] = {
            {"icate", "ic"}, {"ative", ""}, {"alize", "al"},
            {"iciti", "ic"}, {"ical", "ic"}, {"ful", ""}, {"ness", ""},
        };
        apply(list, std::size(list), 0);
    }

    void step4() {
        static constexpr Rule list[] = {
            {"ement", ""}, {"ance", ""}, {"ence", ""}, {"able", ""},
            {"ible", ""},  {"ment", ""}, {"ion", ""},  {"ant", ""},
            {"ent", ""},   {"ism", ""},  {"ate", ""},  {"iti", ""},
            {"ous", ""},   {"ive", ""},  {"ize", ""},  {"al", ""},
            {"er", ""},    {"ic", ""},   {"ou", ""},
        };
        for (const Rule& r : list) {
            if (!ends(r.suf)) continue;
            std::size_t stem = w_.size() - r.suf.size();
            if (r.suf == "ion" && !(stem > 0 && (w_[stem - 1] == 's' || w_[stem - 1] == 't')))
                return;
            if (measure(stem) > 1) w_.resize(stem);
            return;
        }
    }

    void step5() {
        if (w_.back() == 'e') {
            std::size_t stem = w_.size() - 1;
            int m = measure(stem);
            if (m > 1 || (m == 1 && !cvc(stem))) w_.pop_back();
        }
        if (w_.back() == 'l' && ends_double_cons() && measure(w_.size()) > 1)
            w_.pop_back();
    }
};

const std::unordered_set<std::string_view>& stop_words() {
    static const std::unordered_set<std::string_view> words = {
        "i", "me", "my", "myself", "we", "our", "ours", "ourselves", "you",
        "your", "yours", "yourself", "yourselves", "he", "him", "his",
        "himself", "she", "her", "hers", "herself", "it", "its", "itself",
        "they", "them", "their", "theirs", "themselves", "what", "which",
        "who", "whom", "this", "that", "these", "those", "am", "is", "are",
        "was", "were", "be", "been", "being", "have", "has", "had", "having",
        "do", "does", "did", "doing", "a", "an", "the", "and", "but", "if",
        "or", "because", "as", "until", "while", "of", "at", "by", "for",
        "with", "about", "against", "between", "into", "through", "during",
        "before", "after", "above", "below", "to", "from", "up", "down", "in",
        "out", "on", "off", "over", "under", "again", "further", "then",
        "once", "here", "there", "when", "where", "why", "how", "all", "any",
        "both", "each", "few", "more", "most", "other", "some", "such", "no",
        "nor", "not", "only", "own", "same", "so", "than", "too", "very",
        "s", "t", "can", "will", "just", "don", "should", "now", "d", "ll",
        "m", "o", "re", "ve", "y", "ain", "aren", "couldn", "didn", "doesn",
        "hadn", "hasn", "haven", "isn", "ma", "mightn", "mustn", "needn",
        "shan", "shouldn", "wasn", "weren", "won", "wouldn",
    };
    return words;
}

} // namespace

std::vector<std::string> tokenize(std::string_view raw) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : raw) {
        if (is_alnum_ascii(c)) {
            if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
            cur.push_back(c);
        } else if (!cur.empty()) {
            out.push_back(std::move(cur));
            cur.clear();
        }
    }
    if (!cur.empty()) out.push_back(std::move(cur));
    return out;
}

bool is_stop_word(std::string_view lowered) {
    return stop_words().count(lowered) != 0;
}

std::string porter_stem(std::string word) {
    return Porter(std::move(word)).run();
}

std::vector<std::string> preprocess(std::string_view raw) {
    std::vector<std::string> out;
    for (std::string& tok : tokenize(raw)) {
        if (is_stop_word(tok)) continue;
        out.push_back(porter_stem(std::move(tok)));
    }
    return out;
}

int count_words(std::string_view raw) {
    int n = 0;
    bool in_word = false;
    for (char c : raw) {
        bool sp = std::isspace(static_cast<unsigned char>(c)) != 0;
        if (!sp && !in_word) ++n;
        in_word = !sp;
    }
    return n;
}

} // namespace bugsum::text
