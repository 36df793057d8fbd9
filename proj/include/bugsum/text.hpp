#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace bugsum::text {

// Lowercase + split on any non-alphanumeric character.  Digits are kept so
// tokens like "db2" survive.
std::vector<std::string> tokenize(std::string_view raw);

// English stop list (articles, pronouns, auxiliaries, contraction fragments).
bool is_stop_word(std::string_view lowered);

// Porter stemmer.  Expects a lowercase ASCII word; returns its stem.
std::string porter_stem(std::string word);

// Full pipeline: lowercase -> tokenize -> drop stop words -> stem.
// "The problems were fixed" -> {"problem", "fix"}.
std::vector<std::string> preprocess(std::string_view raw);

// Whitespace-delimited word count of raw text.
int count_words(std::string_view raw);

} // namespace bugsum::text
