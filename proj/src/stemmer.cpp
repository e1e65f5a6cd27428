#include "nl2sql/stemmer.hpp"

#include <cctype>

#include "nl2sql/util.hpp"

// Porter, "An algorithm for suffix stripping" (1980). Steps 1a-5b over the
// measure m of the [C](VC)^m[V] decomposition.

namespace nl2sql {

namespace {

bool is_vowel_at(const std::string& w, std::size_t i) {
    char c = w[i];
    if (c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u') return true;
    // 'y' counts as a vowel when preceded by a consonant
    if (c == 'y' && i > 0) return !is_vowel_at(w, i - 1);
    return false;
}

// number of VC sequences in w[0..len)
int measure(const std::string& w, std::size_t len) {
    int m = 0;
    bool prev_vowel = false;
    for (std::size_t i = 0; i < len; ++i) {
        bool v = is_vowel_at(w, i);
        if (!v && prev_vowel) ++m;
        prev_vowel = v;
    }
    return m;
}

bool has_vowel(const std::string& w, std::size_t len) {
    for (std::size_t i = 0; i < len; ++i) {
        if (is_vowel_at(w, i)) return true;
    }
    return false;
}

bool double_consonant(const std::string& w, std::size_t len) {
    if (len < 2) return false;
    if (w[len - 1] != w[len - 2]) return false;
    return !is_vowel_at(w, len - 1);
}

// consonant-vowel-consonant where the final consonant is not w, x or y
bool cvc(const std::string& w, std::size_t len) {
    if (len < 3) return false;
    if (is_vowel_at(w, len - 3) || !is_vowel_at(w, len - 2) || is_vowel_at(w, len - 1))
        return false;
    char c = w[len - 1];
    return c != 'w' && c != 'x' && c != 'y';
}

bool ends_with(const std::string& w, std::string_view suffix) {
    return w.size() >= suffix.size() &&
           w.compare(w.size() - suffix.size(), suffix.size(), suffix) == 0;
}

// replaces suffix when the stem measure condition holds; returns true if the
// suffix matched (whether or not replaced)
bool replace_if(std::string& w, std::string_view suffix, std::string_view repl, int min_m) {
    if (!ends_with(w, suffix)) return false;
    std::size_t stem_len = w.size() - suffix.size();
    if (measure(w, stem_len) > min_m) {
        w.resize(stem_len);
        w += repl;
    }
    return true;
}

void step1a(std::string& w) {
    if (ends_with(w, "sses")) {
        w.resize(w.size() - 2);
    } else if (ends_with(w, "ies")) {
        w.resize(w.size() - 2);
    } else if (ends_with(w, "ss")) {
        // keep
    } else if (ends_with(w, "s") && w.size() > 1) {
        w.pop_back();
    }
}

void step1b(std::string& w) {
    if (ends_with(w, "eed")) {
        if (measure(w, w.size() - 3) > 0) w.pop_back();
        return;
    }
    bool stripped = false;
    if (ends_with(w, "ed") && has_vowel(w, w.size() - 2)) {
        w.resize(w.size() - 2);
        stripped = true;
    } else if (ends_with(w, "ing") && has_vowel(w, w.size() - 3)) {
        w.resize(w.size() - 3);
        stripped = true;
    }
    if (!stripped) return;
    if (ends_with(w, "at") || ends_with(w, "bl") || ends_with(w, "iz")) {
        w += 'e';
    } else if (double_consonant(w, w.size())) {
        char c = w.back();
        if (c != 'l' && c != 's' && c != 'z') w.pop_back();
    } else if (measure(w, w.size()) == 1 && cvc(w, w.size())) {
        w += 'e';
    }
}

void step1c(std::string& w) {
    if (ends_with(w, "y") && has_vowel(w, w.size() - 1)) {
        w.back() = 'i';
    }
}

void step2(std::string& w) {
    static const std::pair<std::string_view, std::string_view> rules[] = {
        {"ational", "ate"}, {"tional", "tion"}, {"enci", "ence"}, {"anci", "ance"},
        {"izer", "ize"},    {"abli", "able"},   {"alli", "al"},   {"entli", "ent"},
        {"eli", "e"},       {"ousli", "ous"},   {"ization", "ize"}, {"ation", "ate"},
        {"ator", "ate"},    {"alism", "al"},    {"iveness", "ive"}, {"fulness", "ful"},
        {"ousness", "ous"}, {"aliti", "al"},    {"iviti", "ive"},   {"biliti", "ble"},
    };
    for (const auto& [suffix, repl] : rules) {
        if (replace_if(w, suffix, repl, 0)) return;
    }
}

void step3(std::string& w) {
    static const std::pair<std::string_view, std::string_view> rules[] = {
        {"icate", "ic"}, {"ative", ""}, {"alize", "al"}, {"iciti", "ic"},
        {"ical", "ic"},  {"ful", ""},   {"ness", ""},
    };
    for (const auto& [suffix, repl] : rules) {
        if (replace_if(w, suffix, repl, 0)) return;
    }
}

void step4(std::string& w) {
    static const std::string_view rules[] = {
        "al",    "ance", "ence", "er",  "ic",  "able", "ible", "ant", "ement",
        "ment",  "ent",  "ou",   "ism", "ate", "iti",  "ous",  "ive", "ize",
    };
    for (std::string_view suffix : rules) {
        if (!ends_with(w, suffix)) continue;
        std::size_t stem_len = w.size() - suffix.size();
        if (measure(w, stem_len) > 1) w.resize(stem_len);
        return;
    }
    if (ends_with(w, "ion")) {
        std::size_t stem_len = w.size() - 3;
        if (stem_len > 0 && (w[stem_len - 1] == 's' || w[stem_len - 1] == 't') &&
            measure(w, stem_len) > 1) {
            w.resize(stem_len);
        }
    }
}

void step5(std::string& w) {
    if (ends_with(w, "e")) {
        std::size_t stem_len = w.size() - 1;
        int m = measure(w, stem_len);
        if (m > 1 || (m == 1 && !cvc(w, stem_len))) w.resize(stem_len);
    }
    if (double_consonant(w, w.size()) && w.back() == 'l' && measure(w, w.size()) > 1) {
        w.pop_back();
    }
}

}  // namespace

std::string porter_stem(std::string_view word) {
    std::string w = to_lower(word);
    for (char c : w) {
        if (!std::isalpha(static_cast<unsigned char>(c))) return w;
    }
    if (w.size() <= 2) return w;
    step1a(w);
    step1b(w);
    step1c(w);
    step2(w);
    step3(w);
    step4(w);
    step5(w);
    return w;
}

}  // namespace nl2sql
