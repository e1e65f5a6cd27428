#include "nl2sql/util.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace nl2sql {

namespace {

bool is_word_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_';
}

}  // namespace

std::string to_lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::string trim(std::string_view s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

std::string collapse_whitespace(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    bool in_ws = true;  // leading whitespace dropped
    for (char c : s) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            if (!in_ws) out.push_back(' ');
            in_ws = true;
        } else {
            out.push_back(c);
            in_ws = false;
        }
    }
    while (!out.empty() && out.back() == ' ') out.pop_back();
    return out;
}

std::vector<Token> tokenize(std::string_view text) {
    std::vector<Token> tokens;
    std::size_t i = 0;
    const std::size_t n = text.size();
    while (i < n) {
        char c = text[i];
        if (!is_word_char(c)) {
            ++i;
            continue;
        }
        std::size_t begin = i;
        while (i < n) {
            char d = text[i];
            if (is_word_char(d)) {
                ++i;
                continue;
            }
            // keep intra-word hyphen/apostrophe/dot (e.g. "A340-300", "Ha's", "3.5")
            if ((d == '-' || d == '\'' || d == '.') && i + 1 < n && is_word_char(text[i + 1])) {
                i += 2;
                continue;
            }
            break;
        }
        tokens.push_back(Token{std::string(text.substr(begin, i - begin)), begin, i});
    }
    return tokens;
}

std::vector<std::string> split_identifier(std::string_view name) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : name) {
        if (c == '_' || c == ' ' || c == '-' || c == '.') {
            if (!cur.empty()) {
                parts.push_back(to_lower(cur));
                cur.clear();
            }
        } else {
            cur.push_back(c);
        }
    }
    if (!cur.empty()) parts.push_back(to_lower(cur));
    return parts;
}

bool is_integer_literal(std::string_view s) {
    if (s.empty()) return false;
    std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
    if (i == s.size()) return false;
    for (; i < s.size(); ++i) {
        if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
    }
    return true;
}

bool is_number_literal(std::string_view s) {
    if (s.empty()) return false;
    std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
    bool digits = false;
    bool dot = false;
    for (; i < s.size(); ++i) {
        char c = s[i];
        if (std::isdigit(static_cast<unsigned char>(c))) {
            digits = true;
        } else if (c == '.' && !dot) {
            dot = true;
        } else {
            return false;
        }
    }
    return digits;
}

std::string canonical_number(std::string_view s) {
    std::string t = trim(s);
    if (!is_number_literal(t)) return t;
    if (is_integer_literal(t)) {
        // strip leading zeros and '+'
        long long v = std::strtoll(t.c_str(), nullptr, 10);
        return std::to_string(v);
    }
    double v = std::strtod(t.c_str(), nullptr);
    if (v == std::floor(v) && std::abs(v) < 1e15) {
        return std::to_string(static_cast<long long>(v));
    }
    std::array<char, 64> buf{};
    std::snprintf(buf.data(), buf.size(), "%.12g", v);
    return std::string(buf.data());
}

std::optional<long long> parse_number_word(std::string_view word) {
    std::string w = to_lower(word);
    // "4th", "21st" style
    if (w.size() >= 3 && std::isdigit(static_cast<unsigned char>(w[0]))) {
        std::string suffix = w.substr(w.size() - 2);
        if (suffix == "st" || suffix == "nd" || suffix == "rd" || suffix == "th") {
            std::string digits = w.substr(0, w.size() - 2);
            if (is_integer_literal(digits)) return std::strtoll(digits.c_str(), nullptr, 10);
        }
    }
    static const std::vector<std::pair<std::string_view, long long>> kWords = {
        {"zero", 0},      {"one", 1},        {"first", 1},       {"two", 2},
        {"second", 2},    {"three", 3},      {"third", 3},       {"four", 4},
        {"fourth", 4},    {"five", 5},       {"fifth", 5},       {"six", 6},
        {"sixth", 6},     {"seven", 7},      {"seventh", 7},     {"eight", 8},
        {"eighth", 8},    {"nine", 9},       {"ninth", 9},       {"ten", 10},
        {"tenth", 10},    {"eleven", 11},    {"eleventh", 11},   {"twelve", 12},
        {"twelfth", 12},  {"thirteen", 13},  {"thirteenth", 13}, {"fourteen", 14},
        {"fifteen", 15},  {"sixteen", 16},   {"seventeen", 17},  {"eighteen", 18},
        {"nineteen", 19}, {"twenty", 20},    {"twentieth", 20},  {"thirty", 30},
        {"forty", 40},    {"fifty", 50},     {"sixty", 60},      {"seventy", 70},
        {"eighty", 80},   {"ninety", 90},    {"hundred", 100},   {"thousand", 1000},
    };
    for (const auto& [name, value] : kWords) {
        if (w == name) return value;
    }
    return std::nullopt;
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i > 0) out += sep;
        out += parts[i];
    }
    return out;
}

}  // namespace nl2sql
