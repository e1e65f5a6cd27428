#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace nl2sql {

// A question token with its character span in the original string.
struct Token {
    std::string text;
    std::size_t begin = 0;  // inclusive offset into the source string
    std::size_t end = 0;    // exclusive
};

std::string to_lower(std::string_view s);
std::string trim(std::string_view s);

// Collapses runs of whitespace to single spaces and trims the ends.
std::string collapse_whitespace(std::string_view s);

// Splits on whitespace and punctuation. Hyphens, apostrophes and digits
// inside a word are kept so tokens like "A340-300" or "Ha's" stay whole.
std::vector<Token> tokenize(std::string_view text);

// Splits an identifier such as "Has_Pet" or "flight number" into
// lowercase word tokens.
std::vector<std::string> split_identifier(std::string_view name);

bool is_integer_literal(std::string_view s);
bool is_number_literal(std::string_view s);

// Canonical decimal form: "20.0" -> "20", "3.1400" -> "3.14".
// Returns the input unchanged when it does not parse as a number.
std::string canonical_number(std::string_view s);

// Spelled-out cardinals and ordinals ("twenty", "fourth", "4th") -> integer.
std::optional<long long> parse_number_word(std::string_view word);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

}  // namespace nl2sql
