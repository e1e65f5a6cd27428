#pragma once

#include <string>
#include <string_view>

namespace nl2sql {

// Porter stemmer over lowercase ASCII. Input is case-folded internally;
// non-alphabetic tokens are returned unchanged.
std::string porter_stem(std::string_view word);

}  // namespace nl2sql
