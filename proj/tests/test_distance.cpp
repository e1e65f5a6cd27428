#include <doctest.h>

#include <random>

#include "nl2sql/values.hpp"
#include "oracles.hpp"

using namespace nl2sql;

TEST_CASE("edit distance on the reference pairs") {
    CHECK(damerau_levenshtein("JFK", "JFK") == 0);
    CHECK(damerau_levenshtein("ab", "ba") == 1);        // one adjacent transposition
    CHECK(damerau_levenshtein("france", "french") == 2);
    CHECK(damerau_levenshtein("", "abc") == 3);
    CHECK(damerau_levenshtein("Frence", "France") == 1);
}

TEST_CASE("edit distance matches the full-matrix reference on random pairs") {
    std::mt19937 rng(991);
    const std::string alphabet = "abcde";  // small alphabet provokes transpositions
    auto random_string = [&](std::size_t max_len) {
        std::string s;
        std::size_t len = rng() % (max_len + 1);
        for (std::size_t i = 0; i < len; ++i) s.push_back(alphabet[rng() % alphabet.size()]);
        return s;
    };
    for (int i = 0; i < 2000; ++i) {
        std::string a = random_string(20);
        std::string b = random_string(20);
        std::size_t expect = oracle::osa_distance(a, b);
        CHECK(damerau_levenshtein(a, b) == expect);
    }
}

TEST_CASE("metric properties: identity, symmetry, non-negativity") {
    std::mt19937 rng(555);
    const std::string alphabet = "abcdxyz";
    auto random_string = [&]() {
        std::string s;
        std::size_t len = rng() % 15;
        for (std::size_t i = 0; i < len; ++i) s.push_back(alphabet[rng() % alphabet.size()]);
        return s;
    };
    for (int i = 0; i < 500; ++i) {
        std::string a = random_string();
        std::string b = random_string();
        CHECK(damerau_levenshtein(a, a) == 0);
        if (a != b) CHECK(damerau_levenshtein(a, b) > 0);
        CHECK(damerau_levenshtein(a, b) == damerau_levenshtein(b, a));
    }
    // triangle inequality intentionally NOT asserted: optimal string
    // alignment violates it (e.g. "ca" -> "abc")
    std::size_t ca_abc = damerau_levenshtein("ca", "abc");
    std::size_t ca_ac = damerau_levenshtein("ca", "ac");
    std::size_t ac_abc = damerau_levenshtein("ac", "abc");
    CHECK(ca_abc > ca_ac + ac_abc);
}

TEST_CASE("bounded distance is exact inside the bound") {
    std::mt19937 rng(1234);
    const std::string alphabet = "abcd";
    auto random_string = [&]() {
        std::string s;
        std::size_t len = rng() % 12;
        for (std::size_t i = 0; i < len; ++i) s.push_back(alphabet[rng() % alphabet.size()]);
        return s;
    };
    for (int i = 0; i < 1000; ++i) {
        std::string a = random_string();
        std::string b = random_string();
        std::size_t full = damerau_levenshtein(a, b);
        for (std::size_t bound = 0; bound <= 4; ++bound) {
            std::size_t bounded = damerau_levenshtein_bounded(a, b, bound);
            if (full <= bound) CHECK(bounded == full);
            else CHECK(bounded == bound + 1);
        }
    }
}

TEST_CASE("default threshold policy is length-scaled") {
    CHECK(default_distance_threshold(2) == 0);
    CHECK(default_distance_threshold(3) == 0);
    CHECK(default_distance_threshold(4) == 1);
    CHECK(default_distance_threshold(5) == 1);
    CHECK(default_distance_threshold(6) == 2);
    CHECK(default_distance_threshold(10) == 2);
    CHECK(default_distance_threshold(11) == 3);
}
