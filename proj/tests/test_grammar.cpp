#include <doctest.h>

#include "nl2sql/grammar.hpp"

using namespace nl2sql;

TEST_CASE("order offers exactly ascending and descending") {
    const auto& prods = productions_of(ActionKind::Order);
    REQUIRE(prods.size() == 2);
    CHECK(prods[prod::kOrderAsc].label == "asc A");
    CHECK(prods[prod::kOrderDesc].label == "desc A");
}

TEST_CASE("value slots appear only inside Filter and Superlative productions") {
    for (const auto& [kind, prods] : grammar_table()) {
        for (const Production& p : prods) {
            for (ActionKind rhs : p.rhs) {
                if (rhs == ActionKind::V) {
                    CHECK((kind == ActionKind::Filter || kind == ActionKind::Superlative));
                }
            }
        }
    }
}

TEST_CASE("grammar closure: every referenced kind has an entry") {
    const auto& table = grammar_table();
    for (const auto& [kind, prods] : table) {
        for (const Production& p : prods) {
            for (ActionKind rhs : p.rhs) {
                CHECK(table.count(rhs) == 1);
            }
        }
    }
}

TEST_CASE("payload terminals have no productions") {
    CHECK(productions_of(ActionKind::C).empty());
    CHECK(productions_of(ActionKind::T).empty());
    CHECK(productions_of(ActionKind::V).empty());
}

TEST_CASE("expected production inventory") {
    CHECK(productions_of(ActionKind::Z).size() == 4);
    CHECK(productions_of(ActionKind::R).size() == 6);
    CHECK(productions_of(ActionKind::Select).size() == 1);
    CHECK(productions_of(ActionKind::N).size() == 5);
    CHECK(productions_of(ActionKind::A).size() == 6);
    CHECK(productions_of(ActionKind::Superlative).size() == 2);
    CHECK(productions_of(ActionKind::Filter).size() == 19);
    CHECK(productions_of(ActionKind::Filter)[prod::kFBetween].label == "between A V V");
    CHECK(productions_of(ActionKind::Filter)[prod::kFBetween].rhs.size() == 3);
    CHECK(productions_of(ActionKind::Superlative)[prod::kSupMost].label == "most A V");
}

TEST_CASE("action constructors validate their inputs") {
    CHECK_THROWS(make_structural(ActionKind::C, 0));
    CHECK_THROWS(make_structural(ActionKind::Order, 7));
    CHECK(make_column(3).payload == 3);
    CHECK(make_structural(ActionKind::Z, prod::kZSingle).production == prod::kZSingle);
}
