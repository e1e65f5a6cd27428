#include <doctest.h>

#include <random>

#include "fixtures.hpp"
#include "nl2sql/tree.hpp"

using namespace nl2sql;

namespace {

// Fig-style count query: count(*) over Pet with two filters on Student.
std::vector<Action> pets_count_sequence() {
    using K = ActionKind;
    return {
        make_structural(K::Z, prod::kZSingle),
        make_structural(K::R, prod::kRSelectFilter),
        make_structural(K::Select, prod::kSelN),
        make_structural(K::N, 0),
        make_structural(K::A, prod::kACount),
        make_column(0),   // *
        make_table(2),    // Pet
        make_structural(K::Filter, prod::kFAnd),
        make_structural(K::Filter, prod::kFEq),
        make_structural(K::A, prod::kANone),
        make_column(4),   // home_country
        make_table(0),    // Student
        make_value(0),    // France
        make_structural(K::Filter, prod::kFGt),
        make_structural(K::A, prod::kANone),
        make_column(3),   // age
        make_table(0),
        make_value(1),    // 20
    };
}

// random complete tree; recursion-prone productions are avoided near the
// depth bound so generation always terminates
SemQlNode random_node(ActionKind kind, std::mt19937& rng, int depth) {
    if (is_payload_kind(kind)) {
        SemQlNode leaf;
        leaf.kind = kind;
        leaf.payload = static_cast<int>(rng() % 5);
        return leaf;
    }
    const auto& prods = productions_of(kind);
    int pick;
    while (true) {
        pick = static_cast<int>(rng() % prods.size());
        bool recursive = false;
        for (ActionKind rhs : prods[static_cast<std::size_t>(pick)].rhs) {
            if (rhs == kind || rhs == ActionKind::R) recursive = true;
        }
        if (!recursive || depth < 3) break;
    }
    SemQlNode node;
    node.kind = kind;
    node.production = pick;
    for (ActionKind rhs : prods[static_cast<std::size_t>(pick)].rhs) {
        node.children.push_back(random_node(rhs, rng, depth + 1));
    }
    return node;
}

}  // namespace

TEST_CASE("hand-built filter tree round-trips through linearization") {
    auto seq = pets_count_sequence();
    SemQlTree tree = actions_to_tree(seq);
    CHECK(tree.root.kind == ActionKind::Z);
    const SemQlNode& filter = tree.root.children[0].children[1];
    CHECK(filter.production == prod::kFAnd);
    CHECK(filter.children[0].production == prod::kFEq);
    CHECK(filter.children[0].children[0].children[0].payload == 4);
    CHECK(filter.children[1].production == prod::kFGt);
    CHECK(filter.children[1].children[1].payload == 1);
    CHECK(tree_to_actions(tree) == seq);
}

TEST_CASE("minimal derivation builds a select-only tree") {
    using K = ActionKind;
    std::vector<Action> seq = {
        make_structural(K::Z, prod::kZSingle),  make_structural(K::R, prod::kRSelect),
        make_structural(K::Select, prod::kSelN), make_structural(K::N, 0),
        make_structural(K::A, prod::kANone),    make_column(0),
        make_table(0),
    };
    SemQlTree tree = actions_to_tree(seq);
    CHECK(tree.root.children[0].production == prod::kRSelect);
    CHECK(tree_to_actions(tree) == seq);
}

TEST_CASE("truncated sequence reports the position and expected kind") {
    auto seq = pets_count_sequence();
    seq.resize(seq.size() - 2);
    CHECK_THROWS_WITH_AS(actions_to_tree(seq), doctest::Contains("position"), IllegalAction);
}

TEST_CASE("illegal action names the offending position") {
    auto seq = pets_count_sequence();
    seq[2] = make_structural(ActionKind::N, 0);  // Select expected
    try {
        actions_to_tree(seq);
        FAIL("expected IllegalAction");
    } catch (const IllegalAction& e) {
        CHECK(std::string(e.what()).find("position 2") != std::string::npos);
        CHECK(std::string(e.what()).find("Select") != std::string::npos);
    }
}

TEST_CASE("every prefix of a linearization passes valid_next_actions") {
    const DatabaseSchema& pets = fixtures::shared().schema("pets");
    GrammarState state;
    for (const Action& action : pets_count_sequence()) {
        auto legal = valid_next_actions(state, pets, 2);
        bool found = false;
        for (const Action& l : legal) {
            if (l == action) found = true;
        }
        CHECK(found);
        state.apply(action);
    }
    CHECK(state.complete());
    CHECK(valid_next_actions(state, pets, 2).empty());
}

TEST_CASE("V at the frontier with no candidates signals a dead end") {
    const DatabaseSchema& pets = fixtures::shared().schema("pets");
    GrammarState state;
    state.apply(make_structural(ActionKind::Z, prod::kZSingle));
    state.apply(make_structural(ActionKind::R, prod::kRSelectSup));
    state.apply(make_structural(ActionKind::Select, prod::kSelN));
    state.apply(make_structural(ActionKind::N, 0));
    state.apply(make_structural(ActionKind::A, prod::kANone));
    state.apply(make_column(2));
    state.apply(make_table(0));
    state.apply(make_structural(ActionKind::Superlative, prod::kSupMost));
    state.apply(make_structural(ActionKind::A, prod::kANone));
    state.apply(make_column(3));
    state.apply(make_table(0));
    CHECK(state.head().kind == ActionKind::V);
    CHECK_THROWS_AS(valid_next_actions(state, pets, 0), NoValueCandidates);
}

TEST_CASE("linearization bijectivity on random trees") {
    std::mt19937 rng(20240817);
    for (int i = 0; i < 200; ++i) {
        SemQlTree tree{random_node(ActionKind::Z, rng, 0)};
        auto seq = tree_to_actions(tree);
        CHECK(actions_to_tree(seq) == tree);
    }
}

TEST_CASE("json serialization is stable and invertible") {
    SemQlTree tree = actions_to_tree(pets_count_sequence());
    std::string text = tree_to_json(tree);
    CHECK(tree_from_json(text) == tree);
    CHECK(tree_to_json(tree_from_json(text)) == text);
}

TEST_CASE("collect_tables skips nested subqueries when asked") {
    std::mt19937 rng(7);
    // build a tree with a nested R by hand
    using K = ActionKind;
    std::vector<Action> seq = {
        make_structural(K::Z, prod::kZSingle),
        make_structural(K::R, prod::kRSelectFilter),
        make_structural(K::Select, prod::kSelN),
        make_structural(K::N, 0),
        make_structural(K::A, prod::kANone),
        make_column(2),
        make_table(0),
        make_structural(K::Filter, prod::kFIn),
        make_structural(K::A, prod::kANone),
        make_column(1),
        make_table(0),
        make_structural(K::R, prod::kRSelect),
        make_structural(K::Select, prod::kSelN),
        make_structural(K::N, 0),
        make_structural(K::A, prod::kANone),
        make_column(6),
        make_table(1),
    };
    SemQlTree tree = actions_to_tree(seq);
    const SemQlNode& r = tree.root.children[0];
    auto outer = collect_tables(r, true);
    CHECK(outer == std::vector<int>{0});
    auto all = collect_tables(r, false);
    CHECK(all == std::vector<int>{0, 1});
}
