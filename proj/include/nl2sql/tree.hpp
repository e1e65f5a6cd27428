#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "nl2sql/grammar.hpp"
#include "nl2sql/schema.hpp"

namespace nl2sql {

struct SemQlNode {
    ActionKind kind;
    int production = -1;  // structural nodes
    int payload = -1;     // C/T/V nodes
    std::vector<SemQlNode> children;

    bool operator==(const SemQlNode& other) const = default;

    const std::string& production_label() const;
};

struct SemQlTree {
    SemQlNode root;  // kind == Z

    bool operator==(const SemQlTree& other) const = default;
};

// Raised when a V slot is reached with an empty candidate set; synthesis
// must backtrack or fail the sample.
struct NoValueCandidates : std::runtime_error {
    NoValueCandidates() : std::runtime_error("no value candidates") {}
};

struct IllegalAction : std::runtime_error {
    explicit IllegalAction(const std::string& what) : std::runtime_error(what) {}
};

// Left-to-right depth-first expansion state. The frontier holds pending
// non-terminals; applying only actions from valid_next_actions keeps it
// consistent, and an empty frontier means the derivation is complete.
class GrammarState {
public:
    struct FrontierEntry {
        ActionKind kind;
        std::vector<ActionKind> ancestors;  // root-to-parent kind path
    };

    GrammarState();

    bool complete() const { return frontier_.empty(); }
    const FrontierEntry& head() const;
    const std::vector<Action>& history() const { return history_; }
    const std::vector<FrontierEntry>& frontier() const { return frontier_; }

    // Validates the action against the frontier head; throws IllegalAction.
    void apply(const Action& action);

private:
    std::vector<FrontierEntry> frontier_;  // back() is the head
    std::vector<Action> history_;
};

// Legal action templates at the current state: productions for a structural
// head, one payload action per schema column / table / value candidate
// otherwise. Empty exactly when the state is complete. Throws
// NoValueCandidates for a V head with candidate_count == 0.
std::vector<Action> valid_next_actions(const GrammarState& state, const DatabaseSchema& schema,
                                       std::size_t candidate_count);

// Rebuilds a tree from its linearized action sequence. Throws IllegalAction
// naming the offending position and the expected non-terminal.
SemQlTree actions_to_tree(const std::vector<Action>& seq);

// Depth-first left-to-right linearization; inverse of actions_to_tree.
std::vector<Action> tree_to_actions(const SemQlTree& tree);

// Canonical JSON form for caching converted trees; stable across runs.
std::string tree_to_json(const SemQlTree& tree);
SemQlTree tree_from_json(const std::string& text);

// Table indices mentioned by T nodes. With skip_nested_r set, subqueries
// (R children inside Filter productions) are not descended into.
std::vector<int> collect_tables(const SemQlNode& node, bool skip_nested_r);

// Largest V payload referenced anywhere in the tree, or -1.
int max_value_payload(const SemQlNode& node);

}  // namespace nl2sql
