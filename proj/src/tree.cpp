#include "nl2sql/tree.hpp"

#include <algorithm>

#include <json.hpp>

namespace nl2sql {

using nlohmann::json;

const std::string& SemQlNode::production_label() const {
    return productions_of(kind)[static_cast<std::size_t>(production)].label;
}

GrammarState::GrammarState() {
    frontier_.push_back(FrontierEntry{ActionKind::Z, {}});
}

const GrammarState::FrontierEntry& GrammarState::head() const {
    if (frontier_.empty()) throw IllegalAction("state is complete, no pending non-terminal");
    return frontier_.back();
}

void GrammarState::apply(const Action& action) {
    if (frontier_.empty()) {
        throw IllegalAction("action " + action_to_string(action) + " after completion");
    }
    FrontierEntry entry = frontier_.back();
    if (action.kind != entry.kind) {
        throw IllegalAction("expected " + action_kind_name(entry.kind) + ", got " +
                            action_to_string(action));
    }
    frontier_.pop_back();
    if (is_payload_kind(action.kind)) {
        if (action.payload < 0) throw IllegalAction("payload action without payload");
    } else {
        const auto& prods = productions_of(action.kind);
        if (action.production < 0 || action.production >= static_cast<int>(prods.size())) {
            throw IllegalAction("production out of range for " + action_kind_name(action.kind));
        }
        const Production& prod = prods[static_cast<std::size_t>(action.production)];
        std::vector<ActionKind> child_path = entry.ancestors;
        child_path.push_back(action.kind);
        for (auto it = prod.rhs.rbegin(); it != prod.rhs.rend(); ++it) {
            frontier_.push_back(FrontierEntry{*it, child_path});
        }
    }
    history_.push_back(action);
}

std::vector<Action> valid_next_actions(const GrammarState& state, const DatabaseSchema& schema,
                                       std::size_t candidate_count) {
    std::vector<Action> actions;
    if (state.complete()) return actions;
    ActionKind kind = state.head().kind;
    switch (kind) {
        case ActionKind::C:
            for (int i = 0; i < static_cast<int>(schema.columns.size()); ++i) {
                actions.push_back(make_column(i));
            }
            break;
        case ActionKind::T:
            for (int i = 0; i < static_cast<int>(schema.tables.size()); ++i) {
                actions.push_back(make_table(i));
            }
            break;
        case ActionKind::V:
            if (candidate_count == 0) throw NoValueCandidates();
            for (int i = 0; i < static_cast<int>(candidate_count); ++i) {
                actions.push_back(make_value(i));
            }
            break;
        default: {
            const auto& prods = productions_of(kind);
            for (int p = 0; p < static_cast<int>(prods.size()); ++p) {
                actions.push_back(make_structural(kind, p));
            }
            break;
        }
    }
    return actions;
}

namespace {

SemQlNode build_node(const std::vector<Action>& seq, std::size_t& pos, ActionKind expect) {
    if (pos >= seq.size()) {
        throw IllegalAction("incomplete tree: sequence ended at position " +
                            std::to_string(pos) + " while expecting " + action_kind_name(expect));
    }
    const Action& action = seq[pos];
    if (action.kind != expect) {
        throw IllegalAction("illegal action at position " + std::to_string(pos) + ": expected " +
                            action_kind_name(expect) + ", got " + action_to_string(action));
    }
    ++pos;
    SemQlNode node;
    node.kind = action.kind;
    if (is_payload_kind(action.kind)) {
        if (action.payload < 0) {
            throw IllegalAction("missing payload at position " + std::to_string(pos - 1));
        }
        node.payload = action.payload;
        return node;
    }
    const auto& prods = productions_of(action.kind);
    if (action.production < 0 || action.production >= static_cast<int>(prods.size())) {
        throw IllegalAction("production out of range at position " + std::to_string(pos - 1));
    }
    node.production = action.production;
    for (ActionKind child : prods[static_cast<std::size_t>(action.production)].rhs) {
        node.children.push_back(build_node(seq, pos, child));
    }
    return node;
}

void linearize(const SemQlNode& node, std::vector<Action>& out) {
    if (is_payload_kind(node.kind)) {
        out.push_back(Action{node.kind, -1, node.payload});
        return;
    }
    out.push_back(Action{node.kind, node.production, -1});
    for (const SemQlNode& child : node.children) linearize(child, out);
}

json node_to_json(const SemQlNode& node) {
    json j;
    j["kind"] = action_kind_name(node.kind);
    if (is_payload_kind(node.kind)) {
        j["payload"] = node.payload;
        return j;
    }
    j["prod"] = node.production_label();
    json children = json::array();
    for (const SemQlNode& child : node.children) children.push_back(node_to_json(child));
    j["children"] = std::move(children);
    return j;
}

SemQlNode node_from_json(const json& j) {
    SemQlNode node;
    node.kind = action_kind_from_name(j.at("kind").get<std::string>());
    if (is_payload_kind(node.kind)) {
        node.payload = j.at("payload").get<int>();
        return node;
    }
    const std::string label = j.at("prod").get<std::string>();
    const auto& prods = productions_of(node.kind);
    auto it = std::find_if(prods.begin(), prods.end(),
                           [&](const Production& p) { return p.label == label; });
    if (it == prods.end()) {
        throw std::invalid_argument("unknown production \"" + label + "\" for " +
                                    action_kind_name(node.kind));
    }
    node.production = static_cast<int>(it - prods.begin());
    for (const json& child : j.at("children")) {
        node.children.push_back(node_from_json(child));
    }
    return node;
}

}  // namespace

SemQlTree actions_to_tree(const std::vector<Action>& seq) {
    std::size_t pos = 0;
    SemQlTree tree{build_node(seq, pos, ActionKind::Z)};
    if (pos != seq.size()) {
        throw IllegalAction("trailing actions after complete tree at position " +
                            std::to_string(pos));
    }
    return tree;
}

std::vector<Action> tree_to_actions(const SemQlTree& tree) {
    std::vector<Action> out;
    linearize(tree.root, out);
    return out;
}

std::string tree_to_json(const SemQlTree& tree) { return node_to_json(tree.root).dump(); }

SemQlTree tree_from_json(const std::string& text) {
    return SemQlTree{node_from_json(json::parse(text))};
}

namespace {

void collect_tables_impl(const SemQlNode& node, bool skip_nested_r, bool at_root,
                         std::vector<int>& out) {
    if (node.kind == ActionKind::T) {
        if (std::find(out.begin(), out.end(), node.payload) == out.end()) {
            out.push_back(node.payload);
        }
        return;
    }
    if (skip_nested_r && node.kind == ActionKind::R && !at_root) return;
    for (const SemQlNode& child : node.children) {
        collect_tables_impl(child, skip_nested_r, false, out);
    }
}

}  // namespace

std::vector<int> collect_tables(const SemQlNode& node, bool skip_nested_r) {
    std::vector<int> out;
    collect_tables_impl(node, skip_nested_r, true, out);
    return out;
}

int max_value_payload(const SemQlNode& node) {
    int max_payload = node.kind == ActionKind::V ? node.payload : -1;
    for (const SemQlNode& child : node.children) {
        max_payload = std::max(max_payload, max_value_payload(child));
    }
    return max_payload;
}

}  // namespace nl2sql
