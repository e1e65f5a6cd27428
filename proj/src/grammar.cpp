#include "nl2sql/grammar.hpp"

#include <stdexcept>

namespace nl2sql {

namespace {

using K = ActionKind;

std::map<ActionKind, std::vector<Production>> make_grammar() {
    std::map<ActionKind, std::vector<Production>> g;
    g[K::Z] = {
        {"intersect R R", {K::R, K::R}},
        {"union R R", {K::R, K::R}},
        {"except R R", {K::R, K::R}},
        {"R", {K::R}},
    };
    g[K::R] = {
        {"Select", {K::Select}},
        {"Select Filter", {K::Select, K::Filter}},
        {"Select Order", {K::Select, K::Order}},
        {"Select Superlative", {K::Select, K::Superlative}},
        {"Select Filter Order", {K::Select, K::Filter, K::Order}},
        {"Select Filter Superlative", {K::Select, K::Filter, K::Superlative}},
    };
    g[K::Select] = {
        {"N", {K::N}},
    };
    g[K::N] = {
        {"A", {K::A}},
        {"A A", {K::A, K::A}},
        {"A A A", {K::A, K::A, K::A}},
        {"A A A A", {K::A, K::A, K::A, K::A}},
        {"A A A A A", {K::A, K::A, K::A, K::A, K::A}},
    };
    g[K::A] = {
        {"none C T", {K::C, K::T}},
        {"max C T", {K::C, K::T}},
        {"min C T", {K::C, K::T}},
        {"count C T", {K::C, K::T}},
        {"sum C T", {K::C, K::T}},
        {"avg C T", {K::C, K::T}},
    };
    g[K::Order] = {
        {"asc A", {K::A}},
        {"desc A", {K::A}},
    };
    g[K::Superlative] = {
        {"most A V", {K::A, K::V}},
        {"least A V", {K::A, K::V}},
    };
    g[K::Filter] = {
        {"and Filter Filter", {K::Filter, K::Filter}},
        {"or Filter Filter", {K::Filter, K::Filter}},
        {"= A V", {K::A, K::V}},
        {"!= A V", {K::A, K::V}},
        {"< A V", {K::A, K::V}},
        {"> A V", {K::A, K::V}},
        {"<= A V", {K::A, K::V}},
        {">= A V", {K::A, K::V}},
        {"between A V V", {K::A, K::V, K::V}},
        {"like A V", {K::A, K::V}},
        {"not_like A V", {K::A, K::V}},
        {"in A R", {K::A, K::R}},
        {"not_in A R", {K::A, K::R}},
        {"= A R", {K::A, K::R}},
        {"!= A R", {K::A, K::R}},
        {"< A R", {K::A, K::R}},
        {"> A R", {K::A, K::R}},
        {">= A R", {K::A, K::R}},
        {"<= A R", {K::A, K::R}},
    };
    // payload-bearing terminals expand to nothing
    g[K::C] = {};
    g[K::T] = {};
    g[K::V] = {};
    return g;
}

}  // namespace

const std::map<ActionKind, std::vector<Production>>& grammar_table() {
    static const std::map<ActionKind, std::vector<Production>> table = make_grammar();
    return table;
}

const std::vector<Production>& productions_of(ActionKind kind) {
    return grammar_table().at(kind);
}

std::string action_kind_name(ActionKind kind) {
    switch (kind) {
        case K::Z: return "Z";
        case K::R: return "R";
        case K::Select: return "Select";
        case K::N: return "N";
        case K::A: return "A";
        case K::Filter: return "Filter";
        case K::Order: return "Order";
        case K::Superlative: return "Superlative";
        case K::C: return "C";
        case K::T: return "T";
        case K::V: return "V";
    }
    throw std::logic_error("unknown action kind");
}

ActionKind action_kind_from_name(const std::string& name) {
    static const std::map<std::string, ActionKind> names = {
        {"Z", K::Z},         {"R", K::R},           {"Select", K::Select},
        {"N", K::N},         {"A", K::A},           {"Filter", K::Filter},
        {"Order", K::Order}, {"Superlative", K::Superlative},
        {"C", K::C},         {"T", K::T},           {"V", K::V},
    };
    auto it = names.find(name);
    if (it == names.end()) throw std::invalid_argument("unknown action kind: " + name);
    return it->second;
}

bool is_payload_kind(ActionKind kind) {
    return kind == K::C || kind == K::T || kind == K::V;
}

Action make_structural(ActionKind kind, int production) {
    if (is_payload_kind(kind)) throw std::invalid_argument("payload kind given a production");
    const auto& prods = productions_of(kind);
    if (production < 0 || production >= static_cast<int>(prods.size())) {
        throw std::invalid_argument("production index out of range for " + action_kind_name(kind));
    }
    return Action{kind, production, -1};
}

Action make_column(int column_index) { return Action{K::C, -1, column_index}; }
Action make_table(int table_index) { return Action{K::T, -1, table_index}; }
Action make_value(int candidate_index) { return Action{K::V, -1, candidate_index}; }

std::string action_to_string(const Action& action) {
    std::string name = action_kind_name(action.kind);
    if (is_payload_kind(action.kind)) {
        return name + "(" + std::to_string(action.payload) + ")";
    }
    return name + "[" + productions_of(action.kind)[static_cast<std::size_t>(action.production)].label +
           "]";
}

}  // namespace nl2sql
