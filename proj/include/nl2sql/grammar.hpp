#pragma once

#include <map>
#include <string>
#include <vector>

namespace nl2sql {

// Node kinds of the SemQL intermediate representation. C, T and V are
// payload-bearing terminals (column, table, value-candidate indices); the
// rest expand through the fixed production table below.
enum class ActionKind { Z, R, Select, N, A, Filter, Order, Superlative, C, T, V };

std::string action_kind_name(ActionKind kind);
ActionKind action_kind_from_name(const std::string& name);

struct Production {
    std::string label;             // e.g. "= A V" or "intersect R R"
    std::vector<ActionKind> rhs;   // non-terminals to expand, left to right
};

// Full production table. Stable indices: code addresses productions through
// the enums in namespace prod below.
const std::map<ActionKind, std::vector<Production>>& grammar_table();

const std::vector<Production>& productions_of(ActionKind kind);

namespace prod {

enum Z { kZIntersect = 0, kZUnion, kZExcept, kZSingle };
enum R {
    kRSelect = 0,
    kRSelectFilter,
    kRSelectOrder,
    kRSelectSup,
    kRSelectFilterOrder,
    kRSelectFilterSup,
};
enum Select { kSelN = 0 };
// N's production index is the projection count minus one
enum A { kANone = 0, kAMax, kAMin, kACount, kASum, kAAvg };
enum Order { kOrderAsc = 0, kOrderDesc };
enum Superlative { kSupMost = 0, kSupLeast };
enum Filter {
    kFAnd = 0,
    kFOr,
    kFEq,
    kFNe,
    kFLt,
    kFGt,
    kFLe,
    kFGe,
    kFBetween,
    kFLike,
    kFNotLike,
    kFIn,
    kFNotIn,
    kFEqNested,
    kFNeNested,
    kFLtNested,
    kFGtNested,
    kFGeNested,
    kFLeNested,
};

}  // namespace prod

// One step of a linearized derivation. Structural kinds carry a production
// index; C/T/V carry a payload instead.
struct Action {
    ActionKind kind;
    int production = -1;
    int payload = -1;

    bool operator==(const Action& other) const = default;
};

Action make_structural(ActionKind kind, int production);
Action make_column(int column_index);
Action make_table(int table_index);
Action make_value(int candidate_index);

bool is_payload_kind(ActionKind kind);

std::string action_to_string(const Action& action);

}  // namespace nl2sql
