#include "nl2sql/compiler.hpp"

#include <algorithm>
#include <map>
#include <queue>
#include <set>

#include "nl2sql/sql_parser.hpp"
#include "nl2sql/util.hpp"

namespace nl2sql {

bool JoinPlan::contains(int table) const {
    return std::find(tables.begin(), tables.end(), table) != tables.end();
}

namespace {

struct Adjacency {
    // neighbor table -> first usable edge id, in deterministic order
    std::vector<std::vector<std::pair<int, int>>> out;  // (neighbor, edge id)
};

Adjacency build_adjacency(const SchemaGraph& graph) {
    Adjacency adj;
    adj.out.resize(static_cast<std::size_t>(graph.table_count));
    for (int e = 0; e < static_cast<int>(graph.edges.size()); ++e) {
        const SchemaEdge& edge = graph.edges[static_cast<std::size_t>(e)];
        if (edge.table_a == edge.table_b) continue;  // self-loops never join
        adj.out[static_cast<std::size_t>(edge.table_a)].push_back({edge.table_b, e});
        adj.out[static_cast<std::size_t>(edge.table_b)].push_back({edge.table_a, e});
    }
    for (auto& neighbors : adj.out) {
        std::stable_sort(neighbors.begin(), neighbors.end(),
                         [](const auto& a, const auto& b) { return a.first < b.first; });
    }
    return adj;
}

}  // namespace

JoinPlan infer_joins(const std::vector<int>& mentioned, const SchemaGraph& graph) {
    JoinPlan plan;
    if (mentioned.empty()) return plan;

    std::vector<int> terminals = mentioned;
    std::sort(terminals.begin(), terminals.end());
    terminals.erase(std::unique(terminals.begin(), terminals.end()), terminals.end());
    for (int t : terminals) {
        if (t < 0 || t >= graph.table_count) {
            throw JoinError("table index " + std::to_string(t) + " is not a graph vertex");
        }
    }
    plan.tables.push_back(terminals.front());
    if (terminals.size() == 1) return plan;

    Adjacency adj = build_adjacency(graph);
    std::set<int> in_tree{terminals.front()};
    std::set<int> pending(terminals.begin() + 1, terminals.end());

    // nearest-terminal heuristic: grow the tree by the terminal closest to
    // it, attaching the whole connecting path (bridge tables included)
    while (!pending.empty()) {
        std::vector<int> parent(static_cast<std::size_t>(graph.table_count), -1);
        std::vector<int> via_edge(static_cast<std::size_t>(graph.table_count), -1);
        std::vector<int> dist(static_cast<std::size_t>(graph.table_count), -1);
        std::queue<int> queue;
        for (int v : in_tree) {
            dist[static_cast<std::size_t>(v)] = 0;
            queue.push(v);
        }
        int reached = -1;
        while (!queue.empty()) {
            int v = queue.front();
            queue.pop();
            if (pending.count(v)) {
                reached = v;
                break;
            }
            for (const auto& [next, edge] : adj.out[static_cast<std::size_t>(v)]) {
                if (dist[static_cast<std::size_t>(next)] != -1) continue;
                dist[static_cast<std::size_t>(next)] = dist[static_cast<std::size_t>(v)] + 1;
                parent[static_cast<std::size_t>(next)] = v;
                via_edge[static_cast<std::size_t>(next)] = edge;
                queue.push(next);
            }
        }
        if (reached == -1) {
            throw JoinError("table " + std::to_string(*pending.begin()) +
                            " unreachable from the join tree");
        }
        // path from the tree to the reached terminal, tree side first
        std::vector<int> path;
        for (int v = reached; v != -1 && !in_tree.count(v); v = parent[static_cast<std::size_t>(v)]) {
            path.push_back(v);
        }
        std::reverse(path.begin(), path.end());
        for (int v : path) {
            int e = via_edge[static_cast<std::size_t>(v)];
            const SchemaEdge& edge = graph.edges[static_cast<std::size_t>(e)];
            JoinStep step;
            step.right_table = v;
            if (edge.table_a == v) {
                step.left_table = edge.table_b;
                step.left_column = edge.column_b;
                step.right_column = edge.column_a;
            } else {
                step.left_table = edge.table_a;
                step.left_column = edge.column_a;
                step.right_column = edge.column_b;
            }
            plan.tables.push_back(v);
            plan.steps.push_back(step);
            in_tree.insert(v);
            pending.erase(v);
        }
    }
    return plan;
}

std::string format_value(const ValueCandidate& candidate, const ColumnDef& column,
                         int filter_production, bool aggregated) {
    const std::string& surface = candidate.surface;
    bool like_op = filter_production == prod::kFLike || filter_production == prod::kFNotLike;
    if (like_op) {
        std::string pattern = surface;
        if (pattern.find('%') == std::string::npos && pattern.find('_') == std::string::npos) {
            switch (candidate.wildcard) {
                case WildcardStyle::TrailingPercent: pattern = pattern + "%"; break;
                case WildcardStyle::LeadingPercent: pattern = "%" + pattern; break;
                case WildcardStyle::BothSides:
                case WildcardStyle::None: pattern = "%" + pattern + "%"; break;
            }
        }
        return quote_string_literal(pattern);
    }
    bool numeric_context = aggregated || column.type == ColumnType::Number;
    std::string trimmed = trim(surface);
    if (numeric_context) {
        if (!is_number_literal(trimmed)) {
            throw CompileError("non-numeric value \"" + surface + "\" for numeric column " +
                               column.name);
        }
        return canonical_number(trimmed);
    }
    if (column.type == ColumnType::Text) {
        return quote_string_literal(surface);
    }
    // time / boolean / others: numbers stay numeric, everything else quoted
    if (is_number_literal(trimmed)) return canonical_number(trimmed);
    return quote_string_literal(surface);
}

namespace {

struct Scope {
    const DatabaseSchema& schema;
    const SchemaGraph& graph;
    const CandidateSet& candidates;
    std::vector<std::string>* literals;
    std::map<int, std::string> alias;  // table index -> alias, when aliased
    std::set<int> own_tables;          // tables of this scope's join plan
};

const SemQlNode& child(const SemQlNode& node, std::size_t i) { return node.children[i]; }

std::string render_table(const Scope& scope, int table) {
    auto it = scope.alias.find(table);
    if (it != scope.alias.end()) return it->second;
    return quote_identifier(scope.schema.tables[static_cast<std::size_t>(table)]);
}

std::string render_column(const Scope& scope, int column, int table) {
    if (column == 0) return "*";
    const ColumnDef& def = scope.schema.columns[static_cast<std::size_t>(column)];
    return render_table(scope, table) + "." + quote_identifier(def.name);
}

// A node: production is the aggregator, children are C and T
std::string render_a(const Scope& scope, const SemQlNode& a) {
    int column = child(a, 0).payload;
    int table = child(a, 1).payload;
    std::string col = render_column(scope, column, table);
    switch (a.production) {
        case prod::kANone: return col;
        case prod::kAMax: return "max(" + col + ")";
        case prod::kAMin: return "min(" + col + ")";
        case prod::kACount: return "count(" + col + ")";
        case prod::kASum: return "sum(" + col + ")";
        case prod::kAAvg: return "avg(" + col + ")";
        default: throw CompileError("unknown aggregator production");
    }
}

bool a_is_aggregated(const SemQlNode& a) { return a.production != prod::kANone; }

const ValueCandidate& resolve_value(const Scope& scope, const SemQlNode& v) {
    if (v.payload < 0 || v.payload >= static_cast<int>(scope.candidates.size())) {
        throw CompileError("value payload " + std::to_string(v.payload) +
                           " does not resolve in the candidate set");
    }
    return scope.candidates[static_cast<std::size_t>(v.payload)];
}

std::string compile_r(const SemQlNode& r, const DatabaseSchema& schema, const SchemaGraph& graph,
                      const CandidateSet& candidates, std::vector<std::string>* literals,
                      const std::set<int>& outer_tables);

bool filter_contains_agg(const SemQlNode& filter) {
    if (filter.kind == ActionKind::A) return a_is_aggregated(filter);
    if (filter.kind == ActionKind::R) return false;  // subquery scope
    for (const SemQlNode& c : filter.children) {
        if (filter_contains_agg(c)) return true;
    }
    return false;
}

std::string render_filter(const Scope& scope, const SemQlNode& filter, bool parenthesize_or) {
    switch (filter.production) {
        case prod::kFAnd:
        case prod::kFOr: {
            bool is_or = filter.production == prod::kFOr;
            std::string lhs = render_filter(scope, child(filter, 0), is_or ? false : true);
            std::string rhs = render_filter(scope, child(filter, 1), is_or ? false : true);
            std::string joined = lhs + (is_or ? " OR " : " AND ") + rhs;
            if (is_or && parenthesize_or) return "(" + joined + ")";
            return joined;
        }
        default: break;
    }
    const SemQlNode& a = child(filter, 0);
    std::string lhs = render_a(scope, a);
    bool aggregated = a_is_aggregated(a);
    const ColumnDef& column = scope.schema.columns[static_cast<std::size_t>(child(a, 0).payload)];

    auto lit = [&](const SemQlNode& v) {
        std::string text = format_value(resolve_value(scope, v), column, filter.production, aggregated);
        if (scope.literals) scope.literals->push_back(text);
        return text;
    };
    auto sub = [&](const SemQlNode& nested_r) {
        return "(" +
               compile_r(nested_r, scope.schema, scope.graph, scope.candidates, scope.literals,
                         scope.own_tables) +
               ")";
    };

    switch (filter.production) {
        case prod::kFEq: return lhs + " = " + lit(child(filter, 1));
        case prod::kFNe: return lhs + " != " + lit(child(filter, 1));
        case prod::kFLt: return lhs + " < " + lit(child(filter, 1));
        case prod::kFGt: return lhs + " > " + lit(child(filter, 1));
        case prod::kFLe: return lhs + " <= " + lit(child(filter, 1));
        case prod::kFGe: return lhs + " >= " + lit(child(filter, 1));
        case prod::kFBetween: {
            std::string low = lit(child(filter, 1));
            std::string high = lit(child(filter, 2));
            return lhs + " BETWEEN " + low + " AND " + high;
        }
        case prod::kFLike: return lhs + " LIKE " + lit(child(filter, 1));
        case prod::kFNotLike: return lhs + " NOT LIKE " + lit(child(filter, 1));
        case prod::kFIn: return lhs + " IN " + sub(child(filter, 1));
        case prod::kFNotIn: return lhs + " NOT IN " + sub(child(filter, 1));
        case prod::kFEqNested: return lhs + " = " + sub(child(filter, 1));
        case prod::kFNeNested: return lhs + " != " + sub(child(filter, 1));
        case prod::kFLtNested: return lhs + " < " + sub(child(filter, 1));
        case prod::kFGtNested: return lhs + " > " + sub(child(filter, 1));
        case prod::kFGeNested: return lhs + " >= " + sub(child(filter, 1));
        case prod::kFLeNested: return lhs + " <= " + sub(child(filter, 1));
        default: throw CompileError("unknown filter production");
    }
}

// AND-spine conjuncts; each conjunct is a whole OR subtree or a leaf
void flatten_conjuncts(const SemQlNode& filter, std::vector<const SemQlNode*>& out) {
    if (filter.production == prod::kFAnd) {
        flatten_conjuncts(child(filter, 0), out);
        flatten_conjuncts(child(filter, 1), out);
        return;
    }
    out.push_back(&filter);
}

std::string compile_r(const SemQlNode& r, const DatabaseSchema& schema, const SchemaGraph& graph,
                      const CandidateSet& candidates, std::vector<std::string>* literals,
                      const std::set<int>& outer_tables) {
    if (r.kind != ActionKind::R) throw CompileError("expected R node");

    const SemQlNode* select = nullptr;
    const SemQlNode* filter = nullptr;
    const SemQlNode* order = nullptr;
    const SemQlNode* superlative = nullptr;
    for (const SemQlNode& c : r.children) {
        switch (c.kind) {
            case ActionKind::Select: select = &c; break;
            case ActionKind::Filter: filter = &c; break;
            case ActionKind::Order: order = &c; break;
            case ActionKind::Superlative: superlative = &c; break;
            default: throw CompileError("unexpected child under R");
        }
    }
    if (!select) throw CompileError("R node without Select");

    std::vector<int> mentioned = collect_tables(r, true);
    JoinPlan plan = infer_joins(mentioned, graph);
    if (plan.tables.empty()) throw CompileError("no tables mentioned");

    Scope scope{schema, graph, candidates, literals, {}, {}};
    scope.own_tables.insert(plan.tables.begin(), plan.tables.end());
    bool collide = false;
    for (int t : plan.tables) {
        if (outer_tables.count(t)) collide = true;
    }
    if (collide) {
        // a table shared with the outer query forces aliases, in plan order
        for (std::size_t i = 0; i < plan.tables.size(); ++i) {
            scope.alias[plan.tables[i]] = "T" + std::to_string(i + 1);
        }
    }

    const SemQlNode& n = child(*select, 0);  // Select ::= N
    std::vector<const SemQlNode*> items;
    for (const SemQlNode& a : n.children) items.push_back(&a);
    std::string sql = "SELECT ";
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) sql += ", ";
        sql += render_a(scope, *items[i]);
    }

    // FROM / JOIN
    sql += " FROM ";
    for (std::size_t i = 0; i < plan.tables.size(); ++i) {
        int table = plan.tables[i];
        std::string name = quote_identifier(schema.tables[static_cast<std::size_t>(table)]);
        auto alias_it = scope.alias.find(table);
        std::string clause = alias_it != scope.alias.end() ? name + " AS " + alias_it->second : name;
        if (i == 0) {
            sql += clause;
            continue;
        }
        const JoinStep& step = plan.steps[i - 1];
        sql += " JOIN " + clause + " ON " +
               render_column(scope, step.left_column, step.left_table) + " = " +
               render_column(scope, step.right_column, step.right_table);
    }

    // WHERE / HAVING split by aggregation
    std::vector<std::string> where_parts;
    std::vector<std::string> having_parts;
    if (filter) {
        std::vector<const SemQlNode*> conjuncts;
        flatten_conjuncts(*filter, conjuncts);
        for (const SemQlNode* conjunct : conjuncts) {
            std::string text = render_filter(scope, *conjunct, conjuncts.size() > 1);
            if (filter_contains_agg(*conjunct)) having_parts.push_back(text);
            else where_parts.push_back(text);
        }
    }
    if (!where_parts.empty()) sql += " WHERE " + join(where_parts, " AND ");

    // GROUP BY reconstruction: all plain selected columns, when aggregation
    // and plain projections co-occur or a HAVING clause exists
    std::vector<std::string> plain_cols;
    bool any_agg = !having_parts.empty();
    for (const SemQlNode* a : items) {
        if (a_is_aggregated(*a)) any_agg = true;
        else if (child(*a, 0).payload != 0) {
            std::string col = render_column(scope, child(*a, 0).payload, child(*a, 1).payload);
            if (std::find(plain_cols.begin(), plain_cols.end(), col) == plain_cols.end()) {
                plain_cols.push_back(col);
            }
        }
    }
    if (order && a_is_aggregated(child(*order, 0))) any_agg = true;
    if (superlative && a_is_aggregated(child(*superlative, 0))) any_agg = true;
    if (any_agg && !plain_cols.empty()) {
        sql += " GROUP BY " + join(plain_cols, ", ");
    }
    if (!having_parts.empty()) sql += " HAVING " + join(having_parts, " AND ");

    if (order) {
        sql += " ORDER BY " + render_a(scope, child(*order, 0)) +
               (order->production == prod::kOrderDesc ? " DESC" : " ASC");
    }
    if (superlative) {
        const SemQlNode& a = child(*superlative, 0);
        const ValueCandidate& limit_value = resolve_value(scope, child(*superlative, 1));
        std::string trimmed = trim(limit_value.surface);
        if (!is_integer_literal(canonical_number(trimmed))) {
            throw CompileError("LIMIT value \"" + limit_value.surface + "\" is not an integer");
        }
        std::string limit = canonical_number(trimmed);
        if (scope.literals) scope.literals->push_back(limit);
        sql += " ORDER BY " + render_a(scope, a) +
               (superlative->production == prod::kSupMost ? " DESC" : " ASC") + " LIMIT " + limit;
    }
    return sql;
}

}  // namespace

CompiledQuery compile(const SemQlTree& tree, const DatabaseSchema& schema,
                      const SchemaGraph& graph, const CandidateSet& candidates) {
    CompiledQuery out;
    const SemQlNode& z = tree.root;
    if (z.kind != ActionKind::Z) throw CompileError("root must be Z");

    if (z.production == prod::kZSingle) {
        out.sql = compile_r(child(z, 0), schema, graph, candidates, &out.literals, {});
    } else {
        std::string op = z.production == prod::kZIntersect ? " INTERSECT "
                         : z.production == prod::kZUnion   ? " UNION "
                                                           : " EXCEPT ";
        std::string lhs = compile_r(child(z, 0), schema, graph, candidates, &out.literals, {});
        std::string rhs = compile_r(child(z, 1), schema, graph, candidates, &out.literals, {});
        out.sql = lhs + op + rhs;
    }
    out.tree_hash = std::hash<std::string>{}(tree_to_json(tree));
    return out;
}

int count_bare_joins(const std::string& sql) {
    std::vector<SqlToken> tokens;
    try {
        tokens = tokenize_sql(sql);
    } catch (const SqlParseError&) {
        return -1;
    }
    auto is_kw = [&](std::size_t i, const char* kw) {
        return tokens[i].type == SqlToken::Type::Ident && to_lower(tokens[i].text) == kw;
    };
    int bare = 0;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (!is_kw(i, "join")) continue;
        int depth = 0;
        bool has_on = false;
        for (std::size_t j = i + 1; j < tokens.size(); ++j) {
            const SqlToken& t = tokens[j];
            if (t.type == SqlToken::Type::Symbol) {
                if (t.text == "(") ++depth;
                if (t.text == ")") {
                    if (depth == 0) break;
                    --depth;
                }
                continue;
            }
            if (depth > 0) continue;
            if (is_kw(j, "on")) {
                has_on = true;
                break;
            }
            if (is_kw(j, "join") || is_kw(j, "where") || is_kw(j, "group") || is_kw(j, "order") ||
                is_kw(j, "having") || is_kw(j, "limit") || is_kw(j, "intersect") ||
                is_kw(j, "union") || is_kw(j, "except")) {
                break;
            }
        }
        if (!has_on) ++bare;
    }
    return bare;
}

}  // namespace nl2sql
