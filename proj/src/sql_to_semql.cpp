#include "nl2sql/sql_to_semql.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "nl2sql/compiler.hpp"
#include "nl2sql/sql_parser.hpp"
#include "nl2sql/util.hpp"

namespace nl2sql {

namespace {

struct Rejected {
    std::string reason;
};

struct Converter {
    const DatabaseSchema& schema;
    const SchemaGraph& graph;
    std::vector<GoldLiteral> literals;

    [[noreturn]] void reject(const std::string& reason) { throw Rejected{reason}; }

    int value_index(const SqlLiteral& lit) {
        for (int i = 0; i < static_cast<int>(literals.size()); ++i) {
            const GoldLiteral& existing = literals[static_cast<std::size_t>(i)];
            if (existing.surface == lit.text && existing.is_string == lit.is_string) return i;
        }
        literals.push_back(GoldLiteral{lit.text, lit.is_string});
        return static_cast<int>(literals.size()) - 1;
    }

    SemQlNode value_node(const SqlLiteral& lit) {
        SemQlNode v;
        v.kind = ActionKind::V;
        v.payload = value_index(lit);
        return v;
    }

    // table environment of one SELECT core
    struct TableEnv {
        std::vector<int> from_tables;               // in FROM order
        std::map<std::string, int> names;           // lowercase alias/name -> table
        std::vector<std::pair<int, int>> on_pairs;  // resolved ON column pairs
    };

    int resolve_table_name(const std::string& name) {
        int t = schema.find_table(name);
        if (t < 0) reject("unknown_table");
        return t;
    }

    TableEnv build_env(const SqlSelectCore& core) {
        TableEnv env;
        auto add_unit = [&](const SqlTableUnit& unit) {
            if (unit.subquery) reject("from_subquery");
            int t = resolve_table_name(unit.table);
            if (std::find(env.from_tables.begin(), env.from_tables.end(), t) !=
                env.from_tables.end()) {
                reject("self_join");
            }
            env.from_tables.push_back(t);
            env.names[to_lower(unit.table)] = t;
            if (!unit.alias.empty()) env.names[to_lower(unit.alias)] = t;
        };
        add_unit(core.from);
        for (const SqlJoin& join : core.joins) {
            if (join.left_outer) reject("outer_join");
            add_unit(join.table);
            if (join.on.empty()) reject("bare_join_in_gold");
            if (join.on.size() > 1) reject("compound_on");
            for (const auto& [lhs, rhs] : join.on) {
                int lc = resolve_column(env, lhs);
                int rc = resolve_column(env, rhs);
                env.on_pairs.emplace_back(std::min(lc, rc), std::max(lc, rc));
            }
        }
        return env;
    }

    int resolve_column(const TableEnv& env, const SqlColumnRef& ref) {
        if (ref.column == "*") return 0;
        if (!ref.table.empty()) {
            auto it = env.names.find(to_lower(ref.table));
            if (it == env.names.end()) reject("unknown_table_alias");
            int col = schema.find_column(it->second, ref.column);
            if (col < 0) reject("unknown_column");
            return col;
        }
        int found = -1;
        for (int t : env.from_tables) {
            int col = schema.find_column(t, ref.column);
            if (col < 0) continue;
            if (found >= 0 && found != col) reject("ambiguous_column");
            found = col;
        }
        if (found < 0) reject("unknown_column");
        return found;
    }

    // A node for a column unit; star tables are patched afterwards (-1)
    SemQlNode make_a(const TableEnv& env, const SqlColUnit& unit) {
        if (unit.distinct) reject("agg_distinct");
        SemQlNode a;
        a.kind = ActionKind::A;
        switch (unit.agg) {
            case AggOp::None: a.production = prod::kANone; break;
            case AggOp::Max: a.production = prod::kAMax; break;
            case AggOp::Min: a.production = prod::kAMin; break;
            case AggOp::Count: a.production = prod::kACount; break;
            case AggOp::Sum: a.production = prod::kASum; break;
            case AggOp::Avg: a.production = prod::kAAvg; break;
        }
        int col = resolve_column(env, unit.col);
        SemQlNode c;
        c.kind = ActionKind::C;
        c.payload = col;
        SemQlNode t;
        t.kind = ActionKind::T;
        if (col == 0) {
            if (!unit.col.table.empty()) {
                auto it = env.names.find(to_lower(unit.col.table));
                if (it == env.names.end()) reject("unknown_table_alias");
                t.payload = it->second;
            } else {
                t.payload = -1;  // patched by assign_star_tables
            }
        } else {
            t.payload = schema.table_of_column(col);
        }
        a.children.push_back(std::move(c));
        a.children.push_back(std::move(t));
        return a;
    }

    int filter_production(CmpOp op, bool nested) {
        switch (op) {
            case CmpOp::Eq: return nested ? prod::kFEqNested : prod::kFEq;
            case CmpOp::Ne: return nested ? prod::kFNeNested : prod::kFNe;
            case CmpOp::Lt: return nested ? prod::kFLtNested : prod::kFLt;
            case CmpOp::Gt: return nested ? prod::kFGtNested : prod::kFGt;
            case CmpOp::Le: return nested ? prod::kFLeNested : prod::kFLe;
            case CmpOp::Ge: return nested ? prod::kFGeNested : prod::kFGe;
            case CmpOp::Like: return prod::kFLike;
            case CmpOp::NotLike: return prod::kFNotLike;
            case CmpOp::In: return prod::kFIn;
            case CmpOp::NotIn: return prod::kFNotIn;
            case CmpOp::Between: return prod::kFBetween;
            case CmpOp::IsNull:
            case CmpOp::IsNotNull: reject("is_null");
        }
        reject("unsupported_operator");
    }

    SemQlNode convert_leaf(const TableEnv& env, const SqlCondition& cond) {
        if (cond.rhs_column) reject("column_comparison");
        if (cond.in_literal_list) reject("in_literal_list");

        SemQlNode filter;
        filter.kind = ActionKind::Filter;
        filter.children.push_back(make_a(env, cond.lhs));

        if (cond.subquery) {
            if (cond.op == CmpOp::Between) reject("between_subquery");
            filter.production = filter_production(cond.op, true);
            filter.children.push_back(convert_query_to_r(*cond.subquery));
            return filter;
        }
        filter.production = filter_production(cond.op, false);
        if (cond.op == CmpOp::Between) {
            if (cond.literals.size() != 2) reject("between_arity");
            filter.children.push_back(value_node(cond.literals[0]));
            filter.children.push_back(value_node(cond.literals[1]));
            return filter;
        }
        if (cond.op == CmpOp::Like || cond.op == CmpOp::NotLike) {
            if (cond.literals.size() != 1 || !cond.literals[0].is_string) reject("like_operand");
        }
        if (cond.literals.size() != 1) reject("missing_operand");
        filter.children.push_back(value_node(cond.literals[0]));
        return filter;
    }

    // Compilation splits the filter tree back into WHERE and HAVING by the
    // AND-spine: spine leaves place individually by aggregation, OR
    // subtrees place whole by whether any leaf aggregates. The original
    // clause layout must survive that reconstruction.
    SemQlNode convert_cond(const TableEnv& env, const SqlCond& cond, bool having_context,
                           bool and_spine) {
        if (cond.node == SqlCond::Node::Leaf) {
            bool has_agg = cond.leaf.lhs.agg != AggOp::None;
            if (!having_context && has_agg) reject("agg_in_where");
            if (having_context && and_spine && !has_agg) reject("plain_having");
            return convert_leaf(env, cond.leaf);
        }
        SemQlNode filter;
        filter.kind = ActionKind::Filter;
        filter.production = cond.node == SqlCond::Node::And ? prod::kFAnd : prod::kFOr;
        if (cond.node == SqlCond::Node::Or) {
            bool any_agg = or_subtree_has_agg(cond);
            if (!having_context && any_agg) reject("agg_in_where");
            if (having_context && and_spine && !any_agg) reject("plain_having");
        }
        bool child_spine = and_spine && cond.node == SqlCond::Node::And;
        filter.children.push_back(convert_cond(env, *cond.left, having_context, child_spine));
        filter.children.push_back(convert_cond(env, *cond.right, having_context, child_spine));
        return filter;
    }

    static bool or_subtree_has_agg(const SqlCond& cond) {
        if (cond.node == SqlCond::Node::Leaf) return cond.leaf.lhs.agg != AggOp::None;
        return or_subtree_has_agg(*cond.left) || or_subtree_has_agg(*cond.right);
    }

    void collect_mentions(const SemQlNode& node, std::vector<int>& out, bool at_root = true) {
        if (node.kind == ActionKind::T && node.payload >= 0) {
            if (std::find(out.begin(), out.end(), node.payload) == out.end()) {
                out.push_back(node.payload);
            }
        }
        if (node.kind == ActionKind::R && !at_root) return;  // subqueries join on their own
        for (const SemQlNode& c : node.children) collect_mentions(c, out, false);
    }

    void collect_star_nodes(SemQlNode& node, std::vector<SemQlNode*>& stars, bool at_root) {
        if (node.kind == ActionKind::R && !at_root) return;
        if (node.kind == ActionKind::A && node.children[1].payload < 0) {
            stars.push_back(&node);
            return;
        }
        for (SemQlNode& c : node.children) collect_star_nodes(c, stars, false);
    }

    // Pick a table for each '*' so the inferred join plan (with its bridge
    // tables) reproduces the original FROM set as closely as possible.
    void assign_star_tables(SemQlNode& r, const TableEnv& env) {
        std::vector<SemQlNode*> stars;
        collect_star_nodes(r, stars, true);
        if (stars.empty()) return;
        std::set<int> gold(env.from_tables.begin(), env.from_tables.end());
        for (SemQlNode* star : stars) {
            std::vector<int> mentioned;
            collect_mentions(r, mentioned);
            int best_table = env.from_tables.front();
            std::size_t best_cover = 0;
            for (int t : env.from_tables) {
                std::vector<int> trial = mentioned;
                if (std::find(trial.begin(), trial.end(), t) == trial.end()) trial.push_back(t);
                std::size_t cover = 0;
                try {
                    JoinPlan plan = infer_joins(trial, graph);
                    for (int pt : plan.tables) {
                        if (gold.count(pt)) ++cover;
                    }
                } catch (const JoinError&) {
                    continue;
                }
                if (cover > best_cover) {
                    best_cover = cover;
                    best_table = t;
                }
            }
            star->children[1].payload = best_table;
        }
    }

    // The reconstructed join plan must reproduce the original FROM clause:
    // same table set, same ON column pairs. Anything else would execute a
    // different join than the gold query.
    void check_joins(const SemQlNode& r, const TableEnv& env) {
        std::vector<int> mentioned;
        collect_mentions(r, mentioned);
        JoinPlan plan;
        try {
            plan = infer_joins(mentioned, graph);
        } catch (const JoinError&) {
            reject("join_mismatch");
        }
        std::set<int> plan_tables(plan.tables.begin(), plan.tables.end());
        std::set<int> gold_tables(env.from_tables.begin(), env.from_tables.end());
        if (plan_tables != gold_tables) reject("join_mismatch");
        std::set<std::pair<int, int>> plan_pairs;
        for (const JoinStep& step : plan.steps) {
            plan_pairs.emplace(std::min(step.left_column, step.right_column),
                               std::max(step.left_column, step.right_column));
        }
        std::set<std::pair<int, int>> gold_pairs(env.on_pairs.begin(), env.on_pairs.end());
        if (plan_pairs != gold_pairs) reject("join_mismatch");
    }

    // GROUP BY is not represented in the grammar; compilation reconstructs
    // it as "all plain selected columns". The original clause must match
    // that reconstruction or results could diverge.
    void check_group_by(const SqlSelectCore& core, const TableEnv& env,
                        const std::vector<SemQlNode>& select_as, bool order_has_agg) {
        std::set<int> reconstructed;
        bool any_agg = order_has_agg || core.having != nullptr;
        for (const SemQlNode& a : select_as) {
            if (a.production != prod::kANone) {
                any_agg = true;
            } else if (a.children[0].payload != 0) {
                reconstructed.insert(a.children[0].payload);
            }
        }
        bool would_emit = any_agg && !reconstructed.empty();
        if (core.group_by.empty()) {
            if (would_emit) reject("groupby_mismatch");
            return;
        }
        if (!would_emit) reject("groupby_mismatch");
        std::set<int> gold;
        for (const SqlColumnRef& ref : core.group_by) {
            int col = resolve_column(env, ref);
            if (col == 0) reject("groupby_mismatch");
            gold.insert(col);
        }
        if (gold != reconstructed) reject("groupby_mismatch");
    }

    SemQlNode convert_core(const SqlSelectCore& core) {
        if (core.distinct) reject("distinct");
        if (core.offset) reject("limit_offset");
        if (core.select_items.empty() || core.select_items.size() > 5) reject("select_count");
        TableEnv env = build_env(core);

        SemQlNode n;
        n.kind = ActionKind::N;
        n.production = static_cast<int>(core.select_items.size()) - 1;
        for (const SqlColUnit& item : core.select_items) {
            n.children.push_back(make_a(env, item));
        }
        SemQlNode select;
        select.kind = ActionKind::Select;
        select.production = prod::kSelN;
        select.children.push_back(std::move(n));

        std::optional<SemQlNode> filter;
        if (core.where) {
            filter = convert_cond(env, *core.where, false, true);
        }
        if (core.having) {
            SemQlNode having = convert_cond(env, *core.having, true, true);
            if (filter) {
                SemQlNode both;
                both.kind = ActionKind::Filter;
                both.production = prod::kFAnd;
                both.children.push_back(std::move(*filter));
                both.children.push_back(std::move(having));
                filter = std::move(both);
            } else {
                filter = std::move(having);
            }
        }

        std::optional<SemQlNode> order;
        std::optional<SemQlNode> superlative;
        bool order_has_agg = false;
        if (!core.order_by.empty()) {
            if (core.order_by.size() > 1) reject("order_multi_column");
            const SqlOrderItem& item = core.order_by[0];
            SemQlNode a = make_a(env, item.col);
            order_has_agg = item.col.agg != AggOp::None;
            if (core.limit) {
                SemQlNode sup;
                sup.kind = ActionKind::Superlative;
                sup.production = item.desc ? prod::kSupMost : prod::kSupLeast;
                sup.children.push_back(std::move(a));
                sup.children.push_back(value_node(SqlLiteral{false, std::to_string(*core.limit)}));
                superlative = std::move(sup);
            } else {
                SemQlNode ord;
                ord.kind = ActionKind::Order;
                ord.production = item.desc ? prod::kOrderDesc : prod::kOrderAsc;
                ord.children.push_back(std::move(a));
                order = std::move(ord);
            }
        } else if (core.limit) {
            reject("limit_without_order");
        }

        SemQlNode r;
        r.kind = ActionKind::R;
        if (filter && superlative) r.production = prod::kRSelectFilterSup;
        else if (filter && order) r.production = prod::kRSelectFilterOrder;
        else if (filter) r.production = prod::kRSelectFilter;
        else if (superlative) r.production = prod::kRSelectSup;
        else if (order) r.production = prod::kRSelectOrder;
        else r.production = prod::kRSelect;
        r.children.push_back(std::move(select));
        if (filter) r.children.push_back(std::move(*filter));
        if (order) r.children.push_back(std::move(*order));
        if (superlative) r.children.push_back(std::move(*superlative));

        // patch '*' tables toward gold's FROM set, then verify the plan
        assign_star_tables(r, env);
        check_joins(r, env);

        // group-by check needs the final A nodes (stars patched)
        const SemQlNode& n_final = r.children[0].children[0];
        check_group_by(core, env, n_final.children, order_has_agg);
        return r;
    }

    SemQlNode convert_query_to_r(const SqlQuery& q) {
        if (q.set_op != SqlSetOp::None) reject("nested_set_op");
        return convert_core(q.core);
    }

    SemQlTree convert(const SqlQuery& q) {
        SemQlNode z;
        z.kind = ActionKind::Z;
        if (q.set_op == SqlSetOp::None) {
            z.production = prod::kZSingle;
            z.children.push_back(convert_core(q.core));
            return SemQlTree{std::move(z)};
        }
        if (q.union_all) reject("union_all");
        if (q.rhs->set_op != SqlSetOp::None) reject("set_op_chain");
        // SQLite scopes a trailing ORDER BY / LIMIT to the whole compound;
        // per-arm clauses cannot reproduce that
        if (!q.rhs->core.order_by.empty() || q.rhs->core.limit) reject("set_op_order");
        switch (q.set_op) {
            case SqlSetOp::Intersect: z.production = prod::kZIntersect; break;
            case SqlSetOp::Union: z.production = prod::kZUnion; break;
            case SqlSetOp::Except: z.production = prod::kZExcept; break;
            case SqlSetOp::None: break;
        }
        z.children.push_back(convert_core(q.core));
        z.children.push_back(convert_core(q.rhs->core));
        return SemQlTree{std::move(z)};
    }
};

bool looks_like_window_function(const std::string& sql) {
    std::string lowered = to_lower(sql);
    return lowered.find(" over (") != std::string::npos ||
           lowered.find(" over(") != std::string::npos ||
           lowered.find("partition by") != std::string::npos;
}

}  // namespace

ConvertResult sql_to_semql(const std::string& gold_sql, const DatabaseSchema& schema,
                           const SchemaGraph& graph) {
    ConvertResult result;
    SqlQuery query;
    try {
        query = parse_sql(gold_sql);
    } catch (const SqlParseError& e) {
        result.reason = looks_like_window_function(gold_sql)
                            ? "window_function"
                            : std::string("parse_error: ") + e.what();
        return result;
    }
    if (looks_like_window_function(gold_sql)) {
        result.reason = "window_function";
        return result;
    }
    Converter converter{schema, graph, {}};
    try {
        SemQlTree tree = converter.convert(query);
        result.tree = std::move(tree);
        result.literals = std::move(converter.literals);
    } catch (const Rejected& r) {
        result.reason = r.reason;
    }
    return result;
}

}  // namespace nl2sql
