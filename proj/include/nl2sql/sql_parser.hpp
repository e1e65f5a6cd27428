#pragma once

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace nl2sql {

enum class AggOp { None, Max, Min, Count, Sum, Avg };
enum class CmpOp { Eq, Ne, Lt, Gt, Le, Ge, Between, Like, NotLike, In, NotIn, IsNull, IsNotNull };
enum class SqlSetOp { None, Intersect, Union, Except };

std::string agg_op_name(AggOp op);

struct SqlColumnRef {
    std::string table;   // alias or table name; empty when unqualified
    std::string column;  // "*" allowed
};

struct SqlColUnit {
    AggOp agg = AggOp::None;
    bool distinct = false;
    SqlColumnRef col;
};

struct SqlLiteral {
    bool is_string = false;
    std::string text;  // unquoted content for strings, raw digits otherwise
};

struct SqlQuery;

struct SqlCondition {
    SqlColUnit lhs;
    CmpOp op = CmpOp::Eq;
    std::vector<SqlLiteral> literals;          // 1, 2 for BETWEEN, n for IN lists
    std::unique_ptr<SqlQuery> subquery;        // nested right-hand side
    std::optional<SqlColumnRef> rhs_column;    // column-to-column comparison
    bool in_literal_list = false;
};

// Boolean condition tree; AND binds tighter than OR.
struct SqlCond {
    enum class Node { Leaf, And, Or };
    Node node = Node::Leaf;
    SqlCondition leaf;
    std::unique_ptr<SqlCond> left;
    std::unique_ptr<SqlCond> right;
};

struct SqlTableUnit {
    std::string table;
    std::string alias;
    std::unique_ptr<SqlQuery> subquery;  // FROM (SELECT ...)
};

struct SqlJoin {
    SqlTableUnit table;
    bool left_outer = false;
    std::vector<std::pair<SqlColumnRef, SqlColumnRef>> on;  // empty = bare join
};

struct SqlOrderItem {
    SqlColUnit col;
    bool desc = false;
};

struct SqlSelectCore {
    bool distinct = false;
    std::vector<SqlColUnit> select_items;
    SqlTableUnit from;
    std::vector<SqlJoin> joins;
    std::unique_ptr<SqlCond> where;
    std::vector<SqlColumnRef> group_by;
    std::unique_ptr<SqlCond> having;
    std::vector<SqlOrderItem> order_by;
    std::optional<long long> limit;
    std::optional<long long> offset;
};

struct SqlQuery {
    SqlSelectCore core;
    SqlSetOp set_op = SqlSetOp::None;
    bool union_all = false;
    std::unique_ptr<SqlQuery> rhs;
};

struct SqlParseError : std::runtime_error {
    explicit SqlParseError(const std::string& what) : std::runtime_error(what) {}
};

// Parses one statement of the SQL subset used by the benchmark files
// (SELECT cores with joins, nesting in conditions, set operators).
// Double-quoted tokens are identifiers in name positions and string
// literals in value positions. Throws SqlParseError.
SqlQuery parse_sql(const std::string& sql);

struct SqlToken {
    enum class Type { Ident, QuotedIdent, String, DoubleQuoted, Number, Symbol, End };
    Type type = Type::End;
    std::string text;
    std::size_t offset = 0;
};

std::vector<SqlToken> tokenize_sql(const std::string& sql);

// Literals in textual clause order (WHERE, HAVING, LIMIT when included),
// descending into subqueries where they occur.
std::vector<SqlLiteral> collect_literals(const SqlQuery& query, bool include_limit);

// Deep copy helpers (the AST holds unique_ptrs).
SqlQuery clone_query(const SqlQuery& query);

}  // namespace nl2sql
