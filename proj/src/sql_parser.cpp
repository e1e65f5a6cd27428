#include "nl2sql/sql_parser.hpp"

#include <cctype>

#include "nl2sql/util.hpp"

namespace nl2sql {

namespace {

bool ident_start(char c) {
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}
bool ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

}  // namespace

std::string agg_op_name(AggOp op) {
    switch (op) {
        case AggOp::None: return "none";
        case AggOp::Max: return "max";
        case AggOp::Min: return "min";
        case AggOp::Count: return "count";
        case AggOp::Sum: return "sum";
        case AggOp::Avg: return "avg";
    }
    return "none";
}

std::vector<SqlToken> tokenize_sql(const std::string& sql) {
    using Type = SqlToken::Type;
    std::vector<SqlToken> tokens;
    std::size_t i = 0;
    const std::size_t n = sql.size();
    while (i < n) {
        char c = sql[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        if (c == '\'' || c == '"' || c == '`') {
            char quote = c;
            std::size_t begin = i++;
            std::string text;
            bool closed = false;
            while (i < n) {
                if (sql[i] == quote) {
                    if (i + 1 < n && sql[i + 1] == quote) {  // doubled quote escape
                        text.push_back(quote);
                        i += 2;
                        continue;
                    }
                    ++i;
                    closed = true;
                    break;
                }
                text.push_back(sql[i++]);
            }
            if (!closed) throw SqlParseError("unterminated quote at offset " + std::to_string(begin));
            Type type = quote == '\'' ? Type::String
                        : quote == '"' ? Type::DoubleQuoted
                                       : Type::QuotedIdent;
            tokens.push_back(SqlToken{type, text, begin});
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) ||
            (c == '.' && i + 1 < n && std::isdigit(static_cast<unsigned char>(sql[i + 1])))) {
            std::size_t begin = i;
            bool dot = false;
            while (i < n && (std::isdigit(static_cast<unsigned char>(sql[i])) ||
                             (sql[i] == '.' && !dot))) {
                if (sql[i] == '.') dot = true;
                ++i;
            }
            tokens.push_back(SqlToken{Type::Number, sql.substr(begin, i - begin), begin});
            continue;
        }
        if (ident_start(c)) {
            std::size_t begin = i;
            while (i < n && ident_char(sql[i])) ++i;
            tokens.push_back(SqlToken{Type::Ident, sql.substr(begin, i - begin), begin});
            continue;
        }
        // multi-char operators first
        if (c == '!' && i + 1 < n && sql[i + 1] == '=') {
            tokens.push_back(SqlToken{Type::Symbol, "!=", i});
            i += 2;
            continue;
        }
        if (c == '<') {
            if (i + 1 < n && sql[i + 1] == '=') {
                tokens.push_back(SqlToken{Type::Symbol, "<=", i});
                i += 2;
            } else if (i + 1 < n && sql[i + 1] == '>') {
                tokens.push_back(SqlToken{Type::Symbol, "!=", i});
                i += 2;
            } else {
                tokens.push_back(SqlToken{Type::Symbol, "<", i});
                ++i;
            }
            continue;
        }
        if (c == '>') {
            if (i + 1 < n && sql[i + 1] == '=') {
                tokens.push_back(SqlToken{Type::Symbol, ">=", i});
                i += 2;
            } else {
                tokens.push_back(SqlToken{Type::Symbol, ">", i});
                ++i;
            }
            continue;
        }
        static const std::string kSingles = "()*,.=;+-/";
        if (kSingles.find(c) != std::string::npos) {
            tokens.push_back(SqlToken{Type::Symbol, std::string(1, c), i});
            ++i;
            continue;
        }
        throw SqlParseError("unexpected character '" + std::string(1, c) + "' at offset " +
                            std::to_string(i));
    }
    tokens.push_back(SqlToken{Type::End, "", n});
    return tokens;
}

namespace {

class Parser {
public:
    explicit Parser(std::vector<SqlToken> tokens) : tokens_(std::move(tokens)) {}

    SqlQuery parse() {
        SqlQuery query = parse_query();
        if (!at_end()) fail("trailing tokens after statement");
        return query;
    }

private:
    std::vector<SqlToken> tokens_;
    std::size_t pos_ = 0;

    const SqlToken& peek(std::size_t ahead = 0) const {
        std::size_t p = pos_ + ahead;
        return p < tokens_.size() ? tokens_[p] : tokens_.back();
    }
    const SqlToken& advance() { return tokens_[pos_ < tokens_.size() - 1 ? pos_++ : pos_]; }
    bool at_end() const {
        return peek().type == SqlToken::Type::End ||
               (peek().type == SqlToken::Type::Symbol && peek().text == ";" &&
                peek(1).type == SqlToken::Type::End);
    }

    [[noreturn]] void fail(const std::string& msg) const {
        throw SqlParseError(msg + " (near \"" + peek().text + "\" at offset " +
                            std::to_string(peek().offset) + ")");
    }

    bool is_keyword(const SqlToken& t, const char* kw) const {
        return t.type == SqlToken::Type::Ident && to_lower(t.text) == kw;
    }
    bool accept_keyword(const char* kw) {
        if (is_keyword(peek(), kw)) {
            advance();
            return true;
        }
        return false;
    }
    void expect_keyword(const char* kw) {
        if (!accept_keyword(kw)) fail(std::string("expected ") + kw);
    }
    bool accept_symbol(const char* sym) {
        if (peek().type == SqlToken::Type::Symbol && peek().text == sym) {
            advance();
            return true;
        }
        return false;
    }
    void expect_symbol(const char* sym) {
        if (!accept_symbol(sym)) fail(std::string("expected '") + sym + "'");
    }

    static std::optional<AggOp> agg_from_name(const std::string& lowered) {
        if (lowered == "max") return AggOp::Max;
        if (lowered == "min") return AggOp::Min;
        if (lowered == "count") return AggOp::Count;
        if (lowered == "sum") return AggOp::Sum;
        if (lowered == "avg") return AggOp::Avg;
        return std::nullopt;
    }

    bool next_is_reserved() const {
        if (peek().type != SqlToken::Type::Ident) return true;
        static const char* kReserved[] = {"from",  "where", "group",     "order", "having",
                                          "limit", "join",  "inner",     "left",  "on",
                                          "and",   "or",    "intersect", "union", "except",
                                          "as",    "asc",   "desc",      "not",   "in",
                                          "like",  "between", "by",      "is",    "distinct"};
        std::string lowered = to_lower(peek().text);
        for (const char* kw : kReserved) {
            if (lowered == kw) return true;
        }
        return false;
    }

    std::string parse_name() {
        const SqlToken& t = peek();
        if (t.type == SqlToken::Type::Ident || t.type == SqlToken::Type::QuotedIdent ||
            t.type == SqlToken::Type::DoubleQuoted) {
            return advance().text;
        }
        fail("expected identifier");
    }

    SqlColumnRef parse_column_ref() {
        SqlColumnRef ref;
        if (accept_symbol("*")) {
            ref.column = "*";
            return ref;
        }
        std::string first = parse_name();
        if (accept_symbol(".")) {
            ref.table = first;
            if (accept_symbol("*")) {
                ref.column = "*";
            } else {
                ref.column = parse_name();
            }
        } else {
            ref.column = first;
        }
        return ref;
    }

    SqlColUnit parse_col_unit() {
        SqlColUnit unit;
        const SqlToken& t = peek();
        if (t.type == SqlToken::Type::Ident) {
            auto agg = agg_from_name(to_lower(t.text));
            if (agg && peek(1).type == SqlToken::Type::Symbol && peek(1).text == "(") {
                advance();
                advance();
                unit.agg = *agg;
                if (accept_keyword("distinct")) unit.distinct = true;
                unit.col = parse_column_ref();
                expect_symbol(")");
                return unit;
            }
        }
        unit.col = parse_column_ref();
        return unit;
    }

    SqlLiteral parse_literal() {
        const SqlToken& t = peek();
        if (t.type == SqlToken::Type::String || t.type == SqlToken::Type::DoubleQuoted) {
            return SqlLiteral{true, advance().text};
        }
        if (t.type == SqlToken::Type::Number) {
            return SqlLiteral{false, advance().text};
        }
        if (t.type == SqlToken::Type::Symbol && (t.text == "-" || t.text == "+")) {
            std::string sign = advance().text;
            if (peek().type != SqlToken::Type::Number) fail("expected number after sign");
            return SqlLiteral{false, (sign == "-" ? "-" : "") + advance().text};
        }
        fail("expected literal value");
    }

    bool next_starts_subquery() const {
        return peek().type == SqlToken::Type::Symbol && peek().text == "(" &&
               is_keyword(peek(1), "select");
    }

    std::unique_ptr<SqlCond> make_leaf(SqlCondition cond) {
        auto node = std::make_unique<SqlCond>();
        node->node = SqlCond::Node::Leaf;
        node->leaf = std::move(cond);
        return node;
    }

    std::unique_ptr<SqlCond> parse_condition_primary() {
        if (peek().type == SqlToken::Type::Symbol && peek().text == "(" && !next_starts_subquery()) {
            advance();
            auto inner = parse_or_condition();
            expect_symbol(")");
            return inner;
        }
        SqlCondition cond;
        cond.lhs = parse_col_unit();
        bool negated = accept_keyword("not");
        if (accept_keyword("between")) {
            cond.op = CmpOp::Between;
            cond.literals.push_back(parse_literal());
            expect_keyword("and");
            cond.literals.push_back(parse_literal());
            return make_leaf(std::move(cond));
        }
        if (accept_keyword("like")) {
            cond.op = negated ? CmpOp::NotLike : CmpOp::Like;
            cond.literals.push_back(parse_literal());
            return make_leaf(std::move(cond));
        }
        if (accept_keyword("in")) {
            cond.op = negated ? CmpOp::NotIn : CmpOp::In;
            if (next_starts_subquery()) {
                advance();
                cond.subquery = std::make_unique<SqlQuery>(parse_query());
                expect_symbol(")");
            } else {
                expect_symbol("(");
                cond.in_literal_list = true;
                cond.literals.push_back(parse_literal());
                while (accept_symbol(",")) cond.literals.push_back(parse_literal());
                expect_symbol(")");
            }
            return make_leaf(std::move(cond));
        }
        if (accept_keyword("is")) {
            bool is_not = accept_keyword("not");
            expect_keyword("null");
            cond.op = is_not ? CmpOp::IsNotNull : CmpOp::IsNull;
            return make_leaf(std::move(cond));
        }
        if (negated) fail("expected BETWEEN, LIKE or IN after NOT");
        const SqlToken& t = peek();
        if (t.type != SqlToken::Type::Symbol) fail("expected comparison operator");
        std::string sym = advance().text;
        if (sym == "=") cond.op = CmpOp::Eq;
        else if (sym == "!=") cond.op = CmpOp::Ne;
        else if (sym == "<") cond.op = CmpOp::Lt;
        else if (sym == ">") cond.op = CmpOp::Gt;
        else if (sym == "<=") cond.op = CmpOp::Le;
        else if (sym == ">=") cond.op = CmpOp::Ge;
        else fail("unsupported comparison operator " + sym);

        if (next_starts_subquery()) {
            advance();
            cond.subquery = std::make_unique<SqlQuery>(parse_query());
            expect_symbol(")");
        } else if (peek().type == SqlToken::Type::Ident ||
                   peek().type == SqlToken::Type::QuotedIdent) {
            // double-quoted tokens act as string literals in value position
            cond.rhs_column = parse_column_ref();
        } else {
            cond.literals.push_back(parse_literal());
        }
        return make_leaf(std::move(cond));
    }

    std::unique_ptr<SqlCond> parse_and_condition() {
        auto left = parse_condition_primary();
        while (accept_keyword("and")) {
            auto node = std::make_unique<SqlCond>();
            node->node = SqlCond::Node::And;
            node->left = std::move(left);
            node->right = parse_condition_primary();
            left = std::move(node);
        }
        return left;
    }

    std::unique_ptr<SqlCond> parse_or_condition() {
        auto left = parse_and_condition();
        while (accept_keyword("or")) {
            auto node = std::make_unique<SqlCond>();
            node->node = SqlCond::Node::Or;
            node->left = std::move(left);
            node->right = parse_or_condition();
            return node;
        }
        return left;
    }

    SqlTableUnit parse_table_unit() {
        SqlTableUnit unit;
        if (next_starts_subquery()) {
            advance();
            unit.subquery = std::make_unique<SqlQuery>(parse_query());
            expect_symbol(")");
        } else {
            unit.table = parse_name();
        }
        if (accept_keyword("as")) {
            unit.alias = parse_name();
        } else if (!next_is_reserved() && peek().type == SqlToken::Type::Ident) {
            unit.alias = advance().text;
        }
        return unit;
    }

    SqlSelectCore parse_select_core() {
        SqlSelectCore core;
        expect_keyword("select");
        if (accept_keyword("distinct")) core.distinct = true;
        core.select_items.push_back(parse_col_unit());
        while (accept_symbol(",")) core.select_items.push_back(parse_col_unit());
        expect_keyword("from");
        core.from = parse_table_unit();
        while (true) {
            bool left = false;
            if (is_keyword(peek(), "left")) {
                left = true;
                advance();
                accept_keyword("outer");
                expect_keyword("join");
            } else if (accept_keyword("inner")) {
                expect_keyword("join");
            } else if (is_keyword(peek(), "join")) {
                advance();
            } else if (accept_symbol(",")) {
                // comma join, no ON clause
            } else {
                break;
            }
            SqlJoin join;
            join.left_outer = left;
            join.table = parse_table_unit();
            if (accept_keyword("on")) {
                do {
                    SqlColumnRef lhs = parse_column_ref();
                    expect_symbol("=");
                    SqlColumnRef rhs = parse_column_ref();
                    join.on.emplace_back(std::move(lhs), std::move(rhs));
                } while (accept_keyword("and"));
            }
            core.joins.push_back(std::move(join));
        }
        if (accept_keyword("where")) core.where = parse_or_condition();
        if (accept_keyword("group")) {
            expect_keyword("by");
            core.group_by.push_back(parse_column_ref());
            while (accept_symbol(",")) core.group_by.push_back(parse_column_ref());
        }
        if (accept_keyword("having")) core.having = parse_or_condition();
        if (accept_keyword("order")) {
            expect_keyword("by");
            do {
                SqlOrderItem item;
                item.col = parse_col_unit();
                if (accept_keyword("desc")) item.desc = true;
                else if (accept_keyword("asc")) item.desc = false;
                core.order_by.push_back(std::move(item));
            } while (accept_symbol(","));
        }
        if (accept_keyword("limit")) {
            if (peek().type != SqlToken::Type::Number) fail("expected LIMIT count");
            core.limit = std::strtoll(advance().text.c_str(), nullptr, 10);
            if (accept_keyword("offset")) {
                if (peek().type != SqlToken::Type::Number) fail("expected OFFSET count");
                core.offset = std::strtoll(advance().text.c_str(), nullptr, 10);
            }
        }
        return core;
    }

    SqlQuery parse_query() {
        SqlQuery query;
        query.core = parse_select_core();
        if (accept_keyword("intersect")) {
            query.set_op = SqlSetOp::Intersect;
        } else if (accept_keyword("union")) {
            query.set_op = SqlSetOp::Union;
            if (accept_keyword("all")) query.union_all = true;
        } else if (accept_keyword("except")) {
            query.set_op = SqlSetOp::Except;
        } else {
            return query;
        }
        query.rhs = std::make_unique<SqlQuery>(parse_query());
        return query;
    }
};

void collect_cond_literals(const SqlCond* cond, bool include_limit,
                           std::vector<SqlLiteral>& out);

void collect_query_literals(const SqlQuery& query, bool include_limit,
                            std::vector<SqlLiteral>& out) {
    const SqlSelectCore& core = query.core;
    if (core.from.subquery) collect_query_literals(*core.from.subquery, include_limit, out);
    for (const SqlJoin& join : core.joins) {
        if (join.table.subquery) collect_query_literals(*join.table.subquery, include_limit, out);
    }
    collect_cond_literals(core.where.get(), include_limit, out);
    collect_cond_literals(core.having.get(), include_limit, out);
    if (include_limit && core.limit) {
        out.push_back(SqlLiteral{false, std::to_string(*core.limit)});
    }
    if (query.rhs) collect_query_literals(*query.rhs, include_limit, out);
}

void collect_cond_literals(const SqlCond* cond, bool include_limit,
                           std::vector<SqlLiteral>& out) {
    if (!cond) return;
    if (cond->node == SqlCond::Node::Leaf) {
        for (const SqlLiteral& lit : cond->leaf.literals) out.push_back(lit);
        if (cond->leaf.subquery) collect_query_literals(*cond->leaf.subquery, include_limit, out);
        return;
    }
    collect_cond_literals(cond->left.get(), include_limit, out);
    collect_cond_literals(cond->right.get(), include_limit, out);
}

std::unique_ptr<SqlCond> clone_cond(const SqlCond* cond);

SqlTableUnit clone_table_unit(const SqlTableUnit& unit) {
    SqlTableUnit out;
    out.table = unit.table;
    out.alias = unit.alias;
    if (unit.subquery) out.subquery = std::make_unique<SqlQuery>(clone_query(*unit.subquery));
    return out;
}

SqlSelectCore clone_core(const SqlSelectCore& core) {
    SqlSelectCore out;
    out.distinct = core.distinct;
    out.select_items = core.select_items;
    out.from = clone_table_unit(core.from);
    for (const SqlJoin& join : core.joins) {
        SqlJoin j;
        j.left_outer = join.left_outer;
        j.table = clone_table_unit(join.table);
        j.on = join.on;
        out.joins.push_back(std::move(j));
    }
    out.where = clone_cond(core.where.get());
    out.group_by = core.group_by;
    out.having = clone_cond(core.having.get());
    out.order_by = core.order_by;
    out.limit = core.limit;
    out.offset = core.offset;
    return out;
}

std::unique_ptr<SqlCond> clone_cond(const SqlCond* cond) {
    if (!cond) return nullptr;
    auto out = std::make_unique<SqlCond>();
    out->node = cond->node;
    if (cond->node == SqlCond::Node::Leaf) {
        out->leaf.lhs = cond->leaf.lhs;
        out->leaf.op = cond->leaf.op;
        out->leaf.literals = cond->leaf.literals;
        out->leaf.rhs_column = cond->leaf.rhs_column;
        out->leaf.in_literal_list = cond->leaf.in_literal_list;
        if (cond->leaf.subquery) {
            out->leaf.subquery = std::make_unique<SqlQuery>(clone_query(*cond->leaf.subquery));
        }
        return out;
    }
    out->left = clone_cond(cond->left.get());
    out->right = clone_cond(cond->right.get());
    return out;
}

}  // namespace

SqlQuery parse_sql(const std::string& sql) {
    Parser parser(tokenize_sql(sql));
    return parser.parse();
}

std::vector<SqlLiteral> collect_literals(const SqlQuery& query, bool include_limit) {
    std::vector<SqlLiteral> out;
    collect_query_literals(query, include_limit, out);
    return out;
}

SqlQuery clone_query(const SqlQuery& query) {
    SqlQuery out;
    out.core = clone_core(query.core);
    out.set_op = query.set_op;
    out.union_all = query.union_all;
    if (query.rhs) out.rhs = std::make_unique<SqlQuery>(clone_query(*query.rhs));
    return out;
}

}  // namespace nl2sql
