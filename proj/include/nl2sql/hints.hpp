#pragma once

#include <string>
#include <vector>

#include "nl2sql/schema.hpp"
#include "nl2sql/util.hpp"
#include "nl2sql/value_index.hpp"

namespace nl2sql {

struct ValueCandidate;

enum class TokenHint { None, Table, Column, Value, Aggregation, Superlative };

std::string token_hint_name(TokenHint hint);

struct TokenAnnotation {
    TokenHint hint = TokenHint::None;
    int table_index = -1;   // Table hint target
    int column_index = -1;  // Column hint target
    int value_table = -1;   // first index hit for Value hints
    int value_column = -1;
    std::string matched_value;  // raw stored value behind a Value hint
    int group = -1;             // tokens sharing one multi-token match share a group id
};

struct QuestionAnnotation {
    std::vector<Token> tokens;
    std::vector<TokenAnnotation> tags;  // parallel to tokens
};

enum class SchemaHint { None, Exact, Partial, ValueCandidateMatch };

std::string schema_hint_name(SchemaHint hint);

struct SchemaAnnotation {
    std::vector<SchemaHint> table_hints;   // one per table
    std::vector<SchemaHint> column_hints;  // one per column, [0] for "*" stays None
};

// Classifies question tokens against schema identifiers (stemmed exact
// matching, longest contiguous match wins, earliest position breaks ties)
// and database content (index lookups). Aggregation/superlative classes
// come from fixed keyword lexicons; a token in both lexicons is classed
// superlative.
QuestionAnnotation annotate_question(const std::string& question, const DatabaseSchema& schema,
                                     const ValueIndex& index);

// The inverse view: per-schema-item match classes against the question,
// with precedence Exact > ValueCandidateMatch > Partial.
SchemaAnnotation annotate_schema(const std::string& question, const DatabaseSchema& schema,
                                 const std::vector<ValueCandidate>& validated);

}  // namespace nl2sql
