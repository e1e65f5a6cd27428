#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nl2sql/schema.hpp"
#include "nl2sql/tree.hpp"

namespace nl2sql {

struct GoldLiteral {
    std::string surface;  // unquoted text or raw digits
    bool is_string = false;
};

// Conversion outcome. On success the tree's V payloads index into
// `literals` (deduplicated by surface, order of first appearance); these
// double as the ground-truth value options for light-mode synthesis. On
// failure `reason` carries a stable reason code.
struct ConvertResult {
    std::optional<SemQlTree> tree;
    std::string reason;
    std::vector<GoldLiteral> literals;

    bool ok() const { return tree.has_value(); }
};

// Converts a gold SQL string into a SemQL tree whose compilation is
// execution-equivalent to the input. Constructs the grammar cannot express
// (or whose deterministic reconstruction would diverge from the original)
// come back as reason-coded rejections rather than lossy trees.
ConvertResult sql_to_semql(const std::string& gold_sql, const DatabaseSchema& schema,
                           const SchemaGraph& graph);

}  // namespace nl2sql
