#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "nl2sql/schema.hpp"
#include "nl2sql/tree.hpp"
#include "nl2sql/values.hpp"

namespace nl2sql {

struct JoinStep {
    int left_table = -1;  // already in the plan
    int right_table = -1;
    int left_column = -1;
    int right_column = -1;
};

// Ordered join plan: tables[0] seeds FROM, steps[i] joins tables[i + 1]
// with an explicit ON column pair taken from the schema graph.
struct JoinPlan {
    std::vector<int> tables;
    std::vector<JoinStep> steps;

    bool contains(int table) const;
};

struct JoinError : std::runtime_error {
    explicit JoinError(const std::string& what) : std::runtime_error(what) {}
};

// Shortest path for two mentioned tables, nearest-terminal Steiner
// heuristic for three or more; bridge tables appear automatically. Throws
// JoinError naming the first unreachable table.
JoinPlan infer_joins(const std::vector<int>& mentioned, const SchemaGraph& graph);

struct CompileError : std::runtime_error {
    explicit CompileError(const std::string& what) : std::runtime_error(what) {}
};

struct CompiledQuery {
    std::string sql;
    std::vector<std::string> literals;  // formatted literals in emission order
    std::size_t tree_hash = 0;
};

// Lowers a complete tree to executable SQL (SQLite dialect). Every V
// payload must resolve in the candidate set.
CompiledQuery compile(const SemQlTree& tree, const DatabaseSchema& schema,
                      const SchemaGraph& graph, const CandidateSet& candidates);

// Type-aware literal formatting. filter_production < 0 means a non-filter
// position (ORDER/LIMIT). Aggregated comparisons are numeric regardless of
// the column type; LIKE patterns receive wildcards per the candidate's cue
// unless the surface is already wildcarded.
std::string format_value(const ValueCandidate& candidate, const ColumnDef& column,
                         int filter_production, bool aggregated = false);

// Number of JOIN clauses without an ON restriction; a compiled query must
// always lint to zero.
int count_bare_joins(const std::string& sql);

}  // namespace nl2sql
