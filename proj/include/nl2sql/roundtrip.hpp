#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "nl2sql/evaluator.hpp"
#include "nl2sql/schema.hpp"
#include "nl2sql/sqlite_db.hpp"

namespace nl2sql {

// Gold SQL -> tree -> SQL -> execution audit for one dataset.
struct RoundtripOutcome {
    std::size_t sample_index = 0;
    std::string db_id;
    bool accepted = false;     // converter produced a tree
    std::string reason;        // rejection reason or execution failure
    bool equivalent = false;   // compiled query matched gold results
    std::string compiled_sql;
};

struct RoundtripReport {
    std::vector<RoundtripOutcome> outcomes;
    std::size_t accepted = 0;
    std::size_t equivalent = 0;
    std::map<std::string, std::size_t> rejection_reasons;

    double acceptance_rate() const {
        return outcomes.empty() ? 0.0
                                : static_cast<double>(accepted) /
                                      static_cast<double>(outcomes.size());
    }
    std::string to_json() const;
};

struct RoundtripConfig {
    ExecuteConfig execution;
    bool fail_fast = false;  // stop at the first accepted-but-inequivalent sample
};

// Converts each gold query, compiles the tree back to SQL with the gold
// literals as candidates, executes both statements and compares results.
// Every accepted sample must come back equivalent; anything else is a
// converter or compiler defect.
RoundtripReport roundtrip_audit(
    const std::vector<SampleRecord>& samples,
    const std::function<const DatabaseSchema*(const std::string& db_id)>& schema_of,
    const std::function<SqliteDb(const std::string& db_id)>& open_db,
    const RoundtripConfig& config = {});

}  // namespace nl2sql
