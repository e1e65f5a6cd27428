#pragma once

#include <array>
#include <chrono>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "nl2sql/schema.hpp"
#include "nl2sql/sqlite_db.hpp"

namespace nl2sql {

struct ExecutionOutcome {
    std::vector<Row> rows;
    int columns = 0;
    bool ordered = false;  // gold carries a top-level ORDER BY
    std::optional<std::string> error;
    std::chrono::microseconds elapsed{0};

    bool ok() const { return !error.has_value(); }
};

struct ExecuteConfig {
    std::chrono::milliseconds timeout{10000};
    std::size_t row_cap = 100000;
};

// Runs SQL read-only with a wall-clock timeout and a row cap. SQL errors,
// timeouts and cap overflows all come back as error outcomes, never as
// exceptions or process aborts.
ExecutionOutcome execute(SqliteDb& db, const std::string& sql, const ExecuteConfig& config = {});

// Execution equivalence: exact row-sequence equality when the gold query is
// ordered, multiset equality otherwise. Cells compare with numeric coercion
// (integer 20 equals real 20.0 within 1e-9 relative tolerance), exact text
// and exact NULL equality. False when either side errored.
bool results_equivalent(const ExecutionOutcome& pred, const ExecutionOutcome& gold);

enum class Difficulty { Easy, Medium, Hard, ExtraHard };

std::string difficulty_name(Difficulty d);

// Component-count bucketing over the parsed gold SQL, following the
// benchmark's published hardness procedure. Unparseable statements bucket
// as ExtraHard (conservative).
Difficulty classify_difficulty(const std::string& gold_sql);

struct StageTimings {
    double pre_processing_ms = 0;
    double value_lookup_ms = 0;
    double synthesis_ms = 0;
    double post_processing_ms = 0;
    double query_execution_ms = 0;

    double total() const {
        return pre_processing_ms + value_lookup_ms + synthesis_ms + post_processing_ms +
               query_execution_ms;
    }
};

struct SampleVerdict {
    std::size_t sample_index = 0;
    std::string db_id;
    Difficulty difficulty = Difficulty::Easy;
    bool equivalent = false;
    std::string predicted_sql;
    std::string failure;  // empty when the pipeline produced a query
    StageTimings timings;
};

struct StageStats {
    double mean_ms = 0;
    double std_ms = 0;
};

struct EvalReport {
    std::size_t total = 0;
    std::size_t equivalent = 0;
    double overall_accuracy = 0;
    // per difficulty: {count, equivalent}
    std::array<std::pair<std::size_t, std::size_t>, 4> by_difficulty{};
    StageStats pre_processing, value_lookup, synthesis, post_processing, query_execution;
    std::vector<SampleVerdict> samples;

    std::string to_json() const;
    std::string to_table() const;
    std::string to_csv() const;
};

// One translation attempt: fills predicted_sql / failure / stage timings.
// Must not throw; per-sample problems become verdict fields.
using SystemUnderTest = std::function<void(const SampleRecord&, SampleVerdict&)>;

struct EvalConfig {
    ExecuteConfig execution;
    int workers = 1;
    bool relax_column_order = false;  // reserved; positional comparison default
};

// Executes prediction and gold per sample, scores equivalence, buckets by
// difficulty and aggregates stage timing statistics. Per-sample failures
// are recorded, never halt the run.
EvalReport evaluate_set(const std::vector<SampleRecord>& samples, const SystemUnderTest& system,
                        const std::function<SqliteDb(const std::string& db_id)>& open_db,
                        const EvalConfig& config = {});

}  // namespace nl2sql
