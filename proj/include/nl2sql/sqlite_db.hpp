#pragma once

#include <chrono>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

struct sqlite3;

namespace nl2sql {

// NULL, INTEGER, REAL, TEXT (blobs are surfaced as text bytes).
using CellValue = std::variant<std::monostate, std::int64_t, double, std::string>;

using Row = std::vector<CellValue>;

std::string cell_to_string(const CellValue& cell);

struct QueryResult {
    std::vector<Row> rows;
    int column_count = 0;
    std::optional<std::string> error;
    bool truncated = false;  // row cap hit
    std::chrono::microseconds elapsed{0};

    bool ok() const { return !error.has_value(); }
};

// Thin RAII wrapper over one sqlite3 connection. Each worker owns its own
// connection; the handle is not shared across threads.
class SqliteDb {
public:
    static SqliteDb open_read_only(const std::string& path);
    // Used by fixture builders and tests only; translation paths stay read-only.
    static SqliteDb open_create(const std::string& path);

    SqliteDb(SqliteDb&&) noexcept;
    SqliteDb& operator=(SqliteDb&&) noexcept;
    SqliteDb(const SqliteDb&) = delete;
    SqliteDb& operator=(const SqliteDb&) = delete;
    ~SqliteDb();

    // Runs a statement, throwing on error. For DDL/DML in fixtures.
    void exec(const std::string& sql);

    // Runs a query and materializes all rows; throws on error.
    std::vector<Row> query(const std::string& sql);

    // Single-value parameterized probe: SELECT 1 FROM t WHERE c = ? LIMIT 1.
    bool probe_equal(const std::string& table, const std::string& column,
                     const std::string& value);
    bool probe_like(const std::string& table, const std::string& column,
                    const std::string& pattern);

    // Runs a query with a wall-clock timeout and a row cap. Errors, timeouts
    // and cap overflows are reported in the result, never thrown.
    QueryResult query_limited(const std::string& sql, std::chrono::milliseconds timeout,
                              std::size_t row_cap = 100000);

    std::vector<std::string> table_names();

    const std::string& path() const { return path_; }
    sqlite3* raw() { return db_; }

private:
    SqliteDb(sqlite3* db, std::string path);

    sqlite3* db_ = nullptr;
    std::string path_;
};

// Quotes an identifier for SQLite when it is not a plain identifier.
std::string quote_identifier(const std::string& name);

// Single-quoted SQL string literal with internal quote doubling.
std::string quote_string_literal(const std::string& value);

}  // namespace nl2sql
