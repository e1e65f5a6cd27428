#include "nl2sql/sqlite_db.hpp"

#include <sqlite3.h>

#include <cctype>
#include <stdexcept>
#include <unordered_set>

namespace nl2sql {

namespace {

CellValue column_value(sqlite3_stmt* stmt, int col) {
    switch (sqlite3_column_type(stmt, col)) {
        case SQLITE_NULL:
            return std::monostate{};
        case SQLITE_INTEGER:
            return static_cast<std::int64_t>(sqlite3_column_int64(stmt, col));
        case SQLITE_FLOAT:
            return sqlite3_column_double(stmt, col);
        default: {
            const unsigned char* text = sqlite3_column_text(stmt, col);
            int len = sqlite3_column_bytes(stmt, col);
            return std::string(reinterpret_cast<const char*>(text), static_cast<std::size_t>(len));
        }
    }
}

struct Deadline {
    std::chrono::steady_clock::time_point at;
};

int progress_callback(void* ctx) {
    auto* deadline = static_cast<Deadline*>(ctx);
    return std::chrono::steady_clock::now() >= deadline->at ? 1 : 0;
}

}  // namespace

std::string cell_to_string(const CellValue& cell) {
    if (std::holds_alternative<std::monostate>(cell)) return "NULL";
    if (const auto* i = std::get_if<std::int64_t>(&cell)) return std::to_string(*i);
    if (const auto* d = std::get_if<double>(&cell)) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.12g", *d);
        return buf;
    }
    return std::get<std::string>(cell);
}

SqliteDb::SqliteDb(sqlite3* db, std::string path) : db_(db), path_(std::move(path)) {}

SqliteDb::SqliteDb(SqliteDb&& other) noexcept : db_(other.db_), path_(std::move(other.path_)) {
    other.db_ = nullptr;
}

SqliteDb& SqliteDb::operator=(SqliteDb&& other) noexcept {
    if (this != &other) {
        if (db_) sqlite3_close_v2(db_);
        db_ = other.db_;
        path_ = std::move(other.path_);
        other.db_ = nullptr;
    }
    return *this;
}

SqliteDb::~SqliteDb() {
    if (db_) sqlite3_close_v2(db_);
}

SqliteDb SqliteDb::open_read_only(const std::string& path) {
    sqlite3* db = nullptr;
    int rc = sqlite3_open_v2(path.c_str(), &db, SQLITE_OPEN_READONLY, nullptr);
    if (rc != SQLITE_OK) {
        std::string msg = db ? sqlite3_errmsg(db) : "out of memory";
        if (db) sqlite3_close_v2(db);
        throw std::runtime_error("cannot open database " + path + ": " + msg);
    }
    sqlite3_exec(db, "PRAGMA query_only = 1;", nullptr, nullptr, nullptr);
    return SqliteDb(db, path);
}

SqliteDb SqliteDb::open_create(const std::string& path) {
    sqlite3* db = nullptr;
    int rc = sqlite3_open_v2(path.c_str(), &db, SQLITE_OPEN_READWRITE | SQLITE_OPEN_CREATE, nullptr);
    if (rc != SQLITE_OK) {
        std::string msg = db ? sqlite3_errmsg(db) : "out of memory";
        if (db) sqlite3_close_v2(db);
        throw std::runtime_error("cannot create database " + path + ": " + msg);
    }
    return SqliteDb(db, path);
}

void SqliteDb::exec(const std::string& sql) {
    char* err = nullptr;
    int rc = sqlite3_exec(db_, sql.c_str(), nullptr, nullptr, &err);
    if (rc != SQLITE_OK) {
        std::string msg = err ? err : "unknown error";
        sqlite3_free(err);
        throw std::runtime_error("sqlite exec failed: " + msg + " [" + sql + "]");
    }
}

std::vector<Row> SqliteDb::query(const std::string& sql) {
    sqlite3_stmt* stmt = nullptr;
    if (sqlite3_prepare_v2(db_, sql.c_str(), -1, &stmt, nullptr) != SQLITE_OK) {
        throw std::runtime_error(std::string("sqlite prepare failed: ") + sqlite3_errmsg(db_));
    }
    std::vector<Row> rows;
    int ncols = sqlite3_column_count(stmt);
    int rc;
    while ((rc = sqlite3_step(stmt)) == SQLITE_ROW) {
        Row row;
        row.reserve(static_cast<std::size_t>(ncols));
        for (int c = 0; c < ncols; ++c) row.push_back(column_value(stmt, c));
        rows.push_back(std::move(row));
    }
    bool ok = rc == SQLITE_DONE;
    std::string msg = ok ? "" : sqlite3_errmsg(db_);
    sqlite3_finalize(stmt);
    if (!ok) throw std::runtime_error("sqlite step failed: " + msg);
    return rows;
}

bool SqliteDb::probe_equal(const std::string& table, const std::string& column,
                           const std::string& value) {
    std::string sql = "SELECT 1 FROM " + quote_identifier(table) + " WHERE " +
                      quote_identifier(column) + " = ? LIMIT 1";
    sqlite3_stmt* stmt = nullptr;
    if (sqlite3_prepare_v2(db_, sql.c_str(), -1, &stmt, nullptr) != SQLITE_OK) {
        throw std::runtime_error(std::string("sqlite prepare failed: ") + sqlite3_errmsg(db_));
    }
    sqlite3_bind_text(stmt, 1, value.c_str(), -1, SQLITE_TRANSIENT);
    bool found = sqlite3_step(stmt) == SQLITE_ROW;
    sqlite3_finalize(stmt);
    return found;
}

bool SqliteDb::probe_like(const std::string& table, const std::string& column,
                          const std::string& pattern) {
    std::string sql = "SELECT 1 FROM " + quote_identifier(table) + " WHERE " +
                      quote_identifier(column) + " LIKE ? LIMIT 1";
    sqlite3_stmt* stmt = nullptr;
    if (sqlite3_prepare_v2(db_, sql.c_str(), -1, &stmt, nullptr) != SQLITE_OK) {
        throw std::runtime_error(std::string("sqlite prepare failed: ") + sqlite3_errmsg(db_));
    }
    sqlite3_bind_text(stmt, 1, pattern.c_str(), -1, SQLITE_TRANSIENT);
    bool found = sqlite3_step(stmt) == SQLITE_ROW;
    sqlite3_finalize(stmt);
    return found;
}

QueryResult SqliteDb::query_limited(const std::string& sql, std::chrono::milliseconds timeout,
                                    std::size_t row_cap) {
    QueryResult result;
    auto start = std::chrono::steady_clock::now();
    Deadline deadline{start + timeout};
    // check roughly every 256 VM instructions so small timeouts stay accurate
    sqlite3_progress_handler(db_, 256, progress_callback, &deadline);

    sqlite3_stmt* stmt = nullptr;
    if (sqlite3_prepare_v2(db_, sql.c_str(), -1, &stmt, nullptr) != SQLITE_OK) {
        result.error = std::string("prepare: ") + sqlite3_errmsg(db_);
        sqlite3_progress_handler(db_, 0, nullptr, nullptr);
        result.elapsed =
            std::chrono::duration_cast<std::chrono::microseconds>(std::chrono::steady_clock::now() - start);
        return result;
    }
    result.column_count = sqlite3_column_count(stmt);
    int rc;
    while ((rc = sqlite3_step(stmt)) == SQLITE_ROW) {
        if (result.rows.size() >= row_cap) {
            result.truncated = true;
            result.error = "row cap exceeded (" + std::to_string(row_cap) + ")";
            break;
        }
        Row row;
        row.reserve(static_cast<std::size_t>(result.column_count));
        for (int c = 0; c < result.column_count; ++c) row.push_back(column_value(stmt, c));
        result.rows.push_back(std::move(row));
    }
    if (rc == SQLITE_INTERRUPT || (rc != SQLITE_DONE && rc != SQLITE_ROW && !result.error)) {
        result.error = rc == SQLITE_INTERRUPT ? "timeout" : std::string("step: ") + sqlite3_errmsg(db_);
    }
    sqlite3_finalize(stmt);
    sqlite3_progress_handler(db_, 0, nullptr, nullptr);
    result.elapsed =
        std::chrono::duration_cast<std::chrono::microseconds>(std::chrono::steady_clock::now() - start);
    if (result.error) result.rows.clear();
    return result;
}

std::vector<std::string> SqliteDb::table_names() {
    std::vector<std::string> names;
    for (const Row& row :
         query("SELECT name FROM sqlite_master WHERE type='table' ORDER BY name")) {
        names.push_back(std::get<std::string>(row[0]));
    }
    return names;
}

std::string quote_identifier(const std::string& name) {
    static const std::unordered_set<std::string> kKeywords = {
        "select", "from",  "where", "group", "order", "by",        "having", "limit",
        "join",   "on",    "as",    "and",   "or",    "not",       "in",     "like",
        "between", "union", "intersect", "except", "distinct", "asc", "desc", "table",
        "index",  "to",    "set",   "values", "default", "primary", "key", "foreign",
    };
    bool plain = !name.empty() && (std::isalpha(static_cast<unsigned char>(name[0])) || name[0] == '_');
    for (char c : name) {
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) {
            plain = false;
            break;
        }
    }
    if (plain) {
        std::string lower;
        for (char c : name) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        if (kKeywords.count(lower) == 0) return name;
    }
    std::string quoted = "\"";
    for (char c : name) {
        if (c == '"') quoted += "\"\"";
        else quoted.push_back(c);
    }
    quoted += '"';
    return quoted;
}

std::string quote_string_literal(const std::string& value) {
    std::string out = "'";
    for (char c : value) {
        if (c == '\'') out += "''";
        else out.push_back(c);
    }
    out += '\'';
    return out;
}

}  // namespace nl2sql
