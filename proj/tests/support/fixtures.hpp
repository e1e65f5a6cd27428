#pragma once

#include <string>
#include <vector>

#include "nl2sql/schema.hpp"
#include "nl2sql/sqlite_db.hpp"

namespace nl2sql::fixtures {

// Builds the fixture databases and tables.json under root (created if
// needed). Database files land in <root>/database/<db_id>.sqlite.
struct FixtureSet {
    std::string root;
    std::string catalog_path;
    std::string db_dir;
    std::vector<DatabaseSchema> schemas;

    const DatabaseSchema& schema(const std::string& db_id) const;
    std::string db_path(const std::string& db_id) const;
    SqliteDb open(const std::string& db_id) const;
};

FixtureSet build_all(const std::string& root);

// Process-wide fixture set under a temp directory, built once on first use.
const FixtureSet& shared();

// individual builders, usable for focused tests
void write_pets_db(const std::string& path);
void write_flights_db(const std::string& path);
void write_singer_db(const std::string& path);
void write_chain_db(const std::string& path);
void write_school_db(const std::string& path);

std::string catalog_json();

}  // namespace nl2sql::fixtures
