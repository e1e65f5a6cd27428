#pragma once

#include <optional>
#include <string>
#include <vector>

namespace nl2sql {

enum class ColumnType { Text, Number, Time, Boolean, Others };

std::string column_type_name(ColumnType t);
ColumnType column_type_from_name(const std::string& name);

struct ColumnDef {
    int table_index = -1;  // -1 for the synthetic "*" column at index 0
    std::string name;
    ColumnType type = ColumnType::Others;
};

struct ForeignKey {
    int column = -1;             // referencing column index
    int referenced_column = -1;  // referenced column index
};

// Schema of one database, mirroring the catalog file layout. Column and
// table indices are positional and must match the catalog exactly since
// primary/foreign keys are index-based.
struct DatabaseSchema {
    std::string db_id;
    std::vector<std::string> tables;
    std::vector<ColumnDef> columns;  // columns[0] is "*"
    std::vector<int> primary_keys;
    std::vector<ForeignKey> foreign_keys;

    int table_of_column(int column_index) const;
    std::vector<int> columns_of_table(int table_index) const;
    // Case-insensitive lookups on original names; returns -1 when absent.
    int find_table(const std::string& name) const;
    int find_column(int table_index, const std::string& name) const;
};

// Validates index bounds and foreign-key sanity. Returns the first problem
// found, or nullopt when the schema is well-formed.
std::optional<std::string> validate_schema(const DatabaseSchema& schema);

struct CatalogError {
    std::string db_id;
    std::string reason;
};

struct CatalogLoadResult {
    std::vector<DatabaseSchema> schemas;
    std::vector<CatalogError> rejected;
};

// Loads a schema catalog (JSON array of database descriptors). Descriptors
// failing validation are rejected individually and reported with their
// db_id. Throws std::runtime_error for a missing file or malformed JSON.
CatalogLoadResult load_schema_catalog(const std::string& path);

// Serializes back to the catalog descriptor form (round-trips byte-stable).
std::string schema_to_catalog_json(const DatabaseSchema& schema);

struct SampleRecord {
    std::string question;       // whitespace-normalized
    std::string question_raw;   // as found in the file
    std::string gold_sql;
    std::string db_id;
    std::optional<std::string> flag;  // set when the record is unusable

    bool usable() const { return !flag.has_value(); }
};

// Loads question/query samples in file order. Records with a missing field
// or (when known_db_ids is given) an unknown db_id are flagged rather than
// dropped so counts stay reconcilable against the file.
std::vector<SampleRecord> load_samples(const std::string& path,
                                       const std::vector<std::string>* known_db_ids = nullptr);

struct SchemaEdge {
    int table_a = -1;
    int table_b = -1;
    int column_a = -1;  // belongs to table_a
    int column_b = -1;  // belongs to table_b
};

// Undirected join graph: vertices are table indices, one edge per FK pair.
// Self-loop edges (same-table foreign keys) are retained but path search
// never uses them.
struct SchemaGraph {
    int table_count = 0;
    std::vector<SchemaEdge> edges;

    std::vector<const SchemaEdge*> edges_of(int table_index) const;
};

SchemaGraph build_schema_graph(const DatabaseSchema& schema);

}  // namespace nl2sql
