#include "nl2sql/schema.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "nl2sql/util.hpp"

namespace nl2sql {

using nlohmann::json;

std::string column_type_name(ColumnType t) {
    switch (t) {
        case ColumnType::Text: return "text";
        case ColumnType::Number: return "number";
        case ColumnType::Time: return "time";
        case ColumnType::Boolean: return "boolean";
        case ColumnType::Others: return "others";
    }
    return "others";
}

ColumnType column_type_from_name(const std::string& name) {
    std::string n = to_lower(name);
    if (n == "text") return ColumnType::Text;
    if (n == "number") return ColumnType::Number;
    if (n == "time") return ColumnType::Time;
    if (n == "boolean") return ColumnType::Boolean;
    return ColumnType::Others;
}

int DatabaseSchema::table_of_column(int column_index) const {
    if (column_index < 0 || column_index >= static_cast<int>(columns.size())) return -1;
    return columns[column_index].table_index;
}

std::vector<int> DatabaseSchema::columns_of_table(int table_index) const {
    std::vector<int> out;
    for (int i = 0; i < static_cast<int>(columns.size()); ++i) {
        if (columns[i].table_index == table_index) out.push_back(i);
    }
    return out;
}

int DatabaseSchema::find_table(const std::string& name) const {
    std::string n = to_lower(name);
    for (int i = 0; i < static_cast<int>(tables.size()); ++i) {
        if (to_lower(tables[i]) == n) return i;
    }
    return -1;
}

int DatabaseSchema::find_column(int table_index, const std::string& name) const {
    std::string n = to_lower(name);
    for (int i = 0; i < static_cast<int>(columns.size()); ++i) {
        if (columns[i].table_index != table_index) continue;
        if (to_lower(columns[i].name) == n) return i;
    }
    return -1;
}

std::optional<std::string> validate_schema(const DatabaseSchema& schema) {
    const int ncols = static_cast<int>(schema.columns.size());
    const int ntables = static_cast<int>(schema.tables.size());
    if (ncols == 0 || schema.columns[0].table_index != -1) {
        return "column 0 must be the \"*\" marker with no table";
    }
    for (int i = 1; i < ncols; ++i) {
        int t = schema.columns[i].table_index;
        if (t < 0 || t >= ntables) {
            return "column " + std::to_string(i) + " has table index out of range";
        }
    }
    for (int pk : schema.primary_keys) {
        if (pk <= 0 || pk >= ncols) {
            return "primary key index " + std::to_string(pk) + " out of range";
        }
    }
    for (const ForeignKey& fk : schema.foreign_keys) {
        if (fk.column <= 0 || fk.column >= ncols || fk.referenced_column <= 0 ||
            fk.referenced_column >= ncols) {
            return "foreign key index out of range (" + std::to_string(fk.column) + " -> " +
                   std::to_string(fk.referenced_column) + ")";
        }
        if (fk.column == fk.referenced_column) {
            return "foreign key references itself (column " + std::to_string(fk.column) + ")";
        }
    }
    return std::nullopt;
}

CatalogLoadResult load_schema_catalog(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open schema catalog: " + path);
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw std::runtime_error("malformed schema catalog " + path + ": " + e.what());
    }
    if (!doc.is_array()) {
        throw std::runtime_error("schema catalog must be a JSON array: " + path);
    }

    CatalogLoadResult result;
    for (const json& entry : doc) {
        DatabaseSchema schema;
        try {
            schema.db_id = entry.at("db_id").get<std::string>();
            for (const json& t : entry.at("table_names_original")) {
                schema.tables.push_back(t.get<std::string>());
            }
            const json& cols = entry.at("column_names_original");
            const json& types = entry.at("column_types");
            for (std::size_t i = 0; i < cols.size(); ++i) {
                ColumnDef def;
                def.table_index = cols[i].at(0).get<int>();
                def.name = cols[i].at(1).get<std::string>();
                def.type = i < types.size() ? column_type_from_name(types[i].get<std::string>())
                                            : ColumnType::Others;
                schema.columns.push_back(def);
            }
            for (const json& pk : entry.at("primary_keys")) {
                schema.primary_keys.push_back(pk.get<int>());
            }
            for (const json& fk : entry.at("foreign_keys")) {
                schema.foreign_keys.push_back(ForeignKey{fk.at(0).get<int>(), fk.at(1).get<int>()});
            }
        } catch (const json::exception& e) {
            std::string id = entry.contains("db_id") && entry["db_id"].is_string()
                                 ? entry["db_id"].get<std::string>()
                                 : "<unknown>";
            result.rejected.push_back(CatalogError{id, std::string("descriptor parse: ") + e.what()});
            continue;
        }
        if (auto problem = validate_schema(schema)) {
            result.rejected.push_back(CatalogError{schema.db_id, *problem});
            continue;
        }
        result.schemas.push_back(std::move(schema));
    }
    return result;
}

std::string schema_to_catalog_json(const DatabaseSchema& schema) {
    json entry;
    entry["db_id"] = schema.db_id;
    entry["table_names_original"] = schema.tables;
    json cols = json::array();
    json types = json::array();
    for (const ColumnDef& c : schema.columns) {
        cols.push_back(json::array({c.table_index, c.name}));
        types.push_back(column_type_name(c.type));
    }
    entry["column_names_original"] = cols;
    entry["column_types"] = types;
    entry["primary_keys"] = schema.primary_keys;
    json fks = json::array();
    for (const ForeignKey& fk : schema.foreign_keys) {
        fks.push_back(json::array({fk.column, fk.referenced_column}));
    }
    entry["foreign_keys"] = fks;
    return entry.dump(2);
}

std::vector<SampleRecord> load_samples(const std::string& path,
                                       const std::vector<std::string>* known_db_ids) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open samples file: " + path);
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw std::runtime_error("malformed samples file " + path + ": " + e.what());
    }
    if (!doc.is_array()) throw std::runtime_error("samples file must be a JSON array: " + path);

    std::vector<SampleRecord> records;
    records.reserve(doc.size());
    for (const json& entry : doc) {
        SampleRecord rec;
        if (entry.contains("question") && entry["question"].is_string()) {
            rec.question_raw = entry["question"].get<std::string>();
            rec.question = collapse_whitespace(rec.question_raw);
        } else {
            rec.flag = "missing_question";
        }
        if (entry.contains("query") && entry["query"].is_string()) {
            rec.gold_sql = entry["query"].get<std::string>();
        } else if (!rec.flag) {
            rec.flag = "missing_query";
        }
        if (entry.contains("db_id") && entry["db_id"].is_string()) {
            rec.db_id = entry["db_id"].get<std::string>();
            if (!rec.flag && known_db_ids) {
                bool known = false;
                for (const std::string& id : *known_db_ids) {
                    if (id == rec.db_id) {
                        known = true;
                        break;
                    }
                }
                if (!known) rec.flag = "unknown_db_id";
            }
        } else if (!rec.flag) {
            rec.flag = "missing_db_id";
        }
        records.push_back(std::move(rec));
    }
    return records;
}

std::vector<const SchemaEdge*> SchemaGraph::edges_of(int table_index) const {
    std::vector<const SchemaEdge*> out;
    for (const SchemaEdge& e : edges) {
        if (e.table_a == table_index || e.table_b == table_index) out.push_back(&e);
    }
    return out;
}

SchemaGraph build_schema_graph(const DatabaseSchema& schema) {
    SchemaGraph graph;
    graph.table_count = static_cast<int>(schema.tables.size());
    for (const ForeignKey& fk : schema.foreign_keys) {
        SchemaEdge edge;
        edge.column_a = fk.column;
        edge.column_b = fk.referenced_column;
        edge.table_a = schema.table_of_column(fk.column);
        edge.table_b = schema.table_of_column(fk.referenced_column);
        graph.edges.push_back(edge);
    }
    return graph;
}

}  // namespace nl2sql
