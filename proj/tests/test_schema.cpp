#include <doctest.h>

#include <fstream>

#include <json.hpp>

#include "fixtures.hpp"
#include "nl2sql/schema.hpp"

using namespace nl2sql;
using nlohmann::json;

namespace {

std::string write_temp(const std::string& name, const std::string& content) {
    std::string path = fixtures::shared().root + "/" + name;
    std::ofstream out(path);
    out << content;
    return path;
}

}  // namespace

TEST_CASE("catalog load builds the pets schema") {
    const DatabaseSchema& pets = fixtures::shared().schema("pets");
    CHECK(pets.tables == std::vector<std::string>{"Student", "Has_Pet", "Pet"});
    CHECK(pets.columns[0].name == "*");
    CHECK(pets.columns[0].table_index == -1);
    REQUIRE(pets.foreign_keys.size() == 2);
    // Has_Pet.stu_id -> Student.stu_id, Has_Pet.pet_id -> Pet.pet_id
    CHECK(pets.table_of_column(pets.foreign_keys[0].column) == 1);
    CHECK(pets.table_of_column(pets.foreign_keys[0].referenced_column) == 0);
    CHECK(pets.table_of_column(pets.foreign_keys[1].referenced_column) == 2);
}

TEST_CASE("empty catalog array loads to empty list") {
    std::string path = write_temp("empty_catalog.json", "[]");
    CatalogLoadResult result = load_schema_catalog(path);
    CHECK(result.schemas.empty());
    CHECK(result.rejected.empty());
}

TEST_CASE("descriptor with out-of-range foreign key is rejected with db_id") {
    json bad;
    bad["db_id"] = "broken";
    bad["table_names_original"] = json::array({"t"});
    json cols = json::array();
    cols.push_back(json::array({-1, "*"}));
    for (int i = 0; i < 10; ++i) cols.push_back(json::array({0, "c" + std::to_string(i)}));
    bad["column_names_original"] = cols;
    json types = json::array();
    for (int i = 0; i < 11; ++i) types.push_back("text");
    bad["column_types"] = types;
    bad["primary_keys"] = json::array();
    bad["foreign_keys"] = json::array({json::array({999, 1})});
    std::string path = write_temp("bad_catalog.json", json::array({bad}).dump());

    CatalogLoadResult result = load_schema_catalog(path);
    CHECK(result.schemas.empty());
    REQUIRE(result.rejected.size() == 1);
    CHECK(result.rejected[0].db_id == "broken");
}

TEST_CASE("missing catalog file throws") {
    CHECK_THROWS(load_schema_catalog("/nonexistent/tables.json"));
}

TEST_CASE("schema serialization round-trips") {
    const DatabaseSchema& pets = fixtures::shared().schema("pets");
    std::string path = write_temp("roundtrip_catalog.json", "[" + schema_to_catalog_json(pets) + "]");
    CatalogLoadResult reloaded = load_schema_catalog(path);
    REQUIRE(reloaded.schemas.size() == 1);
    const DatabaseSchema& again = reloaded.schemas[0];
    CHECK(again.db_id == pets.db_id);
    CHECK(again.tables == pets.tables);
    REQUIRE(again.columns.size() == pets.columns.size());
    for (std::size_t i = 0; i < pets.columns.size(); ++i) {
        CHECK(again.columns[i].table_index == pets.columns[i].table_index);
        CHECK(again.columns[i].name == pets.columns[i].name);
        CHECK(again.columns[i].type == pets.columns[i].type);
    }
    CHECK(again.primary_keys == pets.primary_keys);
    REQUIRE(again.foreign_keys.size() == pets.foreign_keys.size());
}

TEST_CASE("samples load in file order, flagging bad records") {
    json arr = json::array();
    arr.push_back({{"question", "q one  two"}, {"query", "SELECT 1"}, {"db_id", "pets"}});
    arr.push_back({{"question", "missing query"}, {"db_id", "pets"}});
    arr.push_back({{"question", "bad db"}, {"query", "SELECT 1"}, {"db_id", "nope"}});
    std::string path = write_temp("samples.json", arr.dump());

    std::vector<std::string> ids = {"pets"};
    auto records = load_samples(path, &ids);
    REQUIRE(records.size() == 3);
    CHECK(records[0].usable());
    CHECK(records[0].question == "q one two");       // whitespace-normalized
    CHECK(records[0].question_raw == "q one  two");  // raw retained
    CHECK(records[1].flag == "missing_query");
    CHECK(records[2].flag == "unknown_db_id");
}

TEST_CASE("schema graph has one edge per foreign key") {
    const auto& fx = fixtures::shared();
    SchemaGraph graph = build_schema_graph(fx.schema("pets"));
    CHECK(graph.table_count == 3);
    REQUIRE(graph.edges.size() == 2);
    // degree sum equals twice the foreign key count
    std::size_t degree = 0;
    for (int t = 0; t < graph.table_count; ++t) degree += graph.edges_of(t).size();
    CHECK(degree == 2 * fx.schema("pets").foreign_keys.size());
}

TEST_CASE("single-table schema yields an edgeless graph") {
    DatabaseSchema solo;
    solo.db_id = "solo";
    solo.tables = {"t"};
    solo.columns = {{-1, "*", ColumnType::Text}, {0, "x", ColumnType::Number}};
    SchemaGraph graph = build_schema_graph(solo);
    CHECK(graph.table_count == 1);
    CHECK(graph.edges.empty());
}

TEST_CASE("self-referencing foreign key becomes a retained self-loop") {
    const DatabaseSchema& school = fixtures::shared().schema("school");
    SchemaGraph graph = build_schema_graph(school);
    bool found_self_loop = false;
    for (const SchemaEdge& e : graph.edges) {
        if (e.table_a == e.table_b) found_self_loop = true;
    }
    CHECK(found_self_loop);
}
