#include <doctest.h>

#include <filesystem>

#include "fixtures.hpp"
#include "nl2sql/value_index.hpp"

using namespace nl2sql;

namespace {

ValueIndex pets_index() {
    auto db = fixtures::shared().open("pets");
    return ValueIndex::build(db, fixtures::shared().schema("pets"));
}

}  // namespace

TEST_CASE("lookup finds stored values with case folding") {
    ValueIndex index = pets_index();
    const DatabaseSchema& pets = fixtures::shared().schema("pets");

    auto hits = index.lookup_exact("france");
    REQUIRE(!hits.empty());
    CHECK(pets.tables[static_cast<std::size_t>(hits[0].table_index)] == "Student");
    CHECK(pets.columns[static_cast<std::size_t>(hits[0].column_index)].name == "home_country");
    CHECK(hits[0].raw_value == "France");

    CHECK(!index.lookup_exact("FRANCE").empty());
    CHECK(index.lookup_exact("zzz-not-present").empty());
}

TEST_CASE("numeric values index under canonical decimal strings") {
    ValueIndex index = pets_index();
    const DatabaseSchema& pets = fixtures::shared().schema("pets");
    auto hits = index.lookup_exact("20");
    bool found_age = false;
    bool found_weight = false;
    for (const ValueLocation& loc : hits) {
        const ColumnDef& col = pets.columns[static_cast<std::size_t>(loc.column_index)];
        if (col.name == "age") found_age = true;
        if (col.name == "weight") found_weight = true;  // stored as 20.0
    }
    CHECK(found_age);
    CHECK(found_weight);
    CHECK(!index.lookup_exact("20.0").empty());
}

TEST_CASE("multi-token values are reachable through constituent tokens") {
    auto db = fixtures::shared().open("flights");
    ValueIndex index = ValueIndex::build(db, fixtures::shared().schema("flights"));
    auto hits = index.lookup_exact("Kennedy");
    bool found_full = false;
    for (const ValueLocation& loc : hits) {
        if (loc.raw_value == "John F Kennedy International Airport") found_full = true;
    }
    CHECK(found_full);
}

TEST_CASE("index soundness and completeness against direct scans") {
    ValueIndex index = pets_index();
    const DatabaseSchema& pets = fixtures::shared().schema("pets");
    auto db = fixtures::shared().open("pets");

    // soundness: every location a lookup returns is confirmed by a query
    for (const char* probe : {"France", "20", "cat", "dog", "Alice Martin"}) {
        for (const ValueLocation& loc : index.lookup_exact(probe)) {
            const ColumnDef& col = pets.columns[static_cast<std::size_t>(loc.column_index)];
            CHECK(db.probe_equal(pets.tables[static_cast<std::size_t>(col.table_index)], col.name,
                                 loc.raw_value));
        }
    }
    // completeness: every stored text value is found under its normal form
    for (const Row& row : db.query("SELECT home_country FROM Student")) {
        std::string value = cell_to_string(row[0]);
        bool found = false;
        for (const ValueLocation& loc : index.lookup_exact(value)) {
            if (loc.raw_value == value) found = true;
        }
        CHECK(found);
    }
}

TEST_CASE("per-column cap marks overflow and keeps membership answerable") {
    std::string path = fixtures::shared().root + "/overflow.sqlite";
    std::filesystem::remove(path);
    {
        SqliteDb db = SqliteDb::open_create(path);
        db.exec("CREATE TABLE big (val TEXT)");
        db.exec("BEGIN");
        for (int i = 0; i < 101; ++i) {
            db.exec("INSERT INTO big VALUES ('value_" + std::to_string(i) + "')");
        }
        db.exec("COMMIT");
    }
    DatabaseSchema schema;
    schema.db_id = "overflow";
    schema.tables = {"big"};
    schema.columns = {{-1, "*", ColumnType::Text}, {0, "val", ColumnType::Text}};

    SqliteDb db = SqliteDb::open_read_only(path);
    IndexConfig config;
    config.per_column_cap = 100;
    ValueIndex index = ValueIndex::build(db, schema, config);
    CHECK(index.column_overflowed(1));
    CHECK(index.lookup_exact("value_5").empty());  // not enumerated
    CHECK(db.probe_equal("big", "val", "value_5"));  // membership by direct query

    IndexConfig roomy;
    roomy.per_column_cap = 1000;
    ValueIndex full = ValueIndex::build(db, schema, roomy);
    CHECK(!full.column_overflowed(1));
    CHECK(!full.lookup_exact("value_5").empty());
}

TEST_CASE("empty database yields an empty index") {
    std::string path = fixtures::shared().root + "/empty.sqlite";
    std::filesystem::remove(path);
    {
        SqliteDb db = SqliteDb::open_create(path);
        db.exec("CREATE TABLE t (x TEXT)");
    }
    DatabaseSchema schema;
    schema.db_id = "empty";
    schema.tables = {"t"};
    schema.columns = {{-1, "*", ColumnType::Text}, {0, "x", ColumnType::Text}};
    SqliteDb db = SqliteDb::open_read_only(path);
    ValueIndex index = ValueIndex::build(db, schema);
    CHECK(index.entry_count() == 0);
}

TEST_CASE("alias rows point a long surface at the stored value") {
    auto db = fixtures::shared().open("flights");
    const DatabaseSchema& flights = fixtures::shared().schema("flights");
    IndexConfig config;
    // Flight.destination is column 3 in the catalog
    config.aliases.push_back(IndexAlias{"John F Kennedy International Airport",
                                        ValueLocation{0, 3, "JFK"}});
    ValueIndex index = ValueIndex::build(db, flights, config);
    bool found = false;
    for (const ValueLocation& loc : index.lookup_exact("john f kennedy international airport")) {
        if (loc.raw_value == "JFK" && loc.column_index == 3) found = true;
    }
    CHECK(found);
}

TEST_CASE("cache serialization is byte-stable across rebuilds") {
    ValueIndex a = pets_index();
    ValueIndex b = pets_index();
    CHECK(a.to_json() == b.to_json());
    ValueIndex reloaded = ValueIndex::from_json(a.to_json());
    CHECK(reloaded.to_json() == a.to_json());
    CHECK(reloaded.lookup_exact("france").size() == a.lookup_exact("france").size());
}
