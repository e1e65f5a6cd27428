#include <doctest.h>

#include "fixtures.hpp"
#include "nl2sql/compiler.hpp"
#include "nl2sql/evaluator.hpp"
#include "nl2sql/sql_to_semql.hpp"

using namespace nl2sql;

namespace {

struct Pets {
    const DatabaseSchema& schema = fixtures::shared().schema("pets");
    SchemaGraph graph = build_schema_graph(schema);
};

struct Singer {
    const DatabaseSchema& schema = fixtures::shared().schema("singer");
    SchemaGraph graph = build_schema_graph(schema);
};

CandidateSet candidates_of(const ConvertResult& result) {
    CandidateSet set;
    for (const GoldLiteral& lit : result.literals) {
        ValueCandidate cand;
        cand.surface = lit.surface;
        cand.exempt_from_validation = true;
        set.items.push_back(std::move(cand));
    }
    return set;
}

}  // namespace

TEST_CASE("flagship count query converts to the expected filter tree") {
    Pets pets;
    ConvertResult result = sql_to_semql(
        "SELECT count(*) FROM Student AS T1 JOIN Has_Pet AS T2 ON T1.stu_id = T2.stu_id "
        "JOIN Pet AS T3 ON T2.pet_id = T3.pet_id WHERE T1.home_country = 'France' AND T1.age > 20",
        pets.schema, pets.graph);
    REQUIRE(result.ok());
    REQUIRE(result.literals.size() == 2);
    CHECK(result.literals[0].surface == "France");
    CHECK(result.literals[1].surface == "20");

    const SemQlNode& r = result.tree->root.children[0];
    CHECK(r.production == prod::kRSelectFilter);
    const SemQlNode& filter = r.children[1];
    CHECK(filter.production == prod::kFAnd);
    CHECK(filter.children[0].production == prod::kFEq);
    // home_country column of Student
    CHECK(filter.children[0].children[0].children[0].payload == 4);
    CHECK(filter.children[0].children[1].payload == 0);
    CHECK(filter.children[1].production == prod::kFGt);
    CHECK(filter.children[1].children[1].payload == 1);

    // count(*) star was assigned a table that completes the gold join set
    auto mentioned = collect_tables(r, true);
    CHECK(mentioned.size() == 2);  // Student plus the star table
}

TEST_CASE("order by desc limit becomes a most-superlative with the limit value") {
    Singer singer;
    ConvertResult result = sql_to_semql("SELECT name FROM singer ORDER BY age DESC LIMIT 3",
                                        singer.schema, singer.graph);
    REQUIRE(result.ok());
    const SemQlNode& r = result.tree->root.children[0];
    CHECK(r.production == prod::kRSelectSup);
    const SemQlNode& sup = r.children[1];
    CHECK(sup.kind == ActionKind::Superlative);
    CHECK(sup.production == prod::kSupMost);
    REQUIRE(result.literals.size() == 1);
    CHECK(result.literals[0].surface == "3");
    CHECK(sup.children[1].payload == 0);
}

TEST_CASE("window functions are rejected with their own reason code") {
    Pets pets;
    ConvertResult result = sql_to_semql(
        "SELECT name, rank() OVER (ORDER BY age) FROM Student", pets.schema, pets.graph);
    CHECK(!result.ok());
    CHECK(result.reason == "window_function");
}

TEST_CASE("reason-coded rejections") {
    Pets pets;
    auto reason = [&](const std::string& sql) {
        return sql_to_semql(sql, pets.schema, pets.graph).reason;
    };
    CHECK(reason("SELECT DISTINCT name FROM Student") == "distinct");
    CHECK(reason("SELECT count(DISTINCT home_country) FROM Student") == "agg_distinct");
    CHECK(reason("SELECT name FROM Student ORDER BY age, name") == "order_multi_column");
    CHECK(reason("SELECT name FROM Student LIMIT 3") == "limit_without_order");
    CHECK(reason("SELECT T1.name FROM Student AS T1 JOIN Student AS T2 ON T1.age = T2.age") ==
          "self_join");
    CHECK(reason("SELECT name FROM Student WHERE age IN (1, 2, 3)") == "in_literal_list");
    CHECK(reason("SELECT name FROM Student WHERE gender IS NULL") == "is_null");
    CHECK(reason("SELECT name FROM Student WHERE age = stu_id") == "column_comparison");
    CHECK(reason("SELECT name, age, gender, stu_id, home_country, name FROM Student") ==
          "select_count");
    CHECK(reason("SELECT name FROM Student GROUP BY name") == "groupby_mismatch");
    CHECK(reason("SELECT nonsense FROM Student") == "unknown_column");
    CHECK(reason("SELECT name FROM NoSuchTable") == "unknown_table");
    CHECK(reason("SELECT count(*) FROM Student AS T1 JOIN Has_Pet AS T2 ON T1.stu_id = "
                 "T2.stu_id") == "join_mismatch");
    CHECK(reason("SELECT name FROM Student WHERE age > 20 INTERSECT SELECT name FROM Student "
                 "WHERE age < 25 INTERSECT SELECT name FROM Student") == "set_op_chain");
}

TEST_CASE("group by must match the deterministic reconstruction") {
    Singer singer;
    // grouping on a column that is not selected cannot be reconstructed
    ConvertResult bad = sql_to_semql(
        "SELECT name FROM singer GROUP BY country HAVING count(*) > 1", singer.schema,
        singer.graph);
    CHECK(bad.reason == "groupby_mismatch");

    ConvertResult good = sql_to_semql(
        "SELECT country, count(*) FROM singer GROUP BY country", singer.schema, singer.graph);
    CHECK(good.ok());
}

TEST_CASE("set operations convert to Z productions") {
    Pets pets;
    ConvertResult result = sql_to_semql(
        "SELECT name FROM Student WHERE home_country = 'France' INTERSECT "
        "SELECT name FROM Student WHERE age > 20",
        pets.schema, pets.graph);
    REQUIRE(result.ok());
    CHECK(result.tree->root.production == prod::kZIntersect);
    REQUIRE(result.tree->root.children.size() == 2);
    CHECK(result.literals.size() == 2);
}

TEST_CASE("duplicate literals dedupe to one option") {
    Pets pets;
    ConvertResult result = sql_to_semql(
        "SELECT name FROM Student WHERE age > 20 OR pet_id = 20", pets.schema, pets.graph);
    // pet_id is not a Student column: unknown_column; use a same-table query
    result = sql_to_semql("SELECT name FROM Student WHERE age > 20 OR stu_id = 20", pets.schema,
                          pets.graph);
    REQUIRE(result.ok());
    CHECK(result.literals.size() == 1);
    CHECK(result.literals[0].surface == "20");
}

TEST_CASE("converted gold queries compile and execute equivalently") {
    Pets pets;
    auto db = fixtures::shared().open("pets");
    ExecuteConfig exec;
    const char* queries[] = {
        "SELECT count(*) FROM Student AS T1 JOIN Has_Pet AS T2 ON T1.stu_id = T2.stu_id "
        "JOIN Pet AS T3 ON T2.pet_id = T3.pet_id WHERE T1.home_country = 'France' AND T1.age > 20",
        "SELECT name FROM Student WHERE home_country = 'France'",
        "SELECT home_country, count(*) FROM Student GROUP BY home_country",
        "SELECT name FROM Student WHERE age > (SELECT avg(age) FROM Student)",
        "SELECT name FROM Student ORDER BY age DESC LIMIT 1",
    };
    for (const char* gold : queries) {
        CAPTURE(gold);
        ConvertResult result = sql_to_semql(gold, pets.schema, pets.graph);
        REQUIRE(result.ok());
        CompiledQuery compiled =
            compile(*result.tree, pets.schema, pets.graph, candidates_of(result));
        ExecutionOutcome pred = execute(db, compiled.sql, exec);
        ExecutionOutcome gold_outcome = execute(db, gold, exec);
        gold_outcome.ordered = std::string(gold).find("ORDER BY") != std::string::npos;
        REQUIRE(pred.ok());
        REQUIRE(gold_outcome.ok());
        CHECK(results_equivalent(pred, gold_outcome));
    }
}
