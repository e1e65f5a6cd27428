#include <doctest.h>

#include <filesystem>

#include "datasets.hpp"
#include "fixtures.hpp"
#include "nl2sql/evaluator.hpp"
#include "nl2sql/sql_to_semql.hpp"

using namespace nl2sql;

TEST_CASE("execute materializes rows and reports errors as outcomes") {
    auto db = fixtures::shared().open("pets");
    ExecutionOutcome ok = execute(db, "SELECT count(*) FROM Student");
    REQUIRE(ok.ok());
    REQUIRE(ok.rows.size() == 1);
    CHECK(ok.columns == 1);
    CHECK(std::get<std::int64_t>(ok.rows[0][0]) == 5);

    ExecutionOutcome bad = execute(db, "SELEC nonsense");
    CHECK(!bad.ok());
    CHECK(bad.rows.empty());

    ExecutionOutcome missing = execute(db, "SELECT x FROM no_table");
    CHECK(!missing.ok());
}

TEST_CASE("write statements are refused on read-only connections") {
    auto db = fixtures::shared().open("pets");
    ExecutionOutcome outcome = execute(db, "DELETE FROM Student");
    CHECK(!outcome.ok());
}

TEST_CASE("a cross-join bomb times out inside the budget") {
    std::string path = fixtures::shared().root + "/bomb.sqlite";
    std::filesystem::remove(path);
    {
        SqliteDb db = SqliteDb::open_create(path);
        db.exec("CREATE TABLE n (x INTEGER)");
        db.exec("BEGIN");
        for (int i = 0; i < 10000; ++i) db.exec("INSERT INTO n VALUES (" + std::to_string(i) + ")");
        db.exec("COMMIT");
    }
    SqliteDb db = SqliteDb::open_read_only(path);
    ExecuteConfig config;
    config.timeout = std::chrono::milliseconds(300);
    auto start = std::chrono::steady_clock::now();
    ExecutionOutcome outcome =
        execute(db, "SELECT count(*) FROM n AS a, n AS b WHERE a.x + b.x = -1", config);
    auto wall = std::chrono::duration_cast<std::chrono::milliseconds>(
        std::chrono::steady_clock::now() - start);
    CHECK(!outcome.ok());
    CHECK(*outcome.error == "timeout");
    // within timeout + 10%
    CHECK(wall.count() <= 330 + 20);
}

TEST_CASE("row cap overflow is an error outcome") {
    auto db = fixtures::shared().open("pets");
    ExecuteConfig config;
    config.row_cap = 2;
    ExecutionOutcome outcome = execute(db, "SELECT name FROM Student", config);
    CHECK(!outcome.ok());
}

TEST_CASE("results_equivalent: multiset unless gold is ordered") {
    ExecutionOutcome a;
    a.rows = {{CellValue{std::int64_t{1}}}, {CellValue{std::int64_t{2}}}};
    ExecutionOutcome b;
    b.rows = {{CellValue{std::int64_t{2}}}, {CellValue{std::int64_t{1}}}};

    CHECK(results_equivalent(a, b));  // unordered gold: multiset equality
    b.ordered = true;
    CHECK(!results_equivalent(a, b));  // ordered gold: sequences must match

    ExecutionOutcome errored;
    errored.error = "boom";
    CHECK(!results_equivalent(errored, a));
    CHECK(!results_equivalent(a, errored));
}

TEST_CASE("duplicate rows are significant") {
    ExecutionOutcome a;
    a.rows = {{CellValue{std::string("x")}}, {CellValue{std::string("x")}}};
    ExecutionOutcome b;
    b.rows = {{CellValue{std::string("x")}}};
    CHECK(!results_equivalent(a, b));
}

TEST_CASE("numeric coercion equates integer and real cells") {
    ExecutionOutcome a;
    a.rows = {{CellValue{std::int64_t{20}}}};
    ExecutionOutcome b;
    b.rows = {{CellValue{20.0}}};
    CHECK(results_equivalent(a, b));

    ExecutionOutcome text;
    text.rows = {{CellValue{std::string("20")}}};
    CHECK(!results_equivalent(a, text));  // numbers never equal text

    ExecutionOutcome null_a;
    null_a.rows = {{CellValue{std::monostate{}}}};
    ExecutionOutcome null_b;
    null_b.rows = {{CellValue{std::monostate{}}}};
    CHECK(results_equivalent(null_a, null_b));
}

TEST_CASE("difficulty bucketing follows the component-count procedure") {
    CHECK(classify_difficulty("SELECT name FROM Student WHERE age > 20") == Difficulty::Easy);
    CHECK(classify_difficulty("SELECT count(*) FROM Student") == Difficulty::Easy);
    CHECK(classify_difficulty(
              "SELECT T1.name, count(*) FROM singer AS T1 JOIN album AS T2 ON T1.singer_id = "
              "T2.singer_id GROUP BY T1.name") == Difficulty::Medium);
    CHECK(classify_difficulty("SELECT name FROM Student WHERE home_country = 'France' INTERSECT "
                              "SELECT name FROM Student WHERE age > 20") == Difficulty::Hard);
    CHECK(classify_difficulty(
              "SELECT name FROM Student WHERE home_country = 'France' AND stu_id IN (SELECT "
              "stu_id FROM Has_Pet) INTERSECT SELECT name FROM Student WHERE age > 20") ==
          Difficulty::ExtraHard);
    // unparseable text buckets conservatively
    CHECK(classify_difficulty("not sql at all") == Difficulty::ExtraHard);
}

TEST_CASE("hardness matches hand-derived component counts") {
    // where + group + order + limit + 1 join = comp1 5 -> extra
    CHECK(classify_difficulty(
              "SELECT T1.name FROM singer AS T1 JOIN album AS T2 ON T1.singer_id = T2.singer_id "
              "WHERE T1.age > 50 GROUP BY T1.name ORDER BY count(*) DESC LIMIT 1") ==
          Difficulty::ExtraHard);
    // two select columns + two where conditions -> others 2, comp1 1 -> medium
    CHECK(classify_difficulty(
              "SELECT name, age FROM Student WHERE age > 20 AND home_country = 'France'") ==
          Difficulty::Medium);
    // order by + limit (comp1 2, others 0) -> medium
    CHECK(classify_difficulty("SELECT name FROM singer ORDER BY age DESC LIMIT 3") ==
          Difficulty::Medium);
}

TEST_CASE("gold queries are self-equivalent and reformat-stable") {
    auto db = fixtures::shared().open("pets");
    for (const auto& sample : fixtures::dev_samples()) {
        if (sample.db_id != "pets" || !sample.expect_accept) continue;
        auto conn = fixtures::shared().open(sample.db_id);
        ExecutionOutcome once = execute(conn, sample.gold_sql);
        REQUIRE(once.ok());
        ExecutionOutcome twice = execute(conn, sample.gold_sql);
        CHECK(results_equivalent(once, twice));
    }
    // whitespace reformatting of gold stays equivalent
    ExecutionOutcome a = execute(db, "SELECT name FROM Student WHERE age > 20");
    ExecutionOutcome b = execute(db, "SELECT  name\nFROM Student   WHERE age > 20");
    CHECK(results_equivalent(a, b));
}

TEST_CASE("evaluate_set scores a scripted system and never halts on failures") {
    std::vector<SampleRecord> samples;
    SampleRecord good;
    good.question = "names of French students";
    good.gold_sql = "SELECT name FROM Student WHERE home_country = 'France'";
    good.db_id = "pets";
    samples.push_back(good);
    SampleRecord broken;
    broken.question = "broken";
    broken.gold_sql = "SELECT name FROM Student";
    broken.db_id = "pets";
    samples.push_back(broken);
    SampleRecord flagged;
    flagged.question = "flagged";
    flagged.gold_sql = "SELECT 1";
    flagged.db_id = "pets";
    flagged.flag = "missing_query";
    samples.push_back(flagged);

    SystemUnderTest system = [](const SampleRecord& sample, SampleVerdict& verdict) {
        if (sample.question == "broken") throw std::runtime_error("synthetic failure");
        verdict.predicted_sql = sample.gold_sql;  // oracle replay
        verdict.timings.synthesis_ms = 1.0;
    };
    EvalReport report = evaluate_set(samples, system, [&](const std::string& id) {
        return fixtures::shared().open(id);
    });
    CHECK(report.total == 3);
    CHECK(report.equivalent == 1);
    CHECK(report.samples[0].equivalent);
    CHECK(report.samples[1].failure.find("synthetic failure") != std::string::npos);
    CHECK(report.samples[2].failure.find("flagged") != std::string::npos);
    CHECK(report.overall_accuracy == doctest::Approx(1.0 / 3.0));

    // stable keys in the report document
    std::string json = report.to_json();
    for (const char* key : {"overall_accuracy", "by_difficulty", "stage_timing_ms", "samples"}) {
        CHECK(json.find(key) != std::string::npos);
    }
}

TEST_CASE("evaluate_set with multiple workers is deterministic") {
    std::vector<SampleRecord> samples;
    for (int i = 0; i < 12; ++i) {
        SampleRecord rec;
        rec.question = "q" + std::to_string(i);
        rec.gold_sql = "SELECT name FROM Student WHERE age > " + std::to_string(18 + i);
        rec.db_id = "pets";
        samples.push_back(rec);
    }
    SystemUnderTest system = [](const SampleRecord& sample, SampleVerdict& verdict) {
        verdict.predicted_sql = sample.gold_sql;
    };
    auto open = [&](const std::string& id) { return fixtures::shared().open(id); };
    EvalConfig serial;
    serial.workers = 1;
    EvalConfig parallel;
    parallel.workers = 4;
    EvalReport a = evaluate_set(samples, system, open, serial);
    EvalReport b = evaluate_set(samples, system, open, parallel);
    CHECK(a.overall_accuracy == b.overall_accuracy);
    REQUIRE(a.samples.size() == b.samples.size());
    for (std::size_t i = 0; i < a.samples.size(); ++i) {
        CHECK(a.samples[i].equivalent == b.samples[i].equivalent);
        CHECK(a.samples[i].sample_index == b.samples[i].sample_index);
    }
}
