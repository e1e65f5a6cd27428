#include "fixtures.hpp"

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace nl2sql::fixtures {

namespace {

json descriptor(const std::string& db_id, const std::vector<std::string>& tables,
                const std::vector<std::tuple<int, std::string, std::string>>& columns,
                const std::vector<int>& pks, const std::vector<std::pair<int, int>>& fks) {
    json d;
    d["db_id"] = db_id;
    d["table_names_original"] = tables;
    json cols = json::array();
    json types = json::array();
    cols.push_back(json::array({-1, "*"}));
    types.push_back("text");
    for (const auto& [t, name, type] : columns) {
        cols.push_back(json::array({t, name}));
        types.push_back(type);
    }
    d["column_names_original"] = cols;
    d["column_types"] = types;
    d["primary_keys"] = pks;
    json fk = json::array();
    for (const auto& [a, b] : fks) fk.push_back(json::array({a, b}));
    d["foreign_keys"] = fk;
    return d;
}

}  // namespace

std::string catalog_json() {
    json catalog = json::array();

    // pets: Student(1-5), Has_Pet(6-7), Pet(8-11)
    catalog.push_back(descriptor(
        "pets", {"Student", "Has_Pet", "Pet"},
        {
            {0, "stu_id", "number"},
            {0, "name", "text"},
            {0, "age", "number"},
            {0, "home_country", "text"},
            {0, "gender", "text"},
            {1, "stu_id", "number"},
            {1, "pet_id", "number"},
            {2, "pet_id", "number"},
            {2, "pet_type", "text"},
            {2, "pet_age", "number"},
            {2, "weight", "number"},
        },
        {1, 8}, {{6, 1}, {7, 8}}));

    // flights: Flight(1-5), Airport(6-8), President(9-11)
    // destination FK listed before origin: join inference prefers it
    catalog.push_back(descriptor(
        "flights", {"Flight", "Airport", "President"},
        {
            {0, "flight_no", "number"},
            {0, "origin", "text"},
            {0, "destination", "text"},
            {0, "aircraft", "text"},
            {0, "departure_day", "time"},
            {1, "code", "text"},
            {1, "name", "text"},
            {1, "city", "text"},
            {2, "president_id", "number"},
            {2, "name", "text"},
            {2, "took_office", "number"},
        },
        {1, 6, 9}, {{3, 6}, {2, 6}}));

    // singer: singer(1-5), album(6-10)
    catalog.push_back(descriptor(
        "singer", {"singer", "album"},
        {
            {0, "singer_id", "number"},
            {0, "name", "text"},
            {0, "age", "number"},
            {0, "country", "text"},
            {0, "net_worth", "number"},
            {1, "album_id", "number"},
            {1, "singer_id", "number"},
            {1, "title", "text"},
            {1, "release_year", "number"},
            {1, "release_date", "time"},
        },
        {1, 6}, {{7, 1}}));

    // chain: a(1-2) b(3-5) c(6-8) d(9-11) e(12-14), a path graph
    catalog.push_back(descriptor(
        "chain", {"a", "b", "c", "d", "e"},
        {
            {0, "a_id", "number"},
            {0, "name", "text"},
            {1, "b_id", "number"},
            {1, "a_id", "number"},
            {1, "name", "text"},
            {2, "c_id", "number"},
            {2, "b_id", "number"},
            {2, "name", "text"},
            {3, "d_id", "number"},
            {3, "c_id", "number"},
            {3, "name", "text"},
            {4, "e_id", "number"},
            {4, "d_id", "number"},
            {4, "name", "text"},
        },
        {1, 3, 6, 9, 12}, {{4, 1}, {7, 3}, {10, 6}, {13, 9}}));

    // school: classroom(1-3), faculty(4-9), employees(10-15), student_roster(16-19)
    catalog.push_back(descriptor(
        "school", {"classroom", "faculty", "employees", "student_roster"},
        {
            {0, "room_id", "number"},
            {0, "grade", "number"},
            {0, "teacher", "text"},
            {1, "fac_id", "number"},
            {1, "first_name", "text"},
            {1, "last_name", "text"},
            {1, "rank", "text"},
            {1, "hand", "text"},
            {1, "tenured", "boolean"},
            {2, "emp_id", "number"},
            {2, "first_name", "text"},
            {2, "last_name", "text"},
            {2, "hire_date", "time"},
            {2, "salary", "number"},
            {2, "manager_id", "number"},
            {3, "roster_id", "number"},
            {3, "name", "text"},
            {3, "gender", "text"},
            {3, "grade", "number"},
        },
        {1, 4, 10, 16}, {{15, 10}}));  // employees.manager_id -> employees.emp_id

    return catalog.dump(2);
}

void write_pets_db(const std::string& path) {
    fs::remove(path);
    SqliteDb db = SqliteDb::open_create(path);
    db.exec(R"sql(
CREATE TABLE Student (stu_id INTEGER PRIMARY KEY, name TEXT, age INTEGER, home_country TEXT, gender TEXT);
CREATE TABLE Has_Pet (stu_id INTEGER, pet_id INTEGER,
  FOREIGN KEY (stu_id) REFERENCES Student(stu_id), FOREIGN KEY (pet_id) REFERENCES Pet(pet_id));
CREATE TABLE Pet (pet_id INTEGER PRIMARY KEY, pet_type TEXT, pet_age INTEGER, weight REAL);
INSERT INTO Student VALUES
  (1,'Alice Martin',22,'France','F'),
  (2,'Bruno Keller',19,'France','M'),
  (3,'Chen Wei',24,'China','M'),
  (4,'Dora Ming',20,'France','F'),
  (5,'Erik Olsen',25,'Norway','M');
INSERT INTO Has_Pet VALUES (1,1),(1,2),(4,3),(3,4),(5,5);
INSERT INTO Pet VALUES
  (1,'cat',3,9.5),(2,'dog',5,20.0),(3,'dog',2,12.0),(4,'bird',1,0.5),(5,'cat',11,8.0);
)sql");
}

void write_flights_db(const std::string& path) {
    fs::remove(path);
    SqliteDb db = SqliteDb::open_create(path);
    db.exec(R"sql(
CREATE TABLE Flight (flight_no INTEGER PRIMARY KEY, origin TEXT, destination TEXT, aircraft TEXT, departure_day TEXT);
CREATE TABLE Airport (code TEXT PRIMARY KEY, name TEXT, city TEXT);
CREATE TABLE President (president_id INTEGER PRIMARY KEY, name TEXT, took_office INTEGER);
INSERT INTO Flight VALUES
  (10,'LAX','JFK','Airbus A340-300','8/12'),
  (11,'SFO','JFK','Boeing 747','9/3'),
  (12,'SFO','LAX','Airbus A320','8/5'),
  (13,'ORD','SFO','Boeing 737','12/24');
INSERT INTO Airport VALUES
  ('JFK','John F Kennedy International Airport','New York'),
  ('LAX','Los Angeles International Airport','Los Angeles'),
  ('SFO','San Francisco International Airport','San Francisco'),
  ('ORD','O''Hare International Airport','Chicago');
INSERT INTO President VALUES (1,'John F Kennedy',1961),(2,'Abraham Lincoln',1861);
)sql");
}

void write_singer_db(const std::string& path) {
    fs::remove(path);
    SqliteDb db = SqliteDb::open_create(path);
    db.exec(R"sql(
CREATE TABLE singer (singer_id INTEGER PRIMARY KEY, name TEXT, age INTEGER, country TEXT, net_worth REAL);
CREATE TABLE album (album_id INTEGER PRIMARY KEY, singer_id INTEGER, title TEXT, release_year INTEGER, release_date TEXT,
  FOREIGN KEY (singer_id) REFERENCES singer(singer_id));
INSERT INTO singer VALUES
  (1,'Elton John',75,'UK',500.5),
  (2,'Joan Baez',80,'USA',11.0),
  (3,'Prince Rogers',57,'USA',300.25),
  (4,'Madonna Ciccone',64,'USA',850.0),
  (5,'Celine Dion',54,'Canada',800.0);
INSERT INTO album VALUES
  (1,1,'Goodbye Yellow Brick Road',1973,'1973-10-05'),
  (2,1,'Honky Chateau',1972,'1972-05-19'),
  (3,2,'Diamonds And Rust',1975,'1975-04-01'),
  (4,3,'Purple Rain',1984,'1984-06-25'),
  (5,4,'Like A Prayer',1989,'1989-03-21'),
  (6,5,'Falling Into You',1996,'1996-03-11'),
  (7,1,'Goodbye England',1974,'1974-02-10'),
  (8,4,'Hello World',1992,'1992-08-09');
)sql");
}

void write_chain_db(const std::string& path) {
    fs::remove(path);
    SqliteDb db = SqliteDb::open_create(path);
    db.exec(R"sql(
CREATE TABLE a (a_id INTEGER PRIMARY KEY, name TEXT);
CREATE TABLE b (b_id INTEGER PRIMARY KEY, a_id INTEGER, name TEXT, FOREIGN KEY (a_id) REFERENCES a(a_id));
CREATE TABLE c (c_id INTEGER PRIMARY KEY, b_id INTEGER, name TEXT, FOREIGN KEY (b_id) REFERENCES b(b_id));
CREATE TABLE d (d_id INTEGER PRIMARY KEY, c_id INTEGER, name TEXT, FOREIGN KEY (c_id) REFERENCES c(c_id));
CREATE TABLE e (e_id INTEGER PRIMARY KEY, d_id INTEGER, name TEXT, FOREIGN KEY (d_id) REFERENCES d(d_id));
INSERT INTO a VALUES (1,'a one'),(2,'a two');
INSERT INTO b VALUES (1,1,'b one'),(2,2,'b two');
INSERT INTO c VALUES (1,1,'c one'),(2,2,'c two');
INSERT INTO d VALUES (1,1,'d one'),(2,2,'d two');
INSERT INTO e VALUES (1,1,'e one'),(2,2,'e two');
)sql");
}

void write_school_db(const std::string& path) {
    fs::remove(path);
    SqliteDb db = SqliteDb::open_create(path);
    db.exec(R"sql(
CREATE TABLE classroom (room_id INTEGER PRIMARY KEY, grade INTEGER, teacher TEXT);
CREATE TABLE faculty (fac_id INTEGER PRIMARY KEY, first_name TEXT, last_name TEXT, rank TEXT, hand TEXT, tenured INTEGER);
CREATE TABLE employees (emp_id INTEGER PRIMARY KEY, first_name TEXT, last_name TEXT, hire_date TEXT, salary REAL, manager_id INTEGER,
  FOREIGN KEY (manager_id) REFERENCES employees(emp_id));
CREATE TABLE student_roster (roster_id INTEGER PRIMARY KEY, name TEXT, gender TEXT, grade INTEGER);
INSERT INTO classroom VALUES (1,4,'Ms Frizzle'),(2,5,'Mr Chips');
INSERT INTO faculty VALUES
  (1,'Ada','Lovelace','Professor','L',1),
  (2,'Han','Solo','Instructor','R',0),
  (3,'Grace','Hopper','Professor','R',1),
  (4,'Alan','Turing','Instructor','L',0);
INSERT INTO employees VALUES
  (1,'Mary','Long','2015-03-02',5000,NULL),
  (2,'Mark','Smith','2016-07-15',4500,1),
  (3,'Nancy','Drew','2017-01-20',4000,1),
  (4,'Hans','Gruber','2018-11-05',5500,2),
  (5,'Paula','May','2019-08-09',3900,2);
INSERT INTO student_roster VALUES
  (1,'Tim Fox','M',4),(2,'Sue Ray','F',4),(3,'Ann Lee','F',5),(4,'Bob Cat','M',4),(5,'May Poppins','F',4);
)sql");
}

const DatabaseSchema& FixtureSet::schema(const std::string& db_id) const {
    for (const DatabaseSchema& s : schemas) {
        if (s.db_id == db_id) return s;
    }
    throw std::runtime_error("fixture schema not found: " + db_id);
}

std::string FixtureSet::db_path(const std::string& db_id) const {
    return (fs::path(db_dir) / (db_id + ".sqlite")).string();
}

SqliteDb FixtureSet::open(const std::string& db_id) const {
    return SqliteDb::open_read_only(db_path(db_id));
}

const FixtureSet& shared() {
    static const FixtureSet set = build_all(
        (fs::temp_directory_path() / ("nl2sql_fixtures_" + std::to_string(::getpid()))).string());
    return set;
}

FixtureSet build_all(const std::string& root) {
    FixtureSet set;
    set.root = root;
    set.db_dir = (fs::path(root) / "database").string();
    set.catalog_path = (fs::path(root) / "tables.json").string();
    fs::create_directories(set.db_dir);
    {
        std::ofstream out(set.catalog_path);
        out << catalog_json();
    }
    write_pets_db(set.db_path("pets"));
    write_flights_db(set.db_path("flights"));
    write_singer_db(set.db_path("singer"));
    write_chain_db(set.db_path("chain"));
    write_school_db(set.db_path("school"));
    CatalogLoadResult loaded = load_schema_catalog(set.catalog_path);
    if (!loaded.rejected.empty()) {
        throw std::runtime_error("fixture catalog rejected: " + loaded.rejected[0].reason);
    }
    set.schemas = std::move(loaded.schemas);
    return set;
}

}  // namespace nl2sql::fixtures
