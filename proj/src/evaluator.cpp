#include "nl2sql/evaluator.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "nl2sql/sql_parser.hpp"

namespace nl2sql {

using nlohmann::json;

ExecutionOutcome execute(SqliteDb& db, const std::string& sql, const ExecuteConfig& config) {
    ExecutionOutcome outcome;
    QueryResult result = db.query_limited(sql, config.timeout, config.row_cap);
    outcome.elapsed = result.elapsed;
    outcome.columns = result.column_count;
    if (result.error) {
        outcome.error = result.error;
        return outcome;
    }
    outcome.rows = std::move(result.rows);
    return outcome;
}

namespace {

constexpr double kRelTolerance = 1e-9;

bool numeric_cell(const CellValue& cell, double& out) {
    if (const auto* i = std::get_if<std::int64_t>(&cell)) {
        out = static_cast<double>(*i);
        return true;
    }
    if (const auto* d = std::get_if<double>(&cell)) {
        out = *d;
        return true;
    }
    return false;
}

bool cells_equal(const CellValue& a, const CellValue& b) {
    bool a_null = std::holds_alternative<std::monostate>(a);
    bool b_null = std::holds_alternative<std::monostate>(b);
    if (a_null || b_null) return a_null && b_null;
    double x, y;
    bool a_num = numeric_cell(a, x);
    bool b_num = numeric_cell(b, y);
    if (a_num != b_num) return false;
    if (a_num) {
        double scale = std::max({1.0, std::abs(x), std::abs(y)});
        return std::abs(x - y) <= kRelTolerance * scale;
    }
    return std::get<std::string>(a) == std::get<std::string>(b);
}

bool rows_equal(const Row& a, const Row& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (!cells_equal(a[i], b[i])) return false;
    }
    return true;
}

// total order for canonical multiset comparison: type rank, then value
int cell_rank(const CellValue& cell) {
    if (std::holds_alternative<std::monostate>(cell)) return 0;
    if (std::holds_alternative<std::int64_t>(cell) || std::holds_alternative<double>(cell)) return 1;
    return 2;
}

bool cell_less(const CellValue& a, const CellValue& b) {
    int ra = cell_rank(a);
    int rb = cell_rank(b);
    if (ra != rb) return ra < rb;
    if (ra == 1) {
        double x = 0, y = 0;
        numeric_cell(a, x);
        numeric_cell(b, y);
        return x < y;
    }
    if (ra == 2) return std::get<std::string>(a) < std::get<std::string>(b);
    return false;
}

bool row_less(const Row& a, const Row& b) {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(), cell_less);
}

}  // namespace

bool results_equivalent(const ExecutionOutcome& pred, const ExecutionOutcome& gold) {
    if (!pred.ok() || !gold.ok()) return false;
    if (pred.rows.size() != gold.rows.size()) return false;
    if (!pred.rows.empty() && pred.rows[0].size() != gold.rows[0].size()) return false;
    if (gold.ordered) {
        for (std::size_t i = 0; i < pred.rows.size(); ++i) {
            if (!rows_equal(pred.rows[i], gold.rows[i])) return false;
        }
        return true;
    }
    std::vector<Row> a = pred.rows;
    std::vector<Row> b = gold.rows;
    std::sort(a.begin(), a.end(), row_less);
    std::sort(b.begin(), b.end(), row_less);
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (!rows_equal(a[i], b[i])) return false;
    }
    return true;
}

std::string difficulty_name(Difficulty d) {
    switch (d) {
        case Difficulty::Easy: return "easy";
        case Difficulty::Medium: return "medium";
        case Difficulty::Hard: return "hard";
        case Difficulty::ExtraHard: return "extra";
    }
    return "extra";
}

namespace {

int count_cond_leaves(const SqlCond* cond) {
    if (!cond) return 0;
    if (cond->node == SqlCond::Node::Leaf) return 1;
    return count_cond_leaves(cond->left.get()) + count_cond_leaves(cond->right.get());
}

int count_or_connectors(const SqlCond* cond) {
    if (!cond || cond->node == SqlCond::Node::Leaf) return 0;
    int self = cond->node == SqlCond::Node::Or ? 1 : 0;
    return self + count_or_connectors(cond->left.get()) + count_or_connectors(cond->right.get());
}

void visit_leaves(const SqlCond* cond, const std::function<void(const SqlCondition&)>& fn) {
    if (!cond) return;
    if (cond->node == SqlCond::Node::Leaf) {
        fn(cond->leaf);
        return;
    }
    visit_leaves(cond->left.get(), fn);
    visit_leaves(cond->right.get(), fn);
}

int count_component1(const SqlQuery& q) {
    const SqlSelectCore& core = q.core;
    int count = 0;
    if (core.where) ++count;
    if (!core.group_by.empty()) ++count;
    if (!core.order_by.empty()) ++count;
    if (core.limit) ++count;
    count += static_cast<int>(core.joins.size());  // table_units - 1
    count += count_or_connectors(core.where.get()) + count_or_connectors(core.having.get());
    auto count_likes = [&](const SqlCond* cond) {
        int likes = 0;
        visit_leaves(cond, [&](const SqlCondition& leaf) {
            if (leaf.op == CmpOp::Like || leaf.op == CmpOp::NotLike) ++likes;
        });
        return likes;
    };
    count += count_likes(core.where.get()) + count_likes(core.having.get());
    return count;
}

int count_component2(const SqlQuery& q) {
    int nested = 0;
    auto count_sub = [&](const SqlCond* cond) {
        visit_leaves(cond, [&](const SqlCondition& leaf) {
            if (leaf.subquery) ++nested;
        });
    };
    count_sub(q.core.where.get());
    count_sub(q.core.having.get());
    if (q.set_op != SqlSetOp::None) ++nested;
    return nested;
}

int count_aggs(const std::vector<SqlColUnit>& units) {
    int count = 0;
    for (const SqlColUnit& u : units) {
        if (u.agg != AggOp::None) ++count;
    }
    return count;
}

int count_others(const SqlQuery& q) {
    const SqlSelectCore& core = q.core;
    int count = 0;
    int agg_count = count_aggs(core.select_items);
    auto add_cond_aggs = [&](const SqlCond* cond) {
        visit_leaves(cond, [&](const SqlCondition& leaf) {
            if (leaf.lhs.agg != AggOp::None) ++agg_count;
        });
    };
    add_cond_aggs(core.where.get());
    add_cond_aggs(core.having.get());
    for (const SqlOrderItem& item : core.order_by) {
        if (item.col.agg != AggOp::None) ++agg_count;
    }
    if (agg_count > 1) ++count;
    if (core.select_items.size() > 1) ++count;
    if (count_cond_leaves(core.where.get()) > 1) ++count;
    if (core.group_by.size() > 1) ++count;
    return count;
}

}  // namespace

Difficulty classify_difficulty(const std::string& gold_sql) {
    SqlQuery q;
    try {
        q = parse_sql(gold_sql);
    } catch (const SqlParseError&) {
        return Difficulty::ExtraHard;
    }
    int comp1 = count_component1(q);
    int comp2 = count_component2(q);
    int others = count_others(q);
    if (comp1 <= 1 && others == 0 && comp2 == 0) return Difficulty::Easy;
    if ((others <= 2 && comp1 <= 1 && comp2 == 0) || (comp1 <= 2 && others < 2 && comp2 == 0)) {
        return Difficulty::Medium;
    }
    if ((others > 2 && comp1 <= 2 && comp2 == 0) ||
        (comp1 > 2 && comp1 <= 3 && others <= 2 && comp2 == 0) ||
        (comp1 <= 1 && others == 0 && comp2 <= 1)) {
        return Difficulty::Hard;
    }
    return Difficulty::ExtraHard;
}

namespace {

StageStats stats_of(const std::vector<double>& xs) {
    StageStats s;
    if (xs.empty()) return s;
    double sum = 0;
    for (double x : xs) sum += x;
    s.mean_ms = sum / static_cast<double>(xs.size());
    double var = 0;
    for (double x : xs) var += (x - s.mean_ms) * (x - s.mean_ms);
    s.std_ms = std::sqrt(var / static_cast<double>(xs.size()));
    return s;
}

bool gold_is_ordered(const std::string& gold_sql) {
    try {
        SqlQuery q = parse_sql(gold_sql);
        const SqlQuery* cur = &q;
        while (cur) {
            if (!cur->core.order_by.empty()) return true;
            cur = cur->rhs.get();
        }
    } catch (const SqlParseError&) {
    }
    return false;
}

}  // namespace

EvalReport evaluate_set(const std::vector<SampleRecord>& samples, const SystemUnderTest& system,
                        const std::function<SqliteDb(const std::string& db_id)>& open_db,
                        const EvalConfig& config) {
    EvalReport report;
    report.samples.resize(samples.size());

    std::mutex next_mutex;
    std::size_t next = 0;

    auto worker = [&]() {
        std::map<std::string, SqliteDb> connections;  // per-worker connections
        while (true) {
            std::size_t i;
            {
                std::lock_guard<std::mutex> lock(next_mutex);
                if (next >= samples.size()) return;
                i = next++;
            }
            const SampleRecord& sample = samples[i];
            SampleVerdict& verdict = report.samples[i];
            verdict.sample_index = i;
            verdict.db_id = sample.db_id;
            verdict.difficulty = classify_difficulty(sample.gold_sql);
            if (!sample.usable()) {
                verdict.failure = "sample flagged: " + *sample.flag;
                continue;
            }
            try {
                system(sample, verdict);
            } catch (const std::exception& e) {
                verdict.failure = std::string("system error: ") + e.what();
            }
            if (!verdict.failure.empty() || verdict.predicted_sql.empty()) {
                if (verdict.failure.empty()) verdict.failure = "no prediction";
                continue;
            }
            auto conn = connections.find(sample.db_id);
            if (conn == connections.end()) {
                try {
                    conn = connections.emplace(sample.db_id, open_db(sample.db_id)).first;
                } catch (const std::exception& e) {
                    verdict.failure = std::string("database open: ") + e.what();
                    continue;
                }
            }
            ExecutionOutcome pred = execute(conn->second, verdict.predicted_sql, config.execution);
            verdict.timings.query_execution_ms =
                static_cast<double>(pred.elapsed.count()) / 1000.0;
            ExecutionOutcome gold = execute(conn->second, sample.gold_sql, config.execution);
            gold.ordered = gold_is_ordered(sample.gold_sql);
            if (!gold.ok()) {
                verdict.failure = "gold execution: " + *gold.error;
                continue;
            }
            if (!pred.ok()) {
                verdict.failure = "prediction execution: " + *pred.error;
                continue;
            }
            verdict.equivalent = results_equivalent(pred, gold);
        }
    };

    int nworkers = std::max(1, config.workers);
    if (nworkers == 1) {
        worker();
    } else {
        std::vector<std::thread> threads;
        threads.reserve(static_cast<std::size_t>(nworkers));
        for (int w = 0; w < nworkers; ++w) threads.emplace_back(worker);
        for (std::thread& t : threads) t.join();
    }

    report.total = samples.size();
    std::vector<double> pre, lookup, synth, post, exec;
    for (const SampleVerdict& v : report.samples) {
        if (v.equivalent) ++report.equivalent;
        auto& bucket = report.by_difficulty[static_cast<std::size_t>(v.difficulty)];
        ++bucket.first;
        if (v.equivalent) ++bucket.second;
        pre.push_back(v.timings.pre_processing_ms);
        lookup.push_back(v.timings.value_lookup_ms);
        synth.push_back(v.timings.synthesis_ms);
        post.push_back(v.timings.post_processing_ms);
        exec.push_back(v.timings.query_execution_ms);
    }
    report.overall_accuracy =
        report.total == 0 ? 0.0
                          : static_cast<double>(report.equivalent) / static_cast<double>(report.total);
    report.pre_processing = stats_of(pre);
    report.value_lookup = stats_of(lookup);
    report.synthesis = stats_of(synth);
    report.post_processing = stats_of(post);
    report.query_execution = stats_of(exec);
    return report;
}

std::string EvalReport::to_json() const {
    json doc;
    doc["overall_accuracy"] = overall_accuracy;
    json diff = json::object();
    static const char* names[] = {"easy", "medium", "hard", "extra"};
    for (std::size_t d = 0; d < 4; ++d) {
        json entry;
        entry["count"] = by_difficulty[d].first;
        entry["equivalent"] = by_difficulty[d].second;
        entry["accuracy"] = by_difficulty[d].first == 0
                                ? 0.0
                                : static_cast<double>(by_difficulty[d].second) /
                                      static_cast<double>(by_difficulty[d].first);
        diff[names[d]] = entry;
    }
    doc["by_difficulty"] = diff;
    json stages = json::object();
    auto stage = [](const StageStats& s) {
        json j;
        j["mean"] = s.mean_ms;
        j["std"] = s.std_ms;
        return j;
    };
    stages["pre_processing"] = stage(pre_processing);
    stages["value_lookup"] = stage(value_lookup);
    stages["synthesis"] = stage(synthesis);
    stages["post_processing"] = stage(post_processing);
    stages["query_execution"] = stage(query_execution);
    doc["stage_timing_ms"] = stages;
    json arr = json::array();
    for (const SampleVerdict& v : samples) {
        json s;
        s["index"] = v.sample_index;
        s["db_id"] = v.db_id;
        s["difficulty"] = difficulty_name(v.difficulty);
        s["equivalent"] = v.equivalent;
        s["predicted_sql"] = v.predicted_sql;
        s["failure"] = v.failure;
        arr.push_back(std::move(s));
    }
    doc["samples"] = std::move(arr);
    return doc.dump(2);
}

std::string EvalReport::to_table() const {
    std::ostringstream out;
    out << "samples: " << total << "  equivalent: " << equivalent << "  accuracy: ";
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", overall_accuracy);
    out << buf << "\n";
    out << "difficulty    count  equivalent  accuracy\n";
    static const char* names[] = {"easy", "medium", "hard", "extra"};
    for (std::size_t d = 0; d < 4; ++d) {
        double acc = by_difficulty[d].first == 0
                         ? 0.0
                         : static_cast<double>(by_difficulty[d].second) /
                               static_cast<double>(by_difficulty[d].first);
        std::snprintf(buf, sizeof(buf), "%.4f", acc);
        out << names[d];
        for (std::size_t pad = std::string(names[d]).size(); pad < 14; ++pad) out << ' ';
        out << by_difficulty[d].first << "      " << by_difficulty[d].second << "           " << buf
            << "\n";
    }
    auto line = [&](const char* name, const StageStats& s) {
        std::snprintf(buf, sizeof(buf), "%.2f", s.mean_ms);
        out << name << ": mean " << buf << " ms";
        std::snprintf(buf, sizeof(buf), "%.2f", s.std_ms);
        out << ", std " << buf << " ms\n";
    };
    line("pre-processing ", pre_processing);
    line("value lookup   ", value_lookup);
    line("synthesis      ", synthesis);
    line("post-processing", post_processing);
    line("query execution", query_execution);
    return out.str();
}

std::string EvalReport::to_csv() const {
    std::ostringstream out;
    out << "index,db_id,difficulty,equivalent,failure\n";
    for (const SampleVerdict& v : samples) {
        std::string failure = v.failure;
        for (char& c : failure) {
            if (c == ',' || c == '\n') c = ';';
        }
        out << v.sample_index << "," << v.db_id << "," << difficulty_name(v.difficulty) << ","
            << (v.equivalent ? 1 : 0) << "," << failure << "\n";
    }
    return out.str();
}

}  // namespace nl2sql
