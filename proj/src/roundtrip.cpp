#include "nl2sql/roundtrip.hpp"

#include <map>

#include <json.hpp>

#include "nl2sql/compiler.hpp"
#include "nl2sql/sql_parser.hpp"
#include "nl2sql/sql_to_semql.hpp"

namespace nl2sql {

using nlohmann::json;

RoundtripReport roundtrip_audit(
    const std::vector<SampleRecord>& samples,
    const std::function<const DatabaseSchema*(const std::string& db_id)>& schema_of,
    const std::function<SqliteDb(const std::string& db_id)>& open_db,
    const RoundtripConfig& config) {
    RoundtripReport report;
    std::map<std::string, SqliteDb> connections;
    std::map<std::string, SchemaGraph> graphs;

    for (std::size_t i = 0; i < samples.size(); ++i) {
        const SampleRecord& sample = samples[i];
        RoundtripOutcome outcome;
        outcome.sample_index = i;
        outcome.db_id = sample.db_id;
        if (!sample.usable()) {
            outcome.reason = "flagged: " + *sample.flag;
            ++report.rejection_reasons[outcome.reason];
            report.outcomes.push_back(std::move(outcome));
            continue;
        }
        const DatabaseSchema* schema = schema_of(sample.db_id);
        if (!schema) {
            outcome.reason = "unknown_db_id";
            ++report.rejection_reasons[outcome.reason];
            report.outcomes.push_back(std::move(outcome));
            continue;
        }
        auto graph_it = graphs.find(sample.db_id);
        if (graph_it == graphs.end()) {
            graph_it = graphs.emplace(sample.db_id, build_schema_graph(*schema)).first;
        }
        ConvertResult converted = sql_to_semql(sample.gold_sql, *schema, graph_it->second);
        if (!converted.ok()) {
            outcome.reason = converted.reason;
            ++report.rejection_reasons[outcome.reason];
            report.outcomes.push_back(std::move(outcome));
            continue;
        }
        outcome.accepted = true;
        ++report.accepted;

        CandidateSet candidates;
        for (const GoldLiteral& lit : converted.literals) {
            ValueCandidate cand;
            cand.surface = lit.surface;
            cand.origin = CandidateOrigin::Verbatim;
            cand.exempt_from_validation = true;
            candidates.items.push_back(std::move(cand));
        }
        try {
            CompiledQuery compiled =
                compile(*converted.tree, *schema, graph_it->second, candidates);
            outcome.compiled_sql = compiled.sql;
        } catch (const std::exception& e) {
            outcome.reason = std::string("compile: ") + e.what();
            report.outcomes.push_back(std::move(outcome));
            if (config.fail_fast) break;
            continue;
        }
        auto conn = connections.find(sample.db_id);
        if (conn == connections.end()) {
            try {
                conn = connections.emplace(sample.db_id, open_db(sample.db_id)).first;
            } catch (const std::exception& e) {
                outcome.reason = std::string("database: ") + e.what();
                report.outcomes.push_back(std::move(outcome));
                continue;
            }
        }
        ExecutionOutcome gold = execute(conn->second, sample.gold_sql, config.execution);
        ExecutionOutcome pred = execute(conn->second, outcome.compiled_sql, config.execution);
        if (!gold.ok()) {
            outcome.reason = "gold execution: " + *gold.error;
            report.outcomes.push_back(std::move(outcome));
            continue;
        }
        bool ordered = false;
        try {
            SqlQuery q = parse_sql(sample.gold_sql);
            const SqlQuery* cur = &q;
            while (cur) {
                if (!cur->core.order_by.empty()) ordered = true;
                cur = cur->rhs.get();
            }
        } catch (const SqlParseError&) {
        }
        gold.ordered = ordered;
        outcome.equivalent = results_equivalent(pred, gold);
        if (outcome.equivalent) {
            ++report.equivalent;
        } else if (outcome.reason.empty()) {
            outcome.reason = pred.ok() ? "results differ" : "prediction execution: " + *pred.error;
        }
        bool failed = !outcome.equivalent;
        report.outcomes.push_back(std::move(outcome));
        if (failed && config.fail_fast) break;
    }
    return report;
}

std::string RoundtripReport::to_json() const {
    json doc;
    doc["samples"] = outcomes.size();
    doc["accepted"] = accepted;
    doc["equivalent"] = equivalent;
    doc["acceptance_rate"] = acceptance_rate();
    json reasons = json::object();
    for (const auto& [reason, count] : rejection_reasons) reasons[reason] = count;
    doc["rejection_reasons"] = reasons;
    json arr = json::array();
    for (const RoundtripOutcome& o : outcomes) {
        json entry;
        entry["index"] = o.sample_index;
        entry["db_id"] = o.db_id;
        entry["accepted"] = o.accepted;
        entry["equivalent"] = o.equivalent;
        entry["reason"] = o.reason;
        entry["compiled_sql"] = o.compiled_sql;
        arr.push_back(std::move(entry));
    }
    doc["outcomes"] = std::move(arr);
    return doc.dump(2);
}

}  // namespace nl2sql
