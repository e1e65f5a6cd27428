#include "nl2sql/stats.hpp"

#include <json.hpp>

#include "nl2sql/sql_parser.hpp"

namespace nl2sql {

using nlohmann::json;

ValueStats value_stats(const std::vector<SampleRecord>& samples) {
    ValueStats stats;
    for (const SampleRecord& sample : samples) {
        ++stats.samples;
        if (!sample.usable()) {
            ++stats.parse_failures;
            continue;
        }
        SqlQuery query;
        try {
            query = parse_sql(sample.gold_sql);
        } catch (const SqlParseError&) {
            ++stats.parse_failures;
            continue;
        }
        std::size_t count = collect_literals(query, true).size();
        ++stats.per_query_counts[static_cast<int>(count)];
        if (count > 0) {
            ++stats.queries_with_values;
            stats.total_values += count;
        }
    }
    return stats;
}

std::string ValueStats::to_json() const {
    json doc;
    json buckets = json::object();
    for (const auto& [count, queries] : per_query_counts) {
        buckets[std::to_string(count)] = queries;
    }
    doc["buckets"] = buckets;
    doc["samples"] = samples;
    doc["parse_failures"] = parse_failures;
    doc["queries_with_values"] = queries_with_values;
    doc["total_values"] = total_values;
    return doc.dump(2);
}

}  // namespace nl2sql
