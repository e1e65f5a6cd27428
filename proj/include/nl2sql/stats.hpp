#pragma once

#include <map>
#include <string>
#include <vector>

#include "nl2sql/schema.hpp"

namespace nl2sql {

// Literal-count distribution over gold queries. LIMIT counts are included
// as values; unparseable statements are tallied separately.
struct ValueStats {
    std::map<int, std::size_t> per_query_counts;  // values-per-query -> queries
    std::size_t samples = 0;
    std::size_t parse_failures = 0;
    std::size_t queries_with_values = 0;
    std::size_t total_values = 0;

    std::string to_json() const;
};

ValueStats value_stats(const std::vector<SampleRecord>& samples);

}  // namespace nl2sql
