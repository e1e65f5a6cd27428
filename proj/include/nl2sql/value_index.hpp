#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "nl2sql/schema.hpp"
#include "nl2sql/sqlite_db.hpp"

namespace nl2sql {

struct ValueLocation {
    int table_index = -1;
    int column_index = -1;
    std::string raw_value;  // exactly as stored in the database

    bool operator==(const ValueLocation& other) const = default;
};

// Extra index rows injected at build time (e.g. known synonyms mapping a
// long surface form onto the stored value).
struct IndexAlias {
    std::string surface;
    ValueLocation location;
};

struct IndexConfig {
    // Columns with more distinct values than this are marked overflow and
    // not enumerated; membership is answered by direct queries instead.
    std::size_t per_column_cap = 1000000;
    std::vector<IndexAlias> aliases;
};

// Inverted index over database cell values. Keys are normalized (case-fold,
// trim, whitespace collapse, canonical decimals); multi-token values are
// additionally indexed under each constituent token so partial lookups like
// "Kennedy" reach "John F Kennedy Intl". Immutable after build and safe to
// share across threads.
class ValueIndex {
public:
    // Normalization applied to every key and lookup probe. Values must stay
    // exact (no stemming): validation depends on exact membership.
    static std::string normalize(const std::string& value);

    static ValueIndex build(SqliteDb& db, const DatabaseSchema& schema,
                            const IndexConfig& config = {});

    const std::vector<ValueLocation>& lookup_exact(const std::string& token) const;

    bool column_overflowed(int column_index) const;
    const std::vector<int>& overflow_columns() const { return overflow_; }

    // Distinct normalized keys with a precomputed character-class bitmap,
    // bucketed by length for sound similarity blocking.
    struct Key {
        std::string norm;
        std::uint64_t charmap = 0;
    };
    const std::vector<Key>& keys() const { return keys_; }
    const std::vector<std::vector<int>>& keys_by_length() const { return keys_by_length_; }
    const std::vector<ValueLocation>& locations_of_key(int key_id) const;

    std::size_t entry_count() const { return entries_.size(); }

    // Deterministic cache form: rebuilding the same database yields a
    // byte-identical document.
    std::string to_json() const;
    static ValueIndex from_json(const std::string& text);

    static std::uint64_t charmap_of(const std::string& s);

private:
    void insert(const std::string& key, ValueLocation loc);
    void finalize();

    std::unordered_map<std::string, int> key_ids_;
    std::vector<Key> keys_;
    std::vector<std::vector<ValueLocation>> entries_;  // parallel to keys_
    std::vector<std::vector<int>> keys_by_length_;
    std::vector<int> overflow_;
};

}  // namespace nl2sql
