#include "nl2sql/value_index.hpp"

#include <algorithm>
#include <iostream>
#include <map>
#include <stdexcept>

#include <json.hpp>

#include "nl2sql/util.hpp"

namespace nl2sql {

using nlohmann::json;

std::string ValueIndex::normalize(const std::string& value) {
    std::string s = collapse_whitespace(to_lower(value));
    if (is_number_literal(s)) return canonical_number(s);
    return s;
}

std::uint64_t ValueIndex::charmap_of(const std::string& s) {
    std::uint64_t map = 0;
    for (unsigned char c : s) map |= std::uint64_t{1} << (c % 64);
    return map;
}

void ValueIndex::insert(const std::string& key, ValueLocation loc) {
    if (key.empty()) return;
    auto [it, inserted] = key_ids_.try_emplace(key, static_cast<int>(keys_.size()));
    if (inserted) {
        keys_.push_back(Key{key, charmap_of(key)});
        entries_.emplace_back();
    }
    std::vector<ValueLocation>& locs = entries_[static_cast<std::size_t>(it->second)];
    if (std::find(locs.begin(), locs.end(), loc) == locs.end()) {
        locs.push_back(std::move(loc));
    }
}

void ValueIndex::finalize() {
    keys_by_length_.clear();
    for (int id = 0; id < static_cast<int>(keys_.size()); ++id) {
        std::size_t len = keys_[static_cast<std::size_t>(id)].norm.size();
        if (keys_by_length_.size() <= len) keys_by_length_.resize(len + 1);
        keys_by_length_[len].push_back(id);
    }
    std::sort(overflow_.begin(), overflow_.end());
}

ValueIndex ValueIndex::build(SqliteDb& db, const DatabaseSchema& schema,
                             const IndexConfig& config) {
    ValueIndex index;
    std::vector<std::string> present = db.table_names();
    auto table_present = [&](const std::string& name) {
        for (const std::string& t : present) {
            if (to_lower(t) == to_lower(name)) return true;
        }
        return false;
    };

    for (int col = 1; col < static_cast<int>(schema.columns.size()); ++col) {
        const ColumnDef& def = schema.columns[col];
        const std::string& table = schema.tables[static_cast<std::size_t>(def.table_index)];
        if (!table_present(table)) {
            std::cerr << "warning: table " << table << " missing from " << db.path() << ", skipped\n";
            continue;
        }
        std::string qtable = quote_identifier(table);
        std::string qcol = quote_identifier(def.name);
        std::size_t distinct = 0;
        try {
            auto rows = db.query("SELECT COUNT(DISTINCT " + qcol + ") FROM " + qtable);
            if (!rows.empty() && std::holds_alternative<std::int64_t>(rows[0][0])) {
                distinct = static_cast<std::size_t>(std::get<std::int64_t>(rows[0][0]));
            }
        } catch (const std::exception& e) {
            std::cerr << "warning: cannot scan " << table << "." << def.name << ": " << e.what()
                      << "\n";
            continue;
        }
        if (distinct > config.per_column_cap) {
            index.overflow_.push_back(col);
            continue;
        }
        std::vector<Row> rows =
            db.query("SELECT DISTINCT " + qcol + " FROM " + qtable + " WHERE " + qcol +
                     " IS NOT NULL");
        for (const Row& row : rows) {
            std::string raw = cell_to_string(row[0]);
            if (raw.empty()) continue;
            std::string key = normalize(raw);
            ValueLocation loc{def.table_index, col, raw};
            index.insert(key, loc);
            // constituent tokens of multi-token values point at the full value
            std::vector<Token> tokens = tokenize(key);
            if (tokens.size() > 1) {
                for (const Token& t : tokens) index.insert(t.text, loc);
            }
        }
    }
    for (const IndexAlias& alias : config.aliases) {
        std::string key = normalize(alias.surface);
        index.insert(key, alias.location);
        std::vector<Token> tokens = tokenize(key);
        if (tokens.size() > 1) {
            for (const Token& t : tokens) index.insert(t.text, alias.location);
        }
    }
    index.finalize();
    return index;
}

const std::vector<ValueLocation>& ValueIndex::lookup_exact(const std::string& token) const {
    static const std::vector<ValueLocation> kEmpty;
    auto it = key_ids_.find(normalize(token));
    if (it == key_ids_.end()) return kEmpty;
    return entries_[static_cast<std::size_t>(it->second)];
}

bool ValueIndex::column_overflowed(int column_index) const {
    return std::binary_search(overflow_.begin(), overflow_.end(), column_index);
}

const std::vector<ValueLocation>& ValueIndex::locations_of_key(int key_id) const {
    return entries_[static_cast<std::size_t>(key_id)];
}

std::string ValueIndex::to_json() const {
    // std::map gives lexicographic key order, keeping rebuilds byte-identical
    std::map<std::string, json> sorted;
    for (const auto& [key, id] : key_ids_) {
        json locs = json::array();
        std::vector<ValueLocation> entry = entries_[static_cast<std::size_t>(id)];
        std::sort(entry.begin(), entry.end(), [](const ValueLocation& a, const ValueLocation& b) {
            return std::tie(a.table_index, a.column_index, a.raw_value) <
                   std::tie(b.table_index, b.column_index, b.raw_value);
        });
        for (const ValueLocation& loc : entry) {
            locs.push_back(json::array({loc.table_index, loc.column_index, loc.raw_value}));
        }
        sorted.emplace(key, std::move(locs));
    }
    json doc;
    doc["entries"] = json::object();
    for (auto& [key, locs] : sorted) doc["entries"][key] = std::move(locs);
    doc["overflow_columns"] = overflow_;
    return doc.dump(1);
}

ValueIndex ValueIndex::from_json(const std::string& text) {
    json doc = json::parse(text);
    ValueIndex index;
    for (const auto& [key, locs] : doc.at("entries").items()) {
        for (const json& loc : locs) {
            index.insert(key, ValueLocation{loc.at(0).get<int>(), loc.at(1).get<int>(),
                                            loc.at(2).get<std::string>()});
        }
    }
    for (const json& col : doc.at("overflow_columns")) {
        index.overflow_.push_back(col.get<int>());
    }
    index.finalize();
    return index;
}

}  // namespace nl2sql
