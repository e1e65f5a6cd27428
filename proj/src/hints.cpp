#include "nl2sql/hints.hpp"

#include <algorithm>
#include <unordered_set>

#include "nl2sql/stemmer.hpp"
#include "nl2sql/values.hpp"

namespace nl2sql {

namespace {

// Multi-word phrases checked before single tokens.
const std::vector<std::vector<std::string>>& aggregation_phrases() {
    static const std::vector<std::vector<std::string>> phrases = {
        {"how", "many"},
        {"number", "of"},
    };
    return phrases;
}

const std::unordered_set<std::string>& aggregation_words() {
    static const std::unordered_set<std::string> words = {
        "count",   "average", "sum",    "total",  "maximum", "minimum",
        "most",    "least",   "highest", "lowest", "oldest",  "youngest",
    };
    return words;
}

const std::unordered_set<std::string>& superlative_words() {
    static const std::unordered_set<std::string> words = {
        "most", "least", "top", "first", "last", "best", "worst",
    };
    return words;
}

bool superlative_suffix(const std::string& lowered) {
    return lowered.size() >= 5 && lowered.compare(lowered.size() - 3, 3, "est") == 0;
}

struct IdentifierStems {
    std::vector<std::string> stems;
};

IdentifierStems stems_of_identifier(const std::string& name) {
    IdentifierStems out;
    for (const std::string& part : split_identifier(name)) {
        out.stems.push_back(porter_stem(part));
    }
    return out;
}

}  // namespace

std::string token_hint_name(TokenHint hint) {
    switch (hint) {
        case TokenHint::None: return "NONE";
        case TokenHint::Table: return "TABLE";
        case TokenHint::Column: return "COLUMN";
        case TokenHint::Value: return "VALUE";
        case TokenHint::Aggregation: return "AGGREGATION";
        case TokenHint::Superlative: return "SUPERLATIVE";
    }
    return "NONE";
}

std::string schema_hint_name(SchemaHint hint) {
    switch (hint) {
        case SchemaHint::None: return "NONE";
        case SchemaHint::Exact: return "EXACT";
        case SchemaHint::Partial: return "PARTIAL";
        case SchemaHint::ValueCandidateMatch: return "VALUE_CANDIDATE_MATCH";
    }
    return "NONE";
}

QuestionAnnotation annotate_question(const std::string& question, const DatabaseSchema& schema,
                                     const ValueIndex& index) {
    QuestionAnnotation annotation;
    annotation.tokens = tokenize(question);
    const std::size_t n = annotation.tokens.size();
    annotation.tags.resize(n);

    std::vector<std::string> stems(n);
    std::vector<std::string> lowered(n);
    for (std::size_t i = 0; i < n; ++i) {
        lowered[i] = to_lower(annotation.tokens[i].text);
        stems[i] = porter_stem(annotation.tokens[i].text);
    }

    std::vector<IdentifierStems> table_stems;
    table_stems.reserve(schema.tables.size());
    for (const std::string& t : schema.tables) table_stems.push_back(stems_of_identifier(t));
    std::vector<IdentifierStems> column_stems;
    column_stems.reserve(schema.columns.size());
    for (const ColumnDef& c : schema.columns) column_stems.push_back(stems_of_identifier(c.name));

    auto matches_at = [&](const IdentifierStems& ident, std::size_t start) {
        if (ident.stems.empty() || start + ident.stems.size() > n) return false;
        for (std::size_t k = 0; k < ident.stems.size(); ++k) {
            if (stems[start + k] != ident.stems[k]) return false;
        }
        return true;
    };
    auto span_free = [&](std::size_t start, std::size_t len) {
        for (std::size_t k = 0; k < len; ++k) {
            if (annotation.tags[start + k].hint != TokenHint::None) return false;
        }
        return true;
    };

    int next_group = 0;
    // schema identifier matches; longest contiguous match wins, scanning
    // left to right so earlier question positions claim their span first
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t best_len = 0;
        TokenHint best_hint = TokenHint::None;
        int best_target = -1;
        for (int t = 0; t < static_cast<int>(table_stems.size()); ++t) {
            if (matches_at(table_stems[static_cast<std::size_t>(t)], i)) {
                std::size_t len = table_stems[static_cast<std::size_t>(t)].stems.size();
                if (len > best_len) {
                    best_len = len;
                    best_hint = TokenHint::Table;
                    best_target = t;
                }
            }
        }
        for (int c = 1; c < static_cast<int>(column_stems.size()); ++c) {
            if (matches_at(column_stems[static_cast<std::size_t>(c)], i)) {
                std::size_t len = column_stems[static_cast<std::size_t>(c)].stems.size();
                if (len > best_len) {
                    best_len = len;
                    best_hint = TokenHint::Column;
                    best_target = c;
                }
            }
        }
        if (best_len == 0 || !span_free(i, best_len)) continue;
        int group = next_group++;
        for (std::size_t k = 0; k < best_len; ++k) {
            TokenAnnotation& tag = annotation.tags[i + k];
            tag.hint = best_hint;
            tag.group = group;
            if (best_hint == TokenHint::Table) tag.table_index = best_target;
            else tag.column_index = best_target;
        }
    }

    // database content matches, longest n-gram (up to 5 tokens) first
    constexpr std::size_t kMaxValueGram = 5;
    for (std::size_t i = 0; i < n; ++i) {
        if (annotation.tags[i].hint != TokenHint::None) continue;
        for (std::size_t len = std::min(kMaxValueGram, n - i); len >= 1; --len) {
            if (!span_free(i, len)) continue;
            std::string phrase;
            for (std::size_t k = 0; k < len; ++k) {
                if (k > 0) phrase += ' ';
                phrase += annotation.tokens[i + k].text;
            }
            const auto& hits = index.lookup_exact(phrase);
            if (hits.empty()) continue;
            int group = next_group++;
            for (std::size_t k = 0; k < len; ++k) {
                TokenAnnotation& tag = annotation.tags[i + k];
                tag.hint = TokenHint::Value;
                tag.group = group;
                tag.value_table = hits[0].table_index;
                tag.value_column = hits[0].column_index;
                tag.matched_value = hits[0].raw_value;
            }
            break;
        }
    }

    // aggregation phrases, then single-token lexicons
    for (const auto& phrase : aggregation_phrases()) {
        for (std::size_t i = 0; i + phrase.size() <= n; ++i) {
            bool match = true;
            for (std::size_t k = 0; k < phrase.size(); ++k) {
                if (lowered[i + k] != phrase[k]) {
                    match = false;
                    break;
                }
            }
            if (!match || !span_free(i, phrase.size())) continue;
            int group = next_group++;
            for (std::size_t k = 0; k < phrase.size(); ++k) {
                annotation.tags[i + k].hint = TokenHint::Aggregation;
                annotation.tags[i + k].group = group;
            }
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (annotation.tags[i].hint != TokenHint::None) continue;
        bool agg = aggregation_words().count(lowered[i]) > 0;
        bool sup = superlative_words().count(lowered[i]) > 0 || superlative_suffix(lowered[i]);
        if (agg && sup) {
            annotation.tags[i].hint = TokenHint::Superlative;
        } else if (sup) {
            annotation.tags[i].hint = TokenHint::Superlative;
        } else if (agg) {
            annotation.tags[i].hint = TokenHint::Aggregation;
        }
        if (annotation.tags[i].hint != TokenHint::None) annotation.tags[i].group = next_group++;
    }
    return annotation;
}

SchemaAnnotation annotate_schema(const std::string& question, const DatabaseSchema& schema,
                                 const std::vector<ValueCandidate>& validated) {
    SchemaAnnotation annotation;
    annotation.table_hints.assign(schema.tables.size(), SchemaHint::None);
    annotation.column_hints.assign(schema.columns.size(), SchemaHint::None);

    std::vector<Token> tokens = tokenize(question);
    std::vector<std::string> stems;
    stems.reserve(tokens.size());
    for (const Token& t : tokens) stems.push_back(porter_stem(t.text));

    auto classify = [&](const std::string& name) {
        IdentifierStems ident = stems_of_identifier(name);
        if (ident.stems.empty() || stems.size() < 1) return SchemaHint::None;
        for (std::size_t i = 0; i + ident.stems.size() <= stems.size(); ++i) {
            bool all = true;
            for (std::size_t k = 0; k < ident.stems.size(); ++k) {
                if (stems[i + k] != ident.stems[k]) {
                    all = false;
                    break;
                }
            }
            if (all) return SchemaHint::Exact;
        }
        for (const std::string& part : ident.stems) {
            if (std::find(stems.begin(), stems.end(), part) != stems.end()) {
                return SchemaHint::Partial;
            }
        }
        return SchemaHint::None;
    };

    for (std::size_t t = 0; t < schema.tables.size(); ++t) {
        annotation.table_hints[t] = classify(schema.tables[t]);
    }
    for (std::size_t c = 1; c < schema.columns.size(); ++c) {
        annotation.column_hints[c] = classify(schema.columns[c].name);
    }
    // value-candidate matches outrank partial name overlap, never exact
    for (const ValueCandidate& cand : validated) {
        if (!cand.location) continue;
        int col = cand.location->column;
        if (col <= 0 || col >= static_cast<int>(annotation.column_hints.size())) continue;
        if (annotation.column_hints[static_cast<std::size_t>(col)] != SchemaHint::Exact) {
            annotation.column_hints[static_cast<std::size_t>(col)] = SchemaHint::ValueCandidateMatch;
        }
    }
    return annotation;
}

}  // namespace nl2sql
