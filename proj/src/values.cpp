#include "nl2sql/values.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cctype>
#include <iostream>
#include <limits>
#include <map>
#include <unordered_set>

#include "nl2sql/util.hpp"

namespace nl2sql {

namespace {

bool is_upper_initial(const std::string& s) {
    return !s.empty() && std::isupper(static_cast<unsigned char>(s[0]));
}

void add_merged(std::vector<ExtractedValue>& spans, ExtractedValue candidate) {
    // overlapping spans merge to the longest
    for (ExtractedValue& existing : spans) {
        bool overlap = candidate.begin < existing.end && existing.begin < candidate.end;
        if (!overlap) continue;
        if (candidate.end - candidate.begin > existing.end - existing.begin) {
            existing = std::move(candidate);
        }
        return;
    }
    spans.push_back(std::move(candidate));
}

const std::map<std::string, int>& month_numbers() {
    static const std::map<std::string, int> months = {
        {"january", 1}, {"february", 2}, {"march", 3},     {"april", 4},
        {"may", 5},     {"june", 6},     {"july", 7},      {"august", 8},
        {"september", 9}, {"october", 10}, {"november", 11}, {"december", 12},
    };
    return months;
}

struct GenderCue {
    const char* word;
    const char* code;
    const char* full;
};

const std::vector<GenderCue>& gender_cues() {
    static const std::vector<GenderCue> cues = {
        {"female", "F", "female"}, {"females", "F", "female"}, {"woman", "F", "female"},
        {"women", "F", "female"},  {"girl", "F", "female"},    {"girls", "F", "female"},
        {"male", "M", "male"},     {"males", "M", "male"},     {"man", "M", "male"},
        {"men", "M", "male"},      {"boy", "M", "male"},       {"boys", "M", "male"},
    };
    return cues;
}

const std::unordered_set<std::string>& boolean_cues() {
    static const std::unordered_set<std::string> cues = {"true", "false", "yes", "no"};
    return cues;
}

int origin_priority(const ValueCandidate& cand) {
    switch (cand.origin) {
        case CandidateOrigin::Verbatim: return 0;
        case CandidateOrigin::Similarity: return cand.validated ? 1 : 3;
        case CandidateOrigin::HeuristicGender:
        case CandidateOrigin::HeuristicBoolean:
        case CandidateOrigin::HeuristicOrdinal:
        case CandidateOrigin::HeuristicMonthWildcard: return 2;
        case CandidateOrigin::Ngram: return 3;
    }
    return 3;
}

WildcardStyle wildcard_cue_near(const std::vector<Token>& tokens, int span_begin) {
    if (span_begin < 0) return WildcardStyle::None;
    static const std::unordered_set<std::string> starts = {
        "start", "starts", "starting", "begin", "begins", "beginning",
    };
    static const std::unordered_set<std::string> ends = {"end", "ends", "ending"};
    static const std::unordered_set<std::string> contains = {
        "contain", "contains", "containing", "substring", "has", "have",
        "include", "includes", "including",
    };
    // scan a short window of tokens before the span
    int before = -1;
    for (int i = 0; i < static_cast<int>(tokens.size()); ++i) {
        if (static_cast<int>(tokens[i].end) <= span_begin) before = i;
    }
    for (int i = before; i >= 0 && i > before - 4; --i) {
        std::string w = to_lower(tokens[static_cast<std::size_t>(i)].text);
        if (starts.count(w)) return WildcardStyle::TrailingPercent;
        if (ends.count(w)) return WildcardStyle::LeadingPercent;
        if (contains.count(w)) return WildcardStyle::BothSides;
    }
    return WildcardStyle::None;
}

}  // namespace

std::string candidate_origin_name(CandidateOrigin origin) {
    switch (origin) {
        case CandidateOrigin::Verbatim: return "VERBATIM";
        case CandidateOrigin::Similarity: return "SIMILARITY";
        case CandidateOrigin::HeuristicGender: return "HEURISTIC_GENDER";
        case CandidateOrigin::HeuristicBoolean: return "HEURISTIC_BOOLEAN";
        case CandidateOrigin::HeuristicOrdinal: return "HEURISTIC_ORDINAL";
        case CandidateOrigin::HeuristicMonthWildcard: return "HEURISTIC_MONTH_WILDCARD";
        case CandidateOrigin::Ngram: return "NGRAM";
    }
    return "VERBATIM";
}

std::vector<ExtractedValue> extract_values(const std::string& question,
                                           EntityRecognizer* recognizer) {
    std::vector<ExtractedValue> spans;

    // (1) content in quotes
    for (std::size_t i = 0; i < question.size(); ++i) {
        char q = question[i];
        if (q != '\'' && q != '"') continue;
        std::size_t close = question.find(q, i + 1);
        if (close == std::string::npos) continue;
        // apostrophes inside words ("head's") are not quotes
        if (q == '\'' && i > 0 && std::isalnum(static_cast<unsigned char>(question[i - 1]))) {
            continue;
        }
        std::string inner = question.substr(i + 1, close - i - 1);
        if (!inner.empty() && inner.size() <= 64) {
            add_merged(spans, ExtractedValue{inner, i + 1, close, ExtractionSource::Quoted});
        }
        i = close;
    }

    std::vector<Token> tokens = tokenize(question);

    // (2) capitalized runs; the leading question word is never a value
    std::size_t i = 0;
    while (i < tokens.size()) {
        if (i == 0 || !is_upper_initial(tokens[i].text)) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < tokens.size() && is_upper_initial(tokens[j].text)) ++j;
        bool single_letter_run = j == i + 1 && tokens[i].text.size() == 1;
        if (!single_letter_run) {
            std::string text = question.substr(tokens[i].begin, tokens[j - 1].end - tokens[i].begin);
            add_merged(spans, ExtractedValue{text, tokens[i].begin, tokens[j - 1].end,
                                             ExtractionSource::Capitalized});
        }
        i = j;
    }

    // (3) single letters
    for (std::size_t k = 1; k < tokens.size(); ++k) {
        const Token& t = tokens[k];
        if (t.text.size() != 1 || !std::isalpha(static_cast<unsigned char>(t.text[0]))) continue;
        char c = t.text[0];
        if (c == 'a' || c == 'i') continue;  // articles/pronouns, lowercase only
        add_merged(spans, ExtractedValue{t.text, t.begin, t.end, ExtractionSource::SingleLetter});
    }

    if (recognizer) {
        auto entities = recognizer->recognize(question);
        if (!entities) {
            std::cerr << "warning: entity recognizer failed, falling back to heuristics\n";
        } else {
            for (const auto& e : *entities) {
                if (e.text.empty() || e.end <= e.start || e.end > question.size()) continue;
                add_merged(spans, ExtractedValue{e.text, e.start, e.end, ExtractionSource::Ner});
            }
        }
    }

    std::sort(spans.begin(), spans.end(),
              [](const ExtractedValue& a, const ExtractedValue& b) { return a.begin < b.begin; });
    return spans;
}

std::vector<std::string> ngram_expand(const ExtractedValue& value) {
    std::vector<Token> tokens = tokenize(value.text);
    std::vector<std::string> grams;
    const std::size_t k = tokens.size();
    if (k < 2) return grams;
    // longest first; the full k-gram is excluded (it equals the verbatim)
    for (std::size_t len = k - 1; len >= 1; --len) {
        for (std::size_t start = 0; start + len <= k; ++start) {
            std::size_t b = tokens[start].begin;
            std::size_t e = tokens[start + len - 1].end;
            grams.push_back(value.text.substr(b, e - b));
        }
        if (len == 1) break;
    }
    return grams;
}

std::size_t damerau_levenshtein(std::string_view a, std::string_view b) {
    const std::size_t n = a.size();
    const std::size_t m = b.size();
    if (n == 0) return m;
    if (m == 0) return n;
    std::vector<std::size_t> prev2(m + 1), prev(m + 1), cur(m + 1);
    for (std::size_t j = 0; j <= m; ++j) prev[j] = j;
    for (std::size_t i = 1; i <= n; ++i) {
        cur[0] = i;
        for (std::size_t j = 1; j <= m; ++j) {
            std::size_t cost = a[i - 1] == b[j - 1] ? 0 : 1;
            std::size_t best = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + cost});
            if (i > 1 && j > 1 && a[i - 1] == b[j - 2] && a[i - 2] == b[j - 1]) {
                best = std::min(best, prev2[j - 2] + 1);
            }
            cur[j] = best;
        }
        std::swap(prev2, prev);
        std::swap(prev, cur);
    }
    return prev[m];
}

std::size_t damerau_levenshtein_bounded(std::string_view a, std::string_view b,
                                        std::size_t bound) {
    const std::size_t n = a.size();
    const std::size_t m = b.size();
    const std::size_t over = bound + 1;
    if (n > m + bound || m > n + bound) return over;
    if (n == 0) return m;
    if (m == 0) return n;
    const std::size_t inf = over + m + n;
    std::vector<std::size_t> prev2(m + 1, inf), prev(m + 1, inf), cur(m + 1, inf);
    for (std::size_t j = 0; j <= std::min(m, bound); ++j) prev[j] = j;
    for (std::size_t i = 1; i <= n; ++i) {
        // cells with |i - j| > bound cannot lie on a path of cost <= bound
        std::size_t lo = i > bound ? i - bound : 1;
        std::size_t hi = std::min(m, i + bound);
        std::fill(cur.begin(), cur.end(), inf);
        if (lo == 1) cur[0] = i <= bound ? i : inf;
        std::size_t row_min = inf;
        for (std::size_t j = lo; j <= hi; ++j) {
            std::size_t cost = a[i - 1] == b[j - 1] ? 0 : 1;
            std::size_t best = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + cost});
            if (i > 1 && j > 1 && a[i - 1] == b[j - 2] && a[i - 2] == b[j - 1]) {
                best = std::min(best, prev2[j - 2] + 1);
            }
            cur[j] = best;
            row_min = std::min(row_min, best);
        }
        if (row_min > bound) return over;
        std::swap(prev2, prev);
        std::swap(prev, cur);
    }
    return std::min(prev[m], over);
}

std::size_t default_distance_threshold(std::size_t length) {
    if (length <= 3) return 0;
    if (length <= 5) return 1;
    if (length <= 10) return 2;
    return 3;
}

std::vector<SimilarityHit> similarity_search(const std::string& extraction,
                                             const ValueIndex& index,
                                             const ThresholdPolicy& policy) {
    std::vector<SimilarityHit> hits;
    const std::string probe = ValueIndex::normalize(extraction);
    if (probe.empty()) return hits;
    const std::size_t threshold = policy(probe.size());
    const std::uint64_t probe_map = ValueIndex::charmap_of(probe);
    const auto& buckets = index.keys_by_length();
    const std::size_t lo = probe.size() > threshold ? probe.size() - threshold : 0;
    const std::size_t hi = probe.size() + threshold;

    for (std::size_t len = lo; len <= hi && len < buckets.size(); ++len) {
        for (int key_id : buckets[len]) {
            const ValueIndex::Key& key = index.keys()[static_cast<std::size_t>(key_id)];
            // one edit flips at most two character-class bits
            if (static_cast<std::size_t>(std::popcount(probe_map ^ key.charmap)) > 2 * threshold) {
                continue;
            }
            std::size_t dist = damerau_levenshtein_bounded(probe, key.norm, threshold);
            if (dist > threshold) continue;
            for (const ValueLocation& loc : index.locations_of_key(key_id)) {
                hits.push_back(SimilarityHit{loc.table_index, loc.column_index, loc.raw_value, dist});
            }
        }
    }
    std::sort(hits.begin(), hits.end(), [](const SimilarityHit& x, const SimilarityHit& y) {
        return std::tie(x.distance, x.table, x.column, x.raw_value) <
               std::tie(y.distance, y.table, y.column, y.raw_value);
    });
    return hits;
}

namespace {

void push_candidate(std::vector<ValueCandidate>& out, ValueCandidate cand) {
    for (const ValueCandidate& existing : out) {
        if (existing.surface == cand.surface && existing.location == cand.location) return;
    }
    out.push_back(std::move(cand));
}

}  // namespace

std::vector<ValueCandidate> generate_candidates(const std::vector<ExtractedValue>& extracted,
                                                const QuestionAnnotation& annotation,
                                                const ValueIndex& index,
                                                const ThresholdPolicy& policy) {
    std::vector<ValueCandidate> out;

    auto located_copies = [&](const std::string& surface, CandidateOrigin origin, int begin,
                              int end, std::size_t distance) {
        // exact index hits spawn one located candidate per stored value
        for (const ValueLocation& loc : index.lookup_exact(surface)) {
            ValueCandidate cand;
            cand.surface = loc.raw_value;
            cand.origin = loc.raw_value == surface ? origin : CandidateOrigin::Similarity;
            cand.location = CandidateLocation{loc.table_index, loc.column_index};
            cand.validated = ValueIndex::normalize(loc.raw_value) == ValueIndex::normalize(surface);
            if (!cand.validated) {
                // constituent-token hit: surface is part of the stored value
                cand.validated = true;
                cand.origin = CandidateOrigin::Similarity;
            }
            cand.span_begin = begin;
            cand.span_end = end;
            cand.distance = distance;
            push_candidate(out, std::move(cand));
        }
    };

    // (a) each extraction verbatim
    for (const ExtractedValue& ev : extracted) {
        ValueCandidate cand;
        cand.surface = ev.text;
        cand.origin = CandidateOrigin::Verbatim;
        cand.exempt_from_validation =
            ev.source == ExtractionSource::Quoted || is_number_literal(trim(ev.text));
        cand.span_begin = static_cast<int>(ev.begin);
        cand.span_end = static_cast<int>(ev.end);
        cand.wildcard = wildcard_cue_near(annotation.tokens, cand.span_begin);
        push_candidate(out, std::move(cand));
        located_copies(ev.text, CandidateOrigin::Verbatim, static_cast<int>(ev.begin),
                       static_cast<int>(ev.end), 0);
    }

    // value-classed question tokens carry index hits of their own
    for (std::size_t i = 0; i < annotation.tags.size(); ++i) {
        const TokenAnnotation& tag = annotation.tags[i];
        if (tag.hint != TokenHint::Value) continue;
        const Token& tok = annotation.tokens[i];
        located_copies(tok.text, CandidateOrigin::Verbatim, static_cast<int>(tok.begin),
                       static_cast<int>(tok.end), 0);
    }

    // bare numeric tokens are candidates even without an extraction span
    for (const Token& tok : annotation.tokens) {
        if (!is_number_literal(tok.text)) continue;
        ValueCandidate cand;
        cand.surface = tok.text;
        cand.origin = CandidateOrigin::Verbatim;
        cand.exempt_from_validation = true;
        cand.span_begin = static_cast<int>(tok.begin);
        cand.span_end = static_cast<int>(tok.end);
        push_candidate(out, std::move(cand));
    }

    // (b) indexed values within edit-distance threshold of an extraction
    for (const ExtractedValue& ev : extracted) {
        for (const SimilarityHit& hit : similarity_search(ev.text, index, policy)) {
            ValueCandidate cand;
            cand.surface = hit.raw_value;
            cand.origin = CandidateOrigin::Similarity;
            cand.location = CandidateLocation{hit.table, hit.column};
            cand.validated = true;
            cand.span_begin = static_cast<int>(ev.begin);
            cand.span_end = static_cast<int>(ev.end);
            cand.distance = hit.distance;
            push_candidate(out, std::move(cand));
        }
    }

    // (c) handcrafted heuristics over the question tokens
    bool saw_superlative = false;
    bool saw_number = false;
    for (std::size_t i = 0; i < annotation.tokens.size(); ++i) {
        const Token& tok = annotation.tokens[i];
        const std::string lowered = to_lower(tok.text);
        if (annotation.tags[i].hint == TokenHint::Superlative) saw_superlative = true;
        if (is_number_literal(tok.text)) saw_number = true;

        for (const GenderCue& cue : gender_cues()) {
            if (lowered != cue.word) continue;
            for (const char* surface : {cue.code, cue.full}) {
                ValueCandidate cand;
                cand.surface = surface;
                cand.origin = CandidateOrigin::HeuristicGender;
                cand.span_begin = static_cast<int>(tok.begin);
                cand.span_end = static_cast<int>(tok.end);
                push_candidate(out, std::move(cand));
            }
        }
        if (boolean_cues().count(lowered)) {
            for (const char* surface : {"0", "1", "true", "false"}) {
                ValueCandidate cand;
                cand.surface = surface;
                cand.origin = CandidateOrigin::HeuristicBoolean;
                cand.exempt_from_validation = surface[0] == '0' || surface[0] == '1';
                cand.span_begin = static_cast<int>(tok.begin);
                cand.span_end = static_cast<int>(tok.end);
                push_candidate(out, std::move(cand));
            }
        }
        // ordinal / cardinal words; hyphenated forms like "fourth-grade"
        std::string head = lowered;
        if (auto dash = head.find('-'); dash != std::string::npos) head = head.substr(0, dash);
        if (!is_number_literal(head)) {
            if (auto num = parse_number_word(head)) {
                ValueCandidate cand;
                cand.surface = std::to_string(*num);
                cand.origin = CandidateOrigin::HeuristicOrdinal;
                cand.exempt_from_validation = true;
                cand.span_begin = static_cast<int>(tok.begin);
                cand.span_end = static_cast<int>(tok.end);
                push_candidate(out, std::move(cand));
            }
        }
        auto month = month_numbers().find(lowered);
        if (month != month_numbers().end()) {
            char padded[8];
            std::snprintf(padded, sizeof(padded), "%02d", month->second);
            const std::string surfaces[] = {
                std::to_string(month->second) + "/%",
                std::string("%-") + padded + "-%",
                tok.text,
            };
            for (const std::string& surface : surfaces) {
                ValueCandidate cand;
                cand.surface = surface;
                cand.origin = CandidateOrigin::HeuristicMonthWildcard;
                cand.span_begin = static_cast<int>(tok.begin);
                cand.span_end = static_cast<int>(tok.end);
                push_candidate(out, std::move(cand));
            }
        }
    }
    // a superlative with no explicit count implies a result limit of one
    if (saw_superlative && !saw_number) {
        ValueCandidate cand;
        cand.surface = "1";
        cand.origin = CandidateOrigin::HeuristicOrdinal;
        cand.exempt_from_validation = true;
        push_candidate(out, std::move(cand));
    }

    // (d) n-grams of multi-token extractions
    for (const ExtractedValue& ev : extracted) {
        for (const std::string& gram : ngram_expand(ev)) {
            ValueCandidate cand;
            cand.surface = gram;
            cand.origin = CandidateOrigin::Ngram;
            cand.span_begin = static_cast<int>(ev.begin);
            cand.span_end = static_cast<int>(ev.end);
            push_candidate(out, std::move(cand));
            located_copies(gram, CandidateOrigin::Ngram, cand.span_begin, cand.span_end, 0);
        }
    }
    return out;
}

CandidateSet validate_candidates(const std::vector<ValueCandidate>& candidates,
                                 const ValueIndex& index, const DatabaseSchema& schema,
                                 SqliteDb* db, const ValidationConfig& config) {
    std::vector<ValueCandidate> kept;

    auto exact_locations = [&](const std::string& surface) {
        std::vector<CandidateLocation> locs;
        const std::string norm = ValueIndex::normalize(surface);
        for (const ValueLocation& loc : index.lookup_exact(surface)) {
            if (ValueIndex::normalize(loc.raw_value) == norm) {
                locs.push_back(CandidateLocation{loc.table_index, loc.column_index});
            }
        }
        // overflow columns answer membership by direct query
        for (int col : index.overflow_columns()) {
            if (!db) break;
            const ColumnDef& def = schema.columns[static_cast<std::size_t>(col)];
            if (db->probe_equal(schema.tables[static_cast<std::size_t>(def.table_index)],
                                def.name, surface)) {
                locs.push_back(CandidateLocation{def.table_index, col});
            }
        }
        return locs;
    };

    for (const ValueCandidate& cand : candidates) {
        bool wildcard = cand.surface.find('%') != std::string::npos;
        if (cand.validated && cand.location) {
            kept.push_back(cand);
            continue;
        }
        if (wildcard) {
            // LIKE probe attaches a location but never drops the pattern
            ValueCandidate copy = cand;
            if (db) {
                try {
                    for (int pass = 0; pass < 2 && !copy.location; ++pass) {
                        for (int c = 1; c < static_cast<int>(schema.columns.size()); ++c) {
                            const ColumnDef& def = schema.columns[static_cast<std::size_t>(c)];
                            bool want = pass == 0 ? def.type == ColumnType::Time
                                                  : def.type == ColumnType::Text;
                            if (!want || index.column_overflowed(c)) continue;
                            if (db->probe_like(
                                    schema.tables[static_cast<std::size_t>(def.table_index)],
                                    def.name, cand.surface)) {
                                copy.location = CandidateLocation{def.table_index, c};
                                copy.validated = true;
                                break;
                            }
                        }
                    }
                } catch (const std::exception& e) {
                    copy.unverified = true;
                    std::cerr << "warning: wildcard probe failed: " << e.what() << "\n";
                }
            }
            kept.push_back(std::move(copy));
            continue;
        }
        std::vector<CandidateLocation> locs;
        bool probe_failed = false;
        try {
            locs = exact_locations(cand.surface);
        } catch (const std::exception& e) {
            probe_failed = true;
            std::cerr << "warning: validation probe failed: " << e.what() << "\n";
        }
        if (probe_failed) {
            // fail open: a dropped candidate guarantees a failed sample
            ValueCandidate copy = cand;
            copy.unverified = true;
            kept.push_back(std::move(copy));
            continue;
        }
        if (!locs.empty()) {
            for (const CandidateLocation& loc : locs) {
                ValueCandidate copy = cand;
                copy.location = loc;
                copy.validated = true;
                kept.push_back(std::move(copy));
            }
            continue;
        }
        if (cand.exempt_from_validation) {
            kept.push_back(cand);
        }
    }

    // dedup (surface, location), preferring the stronger origin
    std::vector<ValueCandidate> unique;
    for (ValueCandidate& cand : kept) {
        bool merged = false;
        for (ValueCandidate& existing : unique) {
            if (existing.surface == cand.surface && existing.location == cand.location) {
                if (origin_priority(cand) < origin_priority(existing)) existing = cand;
                merged = true;
                break;
            }
        }
        if (!merged) unique.push_back(std::move(cand));
    }

    // cap by origin priority then distance
    if (unique.size() > config.max_candidates) {
        std::stable_sort(unique.begin(), unique.end(),
                         [](const ValueCandidate& a, const ValueCandidate& b) {
                             int pa = origin_priority(a);
                             int pb = origin_priority(b);
                             if (pa != pb) return pa < pb;
                             return a.distance < b.distance;
                         });
        unique.resize(config.max_candidates);
    }

    std::stable_sort(unique.begin(), unique.end(),
                     [](const ValueCandidate& a, const ValueCandidate& b) {
                         int sa = a.span_begin < 0 ? std::numeric_limits<int>::max() : a.span_begin;
                         int sb = b.span_begin < 0 ? std::numeric_limits<int>::max() : b.span_begin;
                         if (sa != sb) return sa < sb;
                         int pa = origin_priority(a);
                         int pb = origin_priority(b);
                         if (pa != pb) return pa < pb;
                         return a.surface < b.surface;
                     });
    return CandidateSet{std::move(unique)};
}

}  // namespace nl2sql
