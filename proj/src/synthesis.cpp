#include "nl2sql/synthesis.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <set>
#include <unordered_set>

#include <json.hpp>

#include "nl2sql/util.hpp"

namespace nl2sql {

using nlohmann::json;

namespace {

double ms_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration_cast<std::chrono::duration<double, std::milli>>(
               std::chrono::steady_clock::now() - start)
        .count();
}

}  // namespace

EncodingContext build_context(const std::string& question, const DatabaseSchema& schema,
                              const ValueIndex& index, SqliteDb* db,
                              const std::optional<LightModeOptions>& light,
                              EntityRecognizer* recognizer, ContextTimings* timings) {
    EncodingContext context;
    context.question = question;
    context.schema = &schema;

    auto start = std::chrono::steady_clock::now();
    context.annotation = annotate_question(question, schema, index);

    if (light) {
        // candidate order mirrors the option order: V payloads index it
        if (timings) timings->pre_processing_ms = ms_since(start);
        auto lookup_start = std::chrono::steady_clock::now();
        for (const std::string& option : light->options) {
            ValueCandidate cand;
            cand.surface = option;
            cand.origin = CandidateOrigin::Verbatim;
            cand.exempt_from_validation = true;
            for (const ValueLocation& loc : index.lookup_exact(option)) {
                if (ValueIndex::normalize(loc.raw_value) == ValueIndex::normalize(option)) {
                    cand.location = CandidateLocation{loc.table_index, loc.column_index};
                    cand.validated = true;
                    break;
                }
            }
            context.candidates.items.push_back(std::move(cand));
        }
        context.schema_annotation = annotate_schema(question, schema, context.candidates.items);
        if (timings) timings->value_lookup_ms = ms_since(lookup_start);
        return context;
    }

    std::vector<ExtractedValue> extracted = extract_values(question, recognizer);
    if (timings) timings->pre_processing_ms = ms_since(start);

    auto lookup_start = std::chrono::steady_clock::now();
    std::vector<ValueCandidate> generated =
        generate_candidates(extracted, context.annotation, index);
    context.candidates = validate_candidates(generated, index, schema, db);
    if (timings) timings->value_lookup_ms = ms_since(lookup_start);

    context.schema_annotation = annotate_schema(question, schema, context.candidates.items);
    return context;
}

// ---------------------------------------------------------------------------
// synthesis search

namespace {

struct BeamEntry {
    GrammarState state;
    double score = 0;
    long order = 0;  // creation order, deterministic tie break
};

}  // namespace

SynthesisResult synthesize(const EncodingContext& context, ScoringPolicy& policy,
                           const SearchConfig& config) {
    SynthesisResult result;
    if (!context.schema) {
        result.failure = "context has no schema";
        return result;
    }
    const std::size_t width = static_cast<std::size_t>(std::max(1, config.beam_width));

    std::vector<BeamEntry> beams;
    beams.push_back(BeamEntry{GrammarState{}, 0.0, 0});
    std::vector<BeamEntry> finished;
    long next_order = 1;
    std::string dead_end;

    for (int step = 0; step < config.depth_bound && !beams.empty(); ++step) {
        std::vector<BeamEntry> expanded;
        for (BeamEntry& beam : beams) {
            if (beam.state.complete()) {
                finished.push_back(std::move(beam));
                continue;
            }
            std::vector<Action> legal;
            try {
                legal = valid_next_actions(beam.state, *context.schema, context.candidates.size());
            } catch (const NoValueCandidates&) {
                dead_end = "no value candidates while expanding V";
                continue;
            }
            std::vector<double> scores;
            try {
                scores = policy.score(beam.state, legal, context);
            } catch (const PolicyError& e) {
                result.failure = std::string("policy: ") + e.what();
                return result;
            }
            if (scores.size() != legal.size()) {
                result.failure = "policy: score arity mismatch";
                return result;
            }
            bool any_finite = false;
            for (double s : scores) {
                if (std::isfinite(s)) any_finite = true;
            }
            if (!legal.empty() && !any_finite) {
                result.failure = "policy: no finite score";
                return result;
            }
            for (std::size_t i = 0; i < legal.size(); ++i) {
                if (!std::isfinite(scores[i])) continue;
                BeamEntry next;
                next.state = beam.state;
                next.state.apply(legal[i]);
                next.score = beam.score + scores[i];
                next.order = next_order++;
                expanded.push_back(std::move(next));
            }
        }
        if (expanded.empty()) break;
        std::sort(expanded.begin(), expanded.end(), [](const BeamEntry& a, const BeamEntry& b) {
            if (a.score != b.score) return a.score > b.score;
            return a.order < b.order;
        });
        if (expanded.size() > width) expanded.resize(width);
        beams = std::move(expanded);
    }
    for (BeamEntry& beam : beams) {
        if (beam.state.complete()) finished.push_back(std::move(beam));
    }
    if (finished.empty()) {
        result.failure = !dead_end.empty() ? dead_end : "depth bound exceeded";
        return result;
    }
    auto best = std::min_element(finished.begin(), finished.end(),
                                 [](const BeamEntry& a, const BeamEntry& b) {
                                     if (a.score != b.score) return a.score > b.score;
                                     return a.order < b.order;
                                 });
    result.actions = best->state.history();
    result.tree = actions_to_tree(result.actions);
    return result;
}

// ---------------------------------------------------------------------------
// baseline policy

namespace {

struct QuestionSignals {
    bool has_agg_cue = false;
    int agg_production = prod::kANone;  // A production suggested by the cue
    bool has_superlative = false;
    bool has_order_cue = false;
    bool has_or_token = false;
    bool has_between_token = false;
};

QuestionSignals read_signals(const EncodingContext& ctx) {
    QuestionSignals s;
    const auto& tokens = ctx.annotation.tokens;
    const auto& tags = ctx.annotation.tags;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        std::string w = to_lower(tokens[i].text);
        if (tags[i].hint == TokenHint::Aggregation && !s.has_agg_cue) {
            s.has_agg_cue = true;
            if (w == "how" || w == "many" || w == "count" || w == "number" || w == "of") {
                s.agg_production = prod::kACount;
            } else if (w == "average") {
                s.agg_production = prod::kAAvg;
            } else if (w == "sum" || w == "total") {
                s.agg_production = prod::kASum;
            } else if (w == "maximum") {
                s.agg_production = prod::kAMax;
            } else if (w == "minimum") {
                s.agg_production = prod::kAMin;
            } else {
                s.agg_production = prod::kACount;
            }
        }
        if (tags[i].hint == TokenHint::Superlative) s.has_superlative = true;
        if (w == "or" || w == "either") s.has_or_token = true;
        if (w == "between") s.has_between_token = true;
        static const std::unordered_set<std::string> kOrderCues = {
            "order",     "ordered",  "sort",         "sorted",    "alphabetical",
            "alphabetically", "ascending", "descending", "rank",  "ranked", "list",
        };
        if (kOrderCues.count(w)) s.has_order_cue = true;
    }
    return s;
}

// a numeric candidate right after a superlative token is a LIMIT count
bool is_limit_like(const EncodingContext& ctx, const ValueCandidate& cand) {
    if (!is_number_literal(trim(cand.surface))) return false;
    if (cand.span_begin < 0) return true;  // implicit superlative limit
    const auto& tokens = ctx.annotation.tokens;
    const auto& tags = ctx.annotation.tags;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (tags[i].hint != TokenHint::Superlative) continue;
        if (static_cast<int>(tokens[i].end) <= cand.span_begin &&
            cand.span_begin - static_cast<int>(tokens[i].end) <= 12) {
            return true;
        }
    }
    return false;
}

bool candidate_filterable(const EncodingContext& ctx, const ValueCandidate& cand) {
    if (is_limit_like(ctx, cand)) return false;
    return cand.location.has_value() || cand.span_begin >= 0;
}

// candidates sharing one surface are one choice; consuming any of them
// consumes the surface
std::set<std::string> used_value_surfaces(const EncodingContext& ctx, const GrammarState& state) {
    std::set<std::string> used;
    for (const Action& a : state.history()) {
        if (a.kind != ActionKind::V) continue;
        if (a.payload >= 0 && a.payload < static_cast<int>(ctx.candidates.size())) {
            used.insert(ValueIndex::normalize(
                ctx.candidates[static_cast<std::size_t>(a.payload)].surface));
        }
    }
    return used;
}

int count_unused_filterable(const EncodingContext& ctx, const GrammarState& state) {
    std::set<std::string> used = used_value_surfaces(ctx, state);
    std::set<std::string> unused;
    for (const ValueCandidate& cand : ctx.candidates.items) {
        if (!candidate_filterable(ctx, cand)) continue;
        std::string surface = ValueIndex::normalize(cand.surface);
        if (!used.count(surface)) unused.insert(surface);
    }
    return static_cast<int>(unused.size());
}

// earliest unused filterable candidate; drives column choice and V choice
int target_candidate(const EncodingContext& ctx, const GrammarState& state) {
    std::set<std::string> used = used_value_surfaces(ctx, state);
    int best = -1;
    int best_span = std::numeric_limits<int>::max();
    for (int i = 0; i < static_cast<int>(ctx.candidates.size()); ++i) {
        const ValueCandidate& cand = ctx.candidates[static_cast<std::size_t>(i)];
        if (used.count(ValueIndex::normalize(cand.surface))) continue;
        if (!candidate_filterable(ctx, cand)) continue;
        if (!cand.location) continue;
        int span = cand.span_begin < 0 ? std::numeric_limits<int>::max() - 1 : cand.span_begin;
        if (span < best_span) {
            best_span = span;
            best = i;
        }
    }
    return best;
}

int comparison_cue_production(const EncodingContext& ctx, const ValueCandidate& cand) {
    static const std::unordered_set<std::string> kGt = {
        "more", "greater", "older", "higher", "above", "over",
        "bigger", "larger", "longer", "later", "after", "exceeds", "exceeding",
    };
    static const std::unordered_set<std::string> kLt = {
        "less", "fewer", "younger", "lower", "below", "under",
        "smaller", "shorter", "earlier", "before",
    };
    static const std::unordered_set<std::string> kLike = {
        "contain", "contains", "containing", "substring", "start", "starts",
        "starting", "begin", "begins", "beginning", "end", "ends", "ending", "like",
    };
    if (cand.span_begin < 0) return prod::kFEq;
    const auto& tokens = ctx.annotation.tokens;
    int before = -1;
    for (int i = 0; i < static_cast<int>(tokens.size()); ++i) {
        if (static_cast<int>(tokens[i].end) <= cand.span_begin) before = i;
    }
    bool saw_not = false;
    bool saw_at = false;
    for (int i = before; i >= 0 && i > before - 4; --i) {
        std::string w = to_lower(tokens[static_cast<std::size_t>(i)].text);
        if (w == "not" || w == "no") saw_not = true;
        if (w == "at") saw_at = true;
        if (w == "least" && saw_at) return prod::kFGe;
        if (w == "most" && saw_at) return prod::kFLe;
        if (w == "between") return prod::kFBetween;
        if (kGt.count(w)) return prod::kFGt;
        if (kLt.count(w)) return prod::kFLt;
        if (kLike.count(w)) return saw_not ? prod::kFNotLike : prod::kFLike;
    }
    if (cand.surface.find('%') != std::string::npos) return prod::kFLike;
    return saw_not ? prod::kFNe : prod::kFEq;
}

// rank of a schema item's first mention in the question, for tie breaks
int first_mention_rank(const EncodingContext& ctx, TokenHint wanted, int target) {
    const auto& tags = ctx.annotation.tags;
    for (int i = 0; i < static_cast<int>(tags.size()); ++i) {
        if (tags[static_cast<std::size_t>(i)].hint != wanted) continue;
        int index = wanted == TokenHint::Table ? tags[static_cast<std::size_t>(i)].table_index
                                               : tags[static_cast<std::size_t>(i)].column_index;
        if (index == target) return i;
    }
    return std::numeric_limits<int>::max();
}

ActionKind nearest_clause(const GrammarState::FrontierEntry& entry) {
    for (auto it = entry.ancestors.rbegin(); it != entry.ancestors.rend(); ++it) {
        if (*it == ActionKind::N || *it == ActionKind::Filter || *it == ActionKind::Order ||
            *it == ActionKind::Superlative) {
            return *it;
        }
    }
    return ActionKind::N;
}

int last_column_payload(const GrammarState& state) {
    const auto& history = state.history();
    for (auto it = history.rbegin(); it != history.rend(); ++it) {
        if (it->kind == ActionKind::C) return it->payload;
    }
    return -1;
}

int pending_filters(const GrammarState& state) {
    int count = 0;
    for (const auto& entry : state.frontier()) {
        if (entry.kind == ActionKind::Filter) ++count;
    }
    return count;
}

int column_hint_groups(const EncodingContext& ctx) {
    std::set<int> groups;
    for (const TokenAnnotation& tag : ctx.annotation.tags) {
        if (tag.hint == TokenHint::Column) groups.insert(tag.group);
    }
    return static_cast<int>(groups.size());
}

}  // namespace

std::vector<double> BaselinePolicy::score(const GrammarState& state,
                                          const std::vector<Action>& legal,
                                          const EncodingContext& ctx) {
    std::vector<double> scores(legal.size(), 0.0);
    if (legal.empty()) return scores;
    QuestionSignals signals = read_signals(ctx);
    const DatabaseSchema& schema = *ctx.schema;
    ActionKind head = state.head().kind;

    // distinct filterable surfaces not yet consumed by V actions
    std::set<std::string> used = used_value_surfaces(ctx, state);
    int unused_filterable = count_unused_filterable(ctx, state);
    bool limit_available = false;
    for (int i = 0; i < static_cast<int>(ctx.candidates.size()); ++i) {
        if (is_limit_like(ctx, ctx.candidates[static_cast<std::size_t>(i)])) limit_available = true;
    }
    bool filter_signal = unused_filterable > 0;
    bool sup_signal = signals.has_superlative && limit_available;

    switch (head) {
        case ActionKind::Z: {
            for (std::size_t i = 0; i < legal.size(); ++i) {
                scores[i] = legal[i].production == prod::kZSingle ? 1.0 : -2.0;
            }
            break;
        }
        case ActionKind::R: {
            for (std::size_t i = 0; i < legal.size(); ++i) {
                const Production& p = productions_of(ActionKind::R)[static_cast<std::size_t>(
                    legal[i].production)];
                double s = 1.0;
                bool has_filter = false, has_order = false, has_sup = false;
                for (ActionKind k : p.rhs) {
                    if (k == ActionKind::Filter) has_filter = true;
                    if (k == ActionKind::Order) has_order = true;
                    if (k == ActionKind::Superlative) has_sup = true;
                }
                s += has_filter ? (filter_signal ? 4.0 : -4.0) : 0.0;
                s += has_order ? (signals.has_order_cue && !sup_signal ? 3.0 : -3.0) : 0.0;
                s += has_sup ? (sup_signal ? 4.0 : -4.0) : 0.0;
                scores[i] = s;
            }
            break;
        }
        case ActionKind::Select:
            scores.assign(legal.size(), 1.0);
            break;
        case ActionKind::N: {
            int cues = column_hint_groups(ctx);
            int wanted = std::max(1, std::min(5, cues == 0 ? 1 : cues));
            for (std::size_t i = 0; i < legal.size(); ++i) {
                int k = legal[i].production + 1;
                scores[i] = -std::abs(k - wanted);
            }
            break;
        }
        case ActionKind::A: {
            ActionKind clause = nearest_clause(state.head());
            int a_so_far = 0;
            for (const Action& a : state.history()) {
                if (a.kind == ActionKind::A) ++a_so_far;
            }
            for (std::size_t i = 0; i < legal.size(); ++i) {
                int p = legal[i].production;
                double s = 0.0;
                if (clause == ActionKind::N) {
                    if (signals.has_agg_cue && a_so_far == 0) {
                        s = p == signals.agg_production ? 3.0 : (p == prod::kANone ? 1.0 : 0.0);
                    } else {
                        s = p == prod::kANone ? 3.0 : 0.0;
                    }
                } else if (clause == ActionKind::Filter) {
                    s = p == prod::kANone ? 3.0 : -3.0;
                } else {  // Order / Superlative
                    if (signals.has_agg_cue) s = p == signals.agg_production ? 2.0 : 0.0;
                    else s = p == prod::kANone ? 2.0 : 0.0;
                }
                scores[i] = s;
            }
            break;
        }
        case ActionKind::C: {
            ActionKind clause = nearest_clause(state.head());
            std::set<int> used_columns;
            for (const Action& a : state.history()) {
                if (a.kind == ActionKind::C) used_columns.insert(a.payload);
            }
            int target = target_candidate(ctx, state);
            // the A production already chosen for this expansion
            int a_production = prod::kANone;
            if (!state.history().empty()) {
                const Action& last = state.history().back();
                if (last.kind == ActionKind::A) a_production = last.production;
            }
            for (std::size_t i = 0; i < legal.size(); ++i) {
                int col = legal[i].payload;
                double s = 0.0;
                if (col == 0) {
                    bool counting = a_production == prod::kACount;
                    s = counting && (clause != ActionKind::Filter) ? 3.0 : -2.0;
                    if (counting && column_hint_groups(ctx) == 0) s += 1.0;
                    scores[i] = s;
                    continue;
                }
                SchemaHint hint = ctx.schema_annotation.column_hints[static_cast<std::size_t>(col)];
                if (hint == SchemaHint::Exact) s += 2.0;
                if (hint == SchemaHint::Partial) s += 0.5;
                if (hint == SchemaHint::ValueCandidateMatch) s += clause == ActionKind::Filter ? 2.0 : 0.5;
                int rank = first_mention_rank(ctx, TokenHint::Column, col);
                if (rank != std::numeric_limits<int>::max()) {
                    s += used_columns.count(col) ? 1.0 : 4.0;
                    s += 1.0 - 0.01 * rank;
                }
                if (clause == ActionKind::Filter && target >= 0) {
                    const ValueCandidate& cand = ctx.candidates[static_cast<std::size_t>(target)];
                    if (cand.location && cand.location->column == col) s += 6.0;
                }
                scores[i] = s;
            }
            break;
        }
        case ActionKind::T: {
            int col = last_column_payload(state);
            for (std::size_t i = 0; i < legal.size(); ++i) {
                int table = legal[i].payload;
                double s = 0.0;
                if (col > 0) {
                    // a concrete column pins its table
                    s = schema.table_of_column(col) == table ? 10.0 : -5.0;
                    scores[i] = s;
                    continue;
                }
                SchemaHint hint = ctx.schema_annotation.table_hints[static_cast<std::size_t>(table)];
                if (hint == SchemaHint::Exact) s += 4.0;
                if (hint == SchemaHint::Partial) s += 1.0;
                // the leading mention carries the asked-about entity
                int rank = first_mention_rank(ctx, TokenHint::Table, table);
                if (rank != std::numeric_limits<int>::max()) {
                    s += std::max(0.0, 2.0 - 0.1 * rank);
                }
                scores[i] = s;
            }
            break;
        }
        case ActionKind::Filter: {
            int target = target_candidate(ctx, state);
            int cue = target >= 0
                          ? comparison_cue_production(
                                ctx, ctx.candidates[static_cast<std::size_t>(target)])
                          : prod::kFEq;
            int pending = pending_filters(state) - 1;  // excluding this head
            for (std::size_t i = 0; i < legal.size(); ++i) {
                int p = legal[i].production;
                double s = 0.0;
                if (p == prod::kFAnd) {
                    s = unused_filterable >= 2 + pending ? 6.5 : -6.0;
                } else if (p == prod::kFOr) {
                    s = (signals.has_or_token && unused_filterable >= 2 + pending) ? 7.0 : -6.0;
                } else if (p == prod::kFIn || p == prod::kFNotIn || p >= prod::kFEqNested) {
                    s = -8.0;  // nesting is beyond the heuristic baseline
                } else if (p == prod::kFBetween) {
                    s = (cue == prod::kFBetween && unused_filterable >= 2 + pending) ? 8.0 : -6.0;
                } else if (p == cue) {
                    s = 5.0;
                } else if (p == prod::kFEq) {
                    s = 1.0;
                } else {
                    s = -1.0;
                }
                scores[i] = s;
            }
            break;
        }
        case ActionKind::Order: {
            // descending for "most"-flavored cues, ascending otherwise
            bool desc = false;
            for (std::size_t i = 0; i < ctx.annotation.tokens.size(); ++i) {
                std::string w = to_lower(ctx.annotation.tokens[i].text);
                if (w == "descending" || w == "reverse" || w == "highest" || w == "most") desc = true;
            }
            for (std::size_t i = 0; i < legal.size(); ++i) {
                bool is_desc = legal[i].production == prod::kOrderDesc;
                scores[i] = is_desc == desc ? 2.0 : 0.0;
            }
            break;
        }
        case ActionKind::Superlative: {
            static const std::unordered_set<std::string> kLeastCues = {
                "least", "fewest", "lowest", "youngest", "smallest", "shortest",
                "cheapest", "worst", "earliest", "minimum", "bottom",
            };
            bool least = false;
            for (std::size_t i = 0; i < ctx.annotation.tokens.size(); ++i) {
                if (kLeastCues.count(to_lower(ctx.annotation.tokens[i].text))) least = true;
            }
            for (std::size_t i = 0; i < legal.size(); ++i) {
                bool is_least = legal[i].production == prod::kSupLeast;
                scores[i] = is_least == least ? 2.0 : 0.0;
            }
            break;
        }
        case ActionKind::V: {
            ActionKind clause = nearest_clause(state.head());
            int column = last_column_payload(state);
            for (std::size_t i = 0; i < legal.size(); ++i) {
                int payload = legal[i].payload;
                const ValueCandidate& cand = ctx.candidates[static_cast<std::size_t>(payload)];
                double s = 0.0;
                bool numeric = is_number_literal(trim(cand.surface));
                if (clause == ActionKind::Superlative) {
                    if (is_limit_like(ctx, cand)) s += cand.span_begin >= 0 ? 6.0 : 4.0;
                    else s += numeric ? 0.5 : -5.0;
                } else {
                    if (used.count(ValueIndex::normalize(cand.surface)) == 0) s += 3.0;
                    if (cand.location && column > 0 && cand.location->column == column) s += 6.0;
                    if (cand.validated) s += 1.0;
                    if (column > 0) {
                        bool col_numeric =
                            schema.columns[static_cast<std::size_t>(column)].type == ColumnType::Number;
                        if (col_numeric == numeric) s += 2.0;
                    }
                    s -= 0.5 * static_cast<double>(cand.distance);
                    if (is_limit_like(ctx, cand)) s -= 4.0;
                }
                scores[i] = s;
            }
            break;
        }
    }
    return scores;
}

std::vector<double> ScriptedPolicy::score(const GrammarState& state,
                                          const std::vector<Action>& legal,
                                          const EncodingContext&) {
    std::size_t step = state.history().size();
    if (step >= script_.size()) {
        throw PolicyError("script exhausted at step " + std::to_string(step));
    }
    const Action& expected = script_[step];
    std::vector<double> scores(legal.size(), 0.0);
    bool found = false;
    for (std::size_t i = 0; i < legal.size(); ++i) {
        if (legal[i] == expected) {
            scores[i] = 1.0;
            found = true;
        }
    }
    if (!found) {
        throw PolicyError("scripted action " + action_to_string(expected) +
                          " is not legal at step " + std::to_string(step));
    }
    return scores;
}

// ---------------------------------------------------------------------------
// external policy protocol

namespace {

json action_to_protocol(const Action& action) {
    json j;
    j["kind"] = action_kind_name(action.kind);
    if (is_payload_kind(action.kind)) {
        j["payload"] = action.payload;
    } else {
        j["production"] =
            productions_of(action.kind)[static_cast<std::size_t>(action.production)].label;
    }
    return j;
}

json context_digest(const EncodingContext& ctx) {
    json j;
    j["question"] = ctx.question;
    json tokens = json::array();
    json hints = json::array();
    for (std::size_t i = 0; i < ctx.annotation.tokens.size(); ++i) {
        tokens.push_back(ctx.annotation.tokens[i].text);
        hints.push_back(token_hint_name(ctx.annotation.tags[i].hint));
    }
    j["tokens"] = std::move(tokens);
    j["token_hints"] = std::move(hints);
    json schema;
    schema["tables"] = ctx.schema->tables;
    json columns = json::array();
    for (const ColumnDef& c : ctx.schema->columns) {
        columns.push_back(json::array({c.table_index, c.name, column_type_name(c.type)}));
    }
    schema["columns"] = std::move(columns);
    j["schema"] = std::move(schema);
    json table_hints = json::array();
    for (SchemaHint h : ctx.schema_annotation.table_hints) table_hints.push_back(schema_hint_name(h));
    json column_hints = json::array();
    for (SchemaHint h : ctx.schema_annotation.column_hints)
        column_hints.push_back(schema_hint_name(h));
    j["schema_hints"] = json{{"tables", table_hints}, {"columns", column_hints}};
    json candidates = json::array();
    for (const ValueCandidate& cand : ctx.candidates.items) {
        json c;
        c["surface"] = cand.surface;
        c["origin"] = candidate_origin_name(cand.origin);
        c["validated"] = cand.validated;
        c["table"] = cand.location ? cand.location->table : -1;
        c["column"] = cand.location ? cand.location->column : -1;
        candidates.push_back(std::move(c));
    }
    j["candidates"] = std::move(candidates);
    return j;
}

}  // namespace

ExternalPolicy::ExternalPolicy(const std::string& command, std::chrono::milliseconds timeout)
    : process_(std::make_unique<LineProcess>(command)), timeout_(timeout) {
    if (!process_->running()) throw PolicyError("cannot start policy process: " + command);
}

std::vector<double> ExternalPolicy::score(const GrammarState& state,
                                          const std::vector<Action>& legal,
                                          const EncodingContext& context) {
    json request;
    request["frontier"] = action_kind_name(state.head().kind);
    json legal_json = json::array();
    for (const Action& a : legal) legal_json.push_back(action_to_protocol(a));
    request["legal"] = std::move(legal_json);
    json history = json::array();
    for (const Action& a : state.history()) history.push_back(action_to_protocol(a));
    request["history"] = std::move(history);
    request["context"] = context_digest(context);

    if (!process_->write_line(request.dump())) {
        throw PolicyError("policy process pipe closed");
    }
    auto line = process_->read_line(timeout_);
    if (!line) throw PolicyError("policy process timeout");
    json response;
    try {
        response = json::parse(*line);
    } catch (const json::exception& e) {
        throw PolicyError(std::string("malformed policy response: ") + e.what());
    }
    if (!response.contains("scores") || !response["scores"].is_array()) {
        throw PolicyError("policy response lacks scores");
    }
    std::vector<double> scores;
    for (const json& s : response["scores"]) {
        if (!s.is_number()) throw PolicyError("non-numeric score");
        scores.push_back(s.get<double>());
    }
    if (scores.size() != legal.size()) {
        throw PolicyError("score for " + std::to_string(scores.size()) + " templates, expected " +
                          std::to_string(legal.size()));
    }
    return scores;
}

}  // namespace nl2sql
