#pragma once

#include <chrono>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "nl2sql/hints.hpp"
#include "nl2sql/schema.hpp"
#include "nl2sql/subprocess.hpp"
#include "nl2sql/tree.hpp"
#include "nl2sql/value_index.hpp"
#include "nl2sql/values.hpp"

namespace nl2sql {

// Everything a scoring policy sees: the question with its hint classes,
// the schema with its match classes, and the located value candidates.
struct EncodingContext {
    std::string question;
    QuestionAnnotation annotation;
    const DatabaseSchema* schema = nullptr;
    SchemaAnnotation schema_annotation;
    CandidateSet candidates;
};

struct LightModeOptions {
    std::vector<std::string> options;  // ground-truth value strings
};

struct ContextTimings {
    double pre_processing_ms = 0;  // tokenization, extraction, hint classes
    double value_lookup_ms = 0;    // similarity search and validation
};

// Full mode runs the value pipeline; light mode installs the given options
// as the entire candidate set (located by exact lookup where possible).
// Candidate order in light mode matches the option order exactly.
EncodingContext build_context(const std::string& question, const DatabaseSchema& schema,
                              const ValueIndex& index, SqliteDb* db,
                              const std::optional<LightModeOptions>& light = std::nullopt,
                              EntityRecognizer* recognizer = nullptr,
                              ContextTimings* timings = nullptr);

struct PolicyError : std::runtime_error {
    explicit PolicyError(const std::string& what) : std::runtime_error(what) {}
};

// Scores the legal action templates at one decision point. Scores align
// with `legal`; higher wins, ties break by template order.
class ScoringPolicy {
public:
    virtual ~ScoringPolicy() = default;
    virtual std::vector<double> score(const GrammarState& state, const std::vector<Action>& legal,
                                      const EncodingContext& context) = 0;
};

// Deterministic hint-driven scorer standing in for a trained model: exact
// schema matches steer C/T, aggregation and superlative classes steer the
// sketch, candidate locations steer V.
class BaselinePolicy : public ScoringPolicy {
public:
    std::vector<double> score(const GrammarState& state, const std::vector<Action>& legal,
                              const EncodingContext& context) override;
};

// Replays a fixed action sequence; the expected action must be legal at
// every step.
class ScriptedPolicy : public ScoringPolicy {
public:
    explicit ScriptedPolicy(std::vector<Action> script) : script_(std::move(script)) {}
    std::vector<double> score(const GrammarState& state, const std::vector<Action>& legal,
                              const EncodingContext& context) override;

private:
    std::vector<Action> script_;
};

// Bridges to an external scorer over the line-delimited JSON protocol:
// request {"frontier", "legal", "history", "context"}, response {"scores"}.
class ExternalPolicy : public ScoringPolicy {
public:
    explicit ExternalPolicy(const std::string& command,
                            std::chrono::milliseconds timeout = std::chrono::milliseconds(5000));
    std::vector<double> score(const GrammarState& state, const std::vector<Action>& legal,
                              const EncodingContext& context) override;

private:
    std::unique_ptr<LineProcess> process_;
    std::chrono::milliseconds timeout_;
};

struct SearchConfig {
    int beam_width = 1;    // 1 = greedy
    int depth_bound = 64;  // maximum actions per derivation
};

struct SynthesisResult {
    std::optional<SemQlTree> tree;
    std::vector<Action> actions;
    std::string failure;  // structured reason when no tree was produced

    bool ok() const { return tree.has_value(); }
};

// Grammar-constrained search: only actions from valid_next_actions are ever
// applied, so no policy behavior can produce an out-of-grammar tree.
SynthesisResult synthesize(const EncodingContext& context, ScoringPolicy& policy,
                           const SearchConfig& config = {});

}  // namespace nl2sql
