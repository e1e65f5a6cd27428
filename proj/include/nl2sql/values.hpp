#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nl2sql/hints.hpp"
#include "nl2sql/schema.hpp"
#include "nl2sql/sqlite_db.hpp"
#include "nl2sql/value_index.hpp"

namespace nl2sql {

enum class ExtractionSource { Ner, Quoted, Capitalized, SingleLetter };

struct ExtractedValue {
    std::string text;
    std::size_t begin = 0;  // character span in the question
    std::size_t end = 0;
    ExtractionSource source = ExtractionSource::Capitalized;
};

enum class CandidateOrigin {
    Verbatim,
    Similarity,
    HeuristicGender,
    HeuristicBoolean,
    HeuristicOrdinal,
    HeuristicMonthWildcard,
    Ngram,
};

std::string candidate_origin_name(CandidateOrigin origin);

enum class WildcardStyle { None, TrailingPercent, LeadingPercent, BothSides };

struct CandidateLocation {
    int table = -1;
    int column = -1;

    bool operator==(const CandidateLocation& other) const = default;
};

struct ValueCandidate {
    std::string surface;
    CandidateOrigin origin = CandidateOrigin::Verbatim;
    std::optional<CandidateLocation> location;
    bool validated = false;              // location confirmed against the database
    bool exempt_from_validation = false; // numeric or quoted: never dropped
    bool unverified = false;             // database error during validation (fail-open)
    int span_begin = -1;                 // source span in the question, when known
    int span_end = -1;
    std::size_t distance = 0;            // edit distance for similarity candidates
    WildcardStyle wildcard = WildcardStyle::None;
};

// Stable order: question span, then origin priority, then surface; no
// duplicate (surface, location) pairs.
struct CandidateSet {
    std::vector<ValueCandidate> items;

    std::size_t size() const { return items.size(); }
    bool empty() const { return items.empty(); }
    const ValueCandidate& operator[](std::size_t i) const { return items[i]; }
};

// Optional external named-entity recognizer. Implementations speak the
// line-delimited JSON protocol; a returned nullopt means the recognizer
// failed and extraction degrades to heuristics only.
class EntityRecognizer {
public:
    struct Entity {
        std::string text;
        std::size_t start = 0;
        std::size_t end = 0;
        std::string type;
    };
    virtual ~EntityRecognizer() = default;
    virtual std::optional<std::vector<Entity>> recognize(const std::string& question) = 0;
};

// Question-side value mentions: recognizer spans (when attached) plus the
// deterministic heuristics (quoted content, capitalized runs, single
// letters). Overlapping spans merge to the longest.
std::vector<ExtractedValue> extract_values(const std::string& question,
                                           EntityRecognizer* recognizer = nullptr);

// All contiguous n-grams of a multi-token extraction, longest first,
// excluding the full string (that one is already the verbatim candidate).
std::vector<std::string> ngram_expand(const ExtractedValue& value);

// Optimal-string-alignment distance: substitution, insertion, deletion and
// adjacent transposition. Symmetric and zero only for equal strings; the
// triangle inequality does NOT hold for this variant.
std::size_t damerau_levenshtein(std::string_view a, std::string_view b);

// Same metric, cut off at bound: returns bound + 1 when the distance
// exceeds it. Exact for all results <= bound.
std::size_t damerau_levenshtein_bounded(std::string_view a, std::string_view b,
                                        std::size_t bound);

using ThresholdPolicy = std::function<std::size_t(std::size_t)>;

// 0 for strings up to 3 chars, 1 for 4-5, 2 for 6-10, 3 beyond.
std::size_t default_distance_threshold(std::size_t length);

struct SimilarityHit {
    int table = -1;
    int column = -1;
    std::string raw_value;
    std::size_t distance = 0;
};

// All indexed values within policy(|extraction|) edit distance. The
// blocking prefilters (length band, character-class bitmap) are sound:
// every within-threshold value survives them.
std::vector<SimilarityHit> similarity_search(const std::string& extraction,
                                             const ValueIndex& index,
                                             const ThresholdPolicy& policy = default_distance_threshold);

// Candidate generation: verbatim extractions, similarity hits against the
// index, handcrafted heuristics (gender, boolean, ordinal, month wildcard)
// over the annotated question, and n-grams of multi-token extractions.
std::vector<ValueCandidate> generate_candidates(const std::vector<ExtractedValue>& extracted,
                                                const QuestionAnnotation& annotation,
                                                const ValueIndex& index,
                                                const ThresholdPolicy& policy = default_distance_threshold);

struct ValidationConfig {
    std::size_t max_candidates = 50;
};

// Exact-match validation. Non-exempt candidates survive only with a
// confirmed location (one output candidate per location); exempt and
// wildcard candidates always pass through. Database errors keep the
// candidate and mark it unverified.
CandidateSet validate_candidates(const std::vector<ValueCandidate>& candidates,
                                 const ValueIndex& index, const DatabaseSchema& schema,
                                 SqliteDb* db, const ValidationConfig& config = {});

}  // namespace nl2sql
