#ifndef LSP_CONDITIONS_HPP
#define LSP_CONDITIONS_HPP

#include <memory>
#include <optional>
#include <regex>
#include <string>
#include <variant>
#include <vector>

#include "lsp/value.hpp"

namespace lsp {

// Lowercase word tokens, split on maximal non-alphanumeric runs.
// Bytes >= 0x80 are treated as word characters so UTF-8 text stays intact.
std::vector<std::string> tokenize(const std::string& raw);

struct InputText {
    std::string raw;
    std::vector<std::string> tokens;

    static InputText from(std::string raw) {
        InputText t;
        t.tokens = tokenize(raw);
        t.raw = std::move(raw);
        return t;
    }
};

struct SpanCapture {
    std::size_t start = 0;  // char offsets into raw, start < end
    std::size_t end = 0;
    std::string text;
    bool operator==(const SpanCapture&) const = default;
};
struct NumberCapture {
    double value = 0.0;
    bool operator==(const NumberCapture&) const = default;
};
struct KeywordCapture {
    std::string phrase;
    bool operator==(const KeywordCapture&) const = default;
};
struct SimilarityCapture {
    double score = 0.0;  // in [0, 1]
    bool operator==(const SimilarityCapture&) const = default;
};

struct Capture {
    std::variant<SpanCapture, NumberCapture, KeywordCapture, SimilarityCapture> v;
    std::string display() const;
    bool operator==(const Capture&) const = default;
};

struct ConditionOutcome {
    bool triggered = false;
    std::vector<Capture> captures;  // empty whenever !triggered
    bool operator==(const ConditionOutcome&) const = default;
};

enum class NumericOp { lt, le, eq, ge, gt };

std::string numeric_op_name(NumericOp op);

// The four condition families. Patterns are kept as source text (for
// placeholder binding and serialization) plus a compiled, case-insensitive
// regex; compilation failures surface at sketch-check time.
struct RegexCondition {
    std::string pattern;
    std::shared_ptr<const std::regex> compiled;
};
struct KeywordsCondition {
    std::vector<std::string> phrases;  // declaration order, duplicate-free
};
struct NumericCompareCondition {
    NumericOp op = NumericOp::eq;
    double threshold = 0.0;
    std::optional<std::string> scope_pattern;
    std::shared_ptr<const std::regex> scope_compiled;
};
struct SemanticSimCondition {
    std::string query;
    double threshold = 0.0;  // in [0, 1]
};

struct ConditionSpec {
    std::string id;
    std::string target;
    UpdateKind update_kind = UpdateKind::latch_true;
    std::variant<RegexCondition, KeywordsCondition, NumericCompareCondition, SemanticSimCondition>
        family;

    std::string family_name() const;
};

// Deterministic similarity contract: equal inputs give equal scores,
// finite and in [0, 1].
class SemanticScorer {
  public:
    virtual ~SemanticScorer() = default;
    virtual double score(const std::string& query, const std::string& input) const = 0;
};

// Offline stand-in: Jaccard similarity over the two token sets.
// Two empty token sets score 1.0.
class JaccardScorer final : public SemanticScorer {
  public:
    double score(const std::string& query, const std::string& input) const override;
};

std::shared_ptr<const std::regex> compile_pattern(const std::string& pattern);

// Rejects regex constructs outside the supported subset (backreferences,
// lookbehind); returns a description of the offending construct.
std::optional<std::string> unsupported_regex_construct(const std::string& pattern);

ConditionOutcome eval_regex(const RegexCondition& spec, const InputText& input);
ConditionOutcome eval_keywords(const KeywordsCondition& spec, const InputText& input);
ConditionOutcome eval_numeric_compare(const NumericCompareCondition& spec, const InputText& input);
ConditionOutcome eval_semantic_sim(const SemanticSimCondition& spec, const InputText& input,
                                   const SemanticScorer& scorer);

// All decimal literals in textual order; with a scope pattern, only the
// literals inside its first match.
std::vector<double> extract_numbers(const InputText& input,
                                    const std::regex* scope_pattern = nullptr);

// Dispatch on the condition family. Scorer failures (non-finite or
// out-of-range scores, thrown errors) are reported with the condition id.
ConditionOutcome evaluate_condition(const ConditionSpec& spec, const InputText& input,
                                    const SemanticScorer& scorer);

}  // namespace lsp

#endif
