#include "lsp/conditions.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>

#include "lsp/diagnostics.hpp"

namespace lsp {

namespace {

bool is_word_char(unsigned char c) {
    if (c >= 0x80) return true;
    return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}

char to_lower_ascii(char c) {
    return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
}

constexpr double kEqTolerance = 1e-9;

}  // namespace

std::vector<std::string> tokenize(const std::string& raw) {
    std::vector<std::string> tokens;
    std::string current;
    for (char c : raw) {
        if (is_word_char(static_cast<unsigned char>(c))) {
            current.push_back(to_lower_ascii(c));
        } else if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) tokens.push_back(std::move(current));
    return tokens;
}

std::string Capture::display() const {
    struct Visitor {
        std::string operator()(const SpanCapture& s) const { return s.text; }
        std::string operator()(const NumberCapture& n) const {
            return Value::real(n.value).display();
        }
        std::string operator()(const KeywordCapture& k) const { return k.phrase; }
        std::string operator()(const SimilarityCapture& s) const {
            return Value::real(s.score).display();
        }
    };
    return std::visit(Visitor{}, v);
}

std::string numeric_op_name(NumericOp op) {
    switch (op) {
        case NumericOp::lt: return "<";
        case NumericOp::le: return "<=";
        case NumericOp::eq: return "=";
        case NumericOp::ge: return ">=";
        case NumericOp::gt: return ">";
    }
    return "?";
}

std::string ConditionSpec::family_name() const {
    struct Visitor {
        std::string operator()(const RegexCondition&) const { return "regex"; }
        std::string operator()(const KeywordsCondition&) const { return "keywords"; }
        std::string operator()(const NumericCompareCondition&) const { return "numeric_compare"; }
        std::string operator()(const SemanticSimCondition&) const { return "semantic_sim"; }
    };
    return std::visit(Visitor{}, family);
}

double JaccardScorer::score(const std::string& query, const std::string& input) const {
    std::set<std::string> a, b;
    for (auto& t : tokenize(query)) a.insert(std::move(t));
    for (auto& t : tokenize(input)) b.insert(std::move(t));
    if (a.empty() && b.empty()) return 1.0;
    std::size_t inter = 0;
    for (const auto& t : a) inter += b.count(t);
    const std::size_t uni = a.size() + b.size() - inter;
    return static_cast<double>(inter) / static_cast<double>(uni);
}

std::shared_ptr<const std::regex> compile_pattern(const std::string& pattern) {
    return std::make_shared<const std::regex>(pattern,
                                              std::regex::ECMAScript | std::regex::icase);
}

std::optional<std::string> unsupported_regex_construct(const std::string& pattern) {
    for (std::size_t i = 0; i < pattern.size(); ++i) {
        if (pattern[i] == '\\' && i + 1 < pattern.size()) {
            char next = pattern[i + 1];
            if (next >= '1' && next <= '9') return "backreference \\" + std::string(1, next);
            ++i;  // skip the escaped character
            continue;
        }
        if (pattern.compare(i, 4, "(?<=") == 0 || pattern.compare(i, 4, "(?<!") == 0) {
            return "lookbehind " + pattern.substr(i, 4);
        }
    }
    return std::nullopt;
}

ConditionOutcome eval_regex(const RegexCondition& spec, const InputText& input) {
    std::smatch match;
    if (!spec.compiled || !std::regex_search(input.raw, match, *spec.compiled)) {
        return {false, {}};
    }
    ConditionOutcome out{true, {}};
    const auto start = static_cast<std::size_t>(match.position(0));
    const auto len = static_cast<std::size_t>(match.length(0));
    if (len > 0) {  // zero-width matches trigger but capture nothing
        out.captures.push_back(Capture{SpanCapture{start, start + len, match.str(0)}});
    }
    return out;
}

ConditionOutcome eval_keywords(const KeywordsCondition& spec, const InputText& input) {
    ConditionOutcome out;
    for (const auto& phrase : spec.phrases) {
        const auto needle = tokenize(phrase);
        if (needle.empty() || needle.size() > input.tokens.size()) continue;
        bool found = false;
        for (std::size_t i = 0; i + needle.size() <= input.tokens.size() && !found; ++i) {
            found = std::equal(needle.begin(), needle.end(), input.tokens.begin() + i);
        }
        if (found) {
            out.triggered = true;
            out.captures.push_back(Capture{KeywordCapture{phrase}});
        }
    }
    return out;
}

std::vector<double> extract_numbers(const InputText& input, const std::regex* scope_pattern) {
    std::string_view haystack = input.raw;
    if (scope_pattern) {
        std::smatch match;
        if (!std::regex_search(input.raw, match, *scope_pattern)) return {};
        haystack = std::string_view(input.raw).substr(
            static_cast<std::size_t>(match.position(0)),
            static_cast<std::size_t>(match.length(0)));
    }

    std::vector<double> numbers;
    std::size_t i = 0;
    while (i < haystack.size()) {
        if (haystack[i] < '0' || haystack[i] > '9') {
            ++i;
            continue;
        }
        std::size_t end = i;
        while (end < haystack.size() && haystack[end] >= '0' && haystack[end] <= '9') ++end;
        if (end + 1 < haystack.size() && haystack[end] == '.' && haystack[end + 1] >= '0' &&
            haystack[end + 1] <= '9') {
            ++end;
            while (end < haystack.size() && haystack[end] >= '0' && haystack[end] <= '9') ++end;
        }
        double value = 0.0;
        auto [_, ec] = std::from_chars(haystack.data() + i, haystack.data() + end, value);
        if (ec == std::errc() && std::isfinite(value)) numbers.push_back(value);
        i = end;
    }
    return numbers;
}

ConditionOutcome eval_numeric_compare(const NumericCompareCondition& spec,
                                      const InputText& input) {
    const auto numbers = extract_numbers(input, spec.scope_compiled.get());
    if (numbers.empty()) return {false, {}};  // absent operand is the semantic negative
    const double x = numbers.front();
    bool hit = false;
    switch (spec.op) {
        case NumericOp::lt: hit = x < spec.threshold; break;
        case NumericOp::le: hit = x <= spec.threshold; break;
        case NumericOp::eq: hit = std::fabs(x - spec.threshold) <= kEqTolerance; break;
        case NumericOp::ge: hit = x >= spec.threshold; break;
        case NumericOp::gt: hit = x > spec.threshold; break;
    }
    if (!hit) return {false, {}};
    return {true, {Capture{NumberCapture{x}}}};
}

ConditionOutcome eval_semantic_sim(const SemanticSimCondition& spec, const InputText& input,
                                   const SemanticScorer& scorer) {
    const double s = scorer.score(spec.query, input.raw);
    if (!std::isfinite(s) || s < 0.0 || s > 1.0) {
        throw Error("semantic scorer returned out-of-range score " + std::to_string(s));
    }
    if (s < spec.threshold) return {false, {}};
    return {true, {Capture{SimilarityCapture{s}}}};
}

ConditionOutcome evaluate_condition(const ConditionSpec& spec, const InputText& input,
                                    const SemanticScorer& scorer) {
    struct Visitor {
        const InputText& input;
        const SemanticScorer& scorer;
        const std::string& id;
        ConditionOutcome operator()(const RegexCondition& c) const {
            return eval_regex(c, input);
        }
        ConditionOutcome operator()(const KeywordsCondition& c) const {
            return eval_keywords(c, input);
        }
        ConditionOutcome operator()(const NumericCompareCondition& c) const {
            return eval_numeric_compare(c, input);
        }
        ConditionOutcome operator()(const SemanticSimCondition& c) const {
            try {
                return eval_semantic_sim(c, input, scorer);
            } catch (const std::exception& e) {
                throw Error("condition '" + id + "': " + e.what());
            }
        }
    };
    return std::visit(Visitor{input, scorer, spec.id}, spec.family);
}

}  // namespace lsp
