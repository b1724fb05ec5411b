#include "lsp/sketch.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

namespace lsp {

// Sketch file grammar (line oriented, UTF-8, '#' starts a comment outside
// string literals):
//
//   sketch <name>
//   task: sentence | relation            (optional, default sentence)
//   labels: <label>[, <label>]*
//
//   variables:
//     <name>: <type> = <default> [ask "<question>"] [say "<phrase>"]
//       <type> := boolean | integer | float | enum{<sym>[, <sym>]*}
//
//   conditions:
//     <target> <- regex("<pattern>")
//     <target> <- keywords("<phrase>"[, "<phrase>"]*)
//     <target> <- numeric_compare(<op>, <threshold>[, scope="<pattern>"])
//     <target> <- semantic_sim("<query>", <tau>)
//
//   validator: [if_then | normal_form]
//     label <L> if <expr>
//     default <L>
//
// Boolean targets latch to true when their condition triggers; integer,
// float, and enum targets are assigned the condition's captured value.
// DRUG and EFFECT are the only recognized placeholders.

namespace {

bool ident_start(char c) {
    return c == '_' || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}
bool ident_char(char c) {
    return ident_start(c) || (c >= '0' && c <= '9');
}

std::string strip_comment(const std::string& line) {
    bool in_string = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (in_string && c == '\\' && i + 1 < line.size()) {
            ++i;
            continue;
        }
        if (c == '"') in_string = !in_string;
        else if (c == '#' && !in_string) return line.substr(0, i);
    }
    return line;
}

bool is_blank(const std::string& line) {
    return std::all_of(line.begin(), line.end(),
                       [](unsigned char c) { return std::isspace(c); });
}

// Cursor over one source line; columns are 1-based.
class LineCursor {
  public:
    LineCursor(const std::string& text, int line_no, std::vector<Diagnostic>& diags)
        : text_(text), line_(line_no), diags_(diags) {}

    int col() const { return static_cast<int>(pos_) + 1; }
    std::size_t pos() const { return pos_; }
    int line() const { return line_; }

    void skip_ws() {
        while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t')) ++pos_;
    }
    bool at_end() {
        skip_ws();
        return pos_ >= text_.size();
    }
    char peek() {
        skip_ws();
        return pos_ < text_.size() ? text_[pos_] : '\0';
    }
    bool try_consume(char c) {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }
    bool expect(char c) {
        if (try_consume(c)) return true;
        fail(std::string("expected '") + c + "'");
        return false;
    }

    // [A-Za-z_][A-Za-z0-9_]*
    std::optional<std::string> ident() {
        skip_ws();
        if (pos_ >= text_.size() || !ident_start(text_[pos_])) {
            fail("expected identifier");
            return std::nullopt;
        }
        std::size_t start = pos_;
        while (pos_ < text_.size() && ident_char(text_[pos_])) ++pos_;
        return text_.substr(start, pos_ - start);
    }

    // Bare word: run of non-space, non-delimiter characters (labels).
    std::optional<std::string> word() {
        skip_ws();
        std::size_t start = pos_;
        while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_])) &&
               text_[pos_] != ',' && text_[pos_] != ')' && text_[pos_] != '}') {
            ++pos_;
        }
        if (pos_ == start) {
            fail("expected a label");
            return std::nullopt;
        }
        return text_.substr(start, pos_ - start);
    }

    std::optional<double> number() {
        skip_ws();
        std::size_t start = pos_;
        if (pos_ < text_.size() && (text_[pos_] == '-' || text_[pos_] == '+')) ++pos_;
        while (pos_ < text_.size() &&
               ((text_[pos_] >= '0' && text_[pos_] <= '9') || text_[pos_] == '.')) {
            ++pos_;
        }
        double value = 0.0;
        auto [p, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, value);
        if (pos_ == start || ec != std::errc() || p != text_.data() + pos_ ||
            !std::isfinite(value)) {
            pos_ = start;
            fail("expected a number");
            return std::nullopt;
        }
        return value;
    }

    // Double-quoted string with \" \\ \n \t escapes.
    std::optional<std::string> string_lit() {
        skip_ws();
        if (pos_ >= text_.size() || text_[pos_] != '"') {
            fail("expected a string literal");
            return std::nullopt;
        }
        const int open_col = col();
        ++pos_;
        std::string out;
        while (pos_ < text_.size()) {
            char c = text_[pos_++];
            if (c == '"') return out;
            if (c == '\\' && pos_ < text_.size()) {
                char esc = text_[pos_++];
                switch (esc) {
                    case 'n': out += '\n'; break;
                    case 't': out += '\t'; break;
                    case '"': out += '"'; break;
                    case '\\': out += '\\'; break;
                    default:
                        out += '\\';
                        out += esc;
                }
                continue;
            }
            out += c;
        }
        diags_.push_back({line_, open_col, "unterminated string literal"});
        return std::nullopt;
    }

    std::string rest() {
        skip_ws();
        std::string out = text_.substr(pos_);
        while (!out.empty() && std::isspace(static_cast<unsigned char>(out.back()))) {
            out.pop_back();
        }
        return out;
    }

    void fail(const std::string& message) { diags_.push_back({line_, col(), message}); }

  private:
    const std::string& text_;
    int line_;
    std::size_t pos_ = 0;
    std::vector<Diagnostic>& diags_;
};

const char* const kPlaceholders[] = {"DRUG", "EFFECT"};

bool word_bounded_at(const std::string& text, std::size_t pos, std::size_t len) {
    const bool left_ok = pos == 0 || !ident_char(text[pos - 1]);
    const bool right_ok = pos + len >= text.size() || !ident_char(text[pos + len]);
    return left_ok && right_ok;
}

bool uses_placeholder(const std::string& text, const std::string& name) {
    std::size_t pos = 0;
    while ((pos = text.find(name, pos)) != std::string::npos) {
        if (word_bounded_at(text, pos, name.size())) return true;
        pos += name.size();
    }
    return false;
}

std::string replace_placeholder(const std::string& text, const std::string& name,
                                const std::string& value) {
    std::string out;
    std::size_t pos = 0, last = 0;
    while ((pos = text.find(name, pos)) != std::string::npos) {
        if (word_bounded_at(text, pos, name.size())) {
            out.append(text, last, pos - last);
            out += value;
            pos += name.size();
            last = pos;
        } else {
            pos += name.size();
        }
    }
    out.append(text, last, text.size() - last);
    return out;
}

std::string regex_escape(const std::string& text) {
    static const std::string special = R"(^$\.*+?()[]{}|/)";
    std::string out;
    out.reserve(text.size());
    for (char c : text) {
        if (special.find(c) != std::string::npos) out += '\\';
        out += c;
    }
    return out;
}

class SketchParser {
  public:
    explicit SketchParser(const std::string& source) : source_(source) {}

    SketchParseResult run() {
        parse_lines();
        if (diags_.empty()) cross_check();
        SketchParseResult result;
        if (diags_.empty()) result.document = std::move(doc_);
        result.diagnostics = std::move(diags_);
        return result;
    }

  private:
    enum class Section { header, variables, conditions, validator };

    void parse_lines() {
        std::istringstream in(source_);
        std::string raw;
        int line_no = 0;
        bool seen_header = false;
        while (std::getline(in, raw)) {
            ++line_no;
            if (!raw.empty() && raw.back() == '\r') raw.pop_back();
            const std::string line = strip_comment(raw);
            if (is_blank(line)) continue;

            LineCursor cur(line, line_no, diags_);
            if (!seen_header) {
                parse_header(cur);
                seen_header = true;
                continue;
            }
            if (try_section_switch(cur, line)) continue;

            switch (section_) {
                case Section::header: parse_header_line(cur); break;
                case Section::variables: parse_variable(cur); break;
                case Section::conditions: parse_condition(cur); break;
                case Section::validator: parse_validator_line(cur); break;
            }
        }
        if (!seen_header) {
            diags_.push_back({1, 1, "expected sketch header"});
            return;
        }
        if (!saw_validator_section_) {
            diags_.push_back({line_no > 0 ? line_no : 1, 1, "missing validator: section"});
        } else if (!default_label_) {
            diags_.push_back({line_no, 1, "validator is missing a default label"});
        }
    }

    void parse_header(LineCursor& cur) {
        const std::size_t before = diags_.size();
        auto kw = cur.ident();
        if (!kw || *kw != "sketch") {
            diags_.resize(before);
            diags_.push_back({cur.line(), 1, "expected sketch header"});
            return;
        }
        auto name = cur.ident();
        if (!name) return;
        doc_.name = *name;
    }

    bool try_section_switch(LineCursor& cur, const std::string& line) {
        // Section headers look like "variables:", "conditions:", "validator: [mode]".
        std::size_t i = 0;
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
        std::size_t start = i;
        while (i < line.size() && ident_char(line[i])) ++i;
        const std::string word = line.substr(start, i - start);
        if (word != "variables" && word != "conditions" && word != "validator") return false;
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
        if (i >= line.size() || line[i] != ':') return false;
        ++i;

        if (word == "variables") section_ = Section::variables;
        else if (word == "conditions") section_ = Section::conditions;
        else {
            section_ = Section::validator;
            saw_validator_section_ = true;
            std::string mode = line.substr(i);
            LineCursor rest(mode, cur.line(), diags_);
            if (!rest.at_end()) {
                auto m = rest.ident();
                if (m && *m == "normal_form") normal_form_ = true;
                else if (m && *m == "if_then") normal_form_ = false;
                else if (m) diags_.push_back({cur.line(), 1,
                                              "unknown validator mode '" + *m +
                                                  "' (use if_then or normal_form)"});
            }
        }
        return true;
    }

    void parse_header_line(LineCursor& cur) {
        auto key = cur.ident();
        if (!key) return;
        if (!cur.expect(':')) return;
        if (*key == "task") {
            auto value = cur.ident();
            if (!value) return;
            if (*value == "sentence") doc_.meta.kind = TaskKind::sentence;
            else if (*value == "relation") doc_.meta.kind = TaskKind::relation;
            else cur.fail("task must be 'sentence' or 'relation'");
        } else if (*key == "labels") {
            while (true) {
                auto label = cur.word();
                if (!label) return;
                if (std::find(doc_.labels.begin(), doc_.labels.end(), *label) !=
                    doc_.labels.end()) {
                    cur.fail("duplicate label " + *label);
                    return;
                }
                doc_.labels.push_back(*label);
                if (!cur.try_consume(',')) break;
            }
            if (!cur.at_end()) cur.fail("unexpected trailing text after labels");
        } else {
            cur.fail("unknown directive '" + *key + "'");
        }
    }

    void parse_variable(LineCursor& cur) {
        const int line = cur.line();
        auto name = cur.ident();
        if (!name) return;
        if (!cur.expect(':')) return;

        auto type_name = cur.ident();
        if (!type_name) return;
        Datatype type;
        if (*type_name == "boolean" || *type_name == "bool") {
            type = Datatype::boolean();
        } else if (*type_name == "integer" || *type_name == "int") {
            type = Datatype::integer();
        } else if (*type_name == "float") {
            type = Datatype::real();
        } else if (*type_name == "enum") {
            if (!cur.expect('{')) return;
            std::vector<std::string> values;
            while (true) {
                auto sym = cur.ident();
                if (!sym) return;
                if (std::find(values.begin(), values.end(), *sym) != values.end()) {
                    cur.fail("duplicate enum value '" + *sym + "'");
                    return;
                }
                values.push_back(*sym);
                if (!cur.try_consume(',')) break;
            }
            if (!cur.expect('}')) return;
            type = Datatype::enumeration(std::move(values));
        } else {
            cur.fail("unknown type '" + *type_name + "'");
            return;
        }

        if (!cur.expect('=')) return;
        auto value = parse_default(cur, type);
        if (!value) return;

        while (!cur.at_end()) {
            auto kw = cur.ident();
            if (!kw) return;
            if (*kw == "ask" || *kw == "say") {
                auto text = cur.string_lit();
                if (!text) return;
                auto& map = (*kw == "ask") ? doc_.hints.questions : doc_.hints.phrases;
                if (!map.emplace(*name, *text).second) {
                    cur.fail("duplicate '" + *kw + "' annotation for " + *name);
                    return;
                }
            } else {
                cur.fail("unknown annotation '" + *kw + "' (expected ask or say)");
                return;
            }
        }

        for (const auto& existing : doc_.variables) {
            if (existing.name == *name) {
                diags_.push_back({line, 1, "duplicate variable name '" + *name + "'"});
                return;
            }
        }
        doc_.variables.push_back({*name, std::move(type), std::move(*value)});
    }

    std::optional<Value> parse_default(LineCursor& cur, const Datatype& type) {
        switch (type.kind) {
            case TypeKind::boolean: {
                auto word = cur.ident();
                if (!word) return std::nullopt;
                if (*word == "true") return Value::boolean(true);
                if (*word == "false") return Value::boolean(false);
                cur.fail("boolean default must be true or false");
                return std::nullopt;
            }
            case TypeKind::integer: {
                auto num = cur.number();
                if (!num) return std::nullopt;
                if (std::fabs(*num - std::round(*num)) > 0) {
                    cur.fail("integer default must be integral");
                    return std::nullopt;
                }
                return Value::integer(static_cast<std::int64_t>(*num));
            }
            case TypeKind::real: {
                auto num = cur.number();
                if (!num) return std::nullopt;
                return Value::real(*num);
            }
            case TypeKind::enumeration: {
                auto sym = cur.ident();
                if (!sym) return std::nullopt;
                if (!type.has_enum_value(*sym)) {
                    cur.fail("default '" + *sym + "' is not a value of " + type.name());
                    return std::nullopt;
                }
                return Value::symbol(*sym);
            }
        }
        return std::nullopt;
    }

    void parse_condition(LineCursor& cur) {
        const int line_no = cur.line();
        auto target = cur.ident();
        if (!target) return;
        if (!cur.try_consume('<') || !cur.try_consume('-')) {
            cur.fail("expected '<-'");
            return;
        }
        auto family = cur.ident();
        if (!family) return;

        ConditionSpec spec;
        spec.target = *target;

        if (*family == "regex") {
            if (!cur.expect('(')) return;
            const int pat_line = line_no, pat_col = cur.col();
            auto pattern = cur.string_lit();
            if (!pattern || !cur.expect(')')) return;
            if (!check_pattern(*pattern, pat_line, pat_col)) return;
            spec.family = RegexCondition{*pattern, compile_pattern(*pattern)};
        } else if (*family == "keywords") {
            if (!cur.expect('(')) return;
            std::vector<std::string> phrases;
            while (true) {
                auto phrase = cur.string_lit();
                if (!phrase) return;
                if (std::find(phrases.begin(), phrases.end(), *phrase) == phrases.end()) {
                    phrases.push_back(std::move(*phrase));
                }
                if (!cur.try_consume(',')) break;
            }
            if (!cur.expect(')')) return;
            if (phrases.empty()) {
                cur.fail("keywords needs at least one phrase");
                return;
            }
            spec.family = KeywordsCondition{std::move(phrases)};
        } else if (*family == "numeric_compare") {
            if (!cur.expect('(')) return;
            auto op = parse_numeric_op(cur);
            if (!op) return;
            if (!cur.expect(',')) return;
            auto threshold = cur.number();
            if (!threshold) return;
            NumericCompareCondition cond{*op, *threshold, std::nullopt, nullptr};
            if (cur.try_consume(',')) {
                auto kw = cur.ident();
                if (!kw || *kw != "scope") {
                    cur.fail("expected scope=\"...\"");
                    return;
                }
                if (!cur.expect('=')) return;
                const int pat_line = line_no, pat_col = cur.col();
                auto pattern = cur.string_lit();
                if (!pattern) return;
                if (!check_pattern(*pattern, pat_line, pat_col)) return;
                cond.scope_pattern = *pattern;
                cond.scope_compiled = compile_pattern(*pattern);
            }
            if (!cur.expect(')')) return;
            spec.family = std::move(cond);
        } else if (*family == "semantic_sim") {
            if (!cur.expect('(')) return;
            auto query = cur.string_lit();
            if (!query || !cur.expect(',')) return;
            const int tau_col = cur.col();
            auto tau = cur.number();
            if (!tau || !cur.expect(')')) return;
            if (*tau < 0.0 || *tau > 1.0) {
                diags_.push_back({line_no, tau_col, "similarity threshold must be in [0, 1]"});
                return;
            }
            spec.family = SemanticSimCondition{std::move(*query), *tau};
        } else {
            cur.fail("unknown condition family '" + *family +
                      "' (regex, keywords, numeric_compare, semantic_sim)");
            return;
        }
        if (!cur.at_end()) {
            cur.fail("unexpected trailing text");
            return;
        }
        condition_lines_.push_back(line_no);
        doc_.conditions.push_back(std::move(spec));
    }

    std::optional<NumericOp> parse_numeric_op(LineCursor& cur) {
        cur.skip_ws();
        const int col = cur.col();
        std::string op;
        for (char c = cur.peek(); c == '<' || c == '>' || c == '='; c = cur.peek()) {
            op += c;
            cur.try_consume(c);
        }
        if (op == "<") return NumericOp::lt;
        if (op == "<=") return NumericOp::le;
        if (op == "=" || op == "==") return NumericOp::eq;
        if (op == ">=") return NumericOp::ge;
        if (op == ">") return NumericOp::gt;
        diags_.push_back({cur.line(), col, "expected comparison operator (<, <=, =, >=, >)"});
        return std::nullopt;
    }

    bool check_pattern(const std::string& pattern, int line, int col) {
        if (auto bad = unsupported_regex_construct(pattern)) {
            diags_.push_back({line, col, "unsupported regex construct: " + *bad});
            return false;
        }
        try {
            compile_pattern(pattern);
        } catch (const std::regex_error& e) {
            diags_.push_back({line, col, std::string("regex does not compile: ") + e.what()});
            return false;
        }
        return true;
    }

    void parse_validator_line(LineCursor& cur) {
        const int line_no = cur.line();
        auto kw = cur.ident();
        if (!kw) return;
        if (*kw == "default") {
            auto label = cur.word();
            if (!label) return;
            if (default_label_) {
                diags_.push_back({line_no, 1, "duplicate default label"});
                return;
            }
            default_label_ = *label;
            if (!cur.at_end()) cur.fail("unexpected trailing text after default");
            return;
        }
        if (*kw != "label") {
            cur.fail("expected 'label <L> if <expr>' or 'default <L>'");
            return;
        }
        auto label = cur.word();
        if (!label) return;
        auto if_kw = cur.ident();
        if (!if_kw || *if_kw != "if") {
            cur.fail("expected 'if'");
            return;
        }
        cur.skip_ws();
        const int expr_col = cur.col();
        const std::string expr_src = cur.rest();
        if (expr_src.empty()) {
            cur.fail("expected expression");
            return;
        }
        ExprPtr guard = parse_expr(expr_src, line_no, expr_col, diags_);
        if (!guard) return;
        clauses_.push_back({std::move(guard), *label, line_no});
    }

    void cross_check() {
        std::set<std::string> declared;
        for (const auto& v : doc_.variables) declared.insert(v.name);

        if (doc_.labels.empty()) {
            diags_.push_back({0, 0, "sketch declares no labels"});
        }

        // Condition targets and update kinds.
        std::map<std::string, int> target_counts;
        for (const auto& c : doc_.conditions) ++target_counts[c.target];
        std::map<std::string, int> target_seen;
        for (std::size_t i = 0; i < doc_.conditions.size(); ++i) {
            auto& cond = doc_.conditions[i];
            const int line = condition_lines_[i];
            auto it = std::find_if(doc_.variables.begin(), doc_.variables.end(),
                                   [&](const VariableSpec& v) { return v.name == cond.target; });
            if (it == doc_.variables.end()) {
                diags_.push_back({line, 1, "unknown variable " + cond.target});
                continue;
            }
            cond.update_kind = it->type.kind == TypeKind::boolean ? UpdateKind::latch_true
                                                                  : UpdateKind::assign_capture;
            const int ordinal = ++target_seen[cond.target];
            cond.id = target_counts[cond.target] == 1
                          ? cond.target
                          : cond.target + "." + std::to_string(ordinal);
        }

        // Placeholders: relation sketches must use both, sentence sketches none.
        for (const char* name : kPlaceholders) {
            if (condition_text_uses(name)) doc_.meta.placeholders.push_back(name);
        }
        if (doc_.meta.kind == TaskKind::relation) {
            for (const char* name : kPlaceholders) {
                if (std::find(doc_.meta.placeholders.begin(), doc_.meta.placeholders.end(),
                              name) == doc_.meta.placeholders.end()) {
                    diags_.push_back(
                        {0, 0, std::string("relation sketch never references the ") + name +
                                   " placeholder"});
                }
            }
        } else if (!doc_.meta.placeholders.empty()) {
            diags_.push_back({0, 0, "sentence sketch uses placeholder " +
                                        doc_.meta.placeholders.front() +
                                        " (declare 'task: relation')"});
        }

        // Annotations must reference declared variables.
        for (const auto& [name, _] : doc_.hints.questions) {
            if (!declared.count(name)) {
                diags_.push_back({0, 0, "ask annotation on unknown variable " + name});
            }
        }

        if (!default_label_) return;  // already diagnosed

        ValidatorDef validator = build_validator();
        for (auto d : check_wellformed(validator, doc_.variables, doc_.labels)) {
            diags_.push_back(std::move(d));
        }
        doc_.validator = std::move(validator);
    }

    bool condition_text_uses(const std::string& name) const {
        for (const auto& cond : doc_.conditions) {
            bool used = false;
            std::visit(
                [&](const auto& fam) {
                    using T = std::decay_t<decltype(fam)>;
                    if constexpr (std::is_same_v<T, RegexCondition>) {
                        used = uses_placeholder(fam.pattern, name);
                    } else if constexpr (std::is_same_v<T, KeywordsCondition>) {
                        for (const auto& p : fam.phrases) used = used || uses_placeholder(p, name);
                    } else if constexpr (std::is_same_v<T, NumericCompareCondition>) {
                        if (fam.scope_pattern) used = uses_placeholder(*fam.scope_pattern, name);
                    } else {
                        used = uses_placeholder(fam.query, name);
                    }
                },
                cond.family);
            if (used) return true;
        }
        return false;
    }

    ValidatorDef build_validator() const {
        if (normal_form_) return NormalFormRuleSet{clauses_, *default_label_};
        return IfThenChain{clauses_, *default_label_};
    }

    const std::string& source_;
    SketchDocument doc_;
    std::vector<Diagnostic> diags_;
    Section section_ = Section::header;
    bool saw_validator_section_ = false;
    bool normal_form_ = false;
    std::vector<RuleClause> clauses_;
    std::optional<Label> default_label_;
    std::vector<int> condition_lines_;
};

}  // namespace

SketchParseResult parse_sketch(const std::string& source) {
    return SketchParser(source).run();
}

SketchParseResult parse_sketch_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open sketch file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_sketch(buf.str());
}

SketchDocument bind_instance(const SketchDocument& doc, const TaskInstance& instance) {
    if (doc.meta.kind == TaskKind::sentence) return doc;
    if (!instance.drug || !instance.effect) {
        throw Error("relation sketch '" + doc.name + "' requires drug and effect bindings (item " +
                    instance.id + ")");
    }

    auto subst_literal = [&](const std::string& text) {
        std::string out = replace_placeholder(text, "DRUG", *instance.drug);
        return replace_placeholder(out, "EFFECT", *instance.effect);
    };
    auto subst_pattern = [&](const std::string& text) {
        std::string out = replace_placeholder(text, "DRUG", regex_escape(*instance.drug));
        return replace_placeholder(out, "EFFECT", regex_escape(*instance.effect));
    };

    SketchDocument bound = doc;
    for (auto& cond : bound.conditions) {
        std::visit(
            [&](auto& fam) {
                using T = std::decay_t<decltype(fam)>;
                if constexpr (std::is_same_v<T, RegexCondition>) {
                    std::string next = subst_pattern(fam.pattern);
                    if (next != fam.pattern) {
                        fam.pattern = std::move(next);
                        fam.compiled = compile_pattern(fam.pattern);
                    }
                } else if constexpr (std::is_same_v<T, KeywordsCondition>) {
                    for (auto& p : fam.phrases) p = subst_literal(p);
                } else if constexpr (std::is_same_v<T, NumericCompareCondition>) {
                    if (fam.scope_pattern) {
                        std::string next = subst_pattern(*fam.scope_pattern);
                        if (next != *fam.scope_pattern) {
                            fam.scope_pattern = std::move(next);
                            fam.scope_compiled = compile_pattern(*fam.scope_pattern);
                        }
                    }
                } else {
                    fam.query = subst_literal(fam.query);
                }
            },
            cond.family);
    }
    return bound;
}

SketchRunResult run_sketch(const SketchDocument& bound_doc, const InputText& input,
                           const SemanticScorer& scorer) {
    VariableStore store = init_store(bound_doc.variables);
    ExecutionTrace trace;
    std::vector<std::string> evidence;

    for (const auto& cond : bound_doc.conditions) {
        const ConditionOutcome outcome = evaluate_condition(cond, input, scorer);
        apply_update(store, trace, cond.id, outcome, cond.target, cond.update_kind);
        if (outcome.triggered) {
            std::string text = cond.id + ": ";
            for (std::size_t i = 0; i < outcome.captures.size(); ++i) {
                if (i) text += ", ";
                text += outcome.captures[i].display();
            }
            if (outcome.captures.empty()) text = cond.id;
            evidence.push_back(std::move(text));
        }
    }

    SketchRunResult result;
    result.final_state = store.snapshot();
    result.trace = std::move(trace);
    result.evidence = std::move(evidence);
    result.label = validate(bound_doc.validator, result.final_state);
    return result;
}

std::string join_evidence(const std::vector<std::string>& evidence) {
    std::string out;
    for (const auto& e : evidence) {
        if (!out.empty()) out += "; ";
        out += e;
    }
    return out;
}

PredictionSet run_corpus(const SketchDocument& doc, const std::vector<TaskInstance>& instances,
                         const SemanticScorer& scorer, int jobs) {
    PredictionSet set;
    set.method = doc.name;
    set.model = "sketch";
    set.records.resize(instances.size());

    auto run_one = [&](std::size_t i) {
        PredictionRecord& record = set.records[i];
        record.id = instances[i].id;
        try {
            const SketchDocument bound = bind_instance(doc, instances[i]);
            const SketchRunResult result =
                run_sketch(bound, InputText::from(instances[i].sentence), scorer);
            record.label = result.label;
            record.evidence = join_evidence(result.evidence);
            record.trace = result.trace;
        } catch (const std::exception& e) {
            record.label = "0";
            record.invalid = true;
            record.error = e.what();
        }
    };

    const int workers = std::max(1, jobs);
    if (workers == 1 || instances.size() < 2) {
        for (std::size_t i = 0; i < instances.size(); ++i) run_one(i);
        return set;
    }

    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next.fetch_add(1); i < instances.size();
                 i = next.fetch_add(1)) {
                run_one(i);
            }
        });
    }
    for (auto& t : pool) t.join();
    return set;
}

}  // namespace lsp
