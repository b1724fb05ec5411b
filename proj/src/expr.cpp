#include "lsp/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>

namespace lsp {

namespace {

constexpr double kEqTolerance = 1e-9;

bool ident_start(char c) {
    return c == '_' || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}
bool ident_char(char c) {
    return ident_start(c) || (c >= '0' && c <= '9');
}

std::string lower(std::string_view s) {
    std::string out(s);
    for (char& c : out)
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    return out;
}

struct Token {
    enum Kind { ident, number, op_not, op_and, op_or, lparen, rparen, cmp, end } kind;
    std::string text;
    int col = 0;  // 1-based within the expression source, before col_base shift
};

class Lexer {
  public:
    Lexer(std::string_view src, int line, int col_base, std::vector<Diagnostic>& diags)
        : src_(src), line_(line), col_base_(col_base), diags_(diags) {}

    // Empty vector on lexical error (diagnostic already recorded).
    std::vector<Token> run() {
        std::vector<Token> tokens;
        std::size_t i = 0;
        while (i < src_.size()) {
            const char c = src_[i];
            const int col = static_cast<int>(i) + 1;
            if (c == ' ' || c == '\t') {
                ++i;
                continue;
            }
            if (ident_start(c)) {
                std::size_t j = i;
                while (j < src_.size() && ident_char(src_[j])) ++j;
                std::string word(src_.substr(i, j - i));
                const std::string low = lower(word);
                Token::Kind kind = Token::ident;
                if (low == "and") kind = Token::op_and;
                else if (low == "or") kind = Token::op_or;
                else if (low == "not") kind = Token::op_not;
                tokens.push_back({kind, std::move(word), col});
                i = j;
                continue;
            }
            if ((c >= '0' && c <= '9') ||
                (c == '-' && i + 1 < src_.size() && src_[i + 1] >= '0' && src_[i + 1] <= '9')) {
                std::size_t j = i + 1;
                while (j < src_.size() && ((src_[j] >= '0' && src_[j] <= '9') || src_[j] == '.'))
                    ++j;
                tokens.push_back({Token::number, std::string(src_.substr(i, j - i)), col});
                i = j;
                continue;
            }
            switch (c) {
                case '(': tokens.push_back({Token::lparen, "(", col}); ++i; continue;
                case ')': tokens.push_back({Token::rparen, ")", col}); ++i; continue;
                case '!':
                    if (i + 1 < src_.size() && src_[i + 1] == '=') {
                        tokens.push_back({Token::cmp, "!=", col});
                        i += 2;
                    } else {
                        tokens.push_back({Token::op_not, "!", col});
                        ++i;
                    }
                    continue;
                case '&':
                    if (i + 1 < src_.size() && src_[i + 1] == '&') {
                        tokens.push_back({Token::op_and, "&&", col});
                        i += 2;
                        continue;
                    }
                    fail(col, "unexpected character '&' (use '&&')");
                    return {};
                case '|':
                    if (i + 1 < src_.size() && src_[i + 1] == '|') {
                        tokens.push_back({Token::op_or, "||", col});
                        i += 2;
                        continue;
                    }
                    fail(col, "unexpected character '|' (use '||')");
                    return {};
                case '=':
                    if (i + 1 < src_.size() && src_[i + 1] == '=') {
                        tokens.push_back({Token::cmp, "==", col});
                        i += 2;
                    } else {
                        tokens.push_back({Token::cmp, "==", col});
                        ++i;
                    }
                    continue;
                case '<':
                case '>': {
                    std::string op(1, c);
                    ++i;
                    if (i < src_.size() && src_[i] == '=') {
                        op += '=';
                        ++i;
                    }
                    tokens.push_back({Token::cmp, op, col});
                    continue;
                }
                default:
                    fail(col, std::string("unexpected character '") + c + "'");
                    return {};
            }
        }
        tokens.push_back({Token::end, "", static_cast<int>(src_.size()) + 1});
        return tokens;
    }

    void fail(int col, const std::string& message) {
        diags_.push_back({line_, col_base_ + col - 1, message});
    }

  private:
    std::string_view src_;
    int line_;
    int col_base_;
    std::vector<Diagnostic>& diags_;
};

class Parser {
  public:
    Parser(std::vector<Token> tokens, int line, int col_base, std::vector<Diagnostic>& diags)
        : tokens_(std::move(tokens)), line_(line), col_base_(col_base), diags_(diags) {}

    ExprPtr run() {
        ExprPtr e = parse_or();
        if (!e) return nullptr;
        if (peek().kind != Token::end) {
            fail(peek(), "unexpected '" + peek().text + "'");
            return nullptr;
        }
        return e;
    }

  private:
    const Token& peek() const { return tokens_[pos_]; }
    Token take() { return tokens_[pos_++]; }

    void fail(const Token& at, const std::string& message) {
        diags_.push_back({line_, col_base_ + at.col - 1, message});
    }

    ExprPtr parse_or() {
        ExprPtr lhs = parse_and();
        if (!lhs) return nullptr;
        while (peek().kind == Token::op_or) {
            take();
            ExprPtr rhs = parse_and();
            if (!rhs) return nullptr;
            lhs = make_or(std::move(lhs), std::move(rhs));
        }
        return lhs;
    }

    ExprPtr parse_and() {
        ExprPtr lhs = parse_unary();
        if (!lhs) return nullptr;
        while (peek().kind == Token::op_and) {
            take();
            ExprPtr rhs = parse_unary();
            if (!rhs) return nullptr;
            lhs = make_and(std::move(lhs), std::move(rhs));
        }
        return lhs;
    }

    ExprPtr parse_unary() {
        if (peek().kind == Token::op_not) {
            take();
            ExprPtr e = parse_unary();
            if (!e) return nullptr;
            return make_not(std::move(e));
        }
        return parse_primary();
    }

    ExprPtr parse_primary() {
        const Token& t = peek();
        if (t.kind == Token::lparen) {
            take();
            ExprPtr e = parse_or();
            if (!e) return nullptr;
            if (peek().kind != Token::rparen) {
                fail(peek(), "expected ')'");
                return nullptr;
            }
            take();
            return e;
        }
        if (t.kind == Token::ident) {
            Token name = take();
            if (peek().kind == Token::cmp) {
                Token op = take();
                return parse_literal(std::move(name.text), op);
            }
            return make_var(std::move(name.text));
        }
        if (t.kind == Token::end) {
            fail(t, "expected expression");
        } else {
            fail(t, "unexpected '" + t.text + "'");
        }
        return nullptr;
    }

    ExprPtr parse_literal(std::string variable, const Token& op_tok) {
        CmpOp op;
        if (op_tok.text == "==") op = CmpOp::eq;
        else if (op_tok.text == "!=") op = CmpOp::ne;
        else if (op_tok.text == "<") op = CmpOp::lt;
        else if (op_tok.text == "<=") op = CmpOp::le;
        else if (op_tok.text == ">") op = CmpOp::gt;
        else op = CmpOp::ge;

        const Token& lit = peek();
        if (lit.kind == Token::number) {
            Token num = take();
            if (num.text.find('.') == std::string::npos) {
                std::int64_t i = 0;
                auto [_, ec] =
                    std::from_chars(num.text.data(), num.text.data() + num.text.size(), i);
                if (ec != std::errc()) {
                    fail(num, "bad integer literal '" + num.text + "'");
                    return nullptr;
                }
                return make_cmp(std::move(variable), op, Value::integer(i));
            }
            double d = 0.0;
            auto [_, ec] = std::from_chars(num.text.data(), num.text.data() + num.text.size(), d);
            if (ec != std::errc() || !std::isfinite(d)) {
                fail(num, "bad numeric literal '" + num.text + "'");
                return nullptr;
            }
            return make_cmp(std::move(variable), op, Value::real(d));
        }
        if (lit.kind == Token::ident) {
            Token sym = take();
            return make_cmp(std::move(variable), op, Value::symbol(std::move(sym.text)));
        }
        fail(lit, "expected literal after comparison operator");
        return nullptr;
    }

    std::vector<Token> tokens_;
    std::size_t pos_ = 0;
    int line_;
    int col_base_;
    std::vector<Diagnostic>& diags_;
};

bool is_literal(const BoolExpr& e) {
    if (std::holds_alternative<VarRef>(e.node) || std::holds_alternative<CmpExpr>(e.node)) {
        return true;
    }
    if (const auto* n = std::get_if<NotExpr>(&e.node)) {
        return std::holds_alternative<VarRef>(n->operand->node) ||
               std::holds_alternative<CmpExpr>(n->operand->node);
    }
    return false;
}

bool is_or_clause(const BoolExpr& e) {
    if (const auto* o = std::get_if<OrExpr>(&e.node)) {
        return is_or_clause(*o->lhs) && is_or_clause(*o->rhs);
    }
    return is_literal(e);
}

bool is_and_clause(const BoolExpr& e) {
    if (const auto* a = std::get_if<AndExpr>(&e.node)) {
        return is_and_clause(*a->lhs) && is_and_clause(*a->rhs);
    }
    return is_literal(e);
}

bool numeric_cmp(double a, CmpOp op, double b) {
    switch (op) {
        case CmpOp::lt: return a < b;
        case CmpOp::le: return a <= b;
        case CmpOp::eq: return std::fabs(a - b) <= kEqTolerance;
        case CmpOp::ne: return std::fabs(a - b) > kEqTolerance;
        case CmpOp::ge: return a >= b;
        case CmpOp::gt: return a > b;
    }
    return false;
}

}  // namespace

std::string cmp_op_name(CmpOp op) {
    switch (op) {
        case CmpOp::lt: return "<";
        case CmpOp::le: return "<=";
        case CmpOp::eq: return "==";
        case CmpOp::ne: return "!=";
        case CmpOp::ge: return ">=";
        case CmpOp::gt: return ">";
    }
    return "?";
}

ExprPtr make_var(std::string name) {
    return std::make_shared<const BoolExpr>(BoolExpr{VarRef{std::move(name)}});
}
ExprPtr make_not(ExprPtr e) {
    return std::make_shared<const BoolExpr>(BoolExpr{NotExpr{std::move(e)}});
}
ExprPtr make_and(ExprPtr l, ExprPtr r) {
    return std::make_shared<const BoolExpr>(BoolExpr{AndExpr{std::move(l), std::move(r)}});
}
ExprPtr make_or(ExprPtr l, ExprPtr r) {
    return std::make_shared<const BoolExpr>(BoolExpr{OrExpr{std::move(l), std::move(r)}});
}
ExprPtr make_cmp(std::string variable, CmpOp op, Value literal) {
    return std::make_shared<const BoolExpr>(
        BoolExpr{CmpExpr{std::move(variable), op, std::move(literal)}});
}

ExprPtr parse_expr(std::string_view source, int line, int col_base,
                   std::vector<Diagnostic>& diags) {
    Lexer lexer(source, line, col_base, diags);
    auto tokens = lexer.run();
    if (tokens.empty()) return nullptr;
    Parser parser(std::move(tokens), line, col_base, diags);
    return parser.run();
}

bool eval_expr(const BoolExpr& expr, const FinalState& state) {
    struct Visitor {
        const FinalState& state;

        bool operator()(const VarRef& v) const {
            const Value* value = state.find(v.name);
            if (!value) throw Error("unknown variable '" + v.name + "'");
            if (value->kind() != TypeKind::boolean) {
                throw Error("variable '" + v.name + "' is not Boolean");
            }
            return value->as_bool();
        }
        bool operator()(const NotExpr& n) const { return !eval_expr(*n.operand, state); }
        bool operator()(const AndExpr& a) const {
            return eval_expr(*a.lhs, state) && eval_expr(*a.rhs, state);
        }
        bool operator()(const OrExpr& o) const {
            return eval_expr(*o.lhs, state) || eval_expr(*o.rhs, state);
        }
        bool operator()(const CmpExpr& c) const {
            const Value* value = state.find(c.variable);
            if (!value) throw Error("unknown variable '" + c.variable + "'");
            if (value->kind() == TypeKind::enumeration) {
                if (c.literal.kind() != TypeKind::enumeration ||
                    (c.op != CmpOp::eq && c.op != CmpOp::ne)) {
                    throw Error("enum variable '" + c.variable +
                                "' only supports == / != against a symbol");
                }
                const bool eq = value->as_symbol() == c.literal.as_symbol();
                return c.op == CmpOp::eq ? eq : !eq;
            }
            if (value->kind() == TypeKind::boolean) {
                throw Error("comparison against Boolean variable '" + c.variable + "'");
            }
            if (c.literal.kind() != TypeKind::integer && c.literal.kind() != TypeKind::real) {
                throw Error("numeric variable '" + c.variable + "' compared to non-numeric literal");
            }
            return numeric_cmp(value->numeric(), c.op, c.literal.numeric());
        }
    };
    return std::visit(Visitor{state}, expr.node);
}

bool is_cnf(const BoolExpr& expr) {
    if (const auto* a = std::get_if<AndExpr>(&expr.node)) {
        return is_cnf(*a->lhs) && is_cnf(*a->rhs);
    }
    return is_or_clause(expr);
}

bool is_dnf(const BoolExpr& expr) {
    if (const auto* o = std::get_if<OrExpr>(&expr.node)) {
        return is_dnf(*o->lhs) && is_dnf(*o->rhs);
    }
    return is_and_clause(expr);
}

std::string expr_to_string(const BoolExpr& expr) {
    struct Visitor {
        std::string operator()(const VarRef& v) const { return v.name; }
        std::string operator()(const NotExpr& n) const {
            return "!" + wrap(*n.operand);
        }
        std::string operator()(const AndExpr& a) const {
            return wrap(*a.lhs) + " && " + wrap(*a.rhs);
        }
        std::string operator()(const OrExpr& o) const {
            return wrap(*o.lhs) + " || " + wrap(*o.rhs);
        }
        std::string operator()(const CmpExpr& c) const {
            return c.variable + " " + cmp_op_name(c.op) + " " + c.literal.display();
        }
        static std::string wrap(const BoolExpr& e) {
            if (std::holds_alternative<VarRef>(e.node) ||
                std::holds_alternative<CmpExpr>(e.node) ||
                std::holds_alternative<NotExpr>(e.node)) {
                return expr_to_string(e);
            }
            return "(" + expr_to_string(e) + ")";
        }
    };
    return std::visit(Visitor{}, expr.node);
}

}  // namespace lsp
