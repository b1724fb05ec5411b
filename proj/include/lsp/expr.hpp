#ifndef LSP_EXPR_HPP
#define LSP_EXPR_HPP

#include <memory>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "lsp/diagnostics.hpp"
#include "lsp/value.hpp"
#include "lsp/variable_store.hpp"

namespace lsp {

enum class CmpOp { lt, le, eq, ne, ge, gt };

std::string cmp_op_name(CmpOp op);

struct BoolExpr;
using ExprPtr = std::shared_ptr<const BoolExpr>;

struct VarRef {
    std::string name;
};
struct NotExpr {
    ExprPtr operand;
};
struct AndExpr {
    ExprPtr lhs, rhs;
};
struct OrExpr {
    ExprPtr lhs, rhs;
};
// Comparison of an Integer/Float/Enum variable against a literal.
struct CmpExpr {
    std::string variable;
    CmpOp op = CmpOp::eq;
    Value literal;
};

struct BoolExpr {
    std::variant<VarRef, NotExpr, AndExpr, OrExpr, CmpExpr> node;
};

ExprPtr make_var(std::string name);
ExprPtr make_not(ExprPtr e);
ExprPtr make_and(ExprPtr l, ExprPtr r);
ExprPtr make_or(ExprPtr l, ExprPtr r);
ExprPtr make_cmp(std::string variable, CmpOp op, Value literal);

// Surface syntax: identifiers, '!', '&&', '||', parentheses, comparisons
// (==, !=, <, <=, >, >=; '=' is a synonym of '=='); AND/OR/NOT accepted as
// synonyms, case-insensitively. Literals: integers, decimals, enum symbols.
//
// On failure returns nullptr and appends one located diagnostic; line and
// col_base give the expression's position inside a larger source.
ExprPtr parse_expr(std::string_view source, int line, int col_base,
                   std::vector<Diagnostic>& diags);

// Standard boolean semantics. Float equality uses the same 1e-9 tolerance
// as NumericCompare. Throws Error on unknown variables or type mismatches
// (normally ruled out by check_wellformed).
bool eval_expr(const BoolExpr& expr, const FinalState& state);

// Conjunction of disjunctions of literals / disjunction of conjunctions of
// literals; a bare literal or single clause counts as either.
bool is_cnf(const BoolExpr& expr);
bool is_dnf(const BoolExpr& expr);

std::string expr_to_string(const BoolExpr& expr);

}  // namespace lsp

#endif
