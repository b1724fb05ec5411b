#include "lsp/validator.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>

namespace lsp {

namespace {

Label first_match(const std::vector<RuleClause>& clauses, const Label& fallback,
                  const FinalState& state) {
    for (const auto& clause : clauses) {
        if (eval_expr(*clause.guard, state)) return clause.label;
    }
    return fallback;
}

// Bit-parallel evaluation: each expression maps to a 64-bit column whose
// bit j is the expression's value under assignment (block*64 + j).
std::uint64_t column_for_var(std::size_t var, std::size_t block) {
    switch (var) {
        case 0: return 0xAAAAAAAAAAAAAAAAull;
        case 1: return 0xCCCCCCCCCCCCCCCCull;
        case 2: return 0xF0F0F0F0F0F0F0F0ull;
        case 3: return 0xFF00FF00FF00FF00ull;
        case 4: return 0xFFFF0000FFFF0000ull;
        case 5: return 0xFFFFFFFF00000000ull;
        default: return (block >> (var - 6)) & 1 ? ~0ull : 0ull;
    }
}

std::uint64_t eval_column(const BoolExpr& expr, const std::vector<VariableSpec>& specs,
                          std::size_t block) {
    struct Visitor {
        const std::vector<VariableSpec>& specs;
        std::size_t block;

        std::uint64_t operator()(const VarRef& v) const {
            for (std::size_t i = 0; i < specs.size(); ++i) {
                if (specs[i].name == v.name) return column_for_var(i, block);
            }
            throw Error("unknown variable '" + v.name + "'");
        }
        std::uint64_t operator()(const NotExpr& n) const {
            return ~eval_column(*n.operand, specs, block);
        }
        std::uint64_t operator()(const AndExpr& a) const {
            return eval_column(*a.lhs, specs, block) & eval_column(*a.rhs, specs, block);
        }
        std::uint64_t operator()(const OrExpr& o) const {
            return eval_column(*o.lhs, specs, block) | eval_column(*o.rhs, specs, block);
        }
        std::uint64_t operator()(const CmpExpr& c) const {
            throw Error("non-Boolean comparison on '" + c.variable +
                        "' in truth-table enumeration");
        }
    };
    return std::visit(Visitor{specs, block}, expr.node);
}

struct ExprCheck {
    const std::vector<VariableSpec>& specs;
    std::vector<Diagnostic>& diags;
    std::string where;

    const VariableSpec* lookup(const std::string& name) const {
        for (const auto& s : specs)
            if (s.name == name) return &s;
        return nullptr;
    }

    void walk(const BoolExpr& e) const {
        if (const auto* v = std::get_if<VarRef>(&e.node)) {
            const VariableSpec* spec = lookup(v->name);
            if (!spec) {
                diags.push_back({0, 0, where + ": unknown variable " + v->name});
            } else if (spec->type.kind != TypeKind::boolean) {
                diags.push_back({0, 0, where + ": variable " + v->name +
                                           " is " + spec->type.name() +
                                           "; bare references must be Boolean"});
            }
            return;
        }
        if (const auto* n = std::get_if<NotExpr>(&e.node)) return walk(*n->operand);
        if (const auto* a = std::get_if<AndExpr>(&e.node)) {
            walk(*a->lhs);
            walk(*a->rhs);
            return;
        }
        if (const auto* o = std::get_if<OrExpr>(&e.node)) {
            walk(*o->lhs);
            walk(*o->rhs);
            return;
        }
        const auto& c = std::get<CmpExpr>(e.node);
        const VariableSpec* spec = lookup(c.variable);
        if (!spec) {
            diags.push_back({0, 0, where + ": unknown variable " + c.variable});
            return;
        }
        switch (spec->type.kind) {
            case TypeKind::boolean:
                diags.push_back({0, 0, where + ": comparison against Boolean variable " +
                                           c.variable});
                break;
            case TypeKind::integer:
            case TypeKind::real:
                if (c.literal.kind() != TypeKind::integer &&
                    c.literal.kind() != TypeKind::real) {
                    diags.push_back({0, 0, where + ": variable " + c.variable +
                                               " needs a numeric literal"});
                }
                break;
            case TypeKind::enumeration:
                if (c.op != CmpOp::eq && c.op != CmpOp::ne) {
                    diags.push_back({0, 0, where + ": enum variable " + c.variable +
                                               " only supports == / !="});
                } else if (c.literal.kind() != TypeKind::enumeration ||
                           !spec->type.has_enum_value(c.literal.as_symbol())) {
                    diags.push_back({0, 0, where + ": literal " + c.literal.display() +
                                               " is not a value of " + spec->type.name()});
                }
                break;
        }
    }
};

}  // namespace

Label validate_if_then(const IfThenChain& chain, const FinalState& state) {
    return first_match(chain.clauses, chain.default_label, state);
}

Label validate_normal_form(const NormalFormRuleSet& rules, const FinalState& state) {
    return first_match(rules.rules, rules.default_label, state);
}

Label validate(const ValidatorDef& validator, const FinalState& state) {
    if (const auto* chain = std::get_if<IfThenChain>(&validator)) {
        return validate_if_then(*chain, state);
    }
    return validate_normal_form(std::get<NormalFormRuleSet>(validator), state);
}

const Label& default_label_of(const ValidatorDef& validator) {
    if (const auto* chain = std::get_if<IfThenChain>(&validator)) return chain->default_label;
    return std::get<NormalFormRuleSet>(validator).default_label;
}

std::vector<Label> truth_table_oracle(const ValidatorDef& validator,
                                      const std::vector<VariableSpec>& specs) {
    const std::size_t k = specs.size();
    if (k > 20) throw Error("truth table limited to 20 variables, got " + std::to_string(k));
    for (const auto& s : specs) {
        if (s.type.kind != TypeKind::boolean) {
            throw Error("truth table requires Boolean variables; '" + s.name + "' is " +
                        s.type.name());
        }
    }

    const std::vector<RuleClause>* clauses;
    const Label* fallback;
    if (const auto* chain = std::get_if<IfThenChain>(&validator)) {
        clauses = &chain->clauses;
        fallback = &chain->default_label;
    } else {
        const auto& nf = std::get<NormalFormRuleSet>(validator);
        clauses = &nf.rules;
        fallback = &nf.default_label;
    }

    const std::size_t total = std::size_t{1} << k;
    std::vector<Label> table(total, *fallback);
    const std::size_t blocks = (total + 63) / 64;
    for (std::size_t block = 0; block < blocks; ++block) {
        const std::size_t base = block * 64;
        const std::size_t width = std::min<std::size_t>(64, total - base);
        std::uint64_t undecided = width == 64 ? ~0ull : (1ull << width) - 1;
        for (const auto& clause : *clauses) {
            if (!undecided) break;
            const std::uint64_t hits = eval_column(*clause.guard, specs, block) & undecided;
            undecided &= ~hits;
            for (std::uint64_t rest = hits; rest;) {
                const int bit = std::countr_zero(rest);
                rest &= rest - 1;
                table[base + static_cast<std::size_t>(bit)] = clause.label;
            }
        }
    }
    return table;
}

std::vector<Diagnostic> check_wellformed(const ValidatorDef& validator,
                                         const std::vector<VariableSpec>& specs,
                                         const std::vector<Label>& label_set) {
    std::vector<Diagnostic> diags;
    auto label_known = [&](const Label& l) {
        return std::find(label_set.begin(), label_set.end(), l) != label_set.end();
    };

    auto check_clauses = [&](const std::vector<RuleClause>& clauses, const Label& fallback,
                             bool require_normal_form, const char* what) {
        if (!label_known(fallback)) {
            diags.push_back({0, 0, "default label " + fallback + " is not in the label set"});
        }
        for (std::size_t i = 0; i < clauses.size(); ++i) {
            const auto& clause = clauses[i];
            const std::string where = std::string(what) + " " + std::to_string(i + 1);
            if (!label_known(clause.label)) {
                diags.push_back({clause.line, 0,
                                 where + ": label " + clause.label + " is not in the label set"});
            }
            if (!clause.guard) {
                diags.push_back({clause.line, 0, where + ": missing guard"});
                continue;
            }
            ExprCheck{specs, diags, where}.walk(*clause.guard);
            if (require_normal_form && !is_cnf(*clause.guard) && !is_dnf(*clause.guard)) {
                diags.push_back({clause.line, 0,
                                 where + ": formula is neither CNF nor DNF: " +
                                     expr_to_string(*clause.guard)});
            }
        }
    };

    if (const auto* chain = std::get_if<IfThenChain>(&validator)) {
        check_clauses(chain->clauses, chain->default_label, false, "clause");
    } else {
        const auto& nf = std::get<NormalFormRuleSet>(validator);
        check_clauses(nf.rules, nf.default_label, true, "rule");
    }
    return diags;
}

}  // namespace lsp
