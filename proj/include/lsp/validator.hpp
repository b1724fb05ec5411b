#ifndef LSP_VALIDATOR_HPP
#define LSP_VALIDATOR_HPP

#include <string>
#include <variant>
#include <vector>

#include "lsp/expr.hpp"
#include "lsp/value.hpp"
#include "lsp/variable_store.hpp"

namespace lsp {

using Label = std::string;

struct RuleClause {
    ExprPtr guard;
    Label label;
    int line = 0;  // source line when parsed from a sketch, 0 otherwise
};

// Ordered guards, first match wins, mandatory default.
struct IfThenChain {
    std::vector<RuleClause> clauses;
    Label default_label;
};

// Same first-match semantics; every formula must pass the CNF-or-DNF
// shape check at well-formedness time.
struct NormalFormRuleSet {
    std::vector<RuleClause> rules;
    Label default_label;
};

using ValidatorDef = std::variant<IfThenChain, NormalFormRuleSet>;

Label validate_if_then(const IfThenChain& chain, const FinalState& state);
Label validate_normal_form(const NormalFormRuleSet& rules, const FinalState& state);
Label validate(const ValidatorDef& validator, const FinalState& state);

const Label& default_label_of(const ValidatorDef& validator);

// Exhaustive labels for every Boolean assignment, indexed by bitmask with
// bit i = value of the i-th declared variable. Requires all-Boolean specs
// and at most 20 variables.
//
// Evaluation is bit-parallel over 64-assignment blocks, an independent
// route from eval_expr, so tests can cross-check the two.
std::vector<Label> truth_table_oracle(const ValidatorDef& validator,
                                      const std::vector<VariableSpec>& specs);

// Checks variable references and comparison types, label-set membership,
// CNF/DNF shape for NormalFormRuleSet, and presence of a default.
std::vector<Diagnostic> check_wellformed(const ValidatorDef& validator,
                                         const std::vector<VariableSpec>& specs,
                                         const std::vector<Label>& label_set);

}  // namespace lsp

#endif
