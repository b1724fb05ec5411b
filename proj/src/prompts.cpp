#include "lsp/prompts.hpp"

#include <algorithm>
#include <map>

#include "lsp/diagnostics.hpp"

namespace lsp {

namespace {

const char* const kZeroShotTemplate =
    "Classify whether the sentence reports that the drug caused the effect.\n"
    "Predict 1 only if an explicit causal trigger phrase is present (for example, "
    "\"caused by\", \"due to\", \"secondary to\", \"induced by\").\n"
    "Temporal relations without explicit causality (\"after starting\", \"while taking\") "
    "do not count as causal evidence.\n"
    "If uncertainty is present, default to 0.\n"
    "Output 1 or 0. Sentence: \"{SENTENCE}\"\n";

const char* const kBriefTemplate =
    "Label 1 if the drug is present, the effect is present, the effect is due to the drug, "
    "and the statement is not negated. Output JSON: {\"label\": ...}.\n"
    "Sentence: \"{SENTENCE}\"\n";

const char* const kCotTemplate =
    "Think step by step. Does the sentence mention the drug? Does it describe the effect? "
    "Does it link them? Finally output JSON with a label based only on the final reasoning.\n"
    "Return JSON: {\"label\": ..., \"evidence\": ...}.\n"
    "Sentence: \"{SENTENCE}\"\n";

const char* const kMetaTemplate =
    "You are an LSP-compiler. Given any prompt that requires classification or "
    "decision-making, convert it into an LSP-style prompt as follows:\n"
    "1. Extract all binary conditions required for the decision.\n"
    "2. Rewrite each condition as a silent yes/no question.\n"
    "3. Assign each condition to a variable name.\n"
    "4. Construct a single decision rule that uses AND, OR, and NOT to combine these "
    "variables.\n"
    "5. Require strict JSON output: {\"label\": ..., \"evidence\": ...}.\n"
    "6. Include exactly one positive and one negative example if possible.\n"
    "Return the final LSP-form prompt. Input prompt: !!!USER_PROMPT\n";

std::string substitute(std::string text, const std::string& slot, const std::string& value) {
    std::size_t pos = 0;
    while ((pos = text.find(slot, pos)) != std::string::npos) {
        text.replace(pos, slot.size(), value);
        pos += value.size();
    }
    return text;
}

void require_sentence(const TaskInstance& instance) {
    if (instance.sentence.empty()) throw Error("empty sentence (item " + instance.id + ")");
}

// Relation instances carry the spans under evaluation after the sentence.
std::string instance_slots(const TaskInstance& instance) {
    std::string out;
    if (instance.is_relation()) {
        out += "Drug: \"" + *instance.drug + "\"\n";
        out += "Effect: \"" + *instance.effect + "\"\n";
    }
    return out;
}

enum class ParentOp { none, and_op, or_op, not_op };

// Decision-rule surface form: numbered variables render as "(n)", say
// phrases replace their negated literal, operators become & / OR / NOT.
std::string render_rule(const BoolExpr& expr, const std::map<std::string, int>& numbering,
                        const std::map<std::string, std::string>& phrases, ParentOp parent) {
    if (const auto* v = std::get_if<VarRef>(&expr.node)) {
        auto num = numbering.find(v->name);
        if (num != numbering.end()) return "(" + std::to_string(num->second) + ")";
        return v->name;
    }
    if (const auto* c = std::get_if<CmpExpr>(&expr.node)) {
        return c->variable + " " + cmp_op_name(c->op) + " " + c->literal.display();
    }
    if (const auto* n = std::get_if<NotExpr>(&expr.node)) {
        if (const auto* inner = std::get_if<VarRef>(&n->operand->node)) {
            auto phrase = phrases.find(inner->name);
            if (phrase != phrases.end()) return phrase->second;
        }
        const std::string rendered =
            render_rule(*n->operand, numbering, phrases, ParentOp::not_op);
        return "NOT " + rendered;
    }
    const bool is_and = std::holds_alternative<AndExpr>(expr.node);
    const char* joiner = is_and ? " & " : " OR ";
    const ParentOp self = is_and ? ParentOp::and_op : ParentOp::or_op;

    std::vector<const BoolExpr*> operands;
    auto flatten = [&](auto&& flatten_ref, const BoolExpr& e) -> void {
        if (is_and) {
            if (const auto* a = std::get_if<AndExpr>(&e.node)) {
                flatten_ref(flatten_ref, *a->lhs);
                flatten_ref(flatten_ref, *a->rhs);
                return;
            }
        } else if (const auto* o = std::get_if<OrExpr>(&e.node)) {
            flatten_ref(flatten_ref, *o->lhs);
            flatten_ref(flatten_ref, *o->rhs);
            return;
        }
        operands.push_back(&e);
    };
    flatten(flatten, expr);

    std::string out;
    for (std::size_t i = 0; i < operands.size(); ++i) {
        if (i) out += joiner;
        out += render_rule(*operands[i], numbering, phrases, self);
    }
    if (parent != ParentOp::none && parent != self) return "(" + out + ")";
    return out;
}

const std::vector<RuleClause>& clauses_of(const ValidatorDef& validator) {
    if (const auto* chain = std::get_if<IfThenChain>(&validator)) return chain->clauses;
    return std::get<NormalFormRuleSet>(validator).rules;
}

}  // namespace

std::string strategy_name(Strategy s) {
    switch (s) {
        case Strategy::lsp: return "lsp";
        case Strategy::zero_shot: return "zero-shot";
        case Strategy::brief: return "brief";
        case Strategy::cot: return "cot";
        case Strategy::meta_compiler: return "meta";
    }
    return "?";
}

std::pair<TaskInstance, TaskInstance> default_exemplars() {
    TaskInstance positive{"exemplar-positive",
                          "The patient developed rash after starting amoxicillin.",
                          std::nullopt, std::nullopt, 1};
    TaskInstance negative{"exemplar-negative",
                          "Amoxicillin did not cause any rash in the patient.",
                          std::nullopt, std::nullopt, 0};
    return {std::move(positive), std::move(negative)};
}

RenderedPrompt render_lsp_prompt(const SketchDocument& doc, const TaskInstance& instance,
                                 const TaskInstance& positive_example,
                                 const TaskInstance& negative_example) {
    require_sentence(instance);
    if (!positive_example.gold || *positive_example.gold != 1) {
        throw Error("positive example must carry gold label 1");
    }
    if (!negative_example.gold || *negative_example.gold != 0) {
        throw Error("negative example must carry gold label 0");
    }

    // Condition groups in first-use order; say-annotated variables fold
    // into the rule text instead of asking a question.
    std::vector<std::string> grouped;
    for (const auto& cond : doc.conditions) {
        if (std::find(grouped.begin(), grouped.end(), cond.target) == grouped.end()) {
            grouped.push_back(cond.target);
        }
    }
    std::map<std::string, int> numbering;
    std::vector<std::string> questions;
    for (const auto& var : grouped) {
        if (doc.hints.phrases.count(var)) continue;
        auto q = doc.hints.questions.find(var);
        questions.push_back(q != doc.hints.questions.end() ? q->second
                                                           : "Is '" + var + "' satisfied?");
        numbering[var] = static_cast<int>(questions.size());
    }

    std::string text = "Answer the following binary questions silently.\n";
    for (std::size_t i = 0; i < questions.size(); ++i) {
        text += std::to_string(i + 1) + ". " + questions[i] + "\n";
    }
    const auto& clauses = clauses_of(doc.validator);
    for (std::size_t i = 0; i < clauses.size(); ++i) {
        const std::string rule =
            render_rule(*clauses[i].guard, numbering, doc.hints.phrases, ParentOp::none);
        if (i == 0) {
            text += "Set label " + clauses[i].label + " if and only if: " + rule + ".\n";
        } else {
            text += "Else set label " + clauses[i].label + " if: " + rule + ".\n";
        }
    }
    text += "Return JSON: {\"label\": ..., \"evidence\": ...}.\n";
    text += "Example (label 1): \"" + positive_example.sentence + "\"\n";
    text += "Example (label 0): \"" + negative_example.sentence + "\"\n";
    text += "Sentence: \"" + instance.sentence + "\"\n";
    text += instance_slots(instance);

    return {Strategy::lsp, std::move(text), OutputSchema::json_label_evidence};
}

RenderedPrompt render_zero_shot(const TaskInstance& instance) {
    require_sentence(instance);
    std::string text = substitute(kZeroShotTemplate, "{SENTENCE}", instance.sentence);
    text += instance_slots(instance);
    return {Strategy::zero_shot, std::move(text), OutputSchema::bare_binary};
}

RenderedPrompt render_brief(const TaskInstance& instance) {
    require_sentence(instance);
    std::string text = substitute(kBriefTemplate, "{SENTENCE}", instance.sentence);
    text += instance_slots(instance);
    return {Strategy::brief, std::move(text), OutputSchema::json_label_evidence};
}

RenderedPrompt render_cot(const TaskInstance& instance) {
    require_sentence(instance);
    std::string text = substitute(kCotTemplate, "{SENTENCE}", instance.sentence);
    text += instance_slots(instance);
    return {Strategy::cot, std::move(text), OutputSchema::json_label_evidence};
}

RenderedPrompt render_compiler_metaprompt(const std::string& user_prompt) {
    if (user_prompt.empty()) throw Error("empty user prompt");
    std::string text = substitute(kMetaTemplate, "!!!USER_PROMPT", user_prompt);
    return {Strategy::meta_compiler, std::move(text), OutputSchema::prompt_text};
}

}  // namespace lsp
