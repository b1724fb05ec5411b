#ifndef LSP_PROMPTS_HPP
#define LSP_PROMPTS_HPP

#include <string>
#include <utility>

#include "lsp/sketch.hpp"
#include "lsp/task.hpp"

namespace lsp {

enum class Strategy { lsp, zero_shot, brief, cot, meta_compiler };

std::string strategy_name(Strategy s);

enum class OutputSchema { json_label_evidence, bare_binary, prompt_text };

struct RenderedPrompt {
    Strategy strategy = Strategy::zero_shot;
    std::string text;
    OutputSchema schema = OutputSchema::bare_binary;
};

// The shipped exemplar pair: the canonical positive sentence and its
// negated variant, gold labels 1 and 0.
std::pair<TaskInstance, TaskInstance> default_exemplars();

// Checklist prompt: one numbered silent question per condition group (a
// group is all conditions targeting one variable, in first-use order),
// the decision rule rendered from the validator with AND/OR/NOT surface
// forms, the strict-JSON instruction, exactly one positive and one
// negative example, then the target sentence. Variables with a `say`
// annotation fold into the rule instead of getting a question.
RenderedPrompt render_lsp_prompt(const SketchDocument& doc, const TaskInstance& instance,
                                 const TaskInstance& positive_example,
                                 const TaskInstance& negative_example);

// Conservative control: explicit causal triggers only, temporal phrasing
// excluded, uncertainty defaults to 0; expects a bare 1/0 reply.
RenderedPrompt render_zero_shot(const TaskInstance& instance);

RenderedPrompt render_brief(const TaskInstance& instance);

RenderedPrompt render_cot(const TaskInstance& instance);

// Six-step compiler instruction with the user prompt substituted at the
// !!!USER_PROMPT marker.
RenderedPrompt render_compiler_metaprompt(const std::string& user_prompt);

}  // namespace lsp

#endif
