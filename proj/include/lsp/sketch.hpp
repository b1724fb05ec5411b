#ifndef LSP_SKETCH_HPP
#define LSP_SKETCH_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lsp/conditions.hpp"
#include "lsp/predictions.hpp"
#include "lsp/task.hpp"
#include "lsp/validator.hpp"
#include "lsp/variable_store.hpp"

namespace lsp {

enum class TaskKind { sentence, relation };

struct SketchMeta {
    TaskKind kind = TaskKind::sentence;
    std::vector<std::string> placeholders;  // subset of {DRUG, EFFECT}, in use order
};

// Per-variable prompt annotations from the sketch source: `ask` supplies the
// silent checklist question, `say` the phrase that replaces the negated
// literal when the decision rule is rendered.
struct PromptHints {
    std::map<std::string, std::string> questions;
    std::map<std::string, std::string> phrases;
};

struct SketchDocument {
    std::string name;
    std::vector<Label> labels;
    std::vector<VariableSpec> variables;
    std::vector<ConditionSpec> conditions;
    ValidatorDef validator;
    SketchMeta meta;
    PromptHints hints;
};

struct SketchRunResult {
    Label label;
    FinalState final_state;
    ExecutionTrace trace;
    std::vector<std::string> evidence;  // one entry per triggered condition
};

struct SketchParseResult {
    std::optional<SketchDocument> document;  // absent whenever diagnostics exist
    std::vector<Diagnostic> diagnostics;

    bool ok() const { return document.has_value(); }
};

SketchParseResult parse_sketch(const std::string& source);

SketchParseResult parse_sketch_file(const std::string& path);

// Substitutes DRUG/EFFECT placeholders with the instance's spans
// (regex-escaped inside patterns, literal elsewhere) and recompiles the
// affected patterns. Sentence sketches pass through unchanged. Throws
// Error when a relation sketch is bound without both spans.
SketchDocument bind_instance(const SketchDocument& doc, const TaskInstance& instance);

// init -> evaluate conditions in declaration order -> snapshot -> validate.
SketchRunResult run_sketch(const SketchDocument& bound_doc, const InputText& input,
                           const SemanticScorer& scorer);

// One record per instance, in input order, independent of the worker count.
// Per-item failures become error entries; the batch never aborts.
PredictionSet run_corpus(const SketchDocument& doc, const std::vector<TaskInstance>& instances,
                         const SemanticScorer& scorer, int jobs = 1);

std::string join_evidence(const std::vector<std::string>& evidence);

}  // namespace lsp

#endif
