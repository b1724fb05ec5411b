#ifndef LSP_PREDICTIONS_HPP
#define LSP_PREDICTIONS_HPP

#include <optional>
#include <string>
#include <vector>

#include "lsp/variable_store.hpp"

namespace lsp {

// One persisted prediction. Labels are stored as text; "0"/"1" serialize
// as integers, anything else as a string. Failed items carry an error
// message and count as invalid.
struct PredictionRecord {
    std::string id;
    std::string label = "0";
    std::string evidence;
    bool invalid = false;
    std::optional<ExecutionTrace> trace;
    std::optional<std::string> raw;    // verbatim completion, kept with --keep-raw
    std::optional<std::string> error;  // per-item failure, batch never aborts
};

struct PredictionSet {
    std::string method;
    std::string model;
    std::vector<PredictionRecord> records;
};

// 0 or 1 for metric computation; invalid or non-binary labels map to 0.
int binary_label(const PredictionRecord& record);

// JSONL, one {"id","label","evidence","invalid","trace"?,"raw"?,"error"?}
// object per line, byte-stable for identical inputs.
std::string predictions_to_jsonl(const PredictionSet& set);

void write_predictions(const std::string& path, const PredictionSet& set);

// Trace payloads are not read back; they are audit output.
PredictionSet read_predictions(const std::string& path);

}  // namespace lsp

#endif
