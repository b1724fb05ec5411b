#ifndef LSP_VARIABLE_STORE_HPP
#define LSP_VARIABLE_STORE_HPP

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "lsp/conditions.hpp"
#include "lsp/value.hpp"

namespace lsp {

struct VariableUpdate {
    std::string variable;
    Value old_value;
    Value new_value;
    bool operator==(const VariableUpdate&) const = default;
};

// One entry per condition evaluated, triggered or not.
struct TraceEvent {
    std::size_t step = 0;
    std::string condition;
    bool triggered = false;
    std::vector<Capture> captures;
    std::vector<VariableUpdate> updates;  // empty whenever !triggered
    bool operator==(const TraceEvent&) const = default;
};

struct ExecutionTrace {
    std::vector<TraceEvent> events;
    bool operator==(const ExecutionTrace&) const = default;
};

// Immutable copy of the store contents, declaration order preserved.
struct FinalState {
    std::vector<std::pair<std::string, Value>> values;

    const Value* find(const std::string& name) const {
        for (const auto& [n, v] : values)
            if (n == name) return &v;
        return nullptr;
    }
};

// Typed variable state for a single execution. Iteration order equals
// declaration order; every value stays type-compatible with its spec.
class VariableStore {
  public:
    const std::vector<VariableSpec>& specs() const { return specs_; }
    const Value& current(std::size_t index) const { return current_[index]; }

    // -1 when absent.
    int index_of(const std::string& name) const;

    FinalState snapshot() const;

  private:
    friend VariableStore init_store(std::vector<VariableSpec> specs);
    friend void apply_update(VariableStore& store, ExecutionTrace& trace,
                             const std::string& condition_id, const ConditionOutcome& outcome,
                             const std::string& target, UpdateKind kind);

    std::vector<VariableSpec> specs_;
    std::vector<Value> current_;
};

// Every variable holds its default. Throws Error on duplicate names or
// type-incompatible defaults, naming the offending variable.
VariableStore init_store(std::vector<VariableSpec> specs);

// Applies one condition outcome: latch_true sets a Boolean target to true,
// assign_capture writes the first capture coerced to the target's type.
// A non-triggered outcome leaves the store unchanged. Exactly one TraceEvent
// is appended either way.
void apply_update(VariableStore& store, ExecutionTrace& trace, const std::string& condition_id,
                  const ConditionOutcome& outcome, const std::string& target, UpdateKind kind);

// JSON array of events: [{step, condition, triggered, captures, updates:[{var, old, new}]}].
std::string trace_to_json(const ExecutionTrace& trace);

}  // namespace lsp

#endif
