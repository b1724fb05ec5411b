#include "lsp/variable_store.hpp"

#include <cmath>
#include <set>

#include "lsp/diagnostics.hpp"
#include "json_util.hpp"

namespace lsp {

namespace {

// First capture coerced to the target type; throws on any mismatch.
Value capture_value_for(const VariableSpec& spec, const std::vector<Capture>& captures) {
    if (captures.empty()) {
        throw Error("condition produced no capture to assign to '" + spec.name + "'");
    }
    const Capture& c = captures.front();
    switch (spec.type.kind) {
        case TypeKind::boolean:
            throw Error("assign_capture is not valid for Boolean variable '" + spec.name + "'");
        case TypeKind::integer: {
            if (const auto* n = std::get_if<NumberCapture>(&c.v)) {
                double r = std::round(n->value);
                if (std::fabs(n->value - r) > 1e-9) {
                    throw Error("non-integral capture " + Value::real(n->value).display() +
                                " for integer variable '" + spec.name + "'");
                }
                return Value::integer(static_cast<std::int64_t>(r));
            }
            throw Error("capture is not numeric for integer variable '" + spec.name + "'");
        }
        case TypeKind::real: {
            if (const auto* n = std::get_if<NumberCapture>(&c.v)) return Value::real(n->value);
            if (const auto* s = std::get_if<SimilarityCapture>(&c.v)) return Value::real(s->score);
            throw Error("capture is not numeric for float variable '" + spec.name + "'");
        }
        case TypeKind::enumeration: {
            std::string symbol;
            if (const auto* k = std::get_if<KeywordCapture>(&c.v)) symbol = k->phrase;
            else if (const auto* s = std::get_if<SpanCapture>(&c.v)) symbol = s->text;
            else throw Error("capture is not symbolic for enum variable '" + spec.name + "'");
            if (!spec.type.has_enum_value(symbol)) {
                throw Error("captured '" + symbol + "' is not a value of " + spec.type.name() +
                            " variable '" + spec.name + "'");
            }
            return Value::symbol(symbol);
        }
    }
    throw Error("unreachable capture coercion");
}

}  // namespace

int VariableStore::index_of(const std::string& name) const {
    for (std::size_t i = 0; i < specs_.size(); ++i) {
        if (specs_[i].name == name) return static_cast<int>(i);
    }
    return -1;
}

FinalState VariableStore::snapshot() const {
    FinalState state;
    state.values.reserve(specs_.size());
    for (std::size_t i = 0; i < specs_.size(); ++i) {
        state.values.emplace_back(specs_[i].name, current_[i]);
    }
    return state;
}

VariableStore init_store(std::vector<VariableSpec> specs) {
    std::set<std::string> seen;
    for (const auto& spec : specs) {
        if (!seen.insert(spec.name).second) {
            throw Error("duplicate variable name '" + spec.name + "'");
        }
        if (!spec.default_value.compatible_with(spec.type)) {
            throw Error("default for variable '" + spec.name + "' is not compatible with " +
                        spec.type.name());
        }
    }
    VariableStore store;
    store.current_.reserve(specs.size());
    for (const auto& spec : specs) store.current_.push_back(spec.default_value);
    store.specs_ = std::move(specs);
    return store;
}

void apply_update(VariableStore& store, ExecutionTrace& trace, const std::string& condition_id,
                  const ConditionOutcome& outcome, const std::string& target, UpdateKind kind) {
    const int idx = store.index_of(target);
    if (idx < 0) throw Error("unknown variable '" + target + "'");
    const VariableSpec& spec = store.specs_[static_cast<std::size_t>(idx)];

    TraceEvent event;
    event.step = trace.events.size();
    event.condition = condition_id;
    event.triggered = outcome.triggered;

    if (outcome.triggered) {
        event.captures = outcome.captures;
        Value& slot = store.current_[static_cast<std::size_t>(idx)];
        Value next = slot;
        if (kind == UpdateKind::latch_true) {
            if (spec.type.kind != TypeKind::boolean) {
                throw Error("latch_true targets Boolean variables; '" + target + "' is " +
                            spec.type.name());
            }
            next = Value::boolean(true);
        } else {
            next = capture_value_for(spec, outcome.captures);
        }
        event.updates.push_back(VariableUpdate{target, slot, next});
        slot = next;
    }

    trace.events.push_back(std::move(event));
}

std::string trace_to_json(const ExecutionTrace& trace) {
    return detail::trace_to_json_value(trace).dump();
}

}  // namespace lsp
