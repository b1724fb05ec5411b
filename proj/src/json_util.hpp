#ifndef LSP_SRC_JSON_UTIL_HPP
#define LSP_SRC_JSON_UTIL_HPP

#include <json.hpp>

#include "lsp/conditions.hpp"
#include "lsp/value.hpp"
#include "lsp/variable_store.hpp"

namespace lsp::detail {

inline nlohmann::json value_to_json(const Value& v) {
    switch (v.kind()) {
        case TypeKind::boolean: return v.as_bool();
        case TypeKind::integer: return v.as_int();
        case TypeKind::real: return v.as_real();
        case TypeKind::enumeration: return v.as_symbol();
    }
    return nullptr;
}

inline nlohmann::json capture_to_json(const Capture& c) {
    struct Visitor {
        nlohmann::json operator()(const SpanCapture& s) const {
            return {{"kind", "span"}, {"start", s.start}, {"end", s.end}, {"text", s.text}};
        }
        nlohmann::json operator()(const NumberCapture& n) const {
            return {{"kind", "number"}, {"value", n.value}};
        }
        nlohmann::json operator()(const KeywordCapture& k) const {
            return {{"kind", "keyword"}, {"phrase", k.phrase}};
        }
        nlohmann::json operator()(const SimilarityCapture& s) const {
            return {{"kind", "similarity"}, {"score", s.score}};
        }
    };
    return std::visit(Visitor{}, c.v);
}

inline nlohmann::json trace_to_json_value(const ExecutionTrace& trace) {
    nlohmann::json events = nlohmann::json::array();
    for (const auto& e : trace.events) {
        nlohmann::json captures = nlohmann::json::array();
        for (const auto& c : e.captures) captures.push_back(capture_to_json(c));
        nlohmann::json updates = nlohmann::json::array();
        for (const auto& u : e.updates) {
            updates.push_back({{"var", u.variable},
                               {"old", value_to_json(u.old_value)},
                               {"new", value_to_json(u.new_value)}});
        }
        events.push_back({{"step", e.step},
                          {"condition", e.condition},
                          {"triggered", e.triggered},
                          {"captures", captures},
                          {"updates", updates}});
    }
    return events;
}

}  // namespace lsp::detail

#endif
