#include "lsp/value.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <set>

#include "lsp/diagnostics.hpp"

namespace lsp {

Datatype Datatype::enumeration(std::vector<std::string> values) {
    if (values.empty()) throw Error("enum value set must be non-empty");
    std::set<std::string> seen;
    for (const auto& v : values) {
        if (!seen.insert(v).second) throw Error("duplicate enum value '" + v + "'");
    }
    return {TypeKind::enumeration, std::move(values)};
}

bool Datatype::has_enum_value(const std::string& symbol) const {
    return std::find(enum_values.begin(), enum_values.end(), symbol) != enum_values.end();
}

std::string Datatype::name() const {
    switch (kind) {
        case TypeKind::boolean: return "boolean";
        case TypeKind::integer: return "integer";
        case TypeKind::real: return "float";
        case TypeKind::enumeration: {
            std::string out = "enum{";
            for (std::size_t i = 0; i < enum_values.size(); ++i) {
                if (i) out += ", ";
                out += enum_values[i];
            }
            return out + "}";
        }
    }
    return "?";
}

Value Value::real(double d) {
    if (!std::isfinite(d)) throw Error("float value must be finite");
    return Value(d);
}

TypeKind Value::kind() const {
    switch (v_.index()) {
        case 0: return TypeKind::boolean;
        case 1: return TypeKind::integer;
        case 2: return TypeKind::real;
        default: return TypeKind::enumeration;
    }
}

double Value::numeric() const {
    if (kind() == TypeKind::integer) return static_cast<double>(as_int());
    if (kind() == TypeKind::real) return as_real();
    throw Error("value is not numeric");
}

bool Value::compatible_with(const Datatype& type) const {
    switch (type.kind) {
        case TypeKind::boolean: return kind() == TypeKind::boolean;
        case TypeKind::integer: return kind() == TypeKind::integer;
        case TypeKind::real: return kind() == TypeKind::real;
        case TypeKind::enumeration:
            return kind() == TypeKind::enumeration && type.has_enum_value(as_symbol());
    }
    return false;
}

std::string Value::display() const {
    switch (kind()) {
        case TypeKind::boolean: return as_bool() ? "true" : "false";
        case TypeKind::integer: return std::to_string(as_int());
        case TypeKind::real: {
            // Shortest round-trip decimal form, stable across runs.
            char buf[32];
            double d = as_real();
            for (int prec = 1; prec <= 17; ++prec) {
                std::snprintf(buf, sizeof buf, "%.*g", prec, d);
                if (std::strtod(buf, nullptr) == d) break;
            }
            return buf;
        }
        case TypeKind::enumeration: return as_symbol();
    }
    return "?";
}

}  // namespace lsp
