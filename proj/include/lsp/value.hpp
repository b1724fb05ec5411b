#ifndef LSP_VALUE_HPP
#define LSP_VALUE_HPP

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace lsp {

enum class TypeKind { boolean, integer, real, enumeration };

// A variable's declared type. Enum types carry their value set.
struct Datatype {
    TypeKind kind = TypeKind::boolean;
    std::vector<std::string> enum_values;  // non-empty, duplicate-free for enumeration

    static Datatype boolean() { return {TypeKind::boolean, {}}; }
    static Datatype integer() { return {TypeKind::integer, {}}; }
    static Datatype real() { return {TypeKind::real, {}}; }
    static Datatype enumeration(std::vector<std::string> values);

    bool has_enum_value(const std::string& symbol) const;
    std::string name() const;

    bool operator==(const Datatype&) const = default;
};

// Runtime value: boolean, signed integer, finite float, or enum symbol.
// Floats are rejected at construction unless finite.
class Value {
  public:
    Value() : v_(false) {}

    static Value boolean(bool b) { return Value(b); }
    static Value integer(std::int64_t i) { return Value(i); }
    static Value real(double d);  // throws Error on NaN/inf
    static Value symbol(std::string s) { return Value(std::move(s)); }

    TypeKind kind() const;
    bool as_bool() const { return std::get<bool>(v_); }
    std::int64_t as_int() const { return std::get<std::int64_t>(v_); }
    double as_real() const { return std::get<double>(v_); }
    const std::string& as_symbol() const { return std::get<std::string>(v_); }

    // Numeric view for comparisons; only valid for integer/real values.
    double numeric() const;

    bool compatible_with(const Datatype& type) const;

    // Human-readable form, used in evidence strings and diagnostics.
    std::string display() const;

    bool operator==(const Value&) const = default;

  private:
    explicit Value(bool b) : v_(b) {}
    explicit Value(std::int64_t i) : v_(i) {}
    explicit Value(double d) : v_(d) {}
    explicit Value(std::string s) : v_(std::move(s)) {}

    std::variant<bool, std::int64_t, double, std::string> v_;
};

// How a triggered condition writes its target variable.
// Boolean targets latch to true; all other types take the condition's capture.
enum class UpdateKind { latch_true, assign_capture };

struct VariableSpec {
    std::string name;
    Datatype type;
    Value default_value;
};

}  // namespace lsp

#endif
