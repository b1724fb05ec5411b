#ifndef LSP_TASK_HPP
#define LSP_TASK_HPP

#include <optional>
#include <string>

namespace lsp {

// One classification input. Relation instances carry both drug and effect
// spans; sentence instances carry neither.
struct TaskInstance {
    std::string id;
    std::string sentence;
    std::optional<std::string> drug;
    std::optional<std::string> effect;
    std::optional<int> gold;  // 0 or 1 when known

    bool is_relation() const { return drug.has_value() && effect.has_value(); }
};

}  // namespace lsp

#endif
