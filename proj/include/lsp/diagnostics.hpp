#ifndef LSP_DIAGNOSTICS_HPP
#define LSP_DIAGNOSTICS_HPP

#include <stdexcept>
#include <string>
#include <vector>

namespace lsp {

// Contract violations (unknown variable, type mismatch, bad bindings).
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// File-system failures. Mapped to exit code 2 by the CLI.
struct IoError : Error {
    using Error::Error;
};

// Network failures. Retryable; mapped to exit code 2 by the CLI.
struct TransportError : Error {
    using Error::Error;
};

// Invalid configuration (e.g. non-deterministic decoding under --strict-determinism).
struct ConfigError : Error {
    using Error::Error;
};

// A located message from the sketch parser or the well-formedness checker.
// line/col are 1-based; 0 means "no position".
struct Diagnostic {
    int line = 0;
    int col = 0;
    std::string message;

    std::string to_string() const {
        if (line == 0) return message;
        return std::to_string(line) + ":" + std::to_string(col) + ": " + message;
    }
};

inline std::string join_diagnostics(const std::vector<Diagnostic>& diags) {
    std::string out;
    for (const auto& d : diags) {
        if (!out.empty()) out += "\n";
        out += d.to_string();
    }
    return out;
}

}  // namespace lsp

#endif
