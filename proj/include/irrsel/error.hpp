#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace irrsel {

enum class ErrorKind {
    domain,           // argument outside the mathematical domain
    invalid_input,    // malformed or inconsistent data
    degenerate_data,  // data carry no usable variance information
    infeasible,       // probability outside its feasible band
    convergence,      // iterative procedure did not converge
    undefined,        // quantity undefined at this input (e.g. rate with k = 0)
    usage             // command-line misuse
};

inline std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
    case ErrorKind::domain: return "domain";
    case ErrorKind::invalid_input: return "invalid_input";
    case ErrorKind::degenerate_data: return "degenerate_data";
    case ErrorKind::infeasible: return "infeasible";
    case ErrorKind::convergence: return "convergence";
    case ErrorKind::undefined: return "undefined";
    case ErrorKind::usage: return "usage";
    }
    return "unknown";
}

/// Library error. Carries the error category and the module that raised it so
/// the CLI can report provenance.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, std::string module, const std::string& message)
        : std::runtime_error(module + ": " + message), kind_(kind), module_(std::move(module)) {}

    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }
    [[nodiscard]] const std::string& module() const noexcept { return module_; }

private:
    ErrorKind kind_;
    std::string module_;
};

} // namespace irrsel
