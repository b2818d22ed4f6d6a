#include "trendsim/diagnostic.hpp"

#include <algorithm>

namespace trendsim {

Diagnostic make_error(std::string message, std::string location) {
    Diagnostic d;
    d.severity = Severity::error;
    d.message = std::move(message);
    d.location = std::move(location);
    return d;
}

Diagnostic make_warning(std::string message, std::string location) {
    Diagnostic d = make_error(std::move(message), std::move(location));
    d.severity = Severity::warning;
    return d;
}

bool has_errors(std::span<const Diagnostic> diagnostics) {
    return std::any_of(diagnostics.begin(), diagnostics.end(),
                       [](const Diagnostic& d) { return d.severity == Severity::error; });
}

std::string format_diagnostic(const Diagnostic& diagnostic, std::string_view source) {
    std::string out;
    if (!source.empty()) {
        out += source;
        out += ':';
    }
    if (diagnostic.line > 0) {
        out += std::to_string(diagnostic.line);
        out += ':';
        if (diagnostic.column > 0) {
            out += std::to_string(diagnostic.column);
            out += ':';
        }
    }
    if (!out.empty()) {
        out += ' ';
    }
    out += diagnostic.severity == Severity::error ? "error: " : "warning: ";
    if (!diagnostic.location.empty()) {
        out += diagnostic.location;
        out += ": ";
    }
    out += diagnostic.message;
    return out;
}

InputError::InputError(const std::string& message) : std::runtime_error(message) {}

InputError::InputError(const std::string& message, std::vector<Diagnostic> diagnostics)
    : std::runtime_error(message), diagnostics_(std::move(diagnostics)) {}

}  // namespace trendsim
