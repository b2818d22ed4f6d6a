#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace trendsim {

enum class Severity { warning, error };

/// A positioned message produced while reading or validating user input.
struct Diagnostic {
    Severity severity = Severity::error;
    std::string message;
    std::string location;  // e.g. "element 'cause'" or "hyperedge 3"
    std::size_t line = 0;  // 1-based; 0 when unknown
    std::size_t column = 0;
    std::optional<std::size_t> element_index;
    std::optional<std::size_t> hyperedge_index;
};

[[nodiscard]] Diagnostic make_error(std::string message, std::string location = {});
[[nodiscard]] Diagnostic make_warning(std::string message, std::string location = {});

[[nodiscard]] bool has_errors(std::span<const Diagnostic> diagnostics);

/// Renders as "source:line:col: error: location: message", omitting absent parts.
[[nodiscard]] std::string format_diagnostic(const Diagnostic& diagnostic, std::string_view source = {});

/// Thrown for any problem caused by user-supplied input (files, flags, model contents).
class InputError : public std::runtime_error {
public:
    explicit InputError(const std::string& message);
    InputError(const std::string& message, std::vector<Diagnostic> diagnostics);

    [[nodiscard]] const std::vector<Diagnostic>& diagnostics() const noexcept { return diagnostics_; }

private:
    std::vector<Diagnostic> diagnostics_;
};

}  // namespace trendsim
