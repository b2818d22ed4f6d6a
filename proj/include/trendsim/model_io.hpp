#pragma once

#include "trendsim/analytics.hpp"
#include "trendsim/diagnostic.hpp"
#include "trendsim/model.hpp"
#include "trendsim/scheduler.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace trendsim {

inline constexpr std::string_view kToolName = "trendsim";
inline constexpr std::string_view kToolVersion = "0.1.0";

/// Line-oriented model document:
///
///   model <name>
///   element <id> levels=<L> init=<k>
///   hyperedge target=<id> sign=<pos|neg> mode=<level|trend|hybrid> [when=<id>:<k>] tails=<id>:<wv>:<wt>[,...]
///
/// `#` starts a comment; blank lines are ignored.
struct ParsedModel {
    std::optional<Model> model;
    std::vector<Diagnostic> diagnostics;
    std::vector<std::size_t> element_lines;    // source line of each element
    std::vector<std::size_t> hyperedge_lines;  // source line of each hyperedge
};

[[nodiscard]] ParsedModel parse_model(std::string_view text);

/// Inverse of parse_model for the structural part of a model (toggles live in their own file).
[[nodiscard]] std::string serialize_model(const Model& model);

using ToggleTable = std::map<std::string, ToggleSequence>;

/// CSV with header exactly `element,step,level`. Rows are grouped per element and sorted
/// by step. Throws InputError on malformed rows or a repeated (element, step).
[[nodiscard]] ToggleTable parse_toggles(std::string_view csv);

[[nodiscard]] std::string write_toggles_csv(const ToggleTable& toggles);
/// Toggles of every element, in declaration order.
[[nodiscard]] std::string write_toggles_csv(const Model& model);

/// Attaches toggles to the model's elements. Unknown element names are reported as errors.
[[nodiscard]] std::vector<Diagnostic> bind_toggles(Model& model, const ToggleTable& toggles);

/// Parses, binds toggles and validates. Validation diagnostics carry the source line.
[[nodiscard]] ValidationResult load_model(std::string_view text, const ToggleTable* toggles = nullptr);

/// `step,<elem1>,<elem2>,...` in declaration order, six decimals, one row per recorded step.
[[nodiscard]] std::string write_trace_csv(const CompiledModel& model, const RunTrace& trace);
[[nodiscard]] std::string write_average_csv(const AveragedTrajectory& average);
[[nodiscard]] AveragedTrajectory read_average_csv(std::string_view csv);

[[nodiscard]] std::string write_saturation_report(const CompiledModel& model, const SaturationReport& report);

/// "fnv1a64:<16 hex digits>" over the serialized model and its toggles.
[[nodiscard]] std::string model_digest(const Model& model);

/// Everything needed to reproduce an ensemble bit-exactly, given the same inputs.
struct RunMetadata {
    std::string tool{kToolName};
    std::string version{kToolVersion};
    std::string model_name;
    std::string model_digest;
    std::string prng{kRngName};
    SimulationConfig config;
};

[[nodiscard]] RunMetadata make_metadata(const CompiledModel& model, const SimulationConfig& config);
[[nodiscard]] std::string write_metadata(const RunMetadata& metadata);
[[nodiscard]] RunMetadata read_metadata(std::string_view json);  // throws InputError

}  // namespace trendsim
