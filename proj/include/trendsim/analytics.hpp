#pragma once

#include "trendsim/dynamics.hpp"
#include "trendsim/model.hpp"
#include "trendsim/scheduler.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace trendsim {

/// Per-step mean of each element over an ensemble.
struct AveragedTrajectory {
    std::vector<std::string> elements;
    std::vector<std::size_t> steps;
    std::vector<double> means;  // row-major: steps x elements
    std::size_t runs = 0;

    [[nodiscard]] std::size_t rows() const noexcept { return steps.size(); }
    [[nodiscard]] double mean(std::size_t row, std::size_t element) const noexcept {
        return means[row * elements.size() + element];
    }
    [[nodiscard]] std::optional<std::size_t> column(std::string_view element) const;
};

/// Sums level indices exactly in 64-bit integers, so the mean is independent of the
/// order in which runs are added or merged.
class TrajectoryAccumulator {
public:
    explicit TrajectoryAccumulator(const CompiledModel& model);

    void add(const RunTrace& trace);        // throws std::invalid_argument on shape mismatch
    void merge(const TrajectoryAccumulator& other);
    [[nodiscard]] std::size_t runs() const noexcept { return runs_; }
    [[nodiscard]] AveragedTrajectory result() const;

private:
    const CompiledModel* model_;
    std::vector<std::size_t> steps_;
    std::vector<std::int64_t> sums_;
    std::size_t runs_ = 0;
};

[[nodiscard]] AveragedTrajectory average(const CompiledModel& model, const Ensemble& ensemble);

/// Count-weighted combination of two partial averages over the same steps and elements.
[[nodiscard]] AveragedTrajectory merge_averages(const AveragedTrajectory& a, const AveragedTrajectory& b);

struct SaturationEntry {
    ElementId element{};
    Boundary boundary = Boundary::upper;
    std::size_t first_step = 0;     // earliest step at which overflow was discarded
    std::size_t runs_affected = 0;  // runs with at least one clamp at this boundary
    double dwell_fraction = 0.0;    // share of recorded steps (after step 0) spent at the boundary

    friend bool operator==(const SaturationEntry&, const SaturationEntry&) = default;
};

/// Advisory only: a saturated element is a hint to re-run with more levels.
struct SaturationReport {
    std::size_t runs = 0;
    std::vector<SaturationEntry> entries;  // sorted by element, then boundary

    [[nodiscard]] bool empty() const noexcept { return entries.empty(); }
};

class SaturationAccumulator {
public:
    explicit SaturationAccumulator(const CompiledModel& model);

    void add(const RunTrace& trace);
    void merge(const SaturationAccumulator& other);
    [[nodiscard]] SaturationReport result() const;

private:
    struct Cell {
        std::optional<std::size_t> first_step;
        std::size_t runs_affected = 0;
        std::uint64_t dwell_rows = 0;
    };
    const CompiledModel* model_;
    std::vector<Cell> cells_;  // element * 2 + boundary
    std::uint64_t total_rows_ = 0;
    std::size_t runs_ = 0;
};

[[nodiscard]] SaturationReport saturation_report(const CompiledModel& model, const RunTrace& trace);
[[nodiscard]] SaturationReport saturation_report(const CompiledModel& model, const Ensemble& ensemble);

struct EnsembleSummary {
    AveragedTrajectory average;
    SaturationReport saturation;
};

/// Runs the ensemble without keeping traces. The result equals averaging simulate().
[[nodiscard]] EnsembleSummary summarize(const CompiledModel& model, const SimulationConfig& config, unsigned jobs = 1);

/// Refines the element's grid from L to 2L-1 levels (every old level k becomes 2k) and
/// halves every weight on tails the element regulates. Topology is unchanged.
[[nodiscard]] Model rescale_levels(const Model& model, std::string_view element);

}  // namespace trendsim
