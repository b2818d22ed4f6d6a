#pragma once

#include "trendsim/analytics.hpp"

#include <span>
#include <string>
#include <vector>

namespace trendsim {

struct PlotInput {
    std::string label;  // shown in the legend when several inputs are overlaid
    AveragedTrajectory trajectory;
};

/// One panel per element, one polyline per input in that panel. Inputs cycle through
/// dashed blue, dot-dash orange, solid green, then dotted styles. Throws InputError on an
/// empty element list, no inputs, or an element missing from any input.
[[nodiscard]] std::string render_plot(std::span<const PlotInput> inputs, const std::vector<std::string>& elements);

}  // namespace trendsim
