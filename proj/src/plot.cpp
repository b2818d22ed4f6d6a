#include "trendsim/plot.hpp"

#include "text.hpp"

#include "trendsim/diagnostic.hpp"

#include <algorithm>
#include <cstdint>

namespace trendsim {

namespace {

struct Style {
    const char* color;
    const char* dash;  // empty for a solid line
};

constexpr Style kStyles[] = {
    {"#1f77b4", "8,4"},
    {"#ff7f0e", "8,3,2,3"},
    {"#2ca02c", ""},
    {"#d62728", "2,3"},
    {"#9467bd", "2,3"},
    {"#8c564b", "2,3"},
};

constexpr double kWidth = 760;
constexpr double kPanelHeight = 220;
constexpr double kLeft = 60;
constexpr double kRight = 190;
constexpr double kTop = 24;
constexpr double kBottom = 40;

std::string escape(std::string_view s) {
    std::string out;
    for (const char c : s) {
        switch (c) {
        case '&':
            out += "&amp;";
            break;
        case '<':
            out += "&lt;";
            break;
        case '>':
            out += "&gt;";
            break;
        case '"':
            out += "&quot;";
            break;
        default:
            out += c;
        }
    }
    return out;
}

std::string num(double v) {
    return text::fixed(v, 2);
}

}  // namespace

std::string render_plot(std::span<const PlotInput> inputs, const std::vector<std::string>& elements) {
    if (elements.empty()) {
        throw InputError("no elements selected for plotting");
    }
    if (inputs.empty()) {
        throw InputError("no trajectories to plot");
    }
    std::vector<std::vector<std::size_t>> columns(inputs.size());
    std::size_t min_step = SIZE_MAX;
    std::size_t max_step = 0;
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        const auto& traj = inputs[i].trajectory;
        for (const auto& name : elements) {
            const auto col = traj.column(name);
            if (!col) {
                throw InputError("element '" + name + "' not found in trajectory '" + inputs[i].label + "'");
            }
            columns[i].push_back(*col);
        }
        if (traj.rows() > 0) {
            min_step = std::min(min_step, traj.steps.front());
            max_step = std::max(max_step, traj.steps.back());
        }
    }
    if (min_step == SIZE_MAX) {
        min_step = 0;
    }
    const double span = max_step > min_step ? static_cast<double>(max_step - min_step) : 1.0;
    const double plot_w = kWidth - kLeft - kRight;
    const double plot_h = kPanelHeight - kTop - kBottom;
    const double height = kPanelHeight * static_cast<double>(elements.size());

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth) + "\" height=\"" + num(height) +
           "\" viewBox=\"0 0 " + num(kWidth) + " " + num(height) + "\" font-family=\"sans-serif\" font-size=\"11\">\n";
    svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

    for (std::size_t p = 0; p < elements.size(); ++p) {
        const double y0 = kPanelHeight * static_cast<double>(p) + kTop;
        const auto x_of = [&](std::size_t step) {
            return kLeft + static_cast<double>(step - min_step) / span * plot_w;
        };
        const auto y_of = [&](double v) { return y0 + (1.0 - v) * plot_h; };

        svg += "<g class=\"panel\" data-element=\"" + escape(elements[p]) + "\">\n";
        svg += "<text x=\"" + num(kLeft) + "\" y=\"" + num(y0 - 8) + "\" font-weight=\"bold\">" +
               escape(elements[p]) + "</text>\n";
        for (int g = 0; g <= 4; ++g) {
            const double v = g / 4.0;
            const double y = y_of(v);
            svg += "<line class=\"grid\" x1=\"" + num(kLeft) + "\" y1=\"" + num(y) + "\" x2=\"" + num(kLeft + plot_w) +
                   "\" y2=\"" + num(y) + "\" stroke=\"#dddddd\"/>\n";
            svg += "<text x=\"" + num(kLeft - 6) + "\" y=\"" + num(y + 4) + "\" text-anchor=\"end\">" +
                   text::fixed(v, 2) + "</text>\n";
        }
        svg += "<line x1=\"" + num(kLeft) + "\" y1=\"" + num(y0 + plot_h) + "\" x2=\"" + num(kLeft + plot_w) +
               "\" y2=\"" + num(y0 + plot_h) + "\" stroke=\"black\"/>\n";
        svg += "<line x1=\"" + num(kLeft) + "\" y1=\"" + num(y0) + "\" x2=\"" + num(kLeft) + "\" y2=\"" +
               num(y0 + plot_h) + "\" stroke=\"black\"/>\n";
        svg += "<text x=\"" + num(kLeft) + "\" y=\"" + num(y0 + plot_h + 16) + "\">" + std::to_string(min_step) +
               "</text>\n";
        svg += "<text x=\"" + num(kLeft + plot_w) + "\" y=\"" + num(y0 + plot_h + 16) + "\" text-anchor=\"end\">" +
               std::to_string(max_step) + "</text>\n";
        svg += "<text x=\"" + num(kLeft + plot_w / 2) + "\" y=\"" + num(y0 + plot_h + 30) +
               "\" text-anchor=\"middle\">step</text>\n";
        svg += "<text x=\"14\" y=\"" + num(y0 + plot_h / 2) + "\" text-anchor=\"middle\" transform=\"rotate(-90 14 " +
               num(y0 + plot_h / 2) + ")\">value</text>\n";

        for (std::size_t i = 0; i < inputs.size(); ++i) {
            const auto& traj = inputs[i].trajectory;
            const auto& style = kStyles[std::min(i, std::size(kStyles) - 1)];
            std::string points;
            for (std::size_t r = 0; r < traj.rows(); ++r) {
                if (!points.empty()) {
                    points += ' ';
                }
                points += num(x_of(traj.steps[r])) + "," + num(y_of(traj.mean(r, columns[i][p])));
            }
            svg += "<polyline class=\"series\" fill=\"none\" stroke=\"" + std::string(style.color) +
                   "\" stroke-width=\"1.6\"";
            if (*style.dash) {
                svg += " stroke-dasharray=\"" + std::string(style.dash) + "\"";
            }
            svg += " points=\"" + points + "\"/>\n";

            const double ly = y0 + 10 + 16 * static_cast<double>(i);
            const double lx = kLeft + plot_w + 14;
            svg += "<line x1=\"" + num(lx) + "\" y1=\"" + num(ly) + "\" x2=\"" + num(lx + 28) + "\" y2=\"" + num(ly) +
                   "\" stroke=\"" + style.color + "\" stroke-width=\"1.6\"";
            if (*style.dash) {
                svg += " stroke-dasharray=\"" + std::string(style.dash) + "\"";
            }
            svg += "/>\n";
            std::string label = elements[p];
            if (inputs.size() > 1) {
                label += " (" + inputs[i].label + ")";
            }
            svg += "<text class=\"legend\" x=\"" + num(lx + 34) + "\" y=\"" + num(ly + 4) + "\">" + escape(label) +
                   "</text>\n";
        }
        svg += "</g>\n";
    }
    svg += "</svg>\n";
    return svg;
}

}  // namespace trendsim
