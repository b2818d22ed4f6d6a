#include "trendsim/analytics.hpp"

#include <algorithm>
#include <mutex>
#include <stdexcept>

namespace trendsim {

std::optional<std::size_t> AveragedTrajectory::column(std::string_view element) const {
    const auto it = std::find(elements.begin(), elements.end(), element);
    if (it == elements.end()) {
        return std::nullopt;
    }
    return static_cast<std::size_t>(it - elements.begin());
}

TrajectoryAccumulator::TrajectoryAccumulator(const CompiledModel& model) : model_(&model) {}

void TrajectoryAccumulator::add(const RunTrace& trace) {
    if (trace.element_count != model_->element_count()) {
        throw std::invalid_argument("trace does not belong to this model");
    }
    if (runs_ == 0) {
        steps_ = trace.steps;
        sums_.assign(trace.levels.size(), 0);
    } else if (trace.steps != steps_) {
        throw std::invalid_argument("traces record different steps");
    }
    for (std::size_t i = 0; i < trace.levels.size(); ++i) {
        sums_[i] += trace.levels[i];
    }
    ++runs_;
}

void TrajectoryAccumulator::merge(const TrajectoryAccumulator& other) {
    if (other.runs_ == 0) {
        return;
    }
    if (runs_ == 0) {
        steps_ = other.steps_;
        sums_ = other.sums_;
        runs_ = other.runs_;
        return;
    }
    if (other.steps_ != steps_) {
        throw std::invalid_argument("partial averages record different steps");
    }
    for (std::size_t i = 0; i < sums_.size(); ++i) {
        sums_[i] += other.sums_[i];
    }
    runs_ += other.runs_;
}

AveragedTrajectory TrajectoryAccumulator::result() const {
    if (runs_ == 0) {
        throw std::invalid_argument("cannot average an empty ensemble");
    }
    const std::size_t n = model_->element_count();
    AveragedTrajectory avg;
    avg.runs = runs_;
    avg.steps = steps_;
    avg.elements.reserve(n);
    for (std::size_t e = 0; e < n; ++e) {
        avg.elements.push_back(model_->element_name(element_id(e)));
    }
    avg.means.resize(sums_.size());
    for (std::size_t row = 0; row < steps_.size(); ++row) {
        for (std::size_t e = 0; e < n; ++e) {
            // k*N / (N*(L-1)) rounds to the same double as k/(L-1), so averaging
            // identical runs reproduces the single-run values exactly.
            const double denom = static_cast<double>(runs_) * static_cast<double>(model_->levels(element_id(e)) - 1);
            avg.means[row * n + e] = static_cast<double>(sums_[row * n + e]) / denom;
        }
    }
    return avg;
}

AveragedTrajectory average(const CompiledModel& model, const Ensemble& ensemble) {
    TrajectoryAccumulator acc(model);
    for (const auto& trace : ensemble.runs) {
        acc.add(trace);
    }
    return acc.result();
}

AveragedTrajectory merge_averages(const AveragedTrajectory& a, const AveragedTrajectory& b) {
    if (a.elements != b.elements || a.steps != b.steps) {
        throw std::invalid_argument("partial averages have different shapes");
    }
    AveragedTrajectory out = a;
    out.runs = a.runs + b.runs;
    if (out.runs == 0) {
        return out;
    }
    const double wa = static_cast<double>(a.runs) / static_cast<double>(out.runs);
    const double wb = static_cast<double>(b.runs) / static_cast<double>(out.runs);
    for (std::size_t i = 0; i < out.means.size(); ++i) {
        out.means[i] = wa * a.means[i] + wb * b.means[i];
    }
    return out;
}

SaturationAccumulator::SaturationAccumulator(const CompiledModel& model)
    : model_(&model), cells_(model.element_count() * 2) {}

void SaturationAccumulator::add(const RunTrace& trace) {
    if (trace.element_count != model_->element_count()) {
        throw std::invalid_argument("trace does not belong to this model");
    }
    ++runs_;
    const std::size_t rows = trace.rows();
    if (rows > 1) {
        total_rows_ += rows - 1;
    }

    std::vector<std::optional<std::size_t>> first(cells_.size());
    for (const auto& ev : trace.saturation) {
        auto& f = first[index_of(ev.element) * 2 + (ev.boundary == Boundary::upper ? 1 : 0)];
        if (!f || ev.step < *f) {
            f = ev.step;
        }
    }
    for (std::size_t e = 0; e < model_->element_count(); ++e) {
        const int top = model_->levels(element_id(e)) - 1;
        for (int b = 0; b < 2; ++b) {
            auto& cell = cells_[e * 2 + static_cast<std::size_t>(b)];
            const auto& f = first[e * 2 + static_cast<std::size_t>(b)];
            if (!f) {
                continue;
            }
            ++cell.runs_affected;
            if (!cell.first_step || *f < *cell.first_step) {
                cell.first_step = f;
            }
            const int boundary_level = b == 1 ? top : 0;
            for (std::size_t row = 1; row < rows; ++row) {
                if (trace.level(row, element_id(e)) == boundary_level) {
                    ++cell.dwell_rows;
                }
            }
        }
    }
}

void SaturationAccumulator::merge(const SaturationAccumulator& other) {
    for (std::size_t i = 0; i < cells_.size(); ++i) {
        auto& c = cells_[i];
        const auto& o = other.cells_[i];
        if (o.first_step && (!c.first_step || *o.first_step < *c.first_step)) {
            c.first_step = o.first_step;
        }
        c.runs_affected += o.runs_affected;
        c.dwell_rows += o.dwell_rows;
    }
    total_rows_ += other.total_rows_;
    runs_ += other.runs_;
}

SaturationReport SaturationAccumulator::result() const {
    SaturationReport report;
    report.runs = runs_;
    for (std::size_t i = 0; i < cells_.size(); ++i) {
        const auto& c = cells_[i];
        if (!c.first_step) {
            continue;
        }
        SaturationEntry entry;
        entry.element = element_id(i / 2);
        entry.boundary = i % 2 == 1 ? Boundary::upper : Boundary::lower;
        entry.first_step = *c.first_step;
        entry.runs_affected = c.runs_affected;
        entry.dwell_fraction =
            total_rows_ == 0 ? 0.0 : static_cast<double>(c.dwell_rows) / static_cast<double>(total_rows_);
        report.entries.push_back(entry);
    }
    return report;
}

SaturationReport saturation_report(const CompiledModel& model, const RunTrace& trace) {
    SaturationAccumulator acc(model);
    acc.add(trace);
    return acc.result();
}

SaturationReport saturation_report(const CompiledModel& model, const Ensemble& ensemble) {
    SaturationAccumulator acc(model);
    for (const auto& trace : ensemble.runs) {
        acc.add(trace);
    }
    return acc.result();
}

EnsembleSummary summarize(const CompiledModel& model, const SimulationConfig& config, unsigned jobs) {
    if (config.runs == 0) {
        throw InputError("run count must be at least 1");
    }
    const ResolvedScheme scheme = resolve_scheme(model, config.scheme);
    TrajectoryAccumulator trajectories(model);
    SaturationAccumulator saturation(model);
    std::mutex mutex;
    for_each_run(config.runs, jobs, [&](std::size_t i) {
        const RunTrace trace = run_once(model, scheme, config, run_seed(config.base_seed, i));
        std::lock_guard lock(mutex);
        trajectories.add(trace);
        saturation.add(trace);
    });
    return EnsembleSummary{trajectories.result(), saturation.result()};
}

Model rescale_levels(const Model& model, std::string_view element) {
    const auto it = std::find_if(model.elements.begin(), model.elements.end(),
                                 [&](const Element& e) { return e.name == element; });
    if (it == model.elements.end()) {
        throw InputError("unknown element '" + std::string(element) + "'");
    }
    Model out = model;
    auto& e = out.elements[static_cast<std::size_t>(it - model.elements.begin())];
    e.levels = 2 * e.levels - 1;
    e.initial_level *= 2;
    for (auto& t : e.toggles) {
        t.level *= 2;
    }
    for (auto& h : out.hyperedges) {
        if (h.gate && h.gate->element == element) {
            h.gate->level *= 2;
        }
        for (auto& tail : h.tails) {
            if (tail.regulator == element) {
                tail.level_weight /= 2.0;
                tail.trend_weight /= 2.0;
            }
        }
    }
    return out;
}

}  // namespace trendsim
