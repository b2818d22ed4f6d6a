#include "reference.hpp"

#include <cmath>
#include <stdexcept>

namespace reference {

using trendsim::Model;

Simulator::Simulator(Model model) : model_(std::move(model)) {
    for (const auto& e : model_.elements) {
        state_.level[e.name] = e.initial_level;
    }
    for (const auto& e : model_.elements) {
        for (const auto& t : e.toggles) {
            if (t.step == 0) {
                state_.level[e.name] = t.level;
            }
        }
    }
    for (const auto& h : model_.hyperedges) {
        for (const auto& tail : h.tails) {
            state_.seen[{h.target, tail.regulator}] = state_.level.at(tail.regulator);
        }
    }
}

int Simulator::levels_of(const std::string& element) const {
    for (const auto& e : model_.elements) {
        if (e.name == element) {
            return e.levels;
        }
    }
    throw std::out_of_range(element);
}

double Simulator::value(const std::string& element) const {
    return static_cast<double>(state_.level.at(element)) / static_cast<double>(levels_of(element) - 1);
}

long Simulator::grid_steps(double b, int levels) {
    const double x = std::fabs(b) * static_cast<double>(levels - 1);
    const double nearest = std::round(x);
    const long n = std::fabs(x - nearest) < 1e-9 ? static_cast<long>(nearest) : static_cast<long>(std::ceil(x));
    return b < 0 ? -n : n;
}

double Simulator::balance(const std::string& target) const {
    double b = 0.0;
    for (const auto& h : model_.hyperedges) {
        if (h.target != target) {
            continue;
        }
        if (h.gate && state_.level.at(h.gate->element) != h.gate->level) {
            continue;
        }
        double lv = 1.0;
        double tr = 1.0;
        for (const auto& tail : h.tails) {
            const double denom = static_cast<double>(levels_of(tail.regulator) - 1);
            const double now = state_.level.at(tail.regulator) / denom;
            const double then = state_.seen.at({target, tail.regulator}) / denom;
            lv *= tail.level_weight * now;
            tr *= tail.trend_weight * (now - then);
        }
        double term = 0.0;
        if (h.mode == trendsim::Mode::level || h.mode == trendsim::Mode::hybrid) {
            term += lv;
        }
        if (h.mode == trendsim::Mode::trend || h.mode == trendsim::Mode::hybrid) {
            term += tr;
        }
        b += h.sign == trendsim::Sign::positive ? term : -term;
    }
    return b;
}

void Simulator::toggle(std::size_t step) {
    for (const auto& e : model_.elements) {
        for (const auto& t : e.toggles) {
            if (t.step == step) {
                state_.level[e.name] = t.level;
            }
        }
    }
}

void Simulator::refresh(const std::string& target, const std::map<std::string, int>& source) {
    for (auto& [key, seen] : state_.seen) {
        if (key.first == target) {
            seen = key.second == target ? state_.level.at(target) : source.at(key.second);
        }
    }
}

void Simulator::update(const std::string& target) {
    const int levels = levels_of(target);
    const long raw = state_.level.at(target) + grid_steps(balance(target), levels);
    state_.level[target] = static_cast<int>(raw < 0 ? 0 : raw > levels - 1 ? levels - 1 : raw);
    refresh(target, state_.level);
}

void Simulator::update_all(const std::vector<std::string>& targets) {
    const auto before = state_.level;
    std::map<std::string, int> next;
    for (const auto& target : targets) {
        const int levels = levels_of(target);
        const long raw = before.at(target) + grid_steps(balance(target), levels);
        next[target] = static_cast<int>(raw < 0 ? 0 : raw > levels - 1 ? levels - 1 : raw);
    }
    for (const auto& [target, level] : next) {
        state_.level[target] = level;
    }
    for (const auto& target : targets) {
        refresh(target, before);
    }
}

void Simulator::step(std::size_t t, const std::vector<std::string>& sequence) {
    toggle(t);
    for (const auto& target : sequence) {
        update(target);
    }
}

namespace {

void walk(const Simulator& sim, const std::vector<std::string>& pool, std::size_t t, std::size_t steps, double weight,
          const Model& model, std::vector<std::map<std::string, double>>& sums) {
    for (const auto& e : model.elements) {
        sums[t - 1][e.name] += weight * sim.value(e.name);
    }
    if (t > steps) {
        return;
    }
    for (const auto& choice : pool) {
        Simulator next = sim;
        next.step(t, {choice});
        walk(next, pool, t + 1, steps, weight / static_cast<double>(pool.size()), model, sums);
    }
}

}  // namespace

std::vector<std::map<std::string, double>> exhaustive_average(const Model& model, const std::vector<std::string>& pool,
                                                              std::size_t steps) {
    std::vector<std::map<std::string, double>> sums(steps + 1);
    walk(Simulator(model), pool, 1, steps, 1.0, model, sums);
    // Row t was visited |pool|^t times, each with weight |pool|^-t.
    return sums;
}

}  // namespace reference
