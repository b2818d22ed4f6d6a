#include "trendsim/ingest.hpp"

#include "text.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace trendsim::ingest {

std::string_view to_string(Cadence cadence) {
    switch (cadence) {
    case Cadence::daily:
        return "daily";
    case Cadence::monthly:
        return "monthly";
    case Cadence::yearly:
        return "yearly";
    }
    return "daily";
}

std::string_view to_string(Aggregation aggregation) {
    return aggregation == Aggregation::sum ? "sum" : "mean";
}

Cadence parse_cadence(std::string_view text) {
    if (text == "daily") {
        return Cadence::daily;
    }
    if (text == "monthly") {
        return Cadence::monthly;
    }
    if (text == "yearly") {
        return Cadence::yearly;
    }
    throw InputError("unknown cadence '" + std::string(text) + "' (expected daily, monthly or yearly)");
}

Aggregation parse_aggregation(std::string_view text) {
    if (text == "sum") {
        return Aggregation::sum;
    }
    if (text == "mean") {
        return Aggregation::mean;
    }
    throw InputError("unknown aggregation '" + std::string(text) + "' (expected sum or mean)");
}

Month Month::from_index(long index) noexcept {
    const long year = index >= 0 ? index / 12 : (index - 11) / 12;
    return Month{static_cast<int>(year), static_cast<unsigned>(index - year * 12 + 1)};
}

std::string Month::to_string() const {
    std::string m = std::to_string(month);
    return std::to_string(year) + "-" + (m.size() < 2 ? "0" + m : m);
}

namespace {

bool is_leap(int year) {
    return (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
}

unsigned days_in_month(int year, unsigned month) {
    static constexpr unsigned kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    return month == 2 && is_leap(year) ? 29 : kDays[month - 1];
}

bool all_digits(std::string_view s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

Month month_of(const Date& d) {
    return Month{d.year, d.month};
}

}  // namespace

std::optional<ParsedDate> parse_date(std::string_view text) {
    const auto parts = text::split(text, '-');
    if (parts.empty() || parts.size() > 3 || parts[0].size() != 4 || !all_digits(parts[0])) {
        return std::nullopt;
    }
    ParsedDate out;
    out.date.year = *text::parse_int<int>(parts[0]);
    out.precision = Cadence::yearly;
    if (parts.size() >= 2) {
        if (parts[1].size() != 2 || !all_digits(parts[1])) {
            return std::nullopt;
        }
        out.date.month = *text::parse_int<unsigned>(parts[1]);
        if (out.date.month < 1 || out.date.month > 12) {
            return std::nullopt;
        }
        out.precision = Cadence::monthly;
    }
    if (parts.size() == 3) {
        if (parts[2].size() != 2 || !all_digits(parts[2])) {
            return std::nullopt;
        }
        out.date.day = *text::parse_int<unsigned>(parts[2]);
        if (out.date.day < 1 || out.date.day > days_in_month(out.date.year, out.date.month)) {
            return std::nullopt;
        }
        out.precision = Cadence::daily;
    }
    return out;
}

std::optional<Month> parse_month(std::string_view text) {
    const auto parsed = parse_date(text);
    if (!parsed || parsed->precision != Cadence::monthly) {
        return std::nullopt;
    }
    return month_of(parsed->date);
}

RawSeries read_raw_csv(std::string_view csv, std::string element, std::optional<Cadence> cadence) {
    const auto rows = text::lines(csv);
    if (rows.empty() || text::trim(rows[0]) != "date,value") {
        throw InputError("raw series must start with the header 'date,value'");
    }
    RawSeries series;
    series.element = std::move(element);
    std::optional<Cadence> precision;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto row = text::trim(rows[i]);
        if (row.empty()) {
            continue;
        }
        const auto line = std::to_string(i + 1);
        const auto fields = text::split(row, ',');
        if (fields.size() != 2) {
            throw InputError("line " + line + ": expected 2 fields, got " + std::to_string(fields.size()));
        }
        const auto date = parse_date(text::trim(fields[0]));
        if (!date) {
            throw InputError("line " + line + ": malformed date '" + std::string(fields[0]) + "'");
        }
        const auto value = text::parse_real(text::trim(fields[1]));
        if (!value) {
            throw InputError("line " + line + ": malformed value '" + std::string(fields[1]) + "'");
        }
        if (precision && *precision != date->precision) {
            throw InputError("line " + line + ": date precision differs from earlier rows");
        }
        precision = date->precision;
        if (!series.observations.empty() && !(series.observations.back().date < date->date)) {
            throw InputError("line " + line + ": dates must be strictly increasing");
        }
        series.observations.push_back(Observation{date->date, *value});
    }
    series.cadence = cadence.value_or(precision.value_or(Cadence::daily));
    return series;
}

AlignedSeries aggregate_monthly(const RawSeries& raw, Aggregation method) {
    if (raw.observations.empty()) {
        throw InputError("series '" + raw.element + "' is empty");
    }
    AlignedSeries out;
    out.element = raw.element;

    Month first = month_of(raw.observations.front().date);
    Month last = month_of(raw.observations.back().date);
    if (raw.cadence == Cadence::yearly) {
        first.month = 1;
        last.month = 12;
    }
    out.start = first;
    const auto count = static_cast<std::size_t>(last.index() - first.index() + 1);

    std::vector<double> sums(count, 0.0);
    std::vector<std::size_t> hits(count, 0);
    for (const auto& obs : raw.observations) {
        if (raw.cadence == Cadence::yearly) {
            // Forward-fill the yearly value into each month of its year.
            const auto base = static_cast<std::size_t>(Month{obs.date.year, 1}.index() - first.index());
            for (std::size_t m = 0; m < 12; ++m) {
                sums[base + m] = obs.value;
                hits[base + m] = 1;
            }
            continue;
        }
        const auto k = static_cast<std::size_t>(month_of(obs.date).index() - first.index());
        sums[k] += obs.value;
        ++hits[k];
    }

    out.values.resize(count);
    for (std::size_t k = 0; k < count; ++k) {
        if (hits[k] == 0) {
            out.values[k] = out.values[k - 1];  // k > 0: the first month always has data
            ++out.filled_months;
        } else if (method == Aggregation::mean) {
            out.values[k] = sums[k] / static_cast<double>(hits[k]);
        } else {
            out.values[k] = sums[k];
        }
    }
    return out;
}

AlignedSeries align_start(const AlignedSeries& series, Month start) {
    if (series.values.empty()) {
        throw InputError("series '" + series.element + "' is empty");
    }
    AlignedSeries out = series;
    out.start = start;
    const long shift = series.start.index() - start.index();
    if (shift > 0) {
        out.values.insert(out.values.begin(), static_cast<std::size_t>(shift), series.values.front());
        out.filled_months += static_cast<std::size_t>(shift);
    } else if (shift < 0) {
        const auto drop = static_cast<std::size_t>(-shift);
        if (drop >= series.values.size()) {
            throw InputError("series '" + series.element + "' ends before " + start.to_string());
        }
        out.values.erase(out.values.begin(), out.values.begin() + static_cast<std::ptrdiff_t>(drop));
    }
    return out;
}

std::optional<Extension> parse_extension(std::string_view text) {
    if (text == "hold") {
        return HoldLast{};
    }
    constexpr std::string_view prefix = "periodic:";
    if (text.substr(0, prefix.size()) == prefix) {
        const auto period = text::parse_int<std::size_t>(text.substr(prefix.size()));
        if (period && *period > 0) {
            return Periodic{*period};
        }
    }
    return std::nullopt;
}

std::string describe(const Extension& extension) {
    if (const auto* p = std::get_if<Periodic>(&extension)) {
        return "periodic:" + std::to_string(p->period);
    }
    return "hold";
}

AlignedSeries extend_series(const AlignedSeries& series, const Extension& extension, std::size_t horizon) {
    const std::size_t n = series.values.size();
    if (n == 0) {
        throw InputError("cannot extend empty series '" + series.element + "'");
    }
    if (const auto* p = std::get_if<Periodic>(&extension)) {
        if (p->period == 0 || p->period > n) {
            throw InputError("period " + std::to_string(p->period) + " is longer than the " + std::to_string(n) +
                             " months of data for '" + series.element + "'");
        }
    }
    AlignedSeries out = series;
    if (horizon <= n) {
        return out;
    }
    out.values.reserve(horizon);
    for (std::size_t i = n; i < horizon; ++i) {
        if (const auto* p = std::get_if<Periodic>(&extension)) {
            out.values.push_back(series.values[n - p->period + (i - n) % p->period]);
        } else {
            out.values.push_back(series.values.back());
        }
    }
    return out;
}

int bin_index(double x, double min, double max, int levels) noexcept {
    if (!(max > min)) {
        return 0;
    }
    const double scaled = std::floor((x - min) / (max - min) * static_cast<double>(levels));
    return static_cast<int>(std::clamp(scaled, 0.0, static_cast<double>(levels - 1)));
}

Discretization discretize_uniform(std::span<const double> values, int levels) {
    if (levels < 2) {
        throw InputError("level count must be at least 2");
    }
    Discretization out;
    if (values.empty()) {
        return out;
    }
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    out.min = *lo;
    out.max = *hi;
    out.constant = !(out.max > out.min);
    out.levels.reserve(values.size());
    for (const double x : values) {
        out.levels.push_back(bin_index(x, out.min, out.max, levels));
    }
    return out;
}

ToggleSequence series_to_toggles(std::span<const int> levels, int level_count) {
    ToggleSequence toggles;
    for (std::size_t t = 0; t < levels.size(); ++t) {
        if (levels[t] < 0 || levels[t] >= level_count) {
            throw InputError("level " + std::to_string(levels[t]) + " at step " + std::to_string(t) +
                             " out of range [0, " + std::to_string(level_count - 1) + "]");
        }
        if (t == 0 || levels[t] != levels[t - 1]) {
            toggles.push_back(Toggle{t, levels[t]});
        }
    }
    return toggles;
}

std::vector<int> replay_toggles(const ToggleSequence& toggles, std::size_t steps) {
    std::vector<int> out(steps, 0);
    std::size_t k = 0;
    int current = 0;
    for (std::size_t t = 0; t < steps; ++t) {
        while (k < toggles.size() && toggles[k].step == t) {
            current = toggles[k].level;
            ++k;
        }
        out[t] = current;
    }
    return out;
}

}  // namespace trendsim::ingest
