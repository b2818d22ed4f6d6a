#pragma once

#include "trendsim/model.hpp"

#include <compare>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace trendsim::ingest {

enum class Cadence { daily, monthly, yearly };
enum class Aggregation { sum, mean };

[[nodiscard]] std::string_view to_string(Cadence cadence);
[[nodiscard]] std::string_view to_string(Aggregation aggregation);
[[nodiscard]] Cadence parse_cadence(std::string_view text);
[[nodiscard]] Aggregation parse_aggregation(std::string_view text);

struct Date {
    int year = 0;
    unsigned month = 1;
    unsigned day = 1;

    friend auto operator<=>(const Date&, const Date&) = default;
};

/// Calendar month, ordered and convertible to a dense index.
struct Month {
    int year = 0;
    unsigned month = 1;

    [[nodiscard]] long index() const noexcept { return static_cast<long>(year) * 12 + static_cast<long>(month) - 1; }
    [[nodiscard]] static Month from_index(long index) noexcept;
    [[nodiscard]] std::string to_string() const;  // "YYYY-MM"

    friend auto operator<=>(const Month&, const Month&) = default;
};

/// Accepts YYYY-MM-DD, YYYY-MM and YYYY; the precision found tells the cadence.
struct ParsedDate {
    Date date;
    Cadence precision = Cadence::daily;
};
[[nodiscard]] std::optional<ParsedDate> parse_date(std::string_view text);
[[nodiscard]] std::optional<Month> parse_month(std::string_view text);

struct Observation {
    Date date;
    double value = 0.0;
};

struct RawSeries {
    std::string element;
    std::vector<Observation> observations;  // strictly increasing dates, finite values
    Cadence cadence = Cadence::daily;
};

/// Reads a `date,value` CSV. The cadence comes from the date precision unless given.
[[nodiscard]] RawSeries read_raw_csv(std::string_view text, std::string element,
                                     std::optional<Cadence> cadence = std::nullopt);

struct AlignedSeries {
    std::string element;
    Month start;
    std::vector<double> values;  // one per month from `start`, no gaps
    std::size_t filled_months = 0;  // months forward-filled because the source had no observation
};

/// One value per calendar month in the covered range. Daily and monthly observations in a
/// month are summed or averaged; yearly values are forward-filled to each month of their
/// year. Months with no observation inside the range carry the previous month forward.
[[nodiscard]] AlignedSeries aggregate_monthly(const RawSeries& raw, Aggregation method);

/// Crops or back-fills (with the first value) so the series begins at `start`.
[[nodiscard]] AlignedSeries align_start(const AlignedSeries& series, Month start);

struct Periodic {
    std::size_t period = 12;
};
struct HoldLast {};
using Extension = std::variant<Periodic, HoldLast>;

[[nodiscard]] std::optional<Extension> parse_extension(std::string_view text);  // "periodic:12" or "hold"
[[nodiscard]] std::string describe(const Extension& extension);

/// Extends to `horizon` months by repeating the trailing period or the last value.
/// A horizon at or below the current length leaves the series unchanged.
[[nodiscard]] AlignedSeries extend_series(const AlignedSeries& series, const Extension& extension, std::size_t horizon);

struct Discretization {
    std::vector<int> levels;
    double min = 0.0;
    double max = 0.0;
    bool constant = false;  // max == min: everything maps to level 0
};

/// Uniform bins over [min, max]: index(x) = min(L-1, floor((x - min) / (max - min) * L)).
[[nodiscard]] Discretization discretize_uniform(std::span<const double> values, int levels);
[[nodiscard]] int bin_index(double x, double min, double max, int levels) noexcept;

/// One toggle per change of level, starting at step 0.
[[nodiscard]] ToggleSequence series_to_toggles(std::span<const int> levels, int level_count);

/// Level held at every step 0..steps-1 when `toggles` are replayed.
[[nodiscard]] std::vector<int> replay_toggles(const ToggleSequence& toggles, std::size_t steps);

}  // namespace trendsim::ingest
