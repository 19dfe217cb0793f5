#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "smartbeta/date.hpp"

namespace smartbeta {

/// One daily OHLCV observation. Prices are assumed split/dividend adjusted.
struct Bar {
    Date date;
    double open = 0.0;
    double high = 0.0;
    double low = 0.0;
    double close = 0.0;
    std::int64_t volume = 0;

    friend bool operator==(const Bar&, const Bar&) = default;
};

/// Throws ValidationError naming `symbol` and the bar date when prices are
/// non-positive, the high/low envelope does not contain open and close, or
/// volume is negative.
void validate_bar(const Bar& bar, std::string_view symbol);

struct PriceSeries {
    std::string symbol;
    std::vector<Bar> bars;   // strictly increasing dates
    std::vector<Date> gaps;  // calendar dates between first and last bar with no bar

    std::vector<double> closes() const;
    std::optional<std::size_t> index_of(const Date& date) const;

    friend bool operator==(const PriceSeries&, const PriceSeries&) = default;
};

using SeriesMap = std::map<std::string, PriceSeries>;

struct Universe {
    std::vector<std::string> symbols;  // sorted, unique
    std::string benchmark;

    /// Throws ValidationError when empty or when the benchmark is a member.
    void validate() const;
};

/// Ordered trading dates plus the index of the first trading day of each month.
class TradingCalendar {
public:
    TradingCalendar() = default;
    /// `dates` must be strictly increasing.
    explicit TradingCalendar(std::vector<Date> dates);

    static TradingCalendar from_series(const PriceSeries& series);

    const std::vector<Date>& dates() const noexcept { return dates_; }
    const std::vector<std::size_t>& month_starts() const noexcept { return month_starts_; }
    std::size_t size() const noexcept { return dates_.size(); }
    bool empty() const noexcept { return dates_.empty(); }
    const Date& operator[](std::size_t i) const { return dates_[i]; }

    std::optional<std::size_t> index_of(const Date& date) const;
    /// First index whose date is >= `date` (size() when none).
    std::size_t lower_bound(const Date& date) const;
    bool is_month_start(std::size_t index) const;
    std::optional<std::size_t> month_start_of(const YearMonth& ym) const;

private:
    std::vector<Date> dates_;
    std::vector<std::size_t> month_starts_;
};

/// Parses an OHLCV file without calendar filtering. Each series is sorted by
/// date; rows need not be sorted in the file.
SeriesMap read_ohlcv_csv(const std::filesystem::path& path);
SeriesMap read_ohlcv_csv(std::istream& in);

/// Parses an OHLCV file, drops rows whose date is not in `calendar`, and
/// records per-symbol gaps. Missing bars are never filled.
SeriesMap load_ohlcv_csv(const std::filesystem::path& path, const TradingCalendar& calendar);

/// Restricts already parsed series to `calendar` and recomputes gaps.
void align_to_calendar(SeriesMap& series, const TradingCalendar& calendar);

void write_ohlcv_csv(std::ostream& out, const SeriesMap& series);
void write_ohlcv_csv(const std::filesystem::path& path, const SeriesMap& series);

/// close[t] / close[t-1] - 1.
std::vector<double> simple_returns(std::span<const double> closes);
std::vector<double> simple_returns(const PriceSeries& series);

/// (max high - min low) / mean close over the bars falling in `month`.
double monthly_range(const PriceSeries& series, const YearMonth& month);

/// Market data aligned to a single calendar (the benchmark's trading days).
class MarketData {
public:
    MarketData(TradingCalendar calendar, SeriesMap series, std::string benchmark);

    /// Loads a file and builds the calendar from the benchmark's dates.
    static MarketData load(const std::filesystem::path& path, const std::string& benchmark);

    const TradingCalendar& calendar() const noexcept { return calendar_; }
    const Universe& universe() const noexcept { return universe_; }
    const PriceSeries& benchmark() const { return series(universe_.benchmark); }
    const PriceSeries& series(const std::string& symbol) const;
    const SeriesMap& all_series() const noexcept { return series_; }

    /// Restricts the tradable universe to `symbols` (each must be loaded).
    void restrict_universe(const std::vector<std::string>& symbols);

    /// Close on calendar day `t`, or nullopt when the symbol has no bar that day.
    std::optional<double> close(const std::string& symbol, std::size_t t) const;

    /// The `length` bars ending on calendar day `t`, or an empty span unless
    /// every one of those calendar days has a bar.
    std::span<const Bar> window(const std::string& symbol, std::size_t t, std::size_t length) const;

private:
    TradingCalendar calendar_;
    SeriesMap series_;
    Universe universe_;
    std::map<std::string, std::vector<std::int32_t>> positions_;  // calendar index -> bar index or -1
};

}  // namespace smartbeta
