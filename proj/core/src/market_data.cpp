#include "smartbeta/market_data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include <fmt/format.h>

#include "smartbeta/errors.hpp"

namespace smartbeta {

namespace {

constexpr std::string_view kHeader = "date,symbol,open,high,low,close,volume";

double parse_double(std::string_view field, std::size_t line, std::string_view name) {
    double value = 0.0;
    const auto* end = field.data() + field.size();
    auto [ptr, ec] = std::from_chars(field.data(), end, value);
    if (ec != std::errc{} || ptr != end || !std::isfinite(value)) {
        throw ParseError(line, fmt::format("invalid {} '{}'", name, field));
    }
    return value;
}

std::int64_t parse_volume(std::string_view field, std::size_t line) {
    std::int64_t value = 0;
    const auto* end = field.data() + field.size();
    auto [ptr, ec] = std::from_chars(field.data(), end, value);
    if (ec != std::errc{} || ptr != end) {
        throw ParseError(line, fmt::format("invalid volume '{}'", field));
    }
    return value;
}

void sort_and_check(PriceSeries& s) {
    std::sort(s.bars.begin(), s.bars.end(),
              [](const Bar& a, const Bar& b) { return a.date < b.date; });
    for (std::size_t i = 1; i < s.bars.size(); ++i) {
        if (s.bars[i].date == s.bars[i - 1].date) {
            throw ValidationError(fmt::format("validation: duplicate date {} for symbol {}",
                                              format_date(s.bars[i].date), s.symbol));
        }
    }
}

}  // namespace

void validate_bar(const Bar& bar, std::string_view symbol) {
    auto fail = [&](std::string_view why) {
        throw ValidationError(
            fmt::format("validation: {} on {} for symbol {}", why, format_date(bar.date), symbol));
    };
    if (!(bar.open > 0.0 && bar.high > 0.0 && bar.low > 0.0 && bar.close > 0.0)) {
        fail("non-positive price");
    }
    if (bar.low > bar.high) fail("low > high");
    if (bar.open < bar.low || bar.open > bar.high) fail("open outside [low, high]");
    if (bar.close < bar.low || bar.close > bar.high) fail("close outside [low, high]");
    if (bar.volume < 0) fail("negative volume");
}

std::vector<double> PriceSeries::closes() const {
    std::vector<double> out;
    out.reserve(bars.size());
    for (const auto& b : bars) out.push_back(b.close);
    return out;
}

std::optional<std::size_t> PriceSeries::index_of(const Date& date) const {
    auto it = std::lower_bound(bars.begin(), bars.end(), date,
                               [](const Bar& b, const Date& d) { return b.date < d; });
    if (it == bars.end() || it->date != date) return std::nullopt;
    return static_cast<std::size_t>(it - bars.begin());
}

void Universe::validate() const {
    if (symbols.empty()) throw ValidationError("universe has no symbols");
    if (std::find(symbols.begin(), symbols.end(), benchmark) != symbols.end()) {
        throw ValidationError(fmt::format("benchmark {} is also a universe member", benchmark));
    }
}

TradingCalendar::TradingCalendar(std::vector<Date> dates) : dates_(std::move(dates)) {
    for (std::size_t i = 0; i < dates_.size(); ++i) {
        if (i > 0 && !(dates_[i - 1] < dates_[i])) {
            throw InvalidArgument("calendar dates must be strictly increasing");
        }
        if (i == 0 || year_month_of(dates_[i]) != year_month_of(dates_[i - 1])) {
            month_starts_.push_back(i);
        }
    }
}

TradingCalendar TradingCalendar::from_series(const PriceSeries& series) {
    std::vector<Date> dates;
    dates.reserve(series.bars.size());
    for (const auto& b : series.bars) dates.push_back(b.date);
    return TradingCalendar(std::move(dates));
}

std::optional<std::size_t> TradingCalendar::index_of(const Date& date) const {
    const std::size_t i = lower_bound(date);
    if (i == dates_.size() || dates_[i] != date) return std::nullopt;
    return i;
}

std::size_t TradingCalendar::lower_bound(const Date& date) const {
    return static_cast<std::size_t>(std::lower_bound(dates_.begin(), dates_.end(), date) -
                                    dates_.begin());
}

bool TradingCalendar::is_month_start(std::size_t index) const {
    return std::binary_search(month_starts_.begin(), month_starts_.end(), index);
}

std::optional<std::size_t> TradingCalendar::month_start_of(const YearMonth& ym) const {
    const Date first{ym.year(), ym.month(), std::chrono::day{1}};
    const std::size_t i = lower_bound(first);
    if (i == dates_.size() || year_month_of(dates_[i]) != ym) return std::nullopt;
    return i;
}

SeriesMap read_ohlcv_csv(std::istream& in) {
    SeriesMap out;
    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(in, line)) throw ParseError(1, "missing header");
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kHeader) {
        throw ParseError(1, fmt::format("unexpected header '{}', expected '{}'", line, kHeader));
    }
    std::vector<std::string_view> fields;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        fields.clear();
        std::string_view rest = line;
        while (true) {
            const auto comma = rest.find(',');
            fields.push_back(rest.substr(0, comma));
            if (comma == std::string_view::npos) break;
            rest.remove_prefix(comma + 1);
        }
        if (fields.size() != 7) {
            throw ParseError(line_no, fmt::format("expected 7 fields, got {}", fields.size()));
        }
        if (fields[1].empty()) throw ParseError(line_no, "empty symbol");
        Bar bar;
        try {
            bar.date = parse_date(fields[0]);
        } catch (const InvalidArgument& e) {
            throw ParseError(line_no, e.what());
        }
        bar.open = parse_double(fields[2], line_no, "open");
        bar.high = parse_double(fields[3], line_no, "high");
        bar.low = parse_double(fields[4], line_no, "low");
        bar.close = parse_double(fields[5], line_no, "close");
        bar.volume = parse_volume(fields[6], line_no);
        const std::string symbol(fields[1]);
        validate_bar(bar, symbol);
        auto& s = out[symbol];
        s.symbol = symbol;
        s.bars.push_back(bar);
    }
    for (auto& [_, s] : out) sort_and_check(s);
    return out;
}

SeriesMap read_ohlcv_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(fmt::format("cannot open '{}'", path.string()));
    return read_ohlcv_csv(in);
}

void align_to_calendar(SeriesMap& series, const TradingCalendar& calendar) {
    for (auto& [_, s] : series) {
        std::erase_if(s.bars, [&](const Bar& b) { return !calendar.index_of(b.date); });
        s.gaps.clear();
        if (s.bars.empty()) continue;
        const std::size_t first = *calendar.index_of(s.bars.front().date);
        const std::size_t last = *calendar.index_of(s.bars.back().date);
        std::size_t k = 0;
        for (std::size_t t = first; t <= last; ++t) {
            if (k < s.bars.size() && s.bars[k].date == calendar[t]) {
                ++k;
            } else {
                s.gaps.push_back(calendar[t]);
            }
        }
    }
    std::erase_if(series, [](const auto& kv) { return kv.second.bars.empty(); });
}

SeriesMap load_ohlcv_csv(const std::filesystem::path& path, const TradingCalendar& calendar) {
    SeriesMap out = read_ohlcv_csv(path);
    align_to_calendar(out, calendar);
    return out;
}

void write_ohlcv_csv(std::ostream& out, const SeriesMap& series) {
    out << kHeader << '\n';
    for (const auto& [symbol, s] : series) {
        for (const auto& b : s.bars) {
            out << fmt::format("{},{},{},{},{},{},{}\n", format_date(b.date), symbol, b.open,
                               b.high, b.low, b.close, b.volume);
        }
    }
}

void write_ohlcv_csv(const std::filesystem::path& path, const SeriesMap& series) {
    std::ofstream out(path);
    if (!out) throw Error(fmt::format("cannot write '{}'", path.string()));
    write_ohlcv_csv(out, series);
}

std::vector<double> simple_returns(std::span<const double> closes) {
    if (closes.size() < 2) {
        throw InsufficientHistoryError("simple_returns needs at least 2 closes");
    }
    std::vector<double> out(closes.size() - 1);
    for (std::size_t t = 1; t < closes.size(); ++t) {
        if (closes[t - 1] == 0.0) {
            throw DomainError(fmt::format("zero close at position {}", t - 1));
        }
        out[t - 1] = closes[t] / closes[t - 1] - 1.0;
    }
    return out;
}

std::vector<double> simple_returns(const PriceSeries& series) {
    const auto closes = series.closes();
    return simple_returns(closes);
}

double monthly_range(const PriceSeries& series, const YearMonth& month) {
    double hi = -std::numeric_limits<double>::infinity();
    double lo = std::numeric_limits<double>::infinity();
    double close_sum = 0.0;
    std::size_t n = 0;
    for (const auto& b : series.bars) {
        if (year_month_of(b.date) != month) continue;
        hi = std::max(hi, b.high);
        lo = std::min(lo, b.low);
        close_sum += b.close;
        ++n;
    }
    if (n == 0) {
        throw InvalidArgument(fmt::format("no bars for {} in {}", series.symbol,
                                          format_year_month(month)));
    }
    return (hi - lo) / (close_sum / static_cast<double>(n));
}

MarketData::MarketData(TradingCalendar calendar, SeriesMap series, std::string benchmark)
    : calendar_(std::move(calendar)), series_(std::move(series)) {
    if (!series_.contains(benchmark)) {
        throw ValidationError(fmt::format("benchmark {} not present in data", benchmark));
    }
    align_to_calendar(series_, calendar_);
    universe_.benchmark = std::move(benchmark);
    for (const auto& [symbol, s] : series_) {
        if (symbol != universe_.benchmark) universe_.symbols.push_back(symbol);
        std::vector<std::int32_t> pos(calendar_.size(), -1);
        std::size_t t = 0;
        for (std::size_t k = 0; k < s.bars.size(); ++k) {
            while (calendar_[t] != s.bars[k].date) ++t;
            pos[t] = static_cast<std::int32_t>(k);
        }
        positions_.emplace(symbol, std::move(pos));
    }
    universe_.validate();
}

MarketData MarketData::load(const std::filesystem::path& path, const std::string& benchmark) {
    SeriesMap series = read_ohlcv_csv(path);
    auto it = series.find(benchmark);
    if (it == series.end()) {
        throw ValidationError(
            fmt::format("benchmark {} not present in '{}'", benchmark, path.string()));
    }
    TradingCalendar calendar = TradingCalendar::from_series(it->second);
    return MarketData(std::move(calendar), std::move(series), benchmark);
}

const PriceSeries& MarketData::series(const std::string& symbol) const {
    auto it = series_.find(symbol);
    if (it == series_.end()) throw InvalidArgument(fmt::format("unknown symbol {}", symbol));
    return it->second;
}

void MarketData::restrict_universe(const std::vector<std::string>& symbols) {
    Universe u;
    u.benchmark = universe_.benchmark;
    for (const auto& s : symbols) {
        if (!series_.contains(s)) throw ValidationError(fmt::format("symbol {} not in data", s));
        u.symbols.push_back(s);
    }
    std::sort(u.symbols.begin(), u.symbols.end());
    u.symbols.erase(std::unique(u.symbols.begin(), u.symbols.end()), u.symbols.end());
    u.validate();
    universe_ = std::move(u);
}

std::optional<double> MarketData::close(const std::string& symbol, std::size_t t) const {
    auto it = positions_.find(symbol);
    if (it == positions_.end() || t >= calendar_.size() || it->second[t] < 0) return std::nullopt;
    return series_.at(symbol).bars[static_cast<std::size_t>(it->second[t])].close;
}

std::span<const Bar> MarketData::window(const std::string& symbol, std::size_t t,
                                        std::size_t length) const {
    auto it = positions_.find(symbol);
    if (it == positions_.end() || length == 0 || t >= calendar_.size() || t + 1 < length) {
        return {};
    }
    const auto& pos = it->second;
    const auto end = pos[t];
    const auto begin = pos[t + 1 - length];
    if (end < 0 || begin < 0 || static_cast<std::size_t>(end - begin) != length - 1) return {};
    const auto& bars = series_.at(symbol).bars;
    return std::span<const Bar>(bars).subspan(static_cast<std::size_t>(begin), length);
}

}  // namespace smartbeta
