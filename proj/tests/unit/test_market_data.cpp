#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "smartbeta/errors.hpp"
#include "smartbeta/market_data.hpp"
#include "test_support.hpp"

namespace smartbeta {
namespace {

using test::fixture_path;

constexpr const char* kHeader = "date,symbol,open,high,low,close,volume\n";

SeriesMap parse(const std::string& body) {
    std::istringstream in(std::string(kHeader) + body);
    return read_ohlcv_csv(in);
}

TEST(Date, ParsesAndFormatsIsoDates) {
    const Date d = parse_date("2016-02-29");
    EXPECT_EQ(format_date(d), "2016-02-29");
    EXPECT_EQ(format_year_month(year_month_of(d)), "2016-02");
    EXPECT_THROW(parse_date("2015-02-29"), InvalidArgument);
    EXPECT_THROW(parse_date("2016-2-29"), InvalidArgument);
    EXPECT_THROW(parse_date("2016-02-29x"), InvalidArgument);
    EXPECT_EQ(months_between(year_month_of(parse_date("2017-01-15")),
                             year_month_of(parse_date("2016-11-01"))),
              2);
}

TEST(LoadCsv, ThreeRowsForOneSymbol) {
    const auto s = parse(
        "2020-01-03,AAA,10,11,9,10.5,100\n"
        "2020-01-02,AAA,10,11,9,10,100\n"
        "2020-01-06,AAA,10,11,9,10.2,100\n");
    ASSERT_EQ(s.size(), 1u);
    const auto& bars = s.at("AAA").bars;
    ASSERT_EQ(bars.size(), 3u);
    EXPECT_EQ(format_date(bars[0].date), "2020-01-02");
    EXPECT_EQ(format_date(bars[2].date), "2020-01-06");
}

TEST(LoadCsv, LowAboveHighNamesSymbolAndDate) {
    try {
        parse("2020-01-02,AAA,10,9,11,10,100\n");
        FAIL() << "expected ValidationError";
    } catch (const ValidationError& e) {
        const std::string what = e.what();
        EXPECT_NE(what.find("AAA"), std::string::npos);
        EXPECT_NE(what.find("2020-01-02"), std::string::npos);
    }
}

TEST(LoadCsv, MalformedRowReportsLineNumber) {
    try {
        parse("2020-01-02,AAA,10,11,9,10,100\n2020-01-03,AAA,10,11,9,abc,100\n");
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 3u);
    }
    EXPECT_THROW(parse("2020-01-02,AAA,10,11,9,10\n"), ParseError);
    EXPECT_THROW(parse("2020-01-02,AAA,10,11,9,10,1.5\n"), ParseError);
    std::istringstream bad_header("date,symbol,close\n");
    EXPECT_THROW(read_ohlcv_csv(bad_header), ParseError);
}

TEST(LoadCsv, DuplicateDateIsRejected) {
    EXPECT_THROW(parse("2020-01-02,AAA,10,11,9,10,100\n2020-01-02,AAA,10,11,9,10,100\n"),
                 ValidationError);
}

TEST(LoadCsv, TwoSymbolFixtureMatchesLineCountOracle) {
    const auto raw = read_ohlcv_csv(fixture_path("two_symbols.csv"));
    const auto calendar = TradingCalendar::from_series(raw.at("AAA"));
    const auto s = load_ohlcv_csv(fixture_path("two_symbols.csv"), calendar);
    ASSERT_EQ(s.size(), 2u);
    EXPECT_EQ(s.at("AAA").bars.size(), 252u);
    EXPECT_EQ(s.at("BBB").bars.size(), 252u);
}

TEST(LoadCsv, OffCalendarRowsDroppedAndGapsRecorded) {
    auto s = parse(
        "2020-01-02,AAA,10,11,9,10,100\n"
        "2020-01-04,AAA,10,11,9,10,100\n"
        "2020-01-07,AAA,10,11,9,10,100\n");
    TradingCalendar cal({parse_date("2020-01-02"), parse_date("2020-01-03"),
                         parse_date("2020-01-06"), parse_date("2020-01-07")});
    align_to_calendar(s, cal);
    const auto& series = s.at("AAA");
    ASSERT_EQ(series.bars.size(), 2u);
    ASSERT_EQ(series.gaps.size(), 2u);
    EXPECT_EQ(format_date(series.gaps[0]), "2020-01-03");
    EXPECT_EQ(format_date(series.gaps[1]), "2020-01-06");
}

TEST(LoadCsv, WriteThenReloadIsIdentical) {
    const auto original = read_ohlcv_csv(fixture_path("ledger_scenario.csv"));
    std::ostringstream out;
    write_ohlcv_csv(out, original);
    std::istringstream in(out.str());
    EXPECT_EQ(read_ohlcv_csv(in), original);
}

TEST(TradingCalendar, MonthStartsAreFirstTradingDays) {
    const auto dates = test::weekdays("2021-01-27", 30);
    const TradingCalendar cal(dates);
    ASSERT_EQ(cal.month_starts().size(), 3u);
    EXPECT_EQ(cal.month_starts()[0], 0u);
    EXPECT_EQ(format_date(cal[cal.month_starts()[1]]), "2021-02-01");
    EXPECT_EQ(format_date(cal[cal.month_starts()[2]]), "2021-03-01");
    EXPECT_TRUE(cal.is_month_start(cal.month_starts()[1]));
    EXPECT_FALSE(cal.is_month_start(1));
    EXPECT_EQ(cal.lower_bound(parse_date("2021-01-30")), 3u);
}

TEST(SimpleReturns, Examples) {
    const std::vector<double> a{100, 110};
    const auto ra = simple_returns(a);
    ASSERT_EQ(ra.size(), 1u);
    EXPECT_NEAR(ra[0], 0.10, 1e-15);

    const std::vector<double> b{100, 110, 99};
    const auto rb = simple_returns(b);
    ASSERT_EQ(rb.size(), 2u);
    EXPECT_NEAR(rb[0], 0.10, 1e-15);
    EXPECT_NEAR(rb[1], -0.10, 1e-15);

    const std::vector<double> flat(10, 42.0);
    for (double r : simple_returns(flat)) EXPECT_EQ(r, 0.0);

    const std::vector<double> zero{0.0, 1.0};
    EXPECT_THROW(simple_returns(zero), DomainError);
    const std::vector<double> one{1.0};
    EXPECT_THROW(simple_returns(one), InsufficientHistoryError);
}

TEST(SimpleReturns, CompositionRecoversTotalReturn) {
    std::vector<double> closes{100.0};
    for (int i = 1; i < 500; ++i) closes.push_back(closes.back() * (1.0 + 0.01 * std::sin(i * 0.7)));
    double growth = 1.0;
    for (double r : simple_returns(closes)) growth *= 1.0 + r;
    const double expected = closes.back() / closes.front();
    EXPECT_NEAR(growth / expected, 1.0, 1e-12);
}

PriceSeries month_series(double high, double low, const std::vector<double>& closes) {
    PriceSeries s{"X", {}, {}};
    const auto dates = test::weekdays("2021-03-01", closes.size());
    for (std::size_t i = 0; i < closes.size(); ++i) {
        s.bars.push_back({dates[i], closes[i], closes[i], closes[i], closes[i], 0});
    }
    s.bars.front().high = high;
    s.bars.back().low = low;
    return s;
}

TEST(MonthlyRange, Examples) {
    const auto ym = year_month_of(parse_date("2021-03-01"));
    const auto s = month_series(110, 90, {100, 95, 105, 100});
    EXPECT_NEAR(monthly_range(s, ym), 0.20, 1e-15);

    PriceSeries flat{"F", test::bars_from_closes(test::weekdays("2021-03-01", 5), {7, 7, 7, 7, 7}), {}};
    for (auto& b : flat.bars) b.high = b.low = b.close;
    EXPECT_EQ(monthly_range(flat, ym), 0.0);

    EXPECT_THROW(monthly_range(s, year_month_of(parse_date("2021-05-01"))), InvalidArgument);
}

TEST(MonthlyRange, ThresholdClassifiesUnstableMonth) {
    const auto ym = year_month_of(parse_date("2021-03-01"));
    EXPECT_GT(monthly_range(month_series(110, 90, {100, 100}), ym), 0.17);
    EXPECT_LT(monthly_range(month_series(108, 92, {100, 100}), ym), 0.17);
}

TEST(MonthlyRange, ScaleInvariant) {
    const auto ym = year_month_of(parse_date("2021-03-01"));
    const auto s = month_series(113.7, 88.1, {100.3, 97.2, 104.9, 101.1, 99.5});
    auto scaled = s;
    for (auto& b : scaled.bars) {
        b.open *= 3.7;
        b.high *= 3.7;
        b.low *= 3.7;
        b.close *= 3.7;
    }
    EXPECT_NEAR(monthly_range(scaled, ym), monthly_range(s, ym), 1e-12);
}

TEST(MarketData, WindowRequiresContiguousBars) {
    const auto dates = test::weekdays("2021-01-04", 10);
    SeriesMap series;
    series["IDX"] = PriceSeries{"IDX", test::bars_from_closes(dates, std::vector<double>(10, 100.0)), {}};
    auto bars = test::bars_from_closes(dates, std::vector<double>(10, 50.0));
    bars.erase(bars.begin() + 4);
    series["AAA"] = PriceSeries{"AAA", bars, {}};
    const MarketData data(TradingCalendar(dates), series, "IDX");
    EXPECT_EQ(data.window("AAA", 9, 5).size(), 5u);
    EXPECT_TRUE(data.window("AAA", 9, 6).empty());
    EXPECT_FALSE(data.close("AAA", 4).has_value());
    EXPECT_EQ(data.close("AAA", 5), 50.0);
    EXPECT_EQ(data.universe().symbols, std::vector<std::string>{"AAA"});
}

TEST(Universe, BenchmarkMustNotBeMember) {
    Universe u{{"A", "B"}, "A"};
    EXPECT_THROW(u.validate(), ValidationError);
    Universe empty{{}, "X"};
    EXPECT_THROW(empty.validate(), ValidationError);
}

}  // namespace
}  // namespace smartbeta
