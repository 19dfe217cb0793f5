#pragma once

#include <chrono>
#include <string>
#include <string_view>

namespace smartbeta {

using Date = std::chrono::year_month_day;
using YearMonth = std::chrono::year_month;

/// Parses a strict ISO-8601 `YYYY-MM-DD`. Throws InvalidArgument.
Date parse_date(std::string_view text);

std::string format_date(const Date& date);
std::string format_year_month(const YearMonth& ym);

inline YearMonth year_month_of(const Date& date) { return {date.year(), date.month()}; }

/// Signed month difference `a - b`.
int months_between(const YearMonth& a, const YearMonth& b);

bool is_weekday(const Date& date);

}  // namespace smartbeta
