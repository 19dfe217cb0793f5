#include "smartbeta/date.hpp"

#include <charconv>

#include <fmt/format.h>

#include "smartbeta/errors.hpp"

namespace smartbeta {

namespace {

int parse_digits(std::string_view text, std::string_view whole) {
    int value = 0;
    for (char c : text) {
        if (c < '0' || c > '9') {
            throw InvalidArgument(fmt::format("invalid date '{}'", whole));
        }
        value = value * 10 + (c - '0');
    }
    return value;
}

}  // namespace

Date parse_date(std::string_view text) {
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') {
        throw InvalidArgument(fmt::format("invalid date '{}', expected YYYY-MM-DD", text));
    }
    const int y = parse_digits(text.substr(0, 4), text);
    const int m = parse_digits(text.substr(5, 2), text);
    const int d = parse_digits(text.substr(8, 2), text);
    const Date date{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(m)},
                    std::chrono::day{static_cast<unsigned>(d)}};
    if (!date.ok()) {
        throw InvalidArgument(fmt::format("invalid calendar date '{}'", text));
    }
    return date;
}

std::string format_date(const Date& date) {
    return fmt::format("{:04d}-{:02d}-{:02d}", static_cast<int>(date.year()),
                       static_cast<unsigned>(date.month()), static_cast<unsigned>(date.day()));
}

std::string format_year_month(const YearMonth& ym) {
    return fmt::format("{:04d}-{:02d}", static_cast<int>(ym.year()),
                       static_cast<unsigned>(ym.month()));
}

int months_between(const YearMonth& a, const YearMonth& b) {
    return (static_cast<int>(a.year()) - static_cast<int>(b.year())) * 12 +
           (static_cast<int>(static_cast<unsigned>(a.month())) -
            static_cast<int>(static_cast<unsigned>(b.month())));
}

bool is_weekday(const Date& date) {
    const std::chrono::weekday wd{std::chrono::sys_days{date}};
    return wd != std::chrono::Saturday && wd != std::chrono::Sunday;
}

}  // namespace smartbeta
