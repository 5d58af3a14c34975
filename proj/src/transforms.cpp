#include <array>
#include <cmath>
#include <cstdio>

#include "reckg/error.hpp"
#include "reckg/ingest.hpp"
#include "reckg/text.hpp"

namespace reckg {

namespace {

constexpr std::array<std::string_view, 12> kMonthNames{"january", "february", "march",     "april",
                                                      "may",     "june",     "july",      "august",
                                                      "september", "october", "november", "december"};

bool is_leap(int y) {
    return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
}

int days_in_month(int y, int m) {
    constexpr std::array<int, 12> days{31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    return m == 2 && is_leap(y) ? 29 : days[static_cast<std::size_t>(m - 1)];
}

std::string format_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

std::optional<int> take_digits(std::string_view& s, std::size_t min, std::size_t max) {
    std::size_t n = 0;
    while (n < s.size() && n < max && s[n] >= '0' && s[n] <= '9') ++n;
    if (n < min) return std::nullopt;
    int v = 0;
    for (std::size_t i = 0; i < n; ++i) v = v * 10 + (s[i] - '0');
    s.remove_prefix(n);
    return v;
}

std::optional<int> take_month_name(std::string_view& s, bool full) {
    for (std::size_t m = 0; m < kMonthNames.size(); ++m) {
        std::string_view name = kMonthNames[m];
        std::size_t len = full ? name.size() : 3;
        if (s.size() >= len && text::case_fold(s.substr(0, len)) == name.substr(0, len)) {
            s.remove_prefix(len);
            return static_cast<int>(m + 1);
        }
    }
    return std::nullopt;
}

}  // namespace

AgeBins AgeBins::defaults() {
    return {{18, 25, 35, 45, 50, 56}, {"<18", "18-24", "25-34", "35-44", "45-49", "50-55", "56+"}};
}

void AgeBins::validate() const {
    for (std::size_t i = 1; i < edges.size(); ++i) {
        if (edges[i] <= edges[i - 1]) throw Error(ErrorCode::BinOrderError, "age bin edges must be strictly ascending");
    }
    if (labels.size() != edges.size() + 1) {
        throw Error(ErrorCode::BinOrderError, "age bins need " + std::to_string(edges.size() + 1) + " labels, got " +
                                                  std::to_string(labels.size()));
    }
}

void PriceBins::validate() const {
    for (std::size_t i = 1; i < edges.size(); ++i) {
        if (!(edges[i] > edges[i - 1])) throw Error(ErrorCode::BinOrderError, "price bin edges must be strictly ascending");
    }
    if (!labels.empty() && labels.size() != edges.size() + 1) {
        throw Error(ErrorCode::BinOrderError, "price bins need one more label than edges");
    }
}

std::string bin_age(long long age, const AgeBins& bins) {
    if (age < 0) throw Error(ErrorCode::NegativeAge, std::to_string(age));
    std::size_t bin = 0;
    while (bin < bins.edges.size() && age >= bins.edges[bin]) ++bin;
    return bins.labels.at(bin);
}

std::string bin_price(double price, const PriceBins& bins) {
    std::size_t bin = 0;
    while (bin < bins.edges.size() && price >= bins.edges[bin]) ++bin;
    if (!bins.labels.empty()) return bins.labels.at(bin);
    if (bins.edges.empty()) return "any";
    if (bin == 0) return "<" + format_number(bins.edges.front());
    if (bin == bins.edges.size()) return format_number(bins.edges.back()) + "+";
    return format_number(bins.edges[bin - 1]) + "-" + format_number(bins.edges[bin]);
}

RatingOutcome binarize_rating(double value, const RatingRule& rule) {
    if (std::isnan(value) || value < 0.0 || value > rule.scale_max) {
        throw Error(ErrorCode::OutOfScale, format_number(value) + " outside [0, " + format_number(rule.scale_max) + "]");
    }
    bool positive = rule.inclusive ? value >= rule.threshold : value > rule.threshold;
    return positive ? RatingOutcome::Positive : RatingOutcome::Dropped;
}

std::string PartialDate::canonical() const {
    char buf[16];
    if (month && day) {
        std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", year, *month, *day);
    } else if (month) {
        std::snprintf(buf, sizeof buf, "%04d-%02d", year, *month);
    } else {
        std::snprintf(buf, sizeof buf, "%04d", year);
    }
    return buf;
}

PartialDate normalize_release_date(std::string_view raw, const DateFormat& format) {
    auto fail = [&]() -> PartialDate {
        throw Error(ErrorCode::UnparsableDate, "'" + std::string(raw) + "' does not match '" + format.pattern + "'");
    };
    std::string_view s = text::trim(raw);
    if (s.empty()) fail();

    std::optional<int> year, month, day;
    std::string_view pattern = format.pattern;
    for (std::size_t i = 0; i < pattern.size(); ++i) {
        if (pattern[i] != '%' || i + 1 == pattern.size()) {
            if (s.empty() || s.front() != pattern[i]) fail();
            s.remove_prefix(1);
            continue;
        }
        switch (pattern[++i]) {
            case 'Y': year = take_digits(s, 4, 4); if (!year) fail(); break;
            case 'm': month = take_digits(s, 1, 2); if (!month) fail(); break;
            case 'd': day = take_digits(s, 1, 2); if (!day) fail(); break;
            case 'b': month = take_month_name(s, false); if (!month) fail(); break;
            case 'B': month = take_month_name(s, true); if (!month) fail(); break;
            case '%':
                if (s.empty() || s.front() != '%') fail();
                s.remove_prefix(1);
                break;
            default: fail();
        }
    }
    if (!s.empty() || !year) fail();
    if (month && (*month < 1 || *month > 12)) fail();
    if (day && (!month || *day < 1 || *day > days_in_month(*year, *month))) fail();
    return PartialDate{*year, month, day};
}

}  // namespace reckg
