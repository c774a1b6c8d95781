#include "varbreak/csv_series.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>

#include "varbreak/errors.hpp"

namespace varbreak {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') {
        s = s.substr(1, s.size() - 2);
    }
    return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        fields.push_back(trim(line.substr(start, comma - start)));
        if (comma == std::string_view::npos) {
            break;
        }
        start = comma + 1;
    }
    return fields;
}

std::size_t column_index(const std::vector<std::string_view>& header, const std::string& name,
                         std::size_t fallback) {
    if (name.empty()) {
        if (fallback >= header.size()) {
            throw ParseError("header has fewer than " + std::to_string(fallback + 1) + " columns",
                             1);
        }
        return fallback;
    }
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) {
        throw ParseError("column '" + name + "' not found in header", 1);
    }
    return static_cast<std::size_t>(it - header.begin());
}

std::optional<double> parse_number(std::string_view text) {
    double value = 0.0;
    const char* first = text.data();
    const char* last = first + text.size();
    if (first != last && *first == '+') {
        ++first;
    }
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last || !std::isfinite(value)) {
        return std::nullopt;
    }
    return value;
}

// Months since year 0 for "YYYY-MM..." dates; empty when not ISO-like.
std::optional<int> month_index(const std::string& date) {
    if (date.size() < 7 || date[4] != '-') {
        return std::nullopt;
    }
    int year = 0;
    int month = 0;
    if (std::from_chars(date.data(), date.data() + 4, year).ec != std::errc() ||
        std::from_chars(date.data() + 5, date.data() + 7, month).ec != std::errc()) {
        return std::nullopt;
    }
    return year * 12 + (month - 1);
}

}  // namespace

SeriesFile parse_csv(std::string_view text, const CsvOptions& options) {
    SeriesFile out;
    std::size_t line_number = 0;
    std::size_t date_col = 0;
    std::size_t value_col = 0;
    bool have_header = false;

    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t newline = text.find('\n', pos);
        const std::string_view raw =
            text.substr(pos, newline == std::string_view::npos ? text.size() - pos : newline - pos);
        pos = newline == std::string_view::npos ? text.size() + 1 : newline + 1;
        ++line_number;

        if (trim(raw).empty()) {
            continue;
        }
        const auto fields = split_fields(raw);
        if (!have_header) {
            date_col = column_index(fields, options.date_column, 0);
            value_col = column_index(fields, options.value_column, 1);
            out.source_id = std::string(fields[value_col]);
            have_header = true;
            continue;
        }
        if (fields.size() <= std::max(date_col, value_col)) {
            throw ParseError("line " + std::to_string(line_number) + ": expected at least " +
                                 std::to_string(std::max(date_col, value_col) + 1) + " fields",
                             line_number);
        }
        const std::string_view date = fields[date_col];
        const std::string_view value_text = fields[value_col];
        if (date.empty()) {
            throw ParseError("line " + std::to_string(line_number) + ": empty date", line_number);
        }
        if (std::find(options.missing_markers.begin(), options.missing_markers.end(),
                      value_text) != options.missing_markers.end()) {
            ++out.dropped_missing;
            continue;
        }
        const auto value = parse_number(value_text);
        if (!value) {
            throw ParseError("line " + std::to_string(line_number) + ": cannot parse value '" +
                                 std::string(value_text) + "'",
                             line_number);
        }
        if (!out.dates.empty() && !(out.dates.back() < date)) {
            throw OrderingError("line " + std::to_string(line_number) + ": date " +
                                std::string(date) + " does not follow " + out.dates.back());
        }
        out.dates.emplace_back(date);
        out.values.push_back(*value);
    }
    if (!have_header) {
        throw ParseError("missing header row", 1);
    }
    if (out.dropped_missing > 0) {
        out.warnings.push_back("dropped " + std::to_string(out.dropped_missing) +
                               " missing value(s)");
    }
    out.frequency = infer_frequency(out.dates);
    return out;
}

SeriesFile load_csv(const std::filesystem::path& path, const CsvOptions& options) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot open " + path.string());
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    const std::string text = buffer.str();
    // Skip a UTF-8 byte order mark.
    std::string_view view = text;
    if (view.substr(0, 3) == "\xEF\xBB\xBF") {
        view.remove_prefix(3);
    }
    return parse_csv(view, options);
}

Frequency infer_frequency(const std::vector<std::string>& dates) {
    if (dates.size() < 2) {
        return Frequency::unknown;
    }
    std::optional<int> step;
    for (std::size_t i = 1; i < dates.size(); ++i) {
        const auto a = month_index(dates[i - 1]);
        const auto b = month_index(dates[i]);
        if (!a || !b) {
            return Frequency::unknown;
        }
        const int gap = *b - *a;
        if (step && *step != gap) {
            return Frequency::unknown;
        }
        step = gap;
    }
    if (step == 1) {
        return Frequency::monthly;
    }
    if (step == 3) {
        return Frequency::quarterly;
    }
    return Frequency::unknown;
}

SeriesFile difference(const SeriesFile& series, int order) {
    if (order < 1) {
        throw DomainError("difference order must be at least 1");
    }
    if (series.size() <= static_cast<std::size_t>(order)) {
        throw LengthError("series of length " + std::to_string(series.size()) +
                          " too short to difference " + std::to_string(order) + " time(s)");
    }
    SeriesFile out = series;
    for (int pass = 0; pass < order; ++pass) {
        std::vector<double> diffs(out.values.size() - 1);
        for (std::size_t t = 1; t < out.values.size(); ++t) {
            diffs[t - 1] = out.values[t] - out.values[t - 1];
        }
        out.values = std::move(diffs);
        out.dates.erase(out.dates.begin());
    }
    return out;
}

}  // namespace varbreak
