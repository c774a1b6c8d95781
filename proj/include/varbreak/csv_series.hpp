#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "varbreak/armodel.hpp"

namespace varbreak {

/// A dated univariate series as exported by FRED.
struct SeriesFile {
    std::vector<std::string> dates;
    std::vector<double> values;
    Frequency frequency = Frequency::unknown;
    /// Name of the value column, e.g. "M2REAL".
    std::string source_id;
    std::size_t dropped_missing = 0;
    std::vector<std::string> warnings;

    std::size_t size() const noexcept { return values.size(); }
};

struct CsvOptions {
    /// Column names; empty selects the first (date) and second (value) column.
    std::string date_column;
    std::string value_column;
    std::vector<std::string> missing_markers{".", ""};
};

/// Parses CSV text with a header row. Missing values are dropped and counted;
/// anything else unparseable raises ParseError with the 1-based line number.
/// Dates must be strictly increasing (OrderingError otherwise).
SeriesFile parse_csv(std::string_view text, const CsvOptions& options = {});

SeriesFile load_csv(const std::filesystem::path& path, const CsvOptions& options = {});

/// Monthly or quarterly when consecutive ISO dates are consistently 1 or 3
/// months apart.
Frequency infer_frequency(const std::vector<std::string>& dates);

/// x_t - x_{t-1} applied `order` times; each pass drops the first date.
SeriesFile difference(const SeriesFile& series, int order = 1);

}  // namespace varbreak
