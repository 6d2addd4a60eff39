#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace gqdisc_cli {

struct CsvError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Header row plus rows of raw fields. Double quotes around a field are
/// stripped; embedded separators inside quotes are honoured.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    /// Index of a column selected by header name, or by a 0-based index given
    /// as text when no header matches.
    [[nodiscard]] std::size_t column(const std::string& selector) const;
    /// Numeric values of a column; throws CsvError on blanks or bad numbers.
    [[nodiscard]] std::vector<double> numbers(std::size_t column) const;
};

CsvTable read_csv(const std::string& path);
CsvTable parse_csv(const std::string& text);

}  // namespace gqdisc_cli
