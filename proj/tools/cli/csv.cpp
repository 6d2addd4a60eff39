#include "csv.hpp"

#include <fstream>
#include <sstream>

namespace gqdisc_cli {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    bool quoted = false;
    for (char ch : line) {
        if (ch == '"') {
            quoted = !quoted;
        } else if (ch == ',' && !quoted) {
            out.push_back(trim(field));
            field.clear();
        } else {
            field += ch;
        }
    }
    out.push_back(trim(field));
    return out;
}

}  // namespace

std::size_t CsvTable::column(const std::string& selector) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == selector) return i;
    }
    try {
        std::size_t pos = 0;
        const unsigned long idx = std::stoul(selector, &pos);
        if (pos == selector.size() && idx < header.size()) return idx;
    } catch (const std::exception&) {
    }
    throw CsvError("no column named or indexed '" + selector + "'");
}

std::vector<double> CsvTable::numbers(std::size_t column) const {
    std::vector<double> out;
    out.reserve(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const std::string& s = column < rows[r].size() ? rows[r][column] : std::string();
        try {
            std::size_t pos = 0;
            const double v = std::stod(s, &pos);
            if (pos != s.size()) throw std::invalid_argument(s);
            out.push_back(v);
        } catch (const std::exception&) {
            throw CsvError("row " + std::to_string(r + 2) + ", column '" + header[column] + "': not a number: '" +
                           s + "'");
        }
    }
    return out;
}

CsvTable parse_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    CsvTable t;
    bool have_header = false;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        if (!have_header) {
            t.header = split_line(line);
            have_header = true;
        } else {
            t.rows.push_back(split_line(line));
        }
    }
    if (!have_header) throw CsvError("CSV input has no header row");
    return t;
}

CsvTable read_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw CsvError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse_csv(ss.str());
}

}  // namespace gqdisc_cli
