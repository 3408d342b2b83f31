#pragma once

#include <cstdint>
#include <cstdio>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace capacity_rct {

// A named column of homogeneous values: numeric or text.
struct Column {
    std::string name;
    std::variant<std::vector<double>, std::vector<std::string>> values;

    std::size_t size() const {
        return std::visit([](const auto& v) { return v.size(); }, values);
    }
};

// Fixed formatting for reproducible diffs: 9 significant digits, '.' decimal
// separator, no grouping.
inline std::string format_number(double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.9g", value);
    return buf;
}

// Tabular output with a leading metadata block of '# key=value' lines.
struct ResultTable {
    std::map<std::string, std::string> metadata;
    std::vector<Column> columns;

    std::size_t rows() const { return columns.empty() ? 0 : columns.front().size(); }

    void check_rectangular() const {
        for (const auto& col : columns)
            if (col.size() != rows())
                throw std::logic_error("ResultTable: column '" + col.name + "' has odd length");
    }

    void write_csv(std::ostream& out) const {
        check_rectangular();
        for (const auto& [key, value] : metadata) out << "# " << key << "=" << value << "\n";
        for (std::size_t c = 0; c < columns.size(); ++c)
            out << (c ? "," : "") << columns[c].name;
        out << "\n";
        for (std::size_t r = 0; r < rows(); ++r) {
            for (std::size_t c = 0; c < columns.size(); ++c) {
                if (c) out << ",";
                std::visit(
                    [&](const auto& v) {
                        using T = std::decay_t<decltype(v)>;
                        if constexpr (std::is_same_v<T, std::vector<double>>)
                            out << format_number(v[r]);
                        else
                            out << v[r];
                    },
                    columns[c].values);
            }
            out << "\n";
        }
    }

    std::string to_csv() const {
        std::ostringstream out;
        write_csv(out);
        return out.str();
    }
};

// Parsed CSV: metadata block plus string cells (callers convert as needed).
struct ParsedTable {
    std::map<std::string, std::string> metadata;
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

inline ParsedTable parse_result_csv(std::istream& in) {
    ParsedTable table;
    std::string line;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line.front() == '#') {
            std::string body = line.substr(1);
            const std::size_t start = body.find_first_not_of(' ');
            const std::size_t eq = body.find('=');
            if (start != std::string::npos && eq != std::string::npos && eq > start)
                table.metadata[body.substr(start, eq - start)] = body.substr(eq + 1);
            continue;
        }
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream ss(line);
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (!line.empty() && line.back() == ',') cells.emplace_back();
        if (!header_seen) {
            table.header = std::move(cells);
            header_seen = true;
        } else {
            if (cells.size() != table.header.size())
                throw std::runtime_error("parse_result_csv: ragged row");
            table.rows.push_back(std::move(cells));
        }
    }
    return table;
}

// FNV-1a, used to fingerprint the resolved configuration in output metadata.
inline std::uint64_t fnv1a_hash(const std::string& text) {
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (unsigned char ch : text) {
        hash ^= ch;
        hash *= 0x100000001b3ULL;
    }
    return hash;
}

}  // namespace capacity_rct
