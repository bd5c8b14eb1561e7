#include "hessmfg/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace hessmfg {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << content;
    if (!out) throw std::runtime_error("short write to '" + path + "'");
}

void write_csv(const std::string& path, const std::vector<std::string>& comments,
               const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
    std::ostringstream os;
    for (const auto& c : comments) os << c << "\n";
    for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
    os << "\n";
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << fmt17(row[i]);
        os << "\n";
    }
    write_text_file(path, os.str());
}

std::vector<std::vector<double>> read_csv(const std::string& path,
                                          const std::vector<std::string>& expected_header) {
    std::ifstream in(path);
    if (!in) throw FileFormatError("cannot open CSV '" + path + "'");
    std::string line;
    bool header_seen = false;
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (!header_seen) {
            if (cells.size() != expected_header.size())
                throw FileFormatError("CSV '" + path + "': unexpected column count in header");
            for (std::size_t i = 0; i < cells.size(); ++i)
                if (cells[i] != expected_header[i])
                    throw FileFormatError("CSV '" + path + "': expected column '" +
                                          expected_header[i] + "', found '" + cells[i] + "'");
            header_seen = true;
            continue;
        }
        if (cells.size() != expected_header.size())
            throw FileFormatError("CSV '" + path + "': ragged row");
        std::vector<double> row(cells.size());
        for (std::size_t i = 0; i < cells.size(); ++i) {
            try {
                std::size_t pos = 0;
                row[i] = std::stod(cells[i], &pos);
                if (pos != cells[i].size()) throw std::invalid_argument("trailing junk");
            } catch (const std::exception&) {
                throw FileFormatError("CSV '" + path + "': non-numeric cell '" + cells[i] + "'");
            }
        }
        rows.push_back(std::move(row));
    }
    if (!header_seen) throw FileFormatError("CSV '" + path + "': missing header");
    return rows;
}

}  // namespace hessmfg
