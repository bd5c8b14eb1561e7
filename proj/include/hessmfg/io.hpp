#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace hessmfg {

struct FileFormatError : std::runtime_error {
    explicit FileFormatError(const std::string& what) : std::runtime_error(what) {}
};

// Shortest text that always round-trips the double exactly: %.17g.
std::string fmt17(double v);

void write_text_file(const std::string& path, const std::string& content);

// CSV with a header row and 17-significant-digit numeric cells. Optional
// comment lines (already including "# ") are emitted before the header.
void write_csv(const std::string& path, const std::vector<std::string>& comments,
               const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

// Reads a CSV written by write_csv: skips "#" comments, checks the header
// matches, parses every cell as a double. Throws FileFormatError.
std::vector<std::vector<double>> read_csv(const std::string& path,
                                          const std::vector<std::string>& expected_header);

}  // namespace hessmfg
