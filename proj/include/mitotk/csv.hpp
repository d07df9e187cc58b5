#pragma once

#include <string>
#include <vector>

namespace mitotk {

// Minimal CSV: comma separated, no quoting, first row is the header.
// Cells are trimmed of surrounding whitespace and trailing \r; blank lines
// are skipped. Good enough for the manifests and tables this tool emits.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    // Column index for a header name; throws Error when absent.
    std::size_t col(const std::string& name) const;
};

CsvTable read_csv(const std::string& path);
CsvTable parse_csv(const std::string& text, const std::string& origin = "<memory>");

void write_csv(const std::string& path, const CsvTable& table);
std::string csv_to_string(const CsvTable& table);

} // namespace mitotk
