#pragma once

// Minimal reader for the project's headered, comma-separated data files.
// `#` starts a comment line; blank lines are skipped. No quoting.

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace hmts::csv {

struct Row {
    std::size_t line;
    std::vector<std::string> fields;
};

/// Splits `text` into rows and checks the header matches `expected_header` exactly.
/// Throws ParseError on an empty file, a header mismatch or a wrong field count.
std::vector<Row> read(std::string_view text, std::string_view expected_header, const std::string& source);

std::string slurp(const std::filesystem::path& path);

double parse_double(const std::string& field, std::size_t line, const std::string& source);

std::string trim(std::string_view s);

} // namespace hmts::csv
