#include "hmts/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "hmts/errors.hpp"

namespace hmts::csv {

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(first, last - first + 1));
}

namespace {

std::vector<std::string> split(std::string_view line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        const auto comma = line.find(',', start);
        out.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

} // namespace

std::vector<Row> read(std::string_view text, std::string_view expected_header, const std::string& source) {
    const auto header_fields = split(expected_header);
    std::vector<Row> rows;
    bool have_header = false;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        const std::string line = trim(text.substr(pos, nl - pos));
        ++line_no;
        pos = nl + 1;
        if (line.empty() || line.front() == '#') continue;

        auto fields = split(line);
        if (!have_header) {
            if (fields != header_fields)
                throw ParseError(source, line_no, "expected header '" + std::string(expected_header) + "'");
            have_header = true;
            continue;
        }
        if (fields.size() != header_fields.size())
            throw ParseError(source, line_no,
                             "expected " + std::to_string(header_fields.size()) + " fields, got " +
                                 std::to_string(fields.size()));
        rows.push_back({line_no, std::move(fields)});
    }
    if (!have_header) throw ParseError(source, 0, "empty file (no header)");
    return rows;
}

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

double parse_double(const std::string& field, std::size_t line, const std::string& source) {
    double v = 0.0;
    const char* first = field.data();
    const char* last = field.data() + field.size();
    if (!field.empty() && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (field.empty() || ec != std::errc{} || ptr != last || !std::isfinite(v))
        throw ParseError(source, line, "not a number: '" + field + "'");
    return v;
}

} // namespace hmts::csv
