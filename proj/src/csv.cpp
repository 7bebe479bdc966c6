#include "swarmstat/csv.hpp"

#include <cctype>
#include <cerrno>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "swarmstat/errors.hpp"

namespace swarmstat::csv {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) cells.push_back(trim(cell));
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

} // namespace

std::size_t Table::column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return i;
    throw DomainError("csv: no column named '" + name + "'");
}

Table parse(const std::string& text, bool has_header) {
    Table t;
    std::istringstream in(text);
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        if (trim(line)[0] == '#') continue;
        auto cells = split_line(line);
        if (first && has_header) {
            t.header = std::move(cells);
        } else {
            t.rows.push_back(std::move(cells));
        }
        first = false;
    }
    return t;
}

Table read_file(const std::string& path, bool has_header) {
    std::ifstream in(path);
    if (!in) throw DomainError("csv: cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str(), has_header);
}

std::optional<double> to_number(const std::string& cell) {
    if (cell.empty() || cell == "NA" || cell == "na" || cell == "nan") return std::nullopt;
    try {
        std::size_t pos = 0;
        const double v = std::stod(cell, &pos);
        if (pos != cell.size()) throw DomainError("csv: malformed number '" + cell + "'");
        return v;
    } catch (const std::invalid_argument&) {
        throw DomainError("csv: malformed number '" + cell + "'");
    }
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_file_atomic(const std::string& path, const std::string& text) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::trunc);
        if (!out) throw DomainError("cannot write " + tmp);
        out << text;
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw DomainError("cannot rename " + tmp + " to " + path + ": " +
                          std::strerror(errno));
}

} // namespace swarmstat::csv
