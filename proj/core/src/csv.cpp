#include "funcreg/csv.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

namespace funcreg {

std::string format_double(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc{}) throw NumericalError("double formatting failed");
    return std::string(buf, ptr);
}

namespace {

std::vector<double> parse_row(const std::string& line, const std::string& path,
                              int row) {
    std::vector<double> values;
    std::size_t pos = 0;
    int col = 0;
    while (pos <= line.size()) {
        std::size_t comma = line.find(',', pos);
        if (comma == std::string::npos) comma = line.size();
        ++col;
        const char* begin = line.data() + pos;
        const char* end = line.data() + comma;
        while (begin != end && (*begin == ' ' || *begin == '\t')) ++begin;
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(begin, end, v);
        if (ec != std::errc{} || ptr != end)
            throw InvalidInput(path + ": non-numeric cell at row " +
                               std::to_string(row) + ", column " + std::to_string(col));
        values.push_back(v);
        pos = comma + 1;
        if (comma == line.size()) break;
    }
    return values;
}

} // namespace

CurveTable read_curve_table_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open " + path);
    std::string line;
    int row = 0;
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty() || line[0] == '#') continue;
        rows.push_back(parse_row(line, path, row));
    }
    if (rows.empty()) throw InvalidInput(path + ": missing grid row");
    Grid grid{rows[0]};
    Eigen::MatrixXd values(static_cast<Eigen::Index>(rows.size() - 1), grid.size());
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (rows[i].size() != rows[0].size())
            throw InvalidInput(path + ": row " + std::to_string(i + 1) +
                               " length differs from the grid row");
        for (int l = 0; l < grid.size(); ++l)
            values(static_cast<Eigen::Index>(i - 1), l) =
                rows[i][static_cast<std::size_t>(l)];
    }
    return CurveTable{std::move(grid), std::move(values)};
}

CurveSet read_curve_set_csv(const std::string& path) {
    CurveTable table = read_curve_table_csv(path);
    if (table.values.rows() < 1)
        throw InvalidInput(path + ": expected a grid row and at least one curve row");
    return CurveSet(std::move(table.grid), std::move(table.values));
}

std::string curve_set_to_csv(const CurveSet& set) {
    std::ostringstream out;
    const int T = set.grid().size();
    for (int l = 0; l < T; ++l) {
        if (l) out << ',';
        out << format_double(set.grid()[l]);
    }
    out << '\n';
    for (int i = 0; i < set.size(); ++i) {
        for (int l = 0; l < T; ++l) {
            if (l) out << ',';
            out << format_double(set.values()(i, l));
        }
        out << '\n';
    }
    return out.str();
}

void write_curve_set_csv(const CurveSet& set, const std::string& path) {
    write_file_atomic(path, curve_set_to_csv(set));
}

void write_file_atomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw InvalidInput("cannot write " + tmp);
        out << content;
        if (!out) throw InvalidInput("write failed for " + tmp);
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw InvalidInput("cannot rename " + tmp + " to " + path);
}

} // namespace funcreg
