#ifndef FUNCREG_CSV_HPP
#define FUNCREG_CSV_HPP

#include <string>

#include "funcreg/curve.hpp"

namespace funcreg {

/// Shortest decimal string that round-trips to the same double.
std::string format_double(double v);

/// Curve-set CSV rows with the n >= 1 requirement relaxed (a file holding
/// only the grid row is a valid, empty table).
struct CurveTable {
    Grid grid;
    Eigen::MatrixXd values; // possibly 0 rows
};
CurveTable read_curve_table_csv(const std::string& path);

/// Curve-set CSV: row 1 = grid points, rows 2..n+1 = one curve per row.
CurveSet read_curve_set_csv(const std::string& path);
std::string curve_set_to_csv(const CurveSet& set);
void write_curve_set_csv(const CurveSet& set, const std::string& path);

/// Writes to a temporary sibling file and renames into place.
void write_file_atomic(const std::string& path, const std::string& content);

} // namespace funcreg

#endif
