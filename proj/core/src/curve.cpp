#include "funcreg/curve.hpp"

#include <cmath>

namespace funcreg {

Grid::Grid(std::vector<double> points) : points_(std::move(points)) {
    const auto T = points_.size();
    if (T < 2) throw InvalidInput("grid needs at least 2 points");
    if (points_.front() != 0.0 || points_.back() != 1.0)
        throw InvalidInput("grid must start at 0 and end at 1");
    const double step = 1.0 / static_cast<double>(T - 1);
    for (std::size_t l = 0; l + 1 < T; ++l) {
        const double d = points_[l + 1] - points_[l];
        if (d <= 0.0) throw InvalidInput("grid points must be strictly increasing");
        if (std::abs(d - step) >= 1e-12)
            throw InvalidInput("grid must be equispaced");
    }
}

Grid Grid::equispaced(int size) {
    if (size < 2) throw InvalidInput("grid needs at least 2 points");
    std::vector<double> pts(static_cast<std::size_t>(size));
    for (int l = 0; l < size; ++l)
        pts[static_cast<std::size_t>(l)] = static_cast<double>(l) / (size - 1);
    pts.front() = 0.0;
    pts.back() = 1.0;
    return Grid(std::move(pts));
}

Curve::Curve(Grid grid, Eigen::VectorXd values)
    : grid_(std::move(grid)), values_(std::move(values)) {
    if (values_.size() != grid_.size())
        throw InvalidInput("curve values length must equal grid length");
    if (!values_.allFinite())
        throw InvalidInput("curve values must be finite");
}

CurveSet::CurveSet(Grid grid, Eigen::MatrixXd values)
    : grid_(std::move(grid)), values_(std::move(values)) {
    if (values_.rows() < 1) throw InvalidInput("curve set needs at least one curve");
    if (values_.cols() != grid_.size())
        throw InvalidInput("curve set column count must equal grid length");
    if (!values_.allFinite())
        throw InvalidInput("curve set values must be finite");
}

CurveSet CurveSet::from_curves(const std::vector<Curve>& curves) {
    if (curves.empty()) throw InvalidInput("curve set needs at least one curve");
    const Grid& g = curves.front().grid();
    Eigen::MatrixXd values(static_cast<Eigen::Index>(curves.size()), g.size());
    for (std::size_t i = 0; i < curves.size(); ++i) {
        if (!(curves[i].grid() == g))
            throw InvalidInput("all curves in a set must share the same grid");
        values.row(static_cast<Eigen::Index>(i)) = curves[i].values().transpose();
    }
    return CurveSet(g, std::move(values));
}

double trapezoid_integral(const Eigen::VectorXd& values, const Grid& grid) {
    if (values.size() != grid.size())
        throw InvalidInput("trapezoid_integral: length mismatch");
    const double h = grid.spacing();
    const Eigen::Index T = values.size();
    double interior = values.segment(1, T - 2).sum();
    return h * (0.5 * (values(0) + values(T - 1)) + interior);
}

double l2_norm_sq(const Curve& c) {
    return trapezoid_integral(c.values().array().square().matrix(), c.grid());
}

double l2_distance(const Curve& c1, const Curve& c2) {
    if (!(c1.grid() == c2.grid()))
        throw InvalidInput("l2_distance: curves are on different grids");
    Eigen::VectorXd diff = c1.values() - c2.values();
    double sq = trapezoid_integral(diff.array().square().matrix(), c1.grid());
    return std::sqrt(std::max(sq, 0.0));
}

} // namespace funcreg
