#ifndef FUNCREG_CURVE_HPP
#define FUNCREG_CURVE_HPP

#include <Eigen/Dense>
#include <vector>

#include "funcreg/errors.hpp"

namespace funcreg {

/// Equispaced sampling grid on [0,1]. Immutable after construction.
class Grid {
public:
    /// Validates: T >= 2, strictly increasing, endpoints 0 and 1,
    /// equispaced within 1e-12 of 1/(T-1).
    explicit Grid(std::vector<double> points);

    /// t_l = l/(T-1) for l = 0..T-1.
    static Grid equispaced(int size);

    int size() const { return static_cast<int>(points_.size()); }
    double operator[](int l) const { return points_[static_cast<std::size_t>(l)]; }
    double spacing() const { return 1.0 / (size() - 1); }
    const std::vector<double>& points() const { return points_; }

    bool operator==(const Grid& other) const { return points_ == other.points_; }

private:
    std::vector<double> points_;
};

/// One sampled function on a grid.
class Curve {
public:
    Curve(Grid grid, Eigen::VectorXd values);

    const Grid& grid() const { return grid_; }
    const Eigen::VectorXd& values() const { return values_; }
    int size() const { return static_cast<int>(values_.size()); }

private:
    Grid grid_;
    Eigen::VectorXd values_;
};

/// n curves sharing one grid; values stored as an n x T matrix.
class CurveSet {
public:
    CurveSet(Grid grid, Eigen::MatrixXd values);

    static CurveSet from_curves(const std::vector<Curve>& curves);

    const Grid& grid() const { return grid_; }
    const Eigen::MatrixXd& values() const { return values_; }
    int size() const { return static_cast<int>(values_.rows()); }
    Curve curve(int i) const { return Curve(grid_, values_.row(i).transpose()); }

private:
    Grid grid_;
    Eigen::MatrixXd values_;
};

/// Composite trapezoid rule on the grid. Exact for affine integrands.
double trapezoid_integral(const Eigen::VectorXd& values, const Grid& grid);

/// Trapezoid approximation of the integral of c(t)^2 over [0,1].
double l2_norm_sq(const Curve& c);

/// ||c1 - c2||_2; throws InvalidInput on grid mismatch.
double l2_distance(const Curve& c1, const Curve& c2);

} // namespace funcreg

#endif
