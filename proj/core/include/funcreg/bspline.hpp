#ifndef FUNCREG_BSPLINE_HPP
#define FUNCREG_BSPLINE_HPP

#include <Eigen/Dense>
#include <vector>

#include "funcreg/errors.hpp"

namespace funcreg {

/// Clamped B-spline basis on [0,1] (Cox-de Boor recursion).
/// count = order + number of interior breakpoints.
class BsplineBasis {
public:
    BsplineBasis(int order, std::vector<double> breakpoints);

    /// Order-4 basis with `num_breakpoints` equispaced breakpoints
    /// including both endpoints.
    static BsplineBasis cubic(int num_breakpoints);

    int order() const { return order_; }
    int size() const { return count_; }
    const std::vector<double>& breakpoints() const { return breakpoints_; }

    /// All basis values at t; nonnegative, sum to 1, at most `order` nonzero.
    Eigen::VectorXd evaluate(double t) const;
    Eigen::VectorXd evaluate_second_derivative(double t) const;

    /// Integral of B(t) B(t)^T over [0,1] (Gauss-Legendre, exact).
    Eigen::MatrixXd gram() const;
    /// Integral of B''(t) B''(t)^T over [0,1].
    Eigen::MatrixXd second_derivative_gram() const;

private:
    Eigen::VectorXd basis_of_order(double t, int ord) const;

    int order_;
    std::vector<double> breakpoints_;
    std::vector<double> knots_;
    int count_;
};

} // namespace funcreg

#endif
