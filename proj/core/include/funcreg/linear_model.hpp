#ifndef FUNCREG_LINEAR_MODEL_HPP
#define FUNCREG_LINEAR_MODEL_HPP

#include <Eigen/Dense>

#include "funcreg/bspline.hpp"
#include "funcreg/curve.hpp"

namespace funcreg {

/// Integral linear model y(t) = alpha(t) + int_0^1 beta(s,t) x(s) ds with
/// alpha(t) = sum_p d_p B_p(t) and beta(s,t) = sum_pq c_pq B_p(s) B_q(t).
class LinearModel {
public:
    LinearModel(BsplineBasis basis, Grid grid, Eigen::VectorXd alpha_coeffs,
                Eigen::MatrixXd beta_coeffs, double penalty_lambda);

    const BsplineBasis& basis() const { return basis_; }
    const Grid& grid() const { return grid_; }
    const Eigen::VectorXd& alpha_coeffs() const { return alpha_coeffs_; }
    const Eigen::MatrixXd& beta_coeffs() const { return beta_coeffs_; }
    double penalty_lambda() const { return penalty_lambda_; }

    Curve predict(const Curve& x_new) const;
    CurveSet predict(const CurveSet& xs_new) const;

private:
    BsplineBasis basis_;
    Grid grid_;
    Eigen::VectorXd alpha_coeffs_;
    Eigen::MatrixXd beta_coeffs_;
    double penalty_lambda_;
    Eigen::MatrixXd basis_at_grid_; // T x m, cached
};

/// Penalized least squares over (alpha, beta) coefficients. The roughness
/// penalty is the additive form int int (beta_ss)^2 + int int (beta_tt)^2,
/// applied to beta only.
LinearModel linear_fit(const CurveSet& xs, const CurveSet& ys,
                       const BsplineBasis& basis, double penalty_lambda);

/// The fit objective at a coefficient candidate; used by tests.
double linear_objective(const CurveSet& xs, const CurveSet& ys,
                        const BsplineBasis& basis,
                        const Eigen::VectorXd& alpha_coeffs,
                        const Eigen::MatrixXd& beta_coeffs,
                        double penalty_lambda);

} // namespace funcreg

#endif
