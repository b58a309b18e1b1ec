#include "funcreg/linear_model.hpp"

#include <cmath>

namespace funcreg {

namespace {

Eigen::MatrixXd basis_at_grid(const BsplineBasis& basis, const Grid& grid) {
    Eigen::MatrixXd phi(grid.size(), basis.size());
    for (int l = 0; l < grid.size(); ++l)
        phi.row(l) = basis.evaluate(grid[l]).transpose();
    return phi;
}

// z_ip = trapezoid integral of B_p(s) x_i(s) ds, one row per curve.
Eigen::MatrixXd basis_moments(const CurveSet& xs, const Eigen::MatrixXd& phi) {
    const int n = xs.size();
    const int m = static_cast<int>(phi.cols());
    Eigen::MatrixXd z(n, m);
    for (int i = 0; i < n; ++i)
        for (int p = 0; p < m; ++p)
            z(i, p) = trapezoid_integral(
                phi.col(p).cwiseProduct(xs.values().row(i).transpose()), xs.grid());
    return z;
}

} // namespace

LinearModel::LinearModel(BsplineBasis basis, Grid grid, Eigen::VectorXd alpha_coeffs,
                         Eigen::MatrixXd beta_coeffs, double penalty_lambda)
    : basis_(std::move(basis)),
      grid_(std::move(grid)),
      alpha_coeffs_(std::move(alpha_coeffs)),
      beta_coeffs_(std::move(beta_coeffs)),
      penalty_lambda_(penalty_lambda) {
    const int m = basis_.size();
    if (alpha_coeffs_.size() != m || beta_coeffs_.rows() != m ||
        beta_coeffs_.cols() != m)
        throw InvalidInput("coefficient dimensions must match basis size");
    if (penalty_lambda_ < 0.0) throw InvalidInput("penalty must be nonnegative");
    basis_at_grid_ = basis_at_grid(basis_, grid_);
}

Curve LinearModel::predict(const Curve& x_new) const {
    if (!(x_new.grid() == grid_))
        throw InvalidInput("predict: curve is not on the training grid");
    const int m = basis_.size();
    Eigen::VectorXd z(m);
    for (int p = 0; p < m; ++p)
        z(p) = trapezoid_integral(basis_at_grid_.col(p).cwiseProduct(x_new.values()),
                                  grid_);
    const Eigen::VectorXd yhat =
        basis_at_grid_ * (alpha_coeffs_ + beta_coeffs_.transpose() * z);
    return Curve(grid_, yhat);
}

CurveSet LinearModel::predict(const CurveSet& xs_new) const {
    std::vector<Curve> rows;
    rows.reserve(static_cast<std::size_t>(xs_new.size()));
    for (int i = 0; i < xs_new.size(); ++i) rows.push_back(predict(xs_new.curve(i)));
    return CurveSet::from_curves(rows);
}

LinearModel linear_fit(const CurveSet& xs, const CurveSet& ys,
                       const BsplineBasis& basis, double penalty_lambda) {
    if (xs.size() != ys.size() || !(xs.grid() == ys.grid()))
        throw InvalidInput("covariate and response sets must match");
    if (penalty_lambda < 0.0) throw InvalidInput("penalty must be nonnegative");
    const int n = xs.size();
    const int T = xs.grid().size();
    const int m = basis.size();
    const int dim = m + m * m;

    const Eigen::MatrixXd phi = basis_at_grid(basis, xs.grid());
    const Eigen::MatrixXd z = basis_moments(xs, phi);

    // Design rows for cell (i,l): [phi_l | kron(phi_l, z_i)], column-major vec(C).
    Eigen::MatrixXd design(n * T, dim);
    Eigen::VectorXd target(n * T);
    for (int i = 0; i < n; ++i) {
        for (int l = 0; l < T; ++l) {
            const int row = i * T + l;
            design.block(row, 0, 1, m) = phi.row(l);
            for (int q = 0; q < m; ++q)
                design.block(row, m + q * m, 1, m) = phi(l, q) * z.row(i);
            target(row) = ys.values()(i, l);
        }
    }

    Eigen::MatrixXd normal = design.transpose() * design;
    if (penalty_lambda > 0.0) {
        const Eigen::MatrixXd g = basis.gram();
        const Eigen::MatrixXd r = basis.second_derivative_gram();
        // vec(C)^T [G (x) R + R (x) G] vec(C) = intint beta_ss^2 + beta_tt^2
        for (int q = 0; q < m; ++q)
            for (int q2 = 0; q2 < m; ++q2)
                normal.block(m + q * m, m + q2 * m, m, m) +=
                    penalty_lambda * (g(q, q2) * r + r(q, q2) * g);
    }

    Eigen::LDLT<Eigen::MatrixXd> ldlt(normal);
    const Eigen::VectorXd rhs = design.transpose() * target;
    Eigen::VectorXd theta = ldlt.solve(rhs);
    if (theta.allFinite()) theta += ldlt.solve(rhs - normal * theta);
    const Eigen::VectorXd resid = normal * theta - rhs;
    const double scale = std::max(rhs.norm(), 1e-300);
    if (ldlt.info() != Eigen::Success || !theta.allFinite() ||
        resid.norm() > 1e-6 * scale)
        throw NumericalError(
            "linear model normal equations are singular; use a positive penalty");

    Eigen::VectorXd alpha = theta.head(m);
    Eigen::MatrixXd beta =
        Eigen::Map<Eigen::MatrixXd>(theta.data() + m, m, m);
    return LinearModel(basis, xs.grid(), std::move(alpha), std::move(beta),
                       penalty_lambda);
}

double linear_objective(const CurveSet& xs, const CurveSet& ys,
                        const BsplineBasis& basis,
                        const Eigen::VectorXd& alpha_coeffs,
                        const Eigen::MatrixXd& beta_coeffs,
                        double penalty_lambda) {
    const LinearModel model(basis, xs.grid(), alpha_coeffs, beta_coeffs,
                            penalty_lambda);
    const double loss =
        (model.predict(xs).values() - ys.values()).squaredNorm();
    const Eigen::MatrixXd g = basis.gram();
    const Eigen::MatrixXd r = basis.second_derivative_gram();
    const double rough =
        (beta_coeffs.transpose() * r * beta_coeffs * g).trace() +
        (beta_coeffs.transpose() * g * beta_coeffs * r).trace();
    return loss + penalty_lambda * rough;
}

} // namespace funcreg
