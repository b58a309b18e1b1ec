#include "funcreg/kernel.hpp"

#include <cmath>

namespace funcreg {

ScalarKernel::ScalarKernel(double bandwidth) : bandwidth_(bandwidth) {
    if (!(bandwidth > 0.0)) throw InvalidInput("kernel bandwidth must be positive");
}

double ScalarKernel::operator()(double d) const {
    return std::exp(-d * d / (2.0 * bandwidth_ * bandwidth_));
}

Eigen::MatrixXd covariate_gram(const CurveSet& xs, const OperatorKernel& kern) {
    const int n = xs.size();
    Eigen::MatrixXd a(n, n);
    for (int i = 0; i < n; ++i) {
        a(i, i) = 1.0;
        const Curve xi = xs.curve(i);
        for (int j = i + 1; j < n; ++j) {
            const double v = kern.scalar()(l2_distance(xi, xs.curve(j)));
            a(i, j) = v;
            a(j, i) = v;
        }
    }
    return a;
}

Eigen::MatrixXd cross_gram(const CurveSet& rows, const CurveSet& cols,
                           const OperatorKernel& kern) {
    if (!(rows.grid() == cols.grid()))
        throw InvalidInput("cross_gram: curve sets are on different grids");
    Eigen::MatrixXd out(rows.size(), cols.size());
    for (int i = 0; i < rows.size(); ++i) {
        const Curve ri = rows.curve(i);
        for (int j = 0; j < cols.size(); ++j)
            out(i, j) = kern.scalar()(l2_distance(ri, cols.curve(j)));
    }
    return out;
}

Eigen::MatrixXd grid_gram(const Grid& grid, const ScalarKernel& kern) {
    const int T = grid.size();
    Eigen::MatrixXd k(T, T);
    for (int l = 0; l < T; ++l) {
        k(l, l) = 1.0;
        for (int m = l + 1; m < T; ++m) {
            const double v = kern(std::abs(grid[l] - grid[m]));
            k(l, m) = v;
            k(m, l) = v;
        }
    }
    return k;
}

GramPair make_grams(const CurveSet& xs, double sigma, double sigma_prime) {
    return GramPair{covariate_gram(xs, OperatorKernel(sigma)),
                    grid_gram(xs.grid(), ScalarKernel(sigma_prime))};
}

double default_sigma(const CurveSet& xs) {
    const int n = xs.size();
    if (n < 2) throw InvalidInput("default_sigma needs at least 2 curves");
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
        const Curve xi = xs.curve(i);
        for (int j = i + 1; j < n; ++j) sum += l2_distance(xi, xs.curve(j));
    }
    const double mean = sum / (0.5 * n * (n - 1));
    if (mean <= 0.0)
        throw InvalidInput("all curves coincide; pass an explicit bandwidth");
    return mean;
}

double default_sigma_prime(const Grid& grid) {
    const int T = grid.size();
    double sum = 0.0;
    for (int l = 0; l < T; ++l)
        for (int m = l + 1; m < T; ++m) sum += grid[m] - grid[l];
    return sum / (0.5 * T * (T - 1));
}

double check_positive_definite(const Eigen::MatrixXd& m) {
    if (m.rows() != m.cols() || (m - m.transpose()).cwiseAbs().maxCoeff() > 1e-10)
        throw InvalidInput("check_positive_definite: matrix is not symmetric");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success)
        throw NumericalError("eigenvalue computation failed");
    return es.eigenvalues().minCoeff();
}

} // namespace funcreg
