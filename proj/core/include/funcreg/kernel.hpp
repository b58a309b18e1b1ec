#ifndef FUNCREG_KERNEL_HPP
#define FUNCREG_KERNEL_HPP

#include <Eigen/Dense>

#include "funcreg/curve.hpp"

namespace funcreg {

/// Gaussian kernel exp(-d^2 / (2 bw^2)) on nonnegative distances.
class ScalarKernel {
public:
    explicit ScalarKernel(double bandwidth);

    double bandwidth() const { return bandwidth_; }
    double operator()(double d) const;

private:
    double bandwidth_;
};

/// Operator-valued kernel K(x,y) = a(||x-y||_2) I. Only the scalar part
/// is stored; the identity factor is implicit.
class OperatorKernel {
public:
    explicit OperatorKernel(double bandwidth) : scalar_(bandwidth) {}

    const ScalarKernel& scalar() const { return scalar_; }
    double operator()(const Curve& x, const Curve& y) const {
        return scalar_(l2_distance(x, y));
    }

private:
    ScalarKernel scalar_;
};

/// The two Gram matrices consumed by the solver: A over covariate curves
/// (n x n) and K over grid points (T x T).
struct GramPair {
    Eigen::MatrixXd covariate; // A = {a(||x_i - x_j||)}
    Eigen::MatrixXd grid;      // K = {k(t_l, t_m)}
};

Eigen::MatrixXd covariate_gram(const CurveSet& xs, const OperatorKernel& kern);

/// Rectangular kernel matrix a(||r_i - c_j||) between two curve sets.
Eigen::MatrixXd cross_gram(const CurveSet& rows, const CurveSet& cols,
                           const OperatorKernel& kern);
Eigen::MatrixXd grid_gram(const Grid& grid, const ScalarKernel& kern);
GramPair make_grams(const CurveSet& xs, double sigma, double sigma_prime);

/// Mean of ||x_i - x_j||_2 over unordered pairs i < j.
/// Throws InvalidInput when n < 2 or all curves coincide.
double default_sigma(const CurveSet& xs);

/// Mean of |t_l - t_m| over unordered pairs l < m.
double default_sigma_prime(const Grid& grid);

/// Smallest eigenvalue of a symmetric matrix (symmetry checked to 1e-10).
double check_positive_definite(const Eigen::MatrixXd& m);

} // namespace funcreg

#endif
