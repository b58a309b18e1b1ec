#ifndef FUNCREG_RKHS_HPP
#define FUNCREG_RKHS_HPP

#include <Eigen/Dense>
#include <vector>

#include "funcreg/curve.hpp"
#include "funcreg/kernel.hpp"

namespace funcreg {

enum class PenaltyVariant { standard, modified };

/// Fitted curve-on-curve estimator. Immutable; predictions are pure.
class RkhsModel {
public:
    RkhsModel(CurveSet train_x, Eigen::MatrixXd coefficients, double sigma,
              double sigma_prime, double lambda, PenaltyVariant variant);

    const CurveSet& train_x() const { return train_x_; }
    const Eigen::MatrixXd& coefficients() const { return coefficients_; } // n x T
    double sigma() const { return sigma_; }
    double sigma_prime() const { return sigma_prime_; }
    double lambda() const { return lambda_; }
    PenaltyVariant variant() const { return variant_; }

    /// yhat(t_m) = sum_i a(||x_i - x||) sum_l b_il k(t_l, t_m).
    Curve predict(const Curve& x_new) const;
    CurveSet predict(const CurveSet& xs_new) const;

private:
    CurveSet train_x_;
    Eigen::MatrixXd coefficients_;
    double sigma_, sigma_prime_, lambda_;
    PenaltyVariant variant_;
    Eigen::MatrixXd coef_times_grid_gram_; // B*K, cached for prediction
};

/// Precomputes the eigen-structure of the Gram pair so that repeated
/// lambda solves (GCV scans, validation searches) cost O(nT) each.
///
/// standard: solves A B K + lambda B = Y, i.e. [K (x) A + lambda I] vec(B) = vec(Y).
/// modified: solves A^2 B K + lambda B = A Y (unit-diagonal Gaussian Gram,
///           so the penalty weight matrix D is the identity).
class RkhsSolver {
public:
    RkhsSolver(CurveSet xs, CurveSet ys, double sigma, double sigma_prime,
               PenaltyVariant variant = PenaltyVariant::standard);

    RkhsModel fit(double lambda) const;

    /// Fitted values A B(lambda) K without materializing a model.
    Eigen::MatrixXd fitted_values(double lambda) const;

    /// V(lambda) = (1/N)||(I - A(lambda)) y||^2 / [(1/N) Tr(I - A(lambda))]^2
    /// with y = vec(Y) and N = nT. A(lambda) is the variant's own influence
    /// matrix; both variants are diagonal in the shared eigenbasis.
    double gcv_score(double lambda) const;

    const CurveSet& train_x() const { return xs_; }
    const CurveSet& train_y() const { return ys_; }
    const GramPair& grams() const { return grams_; }

private:
    Eigen::MatrixXd solve_rotated(const Eigen::MatrixXd& rhs, double lambda) const;
    Eigen::MatrixXd coefficients(double lambda) const;

    CurveSet xs_, ys_;
    double sigma_, sigma_prime_;
    PenaltyVariant variant_;
    GramPair grams_;
    Eigen::MatrixXd cov_vecs_, grid_vecs_;   // eigenvectors of A and K
    Eigen::VectorXd cov_vals_, grid_vals_;   // eigenvalues of A and K
    Eigen::MatrixXd rotated_y_;              // U_A^T Y U_K
};

RkhsModel fit(const CurveSet& xs, const CurveSet& ys, double sigma,
              double sigma_prime, double lambda,
              PenaltyVariant variant = PenaltyVariant::standard);

/// The penalized objective both variants minimize, evaluated at a coefficient
/// candidate: Tr((Y-ABK)(Y-ABK)^T) + lambda * penalty(B). Used by tests.
double objective(const Eigen::MatrixXd& y, const Eigen::MatrixXd& cov_gram,
                 const Eigen::MatrixXd& grid_gram, const Eigen::MatrixXd& b,
                 double lambda, PenaltyVariant variant);

/// Dense influence matrix A(lambda) = (K (x) A)[K (x) A + lambda I]^{-1}.
/// Intended for small instances; the solver's gcv_score avoids forming it.
Eigen::MatrixXd influence_matrix(const CurveSet& xs, double sigma,
                                 double sigma_prime, double lambda);

double gcv_score(const CurveSet& xs, const CurveSet& ys, double sigma,
                 double sigma_prime, double lambda);

struct GcvCurve {
    std::vector<double> lambdas;
    std::vector<double> scores;
    int argmin_index = 0;
};

/// Evaluates gcv_score over a strictly increasing positive grid.
/// Per-point failures become +inf scores; throws only if all points fail.
GcvCurve gcv_select(const CurveSet& xs, const CurveSet& ys, double sigma,
                    double sigma_prime, const std::vector<double>& lambda_grid,
                    PenaltyVariant variant = PenaltyVariant::standard);

/// Default 25-point log-spaced lambda grid on [1e-4, 1e3].
std::vector<double> log_lambda_grid(double lo = 1e-4, double hi = 1e3,
                                    int count = 25);

} // namespace funcreg

#endif
