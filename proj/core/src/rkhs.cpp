#include "funcreg/rkhs.hpp"

#include <cmath>
#include <limits>

namespace funcreg {

namespace {

Eigen::MatrixXd kron(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    Eigen::MatrixXd out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

void check_pair(const CurveSet& xs, const CurveSet& ys) {
    if (xs.size() != ys.size())
        throw InvalidInput("covariate and response sets must have equal size");
    if (!(xs.grid() == ys.grid()))
        throw InvalidInput("covariate and response sets must share a grid");
}

} // namespace

RkhsModel::RkhsModel(CurveSet train_x, Eigen::MatrixXd coefficients, double sigma,
                     double sigma_prime, double lambda, PenaltyVariant variant)
    : train_x_(std::move(train_x)),
      coefficients_(std::move(coefficients)),
      sigma_(sigma),
      sigma_prime_(sigma_prime),
      lambda_(lambda),
      variant_(variant) {
    if (coefficients_.rows() != train_x_.size() ||
        coefficients_.cols() != train_x_.grid().size())
        throw InvalidInput("coefficient matrix must be n x T");
    if (!(lambda_ > 0.0)) throw InvalidInput("lambda must be positive");
    if (!coefficients_.allFinite())
        throw InvalidInput("coefficients must be finite");
    coef_times_grid_gram_ =
        coefficients_ * grid_gram(train_x_.grid(), ScalarKernel(sigma_prime_));
}

Curve RkhsModel::predict(const Curve& x_new) const {
    if (!(x_new.grid() == train_x_.grid()))
        throw InvalidInput("predict: curve is not on the training grid");
    const OperatorKernel kern(sigma_);
    const int n = train_x_.size();
    Eigen::VectorXd weights(n);
    for (int i = 0; i < n; ++i) weights(i) = kern(train_x_.curve(i), x_new);
    return Curve(train_x_.grid(),
                 (weights.transpose() * coef_times_grid_gram_).transpose());
}

CurveSet RkhsModel::predict(const CurveSet& xs_new) const {
    std::vector<Curve> rows;
    rows.reserve(static_cast<std::size_t>(xs_new.size()));
    for (int i = 0; i < xs_new.size(); ++i) rows.push_back(predict(xs_new.curve(i)));
    return CurveSet::from_curves(rows);
}

RkhsSolver::RkhsSolver(CurveSet xs, CurveSet ys, double sigma, double sigma_prime,
                       PenaltyVariant variant)
    : xs_(std::move(xs)),
      ys_(std::move(ys)),
      sigma_(sigma),
      sigma_prime_(sigma_prime),
      variant_(variant),
      grams_(make_grams(xs_, sigma, sigma_prime)) {
    check_pair(xs_, ys_);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es_cov(grams_.covariate);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es_grid(grams_.grid);
    if (es_cov.info() != Eigen::Success || es_grid.info() != Eigen::Success)
        throw NumericalError("Gram eigendecomposition failed");
    cov_vecs_ = es_cov.eigenvectors();
    cov_vals_ = es_cov.eigenvalues();
    grid_vecs_ = es_grid.eigenvectors();
    grid_vals_ = es_grid.eigenvalues();
    rotated_y_ = cov_vecs_.transpose() * ys_.values() * grid_vecs_;
}

// Solves [system matrix](B) = rhs in the shared eigenbasis, where the system
// is A B K + lambda B (standard) or A^2 B K + lambda B (modified).
Eigen::MatrixXd RkhsSolver::solve_rotated(const Eigen::MatrixXd& rhs,
                                          double lambda) const {
    const int n = xs_.size();
    const int T = xs_.grid().size();
    Eigen::MatrixXd rotated = cov_vecs_.transpose() * rhs * grid_vecs_;
    for (int i = 0; i < n; ++i) {
        const double s = variant_ == PenaltyVariant::standard
                             ? cov_vals_(i)
                             : cov_vals_(i) * cov_vals_(i);
        for (int l = 0; l < T; ++l) {
            const double denom = s * grid_vals_(l) + lambda;
            if (!(std::abs(denom) > 0.0) || !std::isfinite(denom))
                throw NumericalError("singular system in rkhs fit");
            rotated(i, l) /= denom;
        }
    }
    return cov_vecs_ * rotated * grid_vecs_.transpose();
}

Eigen::MatrixXd RkhsSolver::coefficients(double lambda) const {
    if (!(lambda > 0.0)) throw InvalidInput("lambda must be positive");
    if (variant_ == PenaltyVariant::standard)
        return solve_rotated(ys_.values(), lambda);
    return solve_rotated(grams_.covariate * ys_.values(), lambda);
}

RkhsModel RkhsSolver::fit(double lambda) const {
    Eigen::MatrixXd b = coefficients(lambda);
    const bool standard = variant_ == PenaltyVariant::standard;
    const Eigen::MatrixXd rhs =
        standard ? ys_.values() : (grams_.covariate * ys_.values()).eval();
    const double rhs_norm = rhs.cwiseAbs().maxCoeff();
    auto residual = [&](const Eigen::MatrixXd& coef) -> Eigen::MatrixXd {
        if (standard)
            return grams_.covariate * coef * grams_.grid + lambda * coef - rhs;
        return grams_.covariate * grams_.covariate * coef * grams_.grid +
               lambda * coef - rhs;
    };
    // Post-condition: solved-system residual small relative to rhs. A couple of
    // refinement steps recover the digits lost in the eigen-basis rotations.
    Eigen::MatrixXd resid = residual(b);
    for (int step = 0; step < 2; ++step) {
        if (rhs_norm == 0.0 || resid.cwiseAbs().maxCoeff() < 1e-8 * rhs_norm)
            break;
        b -= solve_rotated(resid, lambda);
        resid = residual(b);
    }
    if (rhs_norm > 0.0 && resid.cwiseAbs().maxCoeff() >= 1e-8 * rhs_norm) {
        const double top = cov_vals_.maxCoeff() * grid_vals_.maxCoeff() + lambda;
        const double bottom = cov_vals_.minCoeff() * grid_vals_.minCoeff() + lambda;
        throw NumericalError("rkhs fit residual too large; condition estimate " +
                             std::to_string(top / std::max(bottom, 1e-300)));
    }
    return RkhsModel(xs_, std::move(b), sigma_, sigma_prime_, lambda, variant_);
}

Eigen::MatrixXd RkhsSolver::fitted_values(double lambda) const {
    return grams_.covariate * coefficients(lambda) * grams_.grid;
}

double RkhsSolver::gcv_score(double lambda) const {
    if (!(lambda > 0.0)) throw InvalidInput("lambda must be positive");
    const int n = xs_.size();
    const int T = xs_.grid().size();
    const double count = static_cast<double>(n) * T;
    double trace = 0.0;
    double resid_sq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double s = variant_ == PenaltyVariant::standard
                             ? cov_vals_(i)
                             : cov_vals_(i) * cov_vals_(i);
        for (int l = 0; l < T; ++l) {
            const double shrink = lambda / (s * grid_vals_(l) + lambda);
            trace += shrink;
            resid_sq += shrink * shrink * rotated_y_(i, l) * rotated_y_(i, l);
        }
    }
    if (!(trace > 1e-10 * count))
        throw NumericalError("degenerate GCV: Tr(I - A(lambda)) ~ 0");
    return (resid_sq / count) / ((trace / count) * (trace / count));
}

RkhsModel fit(const CurveSet& xs, const CurveSet& ys, double sigma,
              double sigma_prime, double lambda, PenaltyVariant variant) {
    return RkhsSolver(xs, ys, sigma, sigma_prime, variant).fit(lambda);
}

double objective(const Eigen::MatrixXd& y, const Eigen::MatrixXd& cov_gram,
                 const Eigen::MatrixXd& grid_gram, const Eigen::MatrixXd& b,
                 double lambda, PenaltyVariant variant) {
    if (b.rows() != cov_gram.rows() || b.cols() != grid_gram.rows() ||
        y.rows() != cov_gram.rows() || y.cols() != grid_gram.cols())
        throw InvalidInput("objective: dimension mismatch");
    const Eigen::MatrixXd bk = b * grid_gram;
    const double loss = (y - cov_gram * bk).squaredNorm();
    double penalty;
    if (variant == PenaltyVariant::standard) {
        penalty = (cov_gram * b).cwiseProduct(bk).sum(); // Tr(A B K B^T)
    } else {
        penalty = cov_gram.diagonal()
                      .cwiseProduct(b.cwiseProduct(bk).rowwise().sum())
                      .sum(); // Tr(D B K B^T), D = diag(A)
    }
    return loss + lambda * penalty;
}

Eigen::MatrixXd influence_matrix(const CurveSet& xs, double sigma,
                                 double sigma_prime, double lambda) {
    if (!(lambda > 0.0)) throw InvalidInput("lambda must be positive");
    const GramPair grams = make_grams(xs, sigma, sigma_prime);
    const Eigen::MatrixXd m = kron(grams.grid, grams.covariate);
    Eigen::MatrixXd shifted = m;
    shifted.diagonal().array() += lambda;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(shifted);
    if (ldlt.info() != Eigen::Success)
        throw NumericalError("influence matrix: factorization failed");
    Eigen::MatrixXd infl = ldlt.solve(m); // (M + lambda I)^{-1} M = A(lambda)
    return 0.5 * (infl + infl.transpose());
}

double gcv_score(const CurveSet& xs, const CurveSet& ys, double sigma,
                 double sigma_prime, double lambda) {
    return RkhsSolver(xs, ys, sigma, sigma_prime).gcv_score(lambda);
}

GcvCurve gcv_select(const CurveSet& xs, const CurveSet& ys, double sigma,
                    double sigma_prime, const std::vector<double>& lambda_grid,
                    PenaltyVariant variant) {
    if (lambda_grid.empty()) throw InvalidInput("lambda grid must be nonempty");
    for (std::size_t i = 0; i < lambda_grid.size(); ++i) {
        if (!(lambda_grid[i] > 0.0))
            throw InvalidInput("lambda grid values must be positive");
        if (i > 0 && !(lambda_grid[i] > lambda_grid[i - 1]))
            throw InvalidInput("lambda grid must be strictly increasing");
    }
    RkhsSolver solver(xs, ys, sigma, sigma_prime, variant);
    GcvCurve curve;
    curve.lambdas = lambda_grid;
    curve.scores.reserve(lambda_grid.size());
    bool any_ok = false;
    for (double lambda : lambda_grid) {
        double score;
        try {
            score = solver.gcv_score(lambda);
            any_ok = true;
        } catch (const NumericalError&) {
            score = std::numeric_limits<double>::infinity();
        }
        curve.scores.push_back(score);
    }
    if (!any_ok) throw NumericalError("GCV failed at every grid point");
    curve.argmin_index = 0;
    for (std::size_t i = 1; i < curve.scores.size(); ++i)
        if (curve.scores[i] < curve.scores[static_cast<std::size_t>(curve.argmin_index)])
            curve.argmin_index = static_cast<int>(i);
    return curve;
}

std::vector<double> log_lambda_grid(double lo, double hi, int count) {
    if (!(lo > 0.0) || !(hi > lo) || count < 1)
        throw InvalidInput("invalid lambda grid parameters");
    std::vector<double> grid(static_cast<std::size_t>(count));
    if (count == 1) {
        grid[0] = lo;
        return grid;
    }
    const double step = (std::log(hi) - std::log(lo)) / (count - 1);
    for (int i = 0; i < count; ++i)
        grid[static_cast<std::size_t>(i)] = std::exp(std::log(lo) + i * step);
    return grid;
}

} // namespace funcreg
