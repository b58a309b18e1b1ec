#include "funcreg/bspline.hpp"

#include <cmath>

namespace funcreg {

namespace {

// 4-point Gauss-Legendre on [-1,1]; exact through degree 7, enough for
// products of cubic pieces.
constexpr double kGlNode = 0.3399810435848562648;  // sqrt((3-2*sqrt(6/5))/7)
constexpr double kGlNodeOuter = 0.8611363115940525752;
constexpr double kGlWeight = 0.6521451548625461426;
constexpr double kGlWeightOuter = 0.3478548451374538574;

const double kNodes[4] = {-kGlNodeOuter, -kGlNode, kGlNode, kGlNodeOuter};
const double kWeights[4] = {kGlWeightOuter, kGlWeight, kGlWeight, kGlWeightOuter};

} // namespace

BsplineBasis::BsplineBasis(int order, std::vector<double> breakpoints)
    : order_(order), breakpoints_(std::move(breakpoints)) {
    if (order_ < 1) throw InvalidInput("B-spline order must be >= 1");
    if (breakpoints_.size() < 2 || breakpoints_.front() != 0.0 ||
        breakpoints_.back() != 1.0)
        throw InvalidInput("breakpoints must span [0,1]");
    for (std::size_t j = 0; j + 1 < breakpoints_.size(); ++j)
        if (!(breakpoints_[j] < breakpoints_[j + 1]))
            throw InvalidInput("breakpoints must be strictly increasing");

    const int interior = static_cast<int>(breakpoints_.size()) - 2;
    count_ = order_ + interior;
    knots_.assign(static_cast<std::size_t>(order_), 0.0);
    knots_.insert(knots_.end(), breakpoints_.begin() + 1, breakpoints_.end() - 1);
    knots_.insert(knots_.end(), static_cast<std::size_t>(order_), 1.0);
}

BsplineBasis BsplineBasis::cubic(int num_breakpoints) {
    if (num_breakpoints < 2) throw InvalidInput("need at least 2 breakpoints");
    std::vector<double> bp(static_cast<std::size_t>(num_breakpoints));
    for (int j = 0; j < num_breakpoints; ++j)
        bp[static_cast<std::size_t>(j)] =
            static_cast<double>(j) / (num_breakpoints - 1);
    bp.front() = 0.0;
    bp.back() = 1.0;
    return BsplineBasis(4, std::move(bp));
}

Eigen::VectorXd BsplineBasis::basis_of_order(double t, int ord) const {
    const int num_knots = static_cast<int>(knots_.size());
    // Order-1 indicators; t == 1 belongs to the last nonempty interval.
    Eigen::VectorXd cur = Eigen::VectorXd::Zero(num_knots - 1);
    for (int i = 0; i < num_knots - 1; ++i) {
        const bool inside = knots_[static_cast<std::size_t>(i)] <= t &&
                            t < knots_[static_cast<std::size_t>(i + 1)];
        const bool at_end = t == 1.0 &&
                            knots_[static_cast<std::size_t>(i)] < 1.0 &&
                            knots_[static_cast<std::size_t>(i + 1)] == 1.0;
        if (inside || at_end) cur(i) = 1.0;
    }
    for (int p = 2; p <= ord; ++p) {
        Eigen::VectorXd next = Eigen::VectorXd::Zero(num_knots - p);
        for (int i = 0; i < num_knots - p; ++i) {
            const double left_den = knots_[static_cast<std::size_t>(i + p - 1)] -
                                    knots_[static_cast<std::size_t>(i)];
            const double right_den = knots_[static_cast<std::size_t>(i + p)] -
                                     knots_[static_cast<std::size_t>(i + 1)];
            double v = 0.0;
            if (left_den > 0.0)
                v += (t - knots_[static_cast<std::size_t>(i)]) / left_den * cur(i);
            if (right_den > 0.0)
                v += (knots_[static_cast<std::size_t>(i + p)] - t) / right_den *
                     cur(i + 1);
            next(i) = v;
        }
        cur = std::move(next);
    }
    return cur;
}

Eigen::VectorXd BsplineBasis::evaluate(double t) const {
    if (t < 0.0 || t > 1.0) throw InvalidInput("B-spline evaluation needs t in [0,1]");
    return basis_of_order(t, order_);
}

Eigen::VectorXd BsplineBasis::evaluate_second_derivative(double t) const {
    if (t < 0.0 || t > 1.0) throw InvalidInput("B-spline evaluation needs t in [0,1]");
    if (order_ < 3) return Eigen::VectorXd::Zero(count_);
    const int k = order_;
    const Eigen::VectorXd low = basis_of_order(t, k - 2);
    auto knot = [&](int i) { return knots_[static_cast<std::size_t>(i)]; };
    // First derivatives of the order k-1 basis.
    Eigen::VectorXd dlow = Eigen::VectorXd::Zero(count_ + 1);
    for (int i = 0; i < count_ + 1; ++i) {
        double v = 0.0;
        const double den1 = knot(i + k - 2) - knot(i);
        const double den2 = knot(i + k - 1) - knot(i + 1);
        if (den1 > 0.0) v += low(i) / den1;
        if (den2 > 0.0) v -= low(i + 1) / den2;
        dlow(i) = (k - 2) * v;
    }
    Eigen::VectorXd out(count_);
    for (int i = 0; i < count_; ++i) {
        double v = 0.0;
        const double den1 = knot(i + k - 1) - knot(i);
        const double den2 = knot(i + k) - knot(i + 1);
        if (den1 > 0.0) v += dlow(i) / den1;
        if (den2 > 0.0) v -= dlow(i + 1) / den2;
        out(i) = (k - 1) * v;
    }
    return out;
}

Eigen::MatrixXd BsplineBasis::gram() const {
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(count_, count_);
    for (std::size_t j = 0; j + 1 < breakpoints_.size(); ++j) {
        const double a = breakpoints_[j];
        const double b = breakpoints_[j + 1];
        const double half = 0.5 * (b - a);
        const double mid = 0.5 * (a + b);
        for (int q = 0; q < 4; ++q) {
            const Eigen::VectorXd v = evaluate(mid + half * kNodes[q]);
            g += (half * kWeights[q]) * v * v.transpose();
        }
    }
    return g;
}

Eigen::MatrixXd BsplineBasis::second_derivative_gram() const {
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(count_, count_);
    for (std::size_t j = 0; j + 1 < breakpoints_.size(); ++j) {
        const double a = breakpoints_[j];
        const double b = breakpoints_[j + 1];
        const double half = 0.5 * (b - a);
        const double mid = 0.5 * (a + b);
        for (int q = 0; q < 4; ++q) {
            const Eigen::VectorXd v =
                evaluate_second_derivative(mid + half * kNodes[q]);
            g += (half * kWeights[q]) * v * v.transpose();
        }
    }
    return g;
}

} // namespace funcreg
