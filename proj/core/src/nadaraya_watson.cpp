#include "funcreg/nadaraya_watson.hpp"

#include <cmath>
#include <limits>

namespace funcreg {

NwModel::NwModel(CurveSet train_x, CurveSet train_y, double bandwidth)
    : train_x_(std::move(train_x)), train_y_(std::move(train_y)), bandwidth_(bandwidth) {
    if (train_x_.size() != train_y_.size())
        throw InvalidInput("training sets must have equal size");
    if (!(train_x_.grid() == train_y_.grid()))
        throw InvalidInput("training sets must share a grid");
    if (!(bandwidth_ > 0.0)) throw InvalidInput("bandwidth must be positive");
}

Eigen::VectorXd NwModel::weights(const Curve& x_new) const {
    if (!(x_new.grid() == train_x_.grid()))
        throw InvalidInput("predict: curve is not on the training grid");
    const int n = train_x_.size();
    Eigen::VectorXd dist_sq(n);
    for (int i = 0; i < n; ++i) {
        const double d = l2_distance(train_x_.curve(i), x_new);
        dist_sq(i) = d * d;
    }
    const double shift = dist_sq.minCoeff();
    Eigen::VectorXd w =
        ((shift - dist_sq.array()) / (2.0 * bandwidth_ * bandwidth_)).exp();
    const double total = w.sum();
    if (!(total > 1e-300))
        throw NumericalError("all kernel weights underflowed; use a larger bandwidth");
    return w / total;
}

Curve NwModel::predict(const Curve& x_new) const {
    const Eigen::VectorXd w = weights(x_new);
    return Curve(train_y_.grid(), (w.transpose() * train_y_.values()).transpose());
}

CurveSet NwModel::predict(const CurveSet& xs_new) const {
    std::vector<Curve> rows;
    rows.reserve(static_cast<std::size_t>(xs_new.size()));
    for (int i = 0; i < xs_new.size(); ++i) rows.push_back(predict(xs_new.curve(i)));
    return CurveSet::from_curves(rows);
}

double nw_bandwidth_search(const CurveSet& train_x, const CurveSet& train_y,
                           const CurveSet& valid_x, const CurveSet& valid_y,
                           const std::vector<double>& h_grid) {
    if (h_grid.empty()) throw InvalidInput("bandwidth grid must be nonempty");
    double best_h = 0.0;
    double best_mse = std::numeric_limits<double>::infinity();
    bool any_ok = false;
    for (double h : h_grid) {
        if (!(h > 0.0)) throw InvalidInput("bandwidth grid values must be positive");
        try {
            const NwModel model(train_x, train_y, h);
            const double mse = mean_squared_error(model.predict(valid_x), valid_y);
            any_ok = true;
            if (mse < best_mse) {
                best_mse = mse;
                best_h = h;
            }
        } catch (const NumericalError&) {
            continue;
        }
    }
    if (!any_ok)
        throw NumericalError("every bandwidth in the grid underflowed");
    return best_h;
}

double mean_squared_error(const CurveSet& predicted, const CurveSet& target) {
    if (predicted.size() != target.size() || !(predicted.grid() == target.grid()))
        throw InvalidInput("mean_squared_error: shape mismatch");
    return (predicted.values() - target.values()).squaredNorm() /
           (static_cast<double>(predicted.size()) * predicted.grid().size());
}

} // namespace funcreg
