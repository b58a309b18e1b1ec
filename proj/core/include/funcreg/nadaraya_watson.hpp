#ifndef FUNCREG_NADARAYA_WATSON_HPP
#define FUNCREG_NADARAYA_WATSON_HPP

#include <vector>

#include "funcreg/curve.hpp"

namespace funcreg {

/// Kernel-weighted average of training response curves.
class NwModel {
public:
    NwModel(CurveSet train_x, CurveSet train_y, double bandwidth);

    const CurveSet& train_x() const { return train_x_; }
    const CurveSet& train_y() const { return train_y_; }
    double bandwidth() const { return bandwidth_; }

    /// Convex combination with weights proportional to exp(-d_i^2 / 2h^2);
    /// the minimum squared distance is subtracted before exponentiating.
    Curve predict(const Curve& x_new) const;
    CurveSet predict(const CurveSet& xs_new) const;

    /// Normalized weights for one query; exposed for tests.
    Eigen::VectorXd weights(const Curve& x_new) const;

private:
    CurveSet train_x_, train_y_;
    double bandwidth_;
};

/// Bandwidth minimizing mean validation MSE over h_grid; ties go to the
/// first (smallest) grid point.
double nw_bandwidth_search(const CurveSet& train_x, const CurveSet& train_y,
                           const CurveSet& valid_x, const CurveSet& valid_y,
                           const std::vector<double>& h_grid);

/// Mean over curves and grid points of squared prediction error.
double mean_squared_error(const CurveSet& predicted, const CurveSet& target);

} // namespace funcreg

#endif
