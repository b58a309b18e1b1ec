#ifndef FUNCREG_MODEL_IO_HPP
#define FUNCREG_MODEL_IO_HPP

#include <string>
#include <variant>

#include "funcreg/linear_model.hpp"
#include "funcreg/nadaraya_watson.hpp"
#include "funcreg/rkhs.hpp"

namespace funcreg {

using AnyModel = std::variant<RkhsModel, NwModel, LinearModel>;

/// JSON documents with format_version 1 and an `estimator` discriminator
/// (rkhs, rkhs-mod, nw, linear). Doubles round-trip losslessly.
std::string model_to_json(const AnyModel& model);
AnyModel model_from_json(const std::string& text);

void save_model(const AnyModel& model, const std::string& path);
AnyModel load_model(const std::string& path);

Curve predict_any(const AnyModel& model, const Curve& x_new);
CurveSet predict_any(const AnyModel& model, const CurveSet& xs_new);
const Grid& model_grid(const AnyModel& model);

} // namespace funcreg

#endif
