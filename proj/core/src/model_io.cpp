#include "funcreg/model_io.hpp"

#include <fstream>

#include <json.hpp>

#include "funcreg/csv.hpp"

namespace funcreg {

namespace {

using nlohmann::json;

json matrix_to_json(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

Eigen::MatrixXd matrix_from_json(const json& rows) {
    if (!rows.is_array() || rows.empty() || !rows[0].is_array())
        throw InvalidInput("model file: expected an array of rows");
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()),
                      static_cast<Eigen::Index>(rows[0].size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != rows[0].size())
            throw InvalidInput("model file: ragged matrix rows");
        for (std::size_t j = 0; j < rows[i].size(); ++j)
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                rows[i][j].get<double>();
    }
    return m;
}

json vector_to_json(const Eigen::VectorXd& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
    return out;
}

Eigen::VectorXd vector_from_json(const json& arr) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(arr.size()));
    for (std::size_t i = 0; i < arr.size(); ++i)
        v(static_cast<Eigen::Index>(i)) = arr[i].get<double>();
    return v;
}

Grid grid_from_json(const json& arr) {
    std::vector<double> pts;
    for (const auto& v : arr) pts.push_back(v.get<double>());
    return Grid(std::move(pts));
}

} // namespace

std::string model_to_json(const AnyModel& model) {
    json doc;
    doc["format_version"] = 1;
    std::visit(
        [&](const auto& m) {
            using M = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<M, RkhsModel>) {
                doc["estimator"] = m.variant() == PenaltyVariant::standard
                                       ? "rkhs"
                                       : "rkhs-mod";
                doc["variant"] = m.variant() == PenaltyVariant::standard
                                     ? "standard"
                                     : "modified";
                doc["sigma"] = m.sigma();
                doc["sigma_prime"] = m.sigma_prime();
                doc["lambda"] = m.lambda();
                doc["grid"] = json(m.train_x().grid().points());
                doc["train_x"] = matrix_to_json(m.train_x().values());
                doc["B"] = matrix_to_json(m.coefficients());
            } else if constexpr (std::is_same_v<M, NwModel>) {
                doc["estimator"] = "nw";
                doc["bandwidth"] = m.bandwidth();
                doc["grid"] = json(m.train_x().grid().points());
                doc["train_x"] = matrix_to_json(m.train_x().values());
                doc["train_y"] = matrix_to_json(m.train_y().values());
            } else {
                doc["estimator"] = "linear";
                doc["penalty_lambda"] = m.penalty_lambda();
                doc["order"] = m.basis().order();
                doc["breakpoints"] = json(m.basis().breakpoints());
                doc["grid"] = json(m.grid().points());
                doc["alpha_coeffs"] = vector_to_json(m.alpha_coeffs());
                doc["beta_coeffs"] = matrix_to_json(m.beta_coeffs());
            }
        },
        model);
    return doc.dump(2);
}

AnyModel model_from_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw InvalidInput(std::string("model file is not valid JSON: ") + e.what());
    }
    try {
        if (doc.at("format_version").get<int>() != 1)
            throw InvalidInput("unsupported model format_version");
        const std::string estimator = doc.at("estimator").get<std::string>();
        Grid grid = grid_from_json(doc.at("grid"));
        if (estimator == "rkhs" || estimator == "rkhs-mod") {
            CurveSet train_x(grid, matrix_from_json(doc.at("train_x")));
            return RkhsModel(std::move(train_x), matrix_from_json(doc.at("B")),
                             doc.at("sigma").get<double>(),
                             doc.at("sigma_prime").get<double>(),
                             doc.at("lambda").get<double>(),
                             estimator == "rkhs" ? PenaltyVariant::standard
                                                 : PenaltyVariant::modified);
        }
        if (estimator == "nw") {
            CurveSet train_x(grid, matrix_from_json(doc.at("train_x")));
            CurveSet train_y(grid, matrix_from_json(doc.at("train_y")));
            return NwModel(std::move(train_x), std::move(train_y),
                           doc.at("bandwidth").get<double>());
        }
        if (estimator == "linear") {
            std::vector<double> bp;
            for (const auto& v : doc.at("breakpoints")) bp.push_back(v.get<double>());
            BsplineBasis basis(doc.at("order").get<int>(), std::move(bp));
            return LinearModel(std::move(basis), std::move(grid),
                               vector_from_json(doc.at("alpha_coeffs")),
                               matrix_from_json(doc.at("beta_coeffs")),
                               doc.at("penalty_lambda").get<double>());
        }
        throw InvalidInput("unknown estimator '" + estimator + "' in model file");
    } catch (const json::exception& e) {
        throw InvalidInput(std::string("malformed model file: ") + e.what());
    }
}

void save_model(const AnyModel& model, const std::string& path) {
    write_file_atomic(path, model_to_json(model) + "\n");
}

AnyModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open " + path);
    std::string text((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
    return model_from_json(text);
}

Curve predict_any(const AnyModel& model, const Curve& x_new) {
    return std::visit([&](const auto& m) { return m.predict(x_new); }, model);
}

CurveSet predict_any(const AnyModel& model, const CurveSet& xs_new) {
    return std::visit([&](const auto& m) { return m.predict(xs_new); }, model);
}

const Grid& model_grid(const AnyModel& model) {
    return std::visit(
        [](const auto& m) -> const Grid& {
            using M = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<M, LinearModel>)
                return m.grid();
            else
                return m.train_x().grid();
        },
        model);
}

} // namespace funcreg
