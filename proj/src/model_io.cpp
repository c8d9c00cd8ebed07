#include "swh/model_io.hpp"

#include <cmath>

#include "swh/error.hpp"
#include "swh/text.hpp"

namespace swh {

using nlohmann::json;

namespace {

json matrix_json(const Matrix& m) {
    json data = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) data.push_back(m(r, c));
    }
    return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

json vector_json(const Vector& v) {
    json data = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) data.push_back(v(i));
    return data;
}

double finite(const json& j) {
    const double v = j.get<double>();
    if (!std::isfinite(v)) throw ParseError("model file contains a non-finite number");
    return v;
}

Matrix matrix_from(const json& j) {
    const auto rows = j.at("rows").get<Eigen::Index>();
    const auto cols = j.at("cols").get<Eigen::Index>();
    const json& data = j.at("data");
    if (rows < 0 || cols < 0 || data.size() != static_cast<std::size_t>(rows * cols)) {
        throw ParseError("matrix dimensions do not match its data");
    }
    Matrix m(rows, cols);
    std::size_t k = 0;
    for (Eigen::Index r = 0; r < rows; ++r) {
        for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = finite(data[k++]);
    }
    return m;
}

Vector vector_from(const json& j) {
    Vector v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = finite(j[i]);
    return v;
}

json feature_array(const FeatureVector& f) { return json(std::vector<double>(f.begin(), f.end())); }

FeatureVector feature_array_from(const json& j) {
    if (j.size() != kFeatureCount) throw ParseError("normalizer must have 7 entries");
    FeatureVector f{};
    for (std::size_t i = 0; i < kFeatureCount; ++i) f[i] = finite(j[i]);
    return f;
}

json params_json(const RegressorModel& m) {
    return std::visit(
        [](const auto& p) -> json {
            using P = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<P, MlfnParams>) {
                json layers = json::array();
                for (std::size_t l = 0; l < p.weights.size(); ++l) {
                    layers.push_back({{"weights", matrix_json(p.weights[l])}, {"bias", vector_json(p.biases[l])}});
                }
                return {{"layers", std::move(layers)}};
            } else if constexpr (std::is_same_v<P, GrnnParams>) {
                return {{"sigma", p.sigma}, {"train_x", matrix_json(p.train_x)}, {"train_y", vector_json(p.train_y)}};
            } else if constexpr (std::is_same_v<P, ElmParams>) {
                return {{"input_weights", matrix_json(p.input_weights)},
                        {"hidden_bias", vector_json(p.hidden_bias)},
                        {"beta", vector_json(p.beta)},
                        {"ridge", p.ridge}};
            } else {
                return {{"train_x", matrix_json(p.train_x)},
                        {"alpha", vector_json(p.alpha)},
                        {"bias", p.bias},
                        {"gamma", p.gamma},
                        {"kernel_width", p.kernel_width}};
            }
        },
        m.params);
}

void require(bool ok, const char* what) {
    if (!ok) throw ParseError(std::string("model file: ") + what);
}

MlfnParams mlfn_from(const json& j) {
    MlfnParams p;
    for (const json& layer : j.at("layers")) {
        p.weights.push_back(matrix_from(layer.at("weights")));
        p.biases.push_back(vector_from(layer.at("bias")));
    }
    require(!p.weights.empty(), "MLFN has no layers");
    require(p.weights.front().cols() == static_cast<Eigen::Index>(kFeatureCount), "MLFN input size must be 7");
    require(p.weights.back().rows() == 1, "MLFN must have one output");
    for (std::size_t l = 0; l < p.weights.size(); ++l) {
        require(p.biases[l].size() == p.weights[l].rows(), "MLFN bias size mismatch");
        if (l > 0) require(p.weights[l].cols() == p.weights[l - 1].rows(), "MLFN layer sizes do not chain");
    }
    return p;
}

GrnnParams grnn_from(const json& j) {
    GrnnParams p{matrix_from(j.at("train_x")), vector_from(j.at("train_y")), finite(j.at("sigma"))};
    require(p.sigma > 0.0, "GRNN sigma must be positive");
    require(p.train_y.size() > 0 && p.train_x.cols() == p.train_y.size(), "GRNN arrays must be equal-length and nonempty");
    require(p.train_x.rows() == static_cast<Eigen::Index>(kFeatureCount), "GRNN features must be 7-dimensional");
    return p;
}

ElmParams elm_from(const json& j) {
    ElmParams p{matrix_from(j.at("input_weights")), vector_from(j.at("hidden_bias")), vector_from(j.at("beta")),
                finite(j.at("ridge"))};
    require(p.input_weights.cols() == static_cast<Eigen::Index>(kFeatureCount), "ELM input size must be 7");
    require(p.hidden_bias.size() == p.input_weights.rows() && p.beta.size() == p.input_weights.rows(),
            "ELM hidden sizes do not match");
    return p;
}

LssvmParams lssvm_from(const json& j) {
    LssvmParams p{matrix_from(j.at("train_x")), vector_from(j.at("alpha")), finite(j.at("bias")), finite(j.at("gamma")),
                  finite(j.at("kernel_width"))};
    require(p.gamma > 0.0 && p.kernel_width > 0.0, "LS-SVM gamma and kernel width must be positive");
    require(p.alpha.size() > 0 && p.train_x.cols() == p.alpha.size(), "LS-SVM arrays must be equal-length");
    require(p.train_x.rows() == static_cast<Eigen::Index>(kFeatureCount), "LS-SVM features must be 7-dimensional");
    return p;
}

}  // namespace

std::string model_to_json(const RegressorModel& m) {
    json doc = {
        {"schema_version", kModelSchemaVersion},
        {"kind", kind_name(m.kind())},
        {"target", target_name(m.target)},
        {"normalizer", {{"mean", feature_array(m.normalizer.mean)}, {"std_dev", feature_array(m.normalizer.std_dev)}}},
        {"target_scaling", {{"mean", m.target_scaling.mean}, {"std_dev", m.target_scaling.std_dev}}},
        {"params", params_json(m)},
        {"training_meta",
         {{"seed", m.meta.seed},
          {"hyperparameters", m.meta.hyperparameters},
          {"dataset_fingerprint", m.meta.dataset_fingerprint},
          {"n_train", m.meta.n_train},
          {"warnings", m.meta.warnings}}},
    };
    return doc.dump() + "\n";
}

RegressorModel model_from_json(std::string_view text) {
    try {
        const json doc = json::parse(text);
        require(doc.at("schema_version").get<int>() == kModelSchemaVersion, "unsupported schema_version");
        RegressorModel m;
        m.target = parse_target(doc.at("target").get<std::string>());
        m.normalizer.mean = feature_array_from(doc.at("normalizer").at("mean"));
        m.normalizer.std_dev = feature_array_from(doc.at("normalizer").at("std_dev"));
        m.target_scaling.mean = finite(doc.at("target_scaling").at("mean"));
        m.target_scaling.std_dev = finite(doc.at("target_scaling").at("std_dev"));
        const json& params = doc.at("params");
        switch (parse_kind(doc.at("kind").get<std::string>())) {
            case ModelKind::mlfn: m.params = mlfn_from(params); break;
            case ModelKind::grnn: m.params = grnn_from(params); break;
            case ModelKind::elm: m.params = elm_from(params); break;
            case ModelKind::lssvm: m.params = lssvm_from(params); break;
        }
        const json& meta = doc.at("training_meta");
        m.meta.seed = meta.at("seed").get<std::uint64_t>();
        m.meta.hyperparameters = meta.at("hyperparameters");
        m.meta.dataset_fingerprint = meta.at("dataset_fingerprint").get<std::string>();
        m.meta.n_train = meta.at("n_train").get<std::size_t>();
        m.meta.warnings = meta.at("warnings").get<std::vector<std::string>>();
        return m;
    } catch (const json::exception& e) {
        throw ParseError(std::string("model file: ") + e.what());
    } catch (const ArgumentError& e) {
        throw ParseError(std::string("model file: ") + e.what());
    }
}

void save_model(const RegressorModel& m, const std::string& path) { write_file(path, model_to_json(m)); }

RegressorModel load_model(const std::string& path) { return model_from_json(read_file(path)); }

std::string model_fingerprint(const RegressorModel& m) { return to_hex64(fnv1a64(model_to_json(m))); }

}  // namespace swh
