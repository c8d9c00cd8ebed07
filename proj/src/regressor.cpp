#include "swh/regressor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "swh/error.hpp"
#include "swh/text.hpp"

namespace swh {

using nlohmann::json;

std::string_view kind_name(ModelKind k) {
    switch (k) {
        case ModelKind::mlfn: return "mlfn";
        case ModelKind::grnn: return "grnn";
        case ModelKind::elm: return "elm";
        case ModelKind::lssvm: return "lssvm";
    }
    return "unknown";
}

ModelKind parse_kind(std::string_view name) {
    for (ModelKind k : {ModelKind::mlfn, ModelKind::grnn, ModelKind::elm, ModelKind::lssvm}) {
        if (kind_name(k) == name) return k;
    }
    throw ArgumentError("unknown model kind '" + std::string(name) + "' (expected mlfn, grnn, elm or lssvm)");
}

Matrix normalized_feature_matrix(const Normalizer& nz, const Dataset& ds) {
    Matrix X(static_cast<Eigen::Index>(kFeatureCount), static_cast<Eigen::Index>(ds.size()));
    for (std::size_t i = 0; i < ds.size(); ++i) {
        const FeatureVector z = apply_normalizer(nz, ds[i]);
        for (std::size_t j = 0; j < kFeatureCount; ++j) {
            X(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = z[j];
        }
    }
    return X;
}

Vector target_vector(const Dataset& ds, Target t) {
    Vector y(static_cast<Eigen::Index>(ds.size()));
    for (std::size_t i = 0; i < ds.size(); ++i) {
        const auto v = ds[i].target(t);
        if (!v) {
            throw TrainingError("record " + std::to_string(i + 1) + " has no '" + std::string(target_name(t)) +
                                "' target");
        }
        y(static_cast<Eigen::Index>(i)) = *v;
    }
    return y;
}

std::string dataset_fingerprint(const Dataset& ds) { return to_hex64(fnv1a64(to_csv(ds))); }

namespace {

struct Prepared {
    Normalizer normalizer;
    Matrix X;
    Vector y;  // raw targets
};

Prepared prepare(const Dataset& train, Target target) {
    if (train.empty()) throw TrainingError("training set is empty");
    Prepared p;
    p.y = target_vector(train, target);
    p.normalizer = fit_normalizer(train);
    p.X = normalized_feature_matrix(p.normalizer, train);
    return p;
}

TargetScaling fit_target_scaling(const Vector& y) {
    std::vector<double> v(y.data(), y.data() + y.size());
    const ColumnStats s = column_stats("target", v);
    return {s.average, s.std_dev};
}

Vector scaled(const TargetScaling& ts, const Vector& y) {
    return y.unaryExpr([&](double v) { return ts.scale(v); });
}

RegressorModel base_model(const Dataset& train, Target target, const Prepared& p) {
    RegressorModel m;
    m.target = target;
    m.normalizer = p.normalizer;
    m.meta.dataset_fingerprint = dataset_fingerprint(train);
    m.meta.n_train = train.size();
    return m;
}

json sizes_json(const std::vector<std::size_t>& sizes) {
    json a = json::array();
    for (std::size_t s : sizes) a.push_back(s);
    return a;
}

double holdout_rms(const RegressorModel& m, const Dataset& holdout) {
    double ss = 0.0;
    for (const DesignRecord& r : holdout) {
        const double diff = predict(m, r) - *r.target(m.target);
        ss += diff * diff;
    }
    return std::sqrt(ss / static_cast<double>(holdout.size()));
}

void check_grid(std::span<const double> grid, const char* what) {
    if (grid.empty()) throw ArgumentError(std::string(what) + " grid is empty");
    for (double v : grid) {
        if (!(v > 0.0) || !std::isfinite(v)) throw ArgumentError(std::string(what) + " grid values must be positive");
    }
}

}  // namespace

RegressorModel mlfn_train(const Dataset& train, Target target, const MlfnConfig& cfg) {
    const Prepared p = prepare(train, target);
    RegressorModel m = base_model(train, target, p);
    m.target_scaling = fit_target_scaling(p.y);
    MlfnFit fit = mlfn_fit(p.X, scaled(m.target_scaling, p.y), cfg);
    m.params = std::move(fit.params);
    m.meta.seed = cfg.seed;
    m.meta.hyperparameters = {
        {"hidden_sizes", sizes_json(cfg.hidden_sizes)},
        {"learning_rate", cfg.learning_rate},
        {"momentum", cfg.momentum},
        {"epochs", cfg.epochs},
        {"final_loss", fit.loss_history.back()},
        {"loss_windows_non_increasing", loss_windows_non_increasing(fit.loss_history, 50)},
    };
    return m;
}

RegressorModel grnn_train(const Dataset& train, Target target, double sigma) {
    if (!(sigma > 0.0) || !std::isfinite(sigma)) throw ArgumentError("GRNN sigma must be positive");
    const Prepared p = prepare(train, target);
    RegressorModel m = base_model(train, target, p);
    m.params = GrnnParams{p.X, p.y, sigma};
    m.meta.hyperparameters = {{"sigma", sigma}};
    return m;
}

RegressorModel elm_train(const Dataset& train, Target target, const ElmConfig& cfg) {
    const Prepared p = prepare(train, target);
    RegressorModel m = base_model(train, target, p);
    m.target_scaling = fit_target_scaling(p.y);
    ElmParams params = elm_fit(p.X, scaled(m.target_scaling, p.y), cfg, &m.meta.warnings);
    m.meta.seed = cfg.seed;
    m.meta.hyperparameters = {{"hidden_size", cfg.hidden_size}, {"ridge", cfg.ridge}, {"ridge_used", params.ridge}};
    m.params = std::move(params);
    return m;
}

RegressorModel lssvm_train(const Dataset& train, Target target, const LssvmConfig& cfg) {
    const Prepared p = prepare(train, target);
    RegressorModel m = base_model(train, target, p);
    m.target_scaling = fit_target_scaling(p.y);
    m.params = lssvm_fit(p.X, scaled(m.target_scaling, p.y), cfg, &m.meta.warnings);
    m.meta.hyperparameters = {{"gamma", cfg.gamma}, {"kernel_width", cfg.kernel_width}};
    return m;
}

RegressorModel grnn_select_sigma(const Dataset& train, const Dataset& holdout, Target target,
                                 std::span<const double> sigma_grid) {
    check_grid(sigma_grid, "sigma");
    if (holdout.empty()) throw ArgumentError("holdout set is empty");
    std::vector<double> grid(sigma_grid.begin(), sigma_grid.end());
    std::sort(grid.begin(), grid.end());
    double best_sigma = grid.front();
    double best_rms = std::numeric_limits<double>::infinity();
    for (double s : grid) {
        const double rms = holdout_rms(grnn_train(train, target, s), holdout);
        if (rms < best_rms) {
            best_rms = rms;
            best_sigma = s;
        }
    }
    RegressorModel m = grnn_train(train, target, best_sigma);
    m.meta.hyperparameters["selection_holdout_rms"] = best_rms;
    m.meta.hyperparameters["sigma_grid"] = grid;
    return m;
}

RegressorModel lssvm_select(const Dataset& train, const Dataset& holdout, Target target,
                            std::span<const double> gamma_grid, std::span<const double> width_grid) {
    check_grid(gamma_grid, "gamma");
    check_grid(width_grid, "kernel width");
    if (holdout.empty()) throw ArgumentError("holdout set is empty");
    std::vector<double> gammas(gamma_grid.begin(), gamma_grid.end());
    std::vector<double> widths(width_grid.begin(), width_grid.end());
    std::sort(gammas.begin(), gammas.end());
    std::sort(widths.begin(), widths.end());
    LssvmConfig best{gammas.front(), widths.front()};
    double best_rms = std::numeric_limits<double>::infinity();
    for (double g : gammas) {
        for (double w : widths) {
            const double rms = holdout_rms(lssvm_train(train, target, {g, w}), holdout);
            if (rms < best_rms) {
                best_rms = rms;
                best = {g, w};
            }
        }
    }
    RegressorModel m = lssvm_train(train, target, best);
    m.meta.hyperparameters["selection_holdout_rms"] = best_rms;
    m.meta.hyperparameters["gamma_grid"] = gammas;
    m.meta.hyperparameters["kernel_width_grid"] = widths;
    return m;
}

MlfnGradient mlfn_loss_gradient(const RegressorModel& model, const Dataset& batch) {
    const auto* net = std::get_if<MlfnParams>(&model.params);
    if (!net) throw UnsupportedKindError("loss gradient requires an MLFN model");
    const Matrix X = normalized_feature_matrix(model.normalizer, batch);
    return mlfn_loss_gradient(*net, X, scaled(model.target_scaling, target_vector(batch, model.target)));
}

double predict_features(const RegressorModel& model, const FeatureVector& raw, std::vector<double>& scratch) {
    for (std::size_t j = 0; j < kFeatureCount; ++j) {
        if (!std::isfinite(raw[j])) {
            throw ArgumentError("feature '" + std::string(kFeatureNames[j]) + "' is not finite");
        }
    }
    const FeatureVector z = model.normalizer.transform(raw);
    const double out = std::visit(
        [&](const auto& p) -> double {
            using P = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<P, MlfnParams>) {
                return mlfn_forward_one(p, z, scratch);
            } else if constexpr (std::is_same_v<P, GrnnParams>) {
                return grnn_evaluate(p, z);
            } else if constexpr (std::is_same_v<P, ElmParams>) {
                return elm_evaluate(p, z);
            } else {
                return lssvm_evaluate(p, z);
            }
        },
        model.params);
    return model.target_scaling.unscale(out);
}

double predict_features(const RegressorModel& model, const FeatureVector& raw) {
    std::vector<double> scratch;
    return predict_features(model, raw, scratch);
}

double predict(const RegressorModel& model, const DesignRecord& record) {
    return predict_features(model, features_of(record));
}

RegressorModel train_model(const Dataset& train, Target target, const TrainConfig& cfg) {
    switch (cfg.kind) {
        case ModelKind::mlfn: return mlfn_train(train, target, cfg.mlfn);
        case ModelKind::elm: return elm_train(train, target, cfg.elm);
        case ModelKind::grnn:
        case ModelKind::lssvm: break;
    }
    const SplitIndices idx = split_indices(train.size(), 1.0 - cfg.holdout_fraction, cfg.seed);
    const Dataset fit_part = train.subset(idx.train);
    const Dataset holdout = train.subset(idx.test);

    RegressorModel selected = cfg.kind == ModelKind::grnn
                                  ? grnn_select_sigma(fit_part, holdout, target, cfg.grnn_sigmas)
                                  : lssvm_select(fit_part, holdout, target, cfg.lssvm_gammas, cfg.lssvm_widths);
    json selection = selected.meta.hyperparameters;
    RegressorModel m;
    if (cfg.kind == ModelKind::grnn) {
        m = grnn_train(train, target, selection.at("sigma").get<double>());
    } else {
        m = lssvm_train(train, target,
                        {selection.at("gamma").get<double>(), selection.at("kernel_width").get<double>()});
    }
    for (auto& [key, value] : selection.items()) {
        if (!m.meta.hyperparameters.contains(key)) m.meta.hyperparameters[key] = value;
    }
    m.meta.hyperparameters["holdout_fraction"] = cfg.holdout_fraction;
    m.meta.seed = cfg.seed;
    return m;
}

}  // namespace swh
