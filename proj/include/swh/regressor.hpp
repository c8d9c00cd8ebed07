#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "json.hpp"
#include "swh/dataset.hpp"
#include "swh/kernel_models.hpp"
#include "swh/mlfn.hpp"
#include "swh/normalizer.hpp"

namespace swh {

enum class ModelKind { mlfn, grnn, elm, lssvm };

std::string_view kind_name(ModelKind k);
ModelKind parse_kind(std::string_view name);

struct TrainingMeta {
    std::uint64_t seed = 0;
    nlohmann::json hyperparameters = nlohmann::json::object();
    std::string dataset_fingerprint;  // FNV-1a 64 of the training set's canonical CSV
    std::size_t n_train = 0;
    std::vector<std::string> warnings;

    bool operator==(const TrainingMeta&) const = default;
};

// A trained single-target regressor. Features are z-scored with
// `normalizer`; MLFN, ELM and LS-SVM learn the target in the space given by
// `target_scaling`, GRNN keeps identity scaling.
struct RegressorModel {
    Target target = Target::hcr;
    Normalizer normalizer;
    TargetScaling target_scaling;
    std::variant<MlfnParams, GrnnParams, ElmParams, LssvmParams> params;
    TrainingMeta meta;

    [[nodiscard]] ModelKind kind() const { return static_cast<ModelKind>(params.index()); }

    bool operator==(const RegressorModel&) const = default;
};

// Column-per-sample matrix of normalized features.
Matrix normalized_feature_matrix(const Normalizer& nz, const Dataset& ds);

// Target column; throws TrainingError when any record lacks it.
Vector target_vector(const Dataset& ds, Target t);

std::string dataset_fingerprint(const Dataset& ds);

RegressorModel mlfn_train(const Dataset& train, Target target, const MlfnConfig& cfg);
RegressorModel grnn_train(const Dataset& train, Target target, double sigma);
RegressorModel elm_train(const Dataset& train, Target target, const ElmConfig& cfg);
RegressorModel lssvm_train(const Dataset& train, Target target, const LssvmConfig& cfg);

// Smallest-RMS sigma on `holdout` for a GRNN fitted on `train`; ties go to
// the smallest sigma. Returns the model fitted on `train` with that sigma.
RegressorModel grnn_select_sigma(const Dataset& train, const Dataset& holdout, Target target,
                                 std::span<const double> sigma_grid);

// Same selection rule over the (gamma, kernel_width) grid; ties go to the
// smallest gamma, then the smallest width.
RegressorModel lssvm_select(const Dataset& train, const Dataset& holdout, Target target,
                            std::span<const double> gamma_grid, std::span<const double> width_grid);

// Gradient of the batch MSE in the model's normalized feature and scaled
// target space.
MlfnGradient mlfn_loss_gradient(const RegressorModel& model, const Dataset& batch);

// Throws ArgumentError on a non-finite feature.
double predict(const RegressorModel& model, const DesignRecord& record);
double predict_features(const RegressorModel& model, const FeatureVector& raw);

// Prediction entry point for hot loops; `scratch` is reused across calls.
double predict_features(const RegressorModel& model, const FeatureVector& raw, std::vector<double>& scratch);

// Hyperparameters of a full training run.
struct TrainConfig {
    ModelKind kind = ModelKind::mlfn;
    MlfnConfig mlfn;
    ElmConfig elm;
    std::vector<double> grnn_sigmas{0.1, 0.2, 0.3, 0.5, 0.75, 1.0, 1.5, 2.0};
    std::vector<double> lssvm_gammas{1.0, 10.0, 100.0, 1000.0};
    std::vector<double> lssvm_widths{1.0, 2.0, 4.0, 8.0};
    double holdout_fraction = 0.15;
    std::uint64_t seed = 7;
};

// MLFN and ELM train directly on `train` (their seeds come from
// cfg.seed). GRNN and LS-SVM carve a holdout of `holdout_fraction` from
// `train`, grid-search on it, then refit on all of `train`.
RegressorModel train_model(const Dataset& train, Target target, const TrainConfig& cfg);

}  // namespace swh
