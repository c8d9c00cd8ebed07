#pragma once

#include "swh/dataset.hpp"
#include "swh/design_record.hpp"

namespace swh {

// Per-feature z-score scaling captured from a training set. Features with
// zero spread are only shifted by their mean.
struct Normalizer {
    FeatureVector mean{};
    FeatureVector std_dev{};

    [[nodiscard]] FeatureVector transform(const FeatureVector& x) const;
    [[nodiscard]] FeatureVector inverse(const FeatureVector& z) const;

    bool operator==(const Normalizer&) const = default;
};

Normalizer fit_normalizer(const Dataset& train);

inline FeatureVector apply_normalizer(const Normalizer& nz, const DesignRecord& r) {
    return nz.transform(features_of(r));
}

// Scalar affine scaling for a regression target; same zero-spread rule.
struct TargetScaling {
    double mean = 0.0;
    double std_dev = 1.0;

    [[nodiscard]] double scale(double y) const { return std_dev > 0.0 ? (y - mean) / std_dev : y - mean; }
    [[nodiscard]] double unscale(double z) const { return std_dev > 0.0 ? z * std_dev + mean : z + mean; }

    bool operator==(const TargetScaling&) const = default;
};

}  // namespace swh
