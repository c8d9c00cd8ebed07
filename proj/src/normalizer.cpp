#include "swh/normalizer.hpp"

#include <vector>

#include "swh/error.hpp"

namespace swh {

FeatureVector Normalizer::transform(const FeatureVector& x) const {
    FeatureVector z{};
    for (std::size_t j = 0; j < kFeatureCount; ++j) {
        z[j] = std_dev[j] > 0.0 ? (x[j] - mean[j]) / std_dev[j] : x[j] - mean[j];
    }
    return z;
}

FeatureVector Normalizer::inverse(const FeatureVector& z) const {
    FeatureVector x{};
    for (std::size_t j = 0; j < kFeatureCount; ++j) {
        x[j] = std_dev[j] > 0.0 ? z[j] * std_dev[j] + mean[j] : z[j] + mean[j];
    }
    return x;
}

Normalizer fit_normalizer(const Dataset& train) {
    if (train.empty()) throw ArgumentError("cannot fit a normalizer on an empty dataset");
    Normalizer nz;
    std::vector<double> column(train.size());
    for (std::size_t j = 0; j < kFeatureCount; ++j) {
        for (std::size_t i = 0; i < train.size(); ++i) column[i] = features_of(train[i])[j];
        const ColumnStats s = column_stats(std::string(kFeatureNames[j]), column);
        nz.mean[j] = s.average;
        nz.std_dev[j] = s.std_dev;
    }
    return nz;
}

}  // namespace swh
