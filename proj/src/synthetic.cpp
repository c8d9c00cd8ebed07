#include "swh/synthetic.hpp"

#include <algorithm>
#include <cmath>

#include "json.hpp"
#include "swh/error.hpp"
#include "swh/rng.hpp"
#include "swh/text.hpp"

namespace swh {

using nlohmann::json;

namespace {

json calibration_json(const ColumnCalibration& c) {
    return {{"mean", c.mean}, {"std_dev", c.std_dev}, {"minimum", c.minimum}, {"maximum", c.maximum}};
}

ColumnCalibration calibration_from(const json& j, const std::string& name) {
    ColumnCalibration c;
    c.mean = j.at("mean").get<double>();
    c.std_dev = j.at("std_dev").get<double>();
    c.minimum = j.at("minimum").get<double>();
    c.maximum = j.at("maximum").get<double>();
    if (!(c.minimum <= c.maximum) || !(c.std_dev >= 0.0)) {
        throw ArgumentError("generator config: invalid calibration for '" + name + "'");
    }
    return c;
}

double zscore(double x, const ColumnCalibration& c) { return (x - c.mean) / c.std_dev; }

double zf(const DesignRecord& r, const GeneratorConfig& cfg, Feature f) {
    const auto j = static_cast<std::size_t>(f);
    return zscore(features_of(r)[j], cfg.features[j]);
}

}  // namespace

std::string generator_config_json(const GeneratorConfig& cfg) {
    json features = json::object();
    for (std::size_t j = 0; j < kFeatureCount; ++j) {
        features[std::string(kFeatureNames[j])] = calibration_json(cfg.features[j]);
    }
    json doc = {
        {"features", features},
        {"targets", {{"hcr", calibration_json(cfg.hcr)}, {"hlc", calibration_json(cfg.hlc)}}},
        {"noise", {{"hcr", cfg.hcr_noise}, {"hlc", cfg.hlc_noise}}},
    };
    return doc.dump(2) + "\n";
}

GeneratorConfig parse_generator_config(const std::string& json_text) {
    GeneratorConfig cfg;
    try {
        const json doc = json::parse(json_text);
        for (std::size_t j = 0; j < kFeatureCount; ++j) {
            const std::string name(kFeatureNames[j]);
            cfg.features[j] = calibration_from(doc.at("features").at(name), name);
        }
        cfg.hcr = calibration_from(doc.at("targets").at("hcr"), "hcr");
        cfg.hlc = calibration_from(doc.at("targets").at("hlc"), "hlc");
        cfg.hcr_noise = doc.at("noise").at("hcr").get<double>();
        cfg.hlc_noise = doc.at("noise").at("hlc").get<double>();
    } catch (const json::exception& e) {
        throw ParseError(std::string("generator config: ") + e.what());
    }
    return cfg;
}

GeneratorConfig load_generator_config(const std::string& path) {
    return parse_generator_config(read_file(path));
}

double synthetic_hcr_truth(const DesignRecord& r, const GeneratorConfig& cfg) {
    return cfg.hcr.mean + 0.25 * zf(r, cfg, Feature::final_temp) + 0.20 * zf(r, cfg, Feature::collector_area) -
           0.15 * zf(r, cfg, Feature::tcd) + 0.10 * zf(r, cfg, Feature::n_tubes) +
           0.05 * zf(r, cfg, Feature::tube_length);
}

double synthetic_hlc_truth(const DesignRecord& r, const GeneratorConfig& cfg) {
    return cfg.hlc.mean - 0.30 * zf(r, cfg, Feature::final_temp) + 0.20 * zf(r, cfg, Feature::tube_length) +
           0.10 * zf(r, cfg, Feature::tank_volume);
}

Dataset generate_synthetic(std::size_t n, std::uint64_t seed, const GeneratorConfig& cfg) {
    if (n < 1) throw ArgumentError("synthetic dataset size must be at least 1");
    Rng rng(seed);
    std::vector<DesignRecord> records;
    records.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        FeatureVector f{};
        for (std::size_t j = 0; j < kFeatureCount; ++j) {
            const ColumnCalibration& c = cfg.features[j];
            double v = std::clamp(rng.normal(c.mean, c.std_dev), c.minimum, c.maximum);
            if (kIntegerFeature[j]) v = std::round(v);
            f[j] = v;
        }
        DesignRecord r = record_from_features(f);
        r.hcr = std::clamp(synthetic_hcr_truth(r, cfg) + rng.normal(0.0, cfg.hcr_noise), cfg.hcr.minimum,
                           cfg.hcr.maximum);
        r.hlc = std::clamp(synthetic_hlc_truth(r, cfg) + rng.normal(0.0, cfg.hlc_noise), cfg.hlc.minimum,
                           cfg.hlc.maximum);
        validate_record(r);
        records.push_back(r);
    }
    return Dataset(std::move(records));
}

}  // namespace swh
