#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "swh/dataset.hpp"

namespace swh {

struct ColumnCalibration {
    double mean = 0.0;
    double std_dev = 0.0;
    double minimum = 0.0;
    double maximum = 0.0;

    bool operator==(const ColumnCalibration&) const = default;
};

// Calibration for the synthetic stand-in database. Defaults are the
// published descriptive statistics of the 915 measured heaters.
struct GeneratorConfig {
    std::array<ColumnCalibration, kFeatureCount> features = {{
        {1811.0, 87.8, 1600.0, 2200.0},  // tube_length
        {21.0, 5.8, 5.0, 64.0},          // n_tubes
        {76.2, 5.11, 60.0, 151.0},       // tcd
        {172.0, 47.0, 70.0, 403.0},      // tank_volume
        {2.69, 0.73, 1.27, 8.24},        // collector_area
        {46.0, 3.89, 30.0, 85.0},        // tilt_angle
        {53.0, 2.0, 46.0, 62.0},         // final_temp
    }};
    ColumnCalibration hcr{8.9, 0.48, 6.7, 11.3};
    ColumnCalibration hlc{10.0, 0.77, 8.0, 13.0};
    double hcr_noise = 0.20;
    double hlc_noise = 0.30;

    bool operator==(const GeneratorConfig&) const = default;
};

GeneratorConfig parse_generator_config(const std::string& json_text);
GeneratorConfig load_generator_config(const std::string& path);
std::string generator_config_json(const GeneratorConfig& cfg);

// Noise-free ground truth used to label synthetic records. With z_c the
// calibration z-score of column c:
//   hcr = 8.9 + 0.25 z_final_temp + 0.20 z_collector_area - 0.15 z_tcd
//             + 0.10 z_n_tubes + 0.05 z_tube_length
//   hlc = 10.0 - 0.30 z_final_temp + 0.20 z_tube_length + 0.10 z_tank_volume
// The coefficients are arbitrary; they give the models a smooth, monotone
// signal that stays inside the target ranges and say nothing about physics.
double synthetic_hcr_truth(const DesignRecord& r, const GeneratorConfig& cfg);
double synthetic_hlc_truth(const DesignRecord& r, const GeneratorConfig& cfg);

// Features: normal(mean, std) clipped to [min, max]; n_tubes and final_temp
// rounded to integers. Targets: ground truth plus seeded Gaussian noise,
// clipped to the target ranges.
Dataset generate_synthetic(std::size_t n, std::uint64_t seed, const GeneratorConfig& cfg = {});

}  // namespace swh
