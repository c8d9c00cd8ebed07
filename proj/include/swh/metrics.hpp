#pragma once

#include <span>
#include <string>
#include <vector>

#include "swh/dataset.hpp"
#include "swh/regressor.hpp"

namespace swh {

// Predicted values are Z, actual values are O throughout.

// sqrt(sum (Z_i - O_i)^2 / n).
double rms_error(std::span<const double> predicted, std::span<const double> actual);

// Percentage of samples with |Z_i - O_i| <= tolerance * |O_i|. The band is
// relative to the actual value and inclusive at the boundary; an actual of
// zero only counts as good when the prediction is exactly zero.
double prediction_accuracy(std::span<const double> predicted, std::span<const double> actual, double tolerance);

// Z_i - O_i, order preserved.
std::vector<double> residuals(std::span<const double> predicted, std::span<const double> actual);

// 100 |predicted - mean(days)| / mean(days), with the unrounded day mean.
double validation_error_rate(double predicted, std::span<const double> measured_days);

struct EvalSample {
    double actual = 0.0;
    double predicted = 0.0;
    double residual = 0.0;
};

struct EvalReport {
    std::string target_name;
    std::size_t n_tot = 0;
    double rms_error = 0.0;
    double prediction_accuracy = 0.0;  // percent
    double tolerance = 0.3;
    std::vector<EvalSample> samples;

    [[nodiscard]] std::vector<double> actual_values() const;
    [[nodiscard]] std::vector<double> predicted_values() const;
};

// Default tolerance band for prediction accuracy.
inline constexpr double kDefaultTolerance = 0.30;

EvalReport make_report(std::string target_name, std::span<const double> predicted, std::span<const double> actual,
                       double tolerance);

EvalReport evaluate(const RegressorModel& model, const Dataset& test, double tolerance = kDefaultTolerance);

// `actual,predicted,residual` with shortest round-trip decimals.
std::string report_csv(const EvalReport& r);

// {target, n_tot, rms_error, accuracy_pct, tolerance} as one line of JSON.
std::string report_summary_json(const EvalReport& r);

}  // namespace swh
