#include "swh/metrics.hpp"

#include <cmath>
#include <numeric>

#include "json.hpp"
#include "swh/error.hpp"
#include "swh/text.hpp"

namespace swh {

namespace {

void check_pair(std::span<const double> predicted, std::span<const double> actual) {
    if (predicted.size() != actual.size()) {
        throw ArgumentError("predicted and actual lengths differ (" + std::to_string(predicted.size()) + " vs " +
                            std::to_string(actual.size()) + ")");
    }
}

void check_nonempty_finite(std::span<const double> predicted, std::span<const double> actual) {
    check_pair(predicted, actual);
    if (predicted.empty()) throw ArgumentError("metric over an empty sample");
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        if (!std::isfinite(predicted[i]) || !std::isfinite(actual[i])) {
            throw ArgumentError("sample " + std::to_string(i) + " is not finite");
        }
    }
}

}  // namespace

double rms_error(std::span<const double> predicted, std::span<const double> actual) {
    check_nonempty_finite(predicted, actual);
    double ss = 0.0;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        const double d = predicted[i] - actual[i];
        ss += d * d;
    }
    return std::sqrt(ss / static_cast<double>(predicted.size()));
}

double prediction_accuracy(std::span<const double> predicted, std::span<const double> actual, double tolerance) {
    check_nonempty_finite(predicted, actual);
    if (!(tolerance > 0.0)) throw ArgumentError("tolerance must be positive");
    std::size_t good = 0;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        if (std::abs(predicted[i] - actual[i]) <= tolerance * std::abs(actual[i])) ++good;
    }
    return 100.0 * static_cast<double>(good) / static_cast<double>(predicted.size());
}

std::vector<double> residuals(std::span<const double> predicted, std::span<const double> actual) {
    check_pair(predicted, actual);
    std::vector<double> out(predicted.size());
    for (std::size_t i = 0; i < predicted.size(); ++i) out[i] = predicted[i] - actual[i];
    return out;
}

double validation_error_rate(double predicted, std::span<const double> measured_days) {
    if (measured_days.empty()) throw ArgumentError("validation needs at least one measured day");
    for (double d : measured_days) {
        if (!(d > 0.0) || !std::isfinite(d)) throw ArgumentError("measured values must be positive");
    }
    const double mean =
        std::accumulate(measured_days.begin(), measured_days.end(), 0.0) / static_cast<double>(measured_days.size());
    return 100.0 * std::abs(predicted - mean) / mean;
}

std::vector<double> EvalReport::actual_values() const {
    std::vector<double> v;
    v.reserve(samples.size());
    for (const EvalSample& s : samples) v.push_back(s.actual);
    return v;
}

std::vector<double> EvalReport::predicted_values() const {
    std::vector<double> v;
    v.reserve(samples.size());
    for (const EvalSample& s : samples) v.push_back(s.predicted);
    return v;
}

EvalReport make_report(std::string target_name, std::span<const double> predicted, std::span<const double> actual,
                       double tolerance) {
    EvalReport r;
    r.target_name = std::move(target_name);
    r.n_tot = predicted.size();
    r.tolerance = tolerance;
    r.rms_error = rms_error(predicted, actual);
    r.prediction_accuracy = prediction_accuracy(predicted, actual, tolerance);
    const std::vector<double> res = residuals(predicted, actual);
    r.samples.reserve(predicted.size());
    for (std::size_t i = 0; i < predicted.size(); ++i) r.samples.push_back({actual[i], predicted[i], res[i]});
    return r;
}

EvalReport evaluate(const RegressorModel& model, const Dataset& test, double tolerance) {
    if (test.empty()) throw ArgumentError("evaluation set is empty");
    std::vector<double> predicted;
    std::vector<double> actual;
    predicted.reserve(test.size());
    actual.reserve(test.size());
    for (std::size_t i = 0; i < test.size(); ++i) {
        const auto y = test[i].target(model.target);
        if (!y) {
            throw Error("evaluation", "record " + std::to_string(i + 1) + " has no '" +
                                          std::string(target_name(model.target)) + "' target");
        }
        actual.push_back(*y);
        predicted.push_back(predict(model, test[i]));
    }
    return make_report(std::string(target_name(model.target)), predicted, actual, tolerance);
}

std::string report_csv(const EvalReport& r) {
    std::string out = "actual,predicted,residual\n";
    for (const EvalSample& s : r.samples) {
        out += format_double(s.actual) + "," + format_double(s.predicted) + "," + format_double(s.residual) + "\n";
    }
    return out;
}

std::string report_summary_json(const EvalReport& r) {
    const nlohmann::json j = {
        {"target", r.target_name},         {"n_tot", r.n_tot},       {"rms_error", r.rms_error},
        {"accuracy_pct", r.prediction_accuracy}, {"tolerance", r.tolerance},
    };
    return j.dump();
}

}  // namespace swh
