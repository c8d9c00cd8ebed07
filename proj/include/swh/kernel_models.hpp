#pragma once

// Matrix-level cores of the GRNN, ELM and LS-SVM regressors. Sample matrices
// are column-per-sample, as in mlfn.hpp.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "swh/mlfn.hpp"

namespace swh {

// General regression neural network (Nadaraya-Watson with a Gaussian kernel).
struct GrnnParams {
    Matrix train_x;  // (d, n)
    Vector train_y;  // (n)
    double sigma = 1.0;

    bool operator==(const GrnnParams&) const = default;
};

// y_hat(x) = sum_i y_i exp(-d_i^2 / 2 sigma^2) / sum_i exp(-d_i^2 / 2 sigma^2).
// If every weight underflows to zero the target of the nearest training
// point (lowest index on ties) is returned instead.
double grnn_evaluate(const GrnnParams& p, std::span<const double> x);

// Extreme learning machine: fixed random sigmoid hidden layer, ridge output.
struct ElmParams {
    Matrix input_weights;  // (L, d), uniform in [-1, 1]
    Vector hidden_bias;    // (L), uniform in [-1, 1]
    Vector beta;           // (L)
    double ridge = 0.0;    // ridge actually used for beta

    bool operator==(const ElmParams&) const = default;
};

struct ElmConfig {
    std::size_t hidden_size = 40;
    double ridge = 1e-3;
    std::uint64_t seed = 0;
};

inline constexpr double kElmRidgeFloor = 1e-8;

// Hidden activations H, shape (n, L).
Matrix elm_hidden(const ElmParams& p, const Matrix& X);
double elm_evaluate(const ElmParams& p, std::span<const double> x);

// Solves (H^T H + ridge I) beta = H^T y by Cholesky. If the system is
// singular at ridge 0, the ridge is raised to kElmRidgeFloor and a warning
// is appended to `warnings`.
ElmParams elm_fit(const Matrix& X, const Vector& y, const ElmConfig& cfg, std::vector<std::string>* warnings = nullptr);

// Least-squares SVM regression with an RBF kernel
// k(a, b) = exp(-|a - b|^2 / (2 kernel_width^2)).
struct LssvmParams {
    Matrix train_x;  // (d, n)
    Vector alpha;    // (n)
    double bias = 0.0;
    double gamma = 1.0;
    double kernel_width = 1.0;

    bool operator==(const LssvmParams&) const = default;
};

struct LssvmConfig {
    double gamma = 10.0;
    double kernel_width = 2.0;
};

inline constexpr double kLssvmConditionLimit = 1e12;

Matrix rbf_kernel(const Matrix& A, const Matrix& B, double width);

// Solves [[0, 1^T], [1, K + I/gamma]] [b; alpha] = [0; y]. A warning is
// appended when the condition estimate of K + I/gamma exceeds
// kLssvmConditionLimit.
LssvmParams lssvm_fit(const Matrix& X, const Vector& y, const LssvmConfig& cfg,
                      std::vector<std::string>* warnings = nullptr);

double lssvm_evaluate(const LssvmParams& p, std::span<const double> x);

// Infinity norm of the KKT system residual for targets y.
double lssvm_kkt_residual(const LssvmParams& p, const Vector& y);

}  // namespace swh
