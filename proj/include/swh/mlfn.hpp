#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <vector>

namespace swh {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Fully connected feedforward network: logistic sigmoid on every hidden
// layer, identity on the single output.
//
// weights[l] maps layer l to layer l+1 and has shape (size[l+1], size[l]).
// Sample matrices are column-per-sample: X has shape (inputs, n).
struct MlfnParams {
    std::vector<Matrix> weights;
    std::vector<Vector> biases;

    [[nodiscard]] std::vector<std::size_t> layer_sizes() const;
    [[nodiscard]] std::size_t input_size() const { return static_cast<std::size_t>(weights.front().cols()); }

    bool operator==(const MlfnParams& o) const;
};

// Same shape as MlfnParams.
struct MlfnGradient {
    std::vector<Matrix> weights;
    std::vector<Vector> biases;
};

struct MlfnConfig {
    std::vector<std::size_t> hidden_sizes{8};
    double learning_rate = 0.05;
    double momentum = 0.9;
    long epochs = 20000;
    std::uint64_t seed = 0;
};

struct MlfnFit {
    MlfnParams params;
    std::vector<double> loss_history;  // loss before each epoch's update, then the final loss
};

inline double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// Weights and biases uniform in +-1/sqrt(fan_in), drawn layer by layer.
MlfnParams mlfn_init(std::span<const std::size_t> layer_sizes, std::uint64_t seed);

// Outputs for every column of X.
Vector mlfn_forward(const MlfnParams& net, const Matrix& X);

// Single-sample forward pass without heap allocation after warm-up.
double mlfn_forward_one(const MlfnParams& net, std::span<const double> x, std::vector<double>& scratch);

// Mean squared error (1/n) sum (out_i - y_i)^2.
double mlfn_loss(const MlfnParams& net, const Matrix& X, const Vector& y);

// Backpropagated gradient of mlfn_loss.
MlfnGradient mlfn_loss_gradient(const MlfnParams& net, const Matrix& X, const Vector& y);

// Full-batch gradient descent with momentum. Throws DivergenceError when the
// loss stops being finite.
MlfnFit mlfn_fit(const Matrix& X, const Vector& y, const MlfnConfig& cfg);

// True when, for every window of `window` epochs, the loss at the end is not
// above the loss at the start.
bool loss_windows_non_increasing(std::span<const double> history, std::size_t window = 50);

}  // namespace swh
