#include "swh/mlfn.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "swh/error.hpp"
#include "swh/rng.hpp"

namespace swh {

std::vector<std::size_t> MlfnParams::layer_sizes() const {
    std::vector<std::size_t> sizes;
    if (weights.empty()) return sizes;
    sizes.push_back(static_cast<std::size_t>(weights.front().cols()));
    for (const Matrix& w : weights) sizes.push_back(static_cast<std::size_t>(w.rows()));
    return sizes;
}

bool MlfnParams::operator==(const MlfnParams& o) const {
    if (weights.size() != o.weights.size() || biases.size() != o.biases.size()) return false;
    for (std::size_t l = 0; l < weights.size(); ++l) {
        if (weights[l].rows() != o.weights[l].rows() || weights[l].cols() != o.weights[l].cols()) return false;
        if (weights[l] != o.weights[l] || biases[l] != o.biases[l]) return false;
    }
    return true;
}

MlfnParams mlfn_init(std::span<const std::size_t> layer_sizes, std::uint64_t seed) {
    if (layer_sizes.size() < 2) throw ArgumentError("network needs at least an input and an output layer");
    for (std::size_t s : layer_sizes) {
        if (s == 0) throw ArgumentError("layer sizes must be positive");
    }
    Rng rng(seed);
    MlfnParams net;
    for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
        const auto fan_in = static_cast<Eigen::Index>(layer_sizes[l]);
        const auto fan_out = static_cast<Eigen::Index>(layer_sizes[l + 1]);
        const double limit = 1.0 / std::sqrt(static_cast<double>(fan_in));
        Matrix w(fan_out, fan_in);
        for (Eigen::Index r = 0; r < fan_out; ++r) {
            for (Eigen::Index c = 0; c < fan_in; ++c) w(r, c) = rng.uniform(-limit, limit);
        }
        Vector b(fan_out);
        for (Eigen::Index r = 0; r < fan_out; ++r) b(r) = rng.uniform(-limit, limit);
        net.weights.push_back(std::move(w));
        net.biases.push_back(std::move(b));
    }
    return net;
}

namespace {

// activations[0] = X, activations[l+1] = layer l+1 output.
std::vector<Matrix> forward_all(const MlfnParams& net, const Matrix& X) {
    const std::size_t layers = net.weights.size();
    std::vector<Matrix> act;
    act.reserve(layers + 1);
    act.push_back(X);
    for (std::size_t l = 0; l < layers; ++l) {
        Matrix z = net.weights[l] * act.back();
        z.colwise() += net.biases[l];
        if (l + 1 < layers) z = z.unaryExpr([](double v) { return sigmoid(v); });
        act.push_back(std::move(z));
    }
    return act;
}

void check_batch(const MlfnParams& net, const Matrix& X, const Vector& y) {
    if (net.weights.empty()) throw ArgumentError("empty network");
    if (static_cast<std::size_t>(X.rows()) != net.input_size()) {
        throw ArgumentError("input dimension " + std::to_string(X.rows()) + " does not match network input " +
                            std::to_string(net.input_size()));
    }
    if (X.cols() != y.size() || X.cols() == 0) throw ArgumentError("batch must be nonempty with one target per sample");
    if (net.weights.back().rows() != 1) throw ArgumentError("network must have a single output");
}

}  // namespace

Vector mlfn_forward(const MlfnParams& net, const Matrix& X) {
    return forward_all(net, X).back().row(0).transpose();
}

double mlfn_forward_one(const MlfnParams& net, std::span<const double> x, std::vector<double>& scratch) {
    std::size_t widest = x.size();
    for (const Matrix& w : net.weights) widest = std::max(widest, static_cast<std::size_t>(w.rows()));
    scratch.resize(2 * widest);
    double* in = scratch.data();
    double* out = scratch.data() + widest;
    std::copy(x.begin(), x.end(), in);
    const std::size_t layers = net.weights.size();
    for (std::size_t l = 0; l < layers; ++l) {
        const Matrix& w = net.weights[l];
        const Vector& b = net.biases[l];
        const bool hidden = l + 1 < layers;
        for (Eigen::Index r = 0; r < w.rows(); ++r) {
            double z = b(r);
            for (Eigen::Index c = 0; c < w.cols(); ++c) z += w(r, c) * in[c];
            out[r] = hidden ? sigmoid(z) : z;
        }
        std::swap(in, out);
    }
    return in[0];
}

double mlfn_loss(const MlfnParams& net, const Matrix& X, const Vector& y) {
    check_batch(net, X, y);
    const Vector out = mlfn_forward(net, X);
    return (out - y).squaredNorm() / static_cast<double>(y.size());
}

namespace {

MlfnGradient backprop(const MlfnParams& net, const Matrix& X, const Vector& y, double* loss) {
    const std::vector<Matrix> act = forward_all(net, X);
    const std::size_t layers = net.weights.size();
    const double n = static_cast<double>(y.size());
    const Matrix residual = act.back() - y.transpose();
    if (loss) *loss = residual.squaredNorm() / n;

    MlfnGradient g;
    g.weights.resize(layers);
    g.biases.resize(layers);

    // dL/dz for the output layer
    Matrix delta = (2.0 / n) * residual;
    for (std::size_t l = layers; l-- > 0;) {
        g.weights[l] = delta * act[l].transpose();
        g.biases[l] = delta.rowwise().sum();
        if (l == 0) break;
        const Matrix& a = act[l];
        delta = (net.weights[l].transpose() * delta).cwiseProduct(a.cwiseProduct((1.0 - a.array()).matrix()));
    }
    return g;
}

}  // namespace

MlfnGradient mlfn_loss_gradient(const MlfnParams& net, const Matrix& X, const Vector& y) {
    check_batch(net, X, y);
    return backprop(net, X, y, nullptr);
}

MlfnFit mlfn_fit(const Matrix& X, const Vector& y, const MlfnConfig& cfg) {
    if (cfg.hidden_sizes.empty()) throw ArgumentError("hidden_sizes must be nonempty");
    if (cfg.hidden_sizes.size() > 2) throw ArgumentError("at most two hidden layers are supported");
    if (!(cfg.learning_rate > 0.0)) throw ArgumentError("learning_rate must be positive");
    if (!(cfg.momentum >= 0.0 && cfg.momentum < 1.0)) throw ArgumentError("momentum must lie in [0, 1)");
    if (cfg.epochs < 0) throw ArgumentError("epochs must be non-negative");

    std::vector<std::size_t> sizes;
    sizes.push_back(static_cast<std::size_t>(X.rows()));
    sizes.insert(sizes.end(), cfg.hidden_sizes.begin(), cfg.hidden_sizes.end());
    sizes.push_back(1);

    MlfnFit fit;
    fit.params = mlfn_init(sizes, cfg.seed);
    MlfnParams& net = fit.params;
    check_batch(net, X, y);

    MlfnGradient velocity;
    for (std::size_t l = 0; l < net.weights.size(); ++l) {
        velocity.weights.push_back(Matrix::Zero(net.weights[l].rows(), net.weights[l].cols()));
        velocity.biases.push_back(Vector::Zero(net.biases[l].size()));
    }

    fit.loss_history.reserve(static_cast<std::size_t>(cfg.epochs) + 1);
    for (long epoch = 0; epoch < cfg.epochs; ++epoch) {
        double loss = 0.0;
        const MlfnGradient g = backprop(net, X, y, &loss);
        if (!std::isfinite(loss)) {
            throw DivergenceError("training diverged at epoch " + std::to_string(epoch), epoch);
        }
        fit.loss_history.push_back(loss);
        for (std::size_t l = 0; l < net.weights.size(); ++l) {
            velocity.weights[l] = cfg.momentum * velocity.weights[l] - cfg.learning_rate * g.weights[l];
            velocity.biases[l] = cfg.momentum * velocity.biases[l] - cfg.learning_rate * g.biases[l];
            net.weights[l] += velocity.weights[l];
            net.biases[l] += velocity.biases[l];
        }
    }
    const double final_loss = mlfn_loss(net, X, y);
    if (!std::isfinite(final_loss) || !net.weights.back().allFinite()) {
        throw DivergenceError("training diverged at epoch " + std::to_string(cfg.epochs), cfg.epochs);
    }
    fit.loss_history.push_back(final_loss);
    return fit;
}

bool loss_windows_non_increasing(std::span<const double> history, std::size_t window) {
    for (std::size_t i = 0; i + window < history.size(); ++i) {
        if (history[i + window] > history[i]) return false;
    }
    return true;
}

}  // namespace swh
