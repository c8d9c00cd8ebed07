#include "swh/kernel_models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "swh/error.hpp"
#include "swh/rng.hpp"
#include "swh/text.hpp"

namespace swh {

namespace {

double squared_distance(const Matrix& cols, Eigen::Index i, std::span<const double> x) {
    double d2 = 0.0;
    for (Eigen::Index r = 0; r < cols.rows(); ++r) {
        const double diff = cols(r, i) - x[static_cast<std::size_t>(r)];
        d2 += diff * diff;
    }
    return d2;
}

void check_dimension(Eigen::Index expected, std::span<const double> x) {
    if (static_cast<std::size_t>(expected) != x.size()) {
        throw ArgumentError("query has " + std::to_string(x.size()) + " features, model expects " +
                            std::to_string(expected));
    }
}

}  // namespace

double grnn_evaluate(const GrnnParams& p, std::span<const double> x) {
    check_dimension(p.train_x.rows(), x);
    const Eigen::Index n = p.train_y.size();
    const double y_min = p.train_y.minCoeff();
    const double y_max = p.train_y.maxCoeff();
    const double inv_two_sigma2 = 1.0 / (2.0 * p.sigma * p.sigma);

    thread_local std::vector<double> d2;
    d2.resize(static_cast<std::size_t>(n));
    double d2_min = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < n; ++i) {
        d2[static_cast<std::size_t>(i)] = squared_distance(p.train_x, i, x);
        d2_min = std::min(d2_min, d2[static_cast<std::size_t>(i)]);
    }

    // Shifted by the nearest distance so small sigma cannot underflow every weight.
    double weight_sum = 0.0;
    double weighted = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double w = std::exp(-(d2[static_cast<std::size_t>(i)] - d2_min) * inv_two_sigma2);
        weight_sum += w;
        // offsets from the minimum keep constant targets exact
        weighted += w * (p.train_y(i) - y_min);
    }
    return std::clamp(y_min + weighted / weight_sum, y_min, y_max);
}

Matrix elm_hidden(const ElmParams& p, const Matrix& X) {
    if (X.rows() != p.input_weights.cols()) throw ArgumentError("ELM input dimension mismatch");
    Matrix z = p.input_weights * X;  // (L, n)
    z.colwise() += p.hidden_bias;
    return z.unaryExpr([](double v) { return sigmoid(v); }).transpose();
}

double elm_evaluate(const ElmParams& p, std::span<const double> x) {
    check_dimension(p.input_weights.cols(), x);
    double out = 0.0;
    for (Eigen::Index h = 0; h < p.input_weights.rows(); ++h) {
        double z = p.hidden_bias(h);
        for (Eigen::Index c = 0; c < p.input_weights.cols(); ++c) z += p.input_weights(h, c) * x[static_cast<std::size_t>(c)];
        out += p.beta(h) * sigmoid(z);
    }
    return out;
}

ElmParams elm_fit(const Matrix& X, const Vector& y, const ElmConfig& cfg, std::vector<std::string>* warnings) {
    if (cfg.hidden_size < 1) throw ArgumentError("ELM hidden size must be at least 1");
    if (!(cfg.ridge >= 0.0)) throw ArgumentError("ELM ridge must be non-negative");
    if (X.cols() == 0 || X.cols() != y.size()) throw ArgumentError("ELM needs a nonempty batch with one target per sample");

    const auto hidden = static_cast<Eigen::Index>(cfg.hidden_size);
    Rng rng(cfg.seed);
    ElmParams p;
    p.input_weights.resize(hidden, X.rows());
    for (Eigen::Index r = 0; r < hidden; ++r) {
        for (Eigen::Index c = 0; c < X.rows(); ++c) p.input_weights(r, c) = rng.uniform(-1.0, 1.0);
    }
    p.hidden_bias.resize(hidden);
    for (Eigen::Index r = 0; r < hidden; ++r) p.hidden_bias(r) = rng.uniform(-1.0, 1.0);

    const Matrix H = elm_hidden(p, X);
    const Matrix gram = H.transpose() * H;
    const Vector rhs = H.transpose() * y;

    double ridge = cfg.ridge;
    Eigen::LLT<Matrix> llt(gram + ridge * Matrix::Identity(hidden, hidden));
    const bool singular = llt.info() != Eigen::Success || !(llt.rcond() > std::numeric_limits<double>::epsilon());
    if (singular) {
        if (ridge >= kElmRidgeFloor) throw TrainingError("ELM normal equations are singular");
        ridge = kElmRidgeFloor;
        if (warnings) {
            warnings->push_back("ELM normal equations singular at ridge " + format_double(cfg.ridge) +
                                "; ridge raised to " + format_double(ridge));
        }
        llt.compute(gram + ridge * Matrix::Identity(hidden, hidden));
        if (llt.info() != Eigen::Success) throw TrainingError("ELM normal equations are singular");
    }
    p.ridge = ridge;
    p.beta = llt.solve(rhs);
    if (!p.beta.allFinite()) throw TrainingError("ELM output weights are not finite");
    return p;
}

Matrix rbf_kernel(const Matrix& A, const Matrix& B, double width) {
    const double inv = 1.0 / (2.0 * width * width);
    Matrix K(A.cols(), B.cols());
    for (Eigen::Index i = 0; i < A.cols(); ++i) {
        for (Eigen::Index j = 0; j < B.cols(); ++j) K(i, j) = std::exp(-(A.col(i) - B.col(j)).squaredNorm() * inv);
    }
    return K;
}

LssvmParams lssvm_fit(const Matrix& X, const Vector& y, const LssvmConfig& cfg, std::vector<std::string>* warnings) {
    if (!(cfg.gamma > 0.0)) throw ArgumentError("LS-SVM gamma must be positive");
    if (!(cfg.kernel_width > 0.0)) throw ArgumentError("LS-SVM kernel width must be positive");
    if (X.cols() == 0 || X.cols() != y.size()) throw ArgumentError("LS-SVM needs a nonempty batch with one target per sample");

    const Eigen::Index n = X.cols();
    LssvmParams p;
    p.train_x = X;
    p.gamma = cfg.gamma;
    p.kernel_width = cfg.kernel_width;

    Matrix H = rbf_kernel(X, X, cfg.kernel_width);
    H.diagonal().array() += 1.0 / cfg.gamma;

    // Eliminating b: H eta = 1, H nu = y, b = 1'nu / 1'eta, alpha = nu - b eta.
    Eigen::LLT<Matrix> llt(H);
    if (llt.info() == Eigen::Success) {
        const double cond = 1.0 / llt.rcond();
        if (cond > kLssvmConditionLimit && warnings) {
            warnings->push_back("LS-SVM system is ill-conditioned (condition estimate " + format_double(cond) + ")");
        }
        const Vector eta = llt.solve(Vector::Ones(n));
        const Vector nu = llt.solve(y);
        p.bias = nu.sum() / eta.sum();
        p.alpha = nu - p.bias * eta;
    } else {
        // H lost positive definiteness numerically; solve the bordered system directly.
        Matrix A = Matrix::Zero(n + 1, n + 1);
        A.block(0, 1, 1, n).setOnes();
        A.block(1, 0, n, 1).setOnes();
        A.block(1, 1, n, n) = H;
        Vector rhs(n + 1);
        rhs << 0.0, y;
        Eigen::PartialPivLU<Matrix> lu(A);
        const Vector sol = lu.solve(rhs);
        p.bias = sol(0);
        p.alpha = sol.tail(n);
        if (warnings) warnings->push_back("LS-SVM kernel matrix not positive definite; solved by LU");
    }
    if (!p.alpha.allFinite() || !std::isfinite(p.bias)) throw TrainingError("LS-SVM solution is not finite");
    return p;
}

double lssvm_evaluate(const LssvmParams& p, std::span<const double> x) {
    check_dimension(p.train_x.rows(), x);
    const double inv = 1.0 / (2.0 * p.kernel_width * p.kernel_width);
    double out = p.bias;
    for (Eigen::Index i = 0; i < p.alpha.size(); ++i) out += p.alpha(i) * std::exp(-squared_distance(p.train_x, i, x) * inv);
    return out;
}

double lssvm_kkt_residual(const LssvmParams& p, const Vector& y) {
    const Matrix K = rbf_kernel(p.train_x, p.train_x, p.kernel_width);
    double worst = std::abs(p.alpha.sum());
    const Vector rows = (K * p.alpha).array() + p.bias + p.alpha.array() / p.gamma - y.array();
    worst = std::max(worst, rows.cwiseAbs().maxCoeff());
    return worst;
}

}  // namespace swh
