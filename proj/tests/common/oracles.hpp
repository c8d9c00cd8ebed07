#pragma once

// Independent reference computations shared by the unit and acceptance
// suites. Nothing here calls into the solvers it checks.

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "swh/kernel_models.hpp"
#include "swh/mlfn.hpp"
#include "swh/rng.hpp"
#include "swh/screening.hpp"

namespace swh::oracle {

inline Matrix random_matrix(Rng& rng, Eigen::Index r, Eigen::Index c, double scale = 1.0) {
    Matrix m(r, c);
    for (Eigen::Index i = 0; i < r; ++i) {
        for (Eigen::Index j = 0; j < c; ++j) m(i, j) = rng.uniform(-scale, scale);
    }
    return m;
}

inline Vector random_vector(Rng& rng, Eigen::Index n, double scale = 1.0) {
    Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = rng.uniform(-scale, scale);
    return v;
}

// Gaussian elimination with partial pivoting on plain vectors.
inline std::vector<double> solve_dense(std::vector<std::vector<double>> a, std::vector<double> b) {
    const std::size_t n = b.size();
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < n; ++r) {
            if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
        }
        std::swap(a[c], a[piv]);
        std::swap(b[c], b[piv]);
        for (std::size_t r = c + 1; r < n; ++r) {
            const double f = a[r][c] / a[c][c];
            for (std::size_t k = c; k < n; ++k) a[r][k] -= f * a[c][k];
            b[r] -= f * b[c];
        }
    }
    std::vector<double> x(n);
    for (std::size_t i = n; i-- > 0;) {
        double s = b[i];
        for (std::size_t k = i + 1; k < n; ++k) s -= a[i][k] * x[k];
        x[i] = s / a[i][i];
    }
    return x;
}

// ||a - b|| / max(||a||, ||b||)
inline double rel_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double num = 0.0;
    double na = 0.0;
    double nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        num += (a[i] - b[i]) * (a[i] - b[i]);
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    const double den = std::sqrt(std::max(na, nb));
    return den == 0.0 ? std::sqrt(num) : std::sqrt(num) / den;
}

// Ridge normal equations (H^T H + ridge I) beta = H^T y built element by
// element and solved by elimination.
inline std::vector<double> ridge_solution(const Matrix& H, const Vector& y, double ridge) {
    const auto L = static_cast<std::size_t>(H.cols());
    const Eigen::Index n = H.rows();
    std::vector<std::vector<double>> a(L, std::vector<double>(L, 0.0));
    std::vector<double> b(L, 0.0);
    for (std::size_t i = 0; i < L; ++i) {
        const auto ci = static_cast<Eigen::Index>(i);
        for (std::size_t j = 0; j < L; ++j) {
            const auto cj = static_cast<Eigen::Index>(j);
            for (Eigen::Index r = 0; r < n; ++r) a[i][j] += H(r, ci) * H(r, cj);
        }
        a[i][i] += ridge;
        for (Eigen::Index r = 0; r < n; ++r) b[i] += H(r, ci) * y(r);
    }
    return solve_dense(a, b);
}

// Infinity norm of the LS-SVM KKT residual with the kernel evaluated from
// its definition.
inline double lssvm_residual(const LssvmParams& p, const Matrix& X, const Vector& y) {
    const Eigen::Index n = X.cols();
    const double w2 = 2.0 * p.kernel_width * p.kernel_width;
    double worst = std::abs(p.alpha.sum());
    for (Eigen::Index i = 0; i < n; ++i) {
        double row = p.bias + p.alpha(i) / p.gamma - y(i);
        for (Eigen::Index j = 0; j < n; ++j) {
            double d2 = 0.0;
            for (Eigen::Index r = 0; r < X.rows(); ++r) d2 += (X(r, i) - X(r, j)) * (X(r, i) - X(r, j));
            row += std::exp(-d2 / w2) * p.alpha(j);
        }
        worst = std::max(worst, std::abs(row));
    }
    return worst;
}

inline std::vector<double> flatten(const MlfnGradient& g) {
    std::vector<double> out;
    for (std::size_t l = 0; l < g.weights.size(); ++l) {
        for (Eigen::Index i = 0; i < g.weights[l].size(); ++i) out.push_back(g.weights[l].data()[i]);
        for (Eigen::Index i = 0; i < g.biases[l].size(); ++i) out.push_back(g.biases[l](i));
    }
    return out;
}

// Central differences of mlfn_loss, in the same order as flatten().
inline std::vector<double> finite_difference(MlfnParams net, const Matrix& X, const Vector& y, double h) {
    std::vector<double> out;
    auto probe = [&](double& slot) {
        const double keep = slot;
        slot = keep + h;
        const double up = mlfn_loss(net, X, y);
        slot = keep - h;
        const double down = mlfn_loss(net, X, y);
        slot = keep;
        out.push_back((up - down) / (2.0 * h));
    };
    for (std::size_t l = 0; l < net.weights.size(); ++l) {
        for (Eigen::Index i = 0; i < net.weights[l].size(); ++i) probe(net.weights[l].data()[i]);
        for (Eigen::Index i = 0; i < net.biases[l].size(); ++i) probe(net.biases[l](i));
    }
    return out;
}

// Every tuple of the grid by nested loops, first feature slowest.
inline std::vector<FeatureVector> brute_force_tuples(const GridSpec& g) {
    std::vector<FeatureVector> out;
    FeatureVector cur{};
    std::function<void(std::size_t)> rec = [&](std::size_t j) {
        if (j == kFeatureCount) {
            out.push_back(cur);
            return;
        }
        for (double v : g.values(j)) {
            cur[j] = v;
            rec(j + 1);
        }
    };
    rec(0);
    return out;
}

// Score everything, stable-sort by prediction, keep k.
inline std::vector<Candidate> exhaustive_top(const RegressorModel& m, const GridSpec& g, std::size_t k) {
    const auto tuples = brute_force_tuples(g);
    std::vector<Candidate> all;
    all.reserve(tuples.size());
    for (std::size_t i = 0; i < tuples.size(); ++i) {
        all.push_back({i, tuples[i], predict_features(m, tuples[i]), std::nullopt});
    }
    std::stable_sort(all.begin(), all.end(),
                     [](const Candidate& a, const Candidate& b) { return a.predicted_hcr > b.predicted_hcr; });
    if (all.size() > k) all.resize(k);
    return all;
}

// MLFN on raw features with random weights; columns in `dead` are zeroed so
// that many tuples tie.
inline RegressorModel toy_model(std::uint64_t seed, const std::vector<std::size_t>& dead = {}) {
    const std::vector<std::size_t> sizes{kFeatureCount, 4, 1};
    MlfnParams net = mlfn_init(sizes, seed);
    for (std::size_t j : dead) net.weights[0].col(static_cast<Eigen::Index>(j)).setZero();
    RegressorModel m;
    m.target = Target::hcr;
    m.normalizer.mean = {1800, 20, 75, 150, 2.5, 45, 54};
    m.normalizer.std_dev = {100, 10, 20, 50, 1, 10, 4};
    m.target_scaling = {9.0, 0.5};
    m.params = net;
    return m;
}

// Random small grid over the published bounds with at most max_total tuples.
inline GridSpec random_grid(Rng& rng, std::uint64_t max_total) {
    for (;;) {
        ValueCounts counts{};
        std::uint64_t total = 1;
        for (std::size_t j = 0; j < kFeatureCount; ++j) {
            counts[j] = 1 + rng.below(kIntegerFeature[j] ? 5 : 8);
            total *= counts[j];
        }
        if (total <= max_total) return build_grid(counts, default_bounds());
    }
}

}  // namespace swh::oracle
