// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <sstream>
#include <string>
#include <thread>
#include <unistd.h>
#include <vector>

#include "oracles.hpp"
#include "swh/cli.hpp"
#include "swh/metrics.hpp"
#include "swh/model_io.hpp"
#include "swh/screening.hpp"
#include "swh/synthetic.hpp"
#include "swh/text.hpp"

using namespace swh;
using namespace swh::oracle;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& why) {
        if (!ok && pass) {
            pass = false;
            detail = why;
        }
    }
};

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

bool rel_close(double a, double b, double tol) {
    return std::abs(a - b) <= tol * std::max({std::abs(a), std::abs(b), 1e-300});
}

Outcome metric_oracles() {
    Outcome o;
    const std::vector<double> z{8.9, 9.5, 10.1};
    const std::vector<double> a{9.0, 9.2, 10.0};
    const double worked = rms_error(z, a);
    o.require(std::abs(worked - 0.191485) < 5e-7, "worked example gave " + format_double(worked));

    Rng rng(20240601);
    const int cases = 50;
    for (int c = 0; c < cases && o.pass; ++c) {
        const std::size_t n = 1 + rng.below(12);
        std::vector<double> pred(n), act(n);
        for (std::size_t i = 0; i < n; ++i) {
            act[i] = rng.uniform(1.0, 20.0);
            pred[i] = act[i] + rng.uniform(-8.0, 8.0);
        }
        long double ss = 0.0L;
        for (std::size_t i = 0; i < n; ++i) ss += (static_cast<long double>(pred[i]) - act[i]) * (pred[i] - act[i]);
        const double rms_ref = static_cast<double>(std::sqrt(ss / static_cast<long double>(n)));
        o.require(rel_close(rms_error(pred, act), rms_ref, 1e-12), "rms mismatch in case " + std::to_string(c));

        const double tol = rng.uniform(0.05, 0.5);
        std::size_t good = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (std::abs(pred[i] - act[i]) <= tol * std::abs(act[i])) ++good;
        }
        const double acc_ref = 100.0 * static_cast<double>(good) / static_cast<double>(n);
        o.require(rel_close(prediction_accuracy(pred, act, tol), acc_ref, 1e-12) ||
                      (acc_ref == 0.0 && prediction_accuracy(pred, act, tol) == 0.0),
                  "accuracy mismatch in case " + std::to_string(c));

        const std::vector<double> res = residuals(pred, act);
        for (std::size_t i = 0; i < n; ++i) {
            o.require(res[i] == pred[i] - act[i], "residual mismatch in case " + std::to_string(c));
        }
    }
    if (o.pass) o.detail = std::to_string(cases) + " random cases, worked example rms " + fmt("%.6f", worked);
    return o;
}

Outcome validation_arithmetic() {
    Outcome o;
    const auto t0 = Clock::now();
    const std::vector<double> a{11.38, 11.26, 11.34, 11.29};
    const std::vector<double> b{11.47, 11.43, 11.42, 11.45};
    const double ea = validation_error_rate(11.47, a);
    const double eb = validation_error_rate(11.66, b);
    const double ms = seconds_since(t0) * 1e3;
    o.require(fmt("%.2f", ea) == "1.35", "design A gave " + fmt("%.4f", ea));
    o.require(fmt("%.2f", eb) == "1.90", "design B gave " + fmt("%.4f", eb));
    o.require(ms < 1.0, "took " + fmt("%.3f", ms) + " ms");
    if (o.pass) o.detail = "A " + fmt("%.2f", ea) + "%, B " + fmt("%.2f", eb) + "%, " + fmt("%.4f", ms) + " ms";
    return o;
}

Outcome grid_cardinality() {
    Outcome o;
    const GridSpec g = build_grid(kPublishedValueCounts, default_bounds());
    const BigInt total = g.total_combinations();
    o.require(total == BigInt(353812500), "total was " + total.str());
    o.require(g.counts() == kPublishedValueCounts, "value lists lost entries");
    if (o.pass) o.detail = "total_combinations = " + total.str();
    return o;
}

Outcome mlfn_gradient() {
    Outcome o;
    const auto t0 = Clock::now();
    Rng rng(4242);
    const int pairs = 200;
    double worst = 0.0;
    for (int t = 0; t < pairs; ++t) {
        const auto d = static_cast<std::size_t>(1 + rng.below(7));
        const auto h = static_cast<std::size_t>(1 + rng.below(8));
        const std::vector<std::size_t> sizes{d, h, 1};
        const MlfnParams net = mlfn_init(sizes, 1000 + static_cast<std::uint64_t>(t));
        const auto n = static_cast<Eigen::Index>(1 + rng.below(16));
        const Matrix X = random_matrix(rng, static_cast<Eigen::Index>(d), n, 2.0);
        const Vector y = random_vector(rng, n, 2.0);
        const double r = rel_diff(flatten(mlfn_loss_gradient(net, X, y)), finite_difference(net, X, y, 1e-5));
        worst = std::max(worst, r);
    }
    const double s = seconds_since(t0);
    o.require(worst < 1e-6, "worst relative difference " + fmt("%.3e", worst));
    o.require(s < 30.0, "took " + fmt("%.1f", s) + " s");
    if (o.pass) o.detail = std::to_string(pairs) + " pairs, worst relative difference " + fmt("%.2e", worst);
    return o;
}

Outcome elm_lssvm_oracles() {
    Outcome o;
    const auto t0 = Clock::now();
    Rng rng(777);
    const int problems = 40;
    double worst_elm = 0.0;
    double worst_kkt = 0.0;
    for (int t = 0; t < problems; ++t) {
        const auto d = static_cast<Eigen::Index>(1 + rng.below(7));
        const auto n = static_cast<Eigen::Index>(2 + rng.below(49));
        const Matrix X = random_matrix(rng, d, n, 2.0);
        const Vector y = random_vector(rng, n, 3.0);

        ElmConfig ec;
        ec.hidden_size = 1 + rng.below(30);
        ec.ridge = std::pow(10.0, rng.uniform(-3.0, 0.0));
        ec.seed = static_cast<std::uint64_t>(t);
        const ElmParams ep = elm_fit(X, y, ec);
        const std::vector<double> beta(ep.beta.data(), ep.beta.data() + ep.beta.size());
        worst_elm = std::max(worst_elm, rel_diff(beta, ridge_solution(elm_hidden(ep, X), y, ep.ridge)));

        LssvmConfig lc;
        lc.gamma = std::pow(10.0, rng.uniform(-1.0, 2.0));
        lc.kernel_width = rng.uniform(0.5, 3.0);
        const LssvmParams lp = lssvm_fit(X, y, lc);
        worst_kkt = std::max({worst_kkt, lssvm_kkt_residual(lp, y), lssvm_residual(lp, X, y)});
    }
    const double s = seconds_since(t0);
    o.require(worst_elm < 1e-8, "ELM relative difference " + fmt("%.3e", worst_elm));
    o.require(worst_kkt < 1e-8, "LS-SVM KKT residual " + fmt("%.3e", worst_kkt));
    o.require(s < 10.0, "took " + fmt("%.1f", s) + " s");
    if (o.pass) {
        o.detail = std::to_string(problems) + " problems each, ELM " + fmt("%.2e", worst_elm) + ", KKT " +
                   fmt("%.2e", worst_kkt);
    }
    return o;
}

Outcome accuracy_mirror() {
    Outcome o;
    const auto t0 = Clock::now();
    const Dataset data = generate_synthetic(915, 7);
    const auto [train, test] = split(data, 0.85, 7);
    o.require(train.size() == 778 && test.size() == 137,
              "split gave " + std::to_string(train.size()) + "/" + std::to_string(test.size()));
    std::string table;
    for (Target target : {Target::hcr, Target::hlc}) {
        for (ModelKind kind : {ModelKind::mlfn, ModelKind::grnn, ModelKind::elm, ModelKind::lssvm}) {
            TrainConfig cfg;
            cfg.kind = kind;
            cfg.seed = 7;
            cfg.mlfn.seed = 7;
            cfg.elm.seed = 7;
            const EvalReport r = evaluate(train_model(train, target, cfg), test, 0.30);
            const std::string tag = std::string(kind_name(kind)) + "/" + std::string(target_name(target));
            o.require(r.prediction_accuracy == 100.0, tag + " accuracy " + fmt("%.2f", r.prediction_accuracy) + "%");
            table += " " + tag + " rms " + fmt("%.3f", r.rms_error);
        }
    }
    const double s = seconds_since(t0);
    o.require(s < 300.0, "took " + fmt("%.1f", s) + " s");
    if (o.pass) o.detail = "778/137, all 100%," + table + ", " + fmt("%.1f", s) + " s";
    return o;
}

Outcome screening_correctness() {
    Outcome o;
    Rng rng(99);
    const int grids = 30;
    for (int t = 0; t < grids && o.pass; ++t) {
        const GridSpec g = random_grid(rng, 100000);
        const RegressorModel m =
            toy_model(static_cast<std::uint64_t>(t), t % 3 == 0 ? std::vector<std::size_t>{0, 2, 5} : std::vector<std::size_t>{});
        const std::size_t k = 1 + rng.below(200);
        const auto expect = exhaustive_top(m, g, k);
        std::string first;
        for (std::size_t workers : {1, 2, 8}) {
            ScreenOptions opts;
            opts.workers = workers;
            opts.chunk_size = 1 + rng.below(5000);
            const CandidateDB db = screen(m, nullptr, g, ScreenCriterion::top(k), opts);
            o.require(db.candidates == expect, "grid " + std::to_string(t) + " differs from the exhaustive oracle");
            const std::string bytes = candidate_db_to_jsonl(db);
            if (first.empty()) first = bytes;
            o.require(bytes == first, "grid " + std::to_string(t) + " output depends on worker count");
        }
    }
    if (!o.pass) return o;

    // Reduced-scale run on a trained surrogate.
    const Dataset data = generate_synthetic(915, 7);
    const auto [train, test] = split(data, 0.85, 7);
    TrainConfig cfg;
    cfg.seed = 7;
    cfg.mlfn.seed = 7;
    const RegressorModel model = train_model(train, Target::hcr, cfg);
    const FeatureBounds bounds = bounds_from(data);

    const double scale = std::pow(1e6 / 353812500.0, 1.0 / 7.0);
    ValueCounts counts{};
    for (std::size_t j = 0; j < kFeatureCount; ++j) {
        counts[j] = std::max<std::size_t>(2, static_cast<std::size_t>(std::lround(kPublishedValueCounts[j] * scale)));
    }
    const GridSpec grid = build_grid(counts, bounds);
    ScreenOptions opts;
    opts.workers = std::max(1U, std::thread::hardware_concurrency());
    const auto t0 = Clock::now();
    const CandidateDB db = screen(model, nullptr, grid, ScreenCriterion::top(100), opts);
    const double s = seconds_since(t0);

    Rng base_rng(2024);
    std::vector<double> baseline;
    baseline.reserve(10000);
    for (int i = 0; i < 10000; ++i) {
        FeatureVector f{};
        for (std::size_t j = 0; j < kFeatureCount; ++j) {
            f[j] = base_rng.uniform(bounds[j].minimum, bounds[j].maximum);
            if (kIntegerFeature[j]) f[j] = std::round(f[j]);
        }
        baseline.push_back(predict_features(model, f));
    }
    std::sort(baseline.begin(), baseline.end());
    const double p999 = baseline[static_cast<std::size_t>(std::ceil(0.999 * baseline.size())) - 1];
    const double weakest = db.candidates.back().predicted_hcr;
    o.require(s < 60.0, "reduced run took " + fmt("%.1f", s) + " s");
    o.require(weakest >= p999, "weakest candidate " + fmt("%.4f", weakest) + " below baseline p99.9 " + fmt("%.4f", p999));
    if (o.pass) {
        o.detail = std::to_string(grids) + " grids match, reduced run " + grid.total_combinations().str() +
                   " tuples in " + fmt("%.2f", s) + " s, weakest kept " + fmt("%.4f", weakest) + " >= p99.9 " +
                   fmt("%.4f", p999);
    }
    return o;
}

int cli(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int rc = run_cli(args, out, err);
    if (rc != 0) std::fprintf(stderr, "%s", err.str().c_str());
    return rc;
}

Outcome determinism() {
    Outcome o;
    const auto root = std::filesystem::temp_directory_path() / ("swh_accept_" + std::to_string(::getpid()));
    std::filesystem::remove_all(root);
    const std::vector<std::string> artifacts{"data.csv", "hcr.model", "report.csv", "candidates.jsonl"};
    std::vector<std::vector<std::string>> runs;
    for (int run = 0; run < 2; ++run) {
        const auto dir = root / ("run" + std::to_string(run));
        std::filesystem::create_directories(dir);
        auto p = [&](const std::string& name) { return (dir / name).string(); };
        int rc = cli({"gen-data", "--n", "915", "--seed", "7", "--out", p("data.csv")});
        rc |= cli({"train", "--data", p("data.csv"), "--model", "mlfn", "--target", "hcr", "--split", "0.85", "--seed",
                   "7", "--out", p("hcr.model")});
        rc |= cli({"eval", "--model", p("hcr.model"), "--data", p("data.csv"), "--split", "0.85", "--seed", "7",
                   "--report", p("report.csv")});
        rc |= cli({"screen", "--model", p("hcr.model"), "--data", p("data.csv"), "--max-values", "12", "--top-k", "100",
                   "--workers", run == 0 ? "1" : "4", "--out", p("candidates.jsonl")});
        o.require(rc == 0, "pipeline run " + std::to_string(run) + " failed");
        std::vector<std::string> bytes;
        for (const auto& a : artifacts) bytes.push_back(o.pass ? read_file(p(a)) : std::string());
        runs.push_back(std::move(bytes));
    }
    for (std::size_t i = 0; i < artifacts.size() && o.pass; ++i) {
        o.require(!runs[0][i].empty() && runs[0][i] == runs[1][i], artifacts[i] + " differs between runs");
    }
    std::filesystem::remove_all(root);
    if (o.pass) o.detail = "dataset, model, report and candidate files byte-identical";
    return o;
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
        {"metric oracles", metric_oracles},
        {"validation error arithmetic", validation_arithmetic},
        {"grid cardinality", grid_cardinality},
        {"MLFN gradient check", mlfn_gradient},
        {"ELM and LS-SVM oracles", elm_lssvm_oracles},
        {"accuracy mirror", accuracy_mirror},
        {"screening correctness", screening_correctness},
        {"determinism", determinism},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("threw: ") + e.what()};
        }
        std::printf("criterion %zu [%s] %s: %s\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first, o.detail.c_str());
        std::fflush(stdout);
        if (!o.pass) ++failed;
    }
    return failed == 0 ? 0 : 1;
}
