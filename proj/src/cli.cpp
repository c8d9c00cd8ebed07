#include "swh/cli.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>

#include "CLI11.hpp"
#include "json.hpp"
#include "swh/error.hpp"
#include "swh/metrics.hpp"
#include "swh/model_io.hpp"
#include "swh/screening.hpp"
#include "swh/service.hpp"
#include "swh/synthetic.hpp"
#include "swh/text.hpp"

namespace swh {

using nlohmann::json;

namespace {

// "--top-k" -> "top_k"
std::string config_key(const std::string& flag) {
    std::string key = flag.substr(flag.find_first_not_of('-'));
    std::replace(key.begin(), key.end(), '-', '_');
    return key;
}

// Options of one subcommand that may also come from the --config file.
// A value given on the command line wins over the file, which wins over the
// built-in default.
class Settings {
public:
    explicit Settings(CLI::App* app) : app_(app) {}

    template <class T>
    CLI::Option* option(const std::string& flag, T& var, const std::string& help) {
        CLI::Option* opt = app_->add_option(flag, var, help)->capture_default_str();
        bindings_.push_back({config_key(flag), opt, [&var](const json& v) { var = v.get<T>(); }});
        return opt;
    }

    CLI::Option* flag(const std::string& flag, bool& var, const std::string& help) {
        CLI::Option* opt = app_->add_flag(flag, var, help);
        bindings_.push_back({config_key(flag), opt, [&var](const json& v) { var = v.get<bool>(); }});
        return opt;
    }

    // Fills unset options from cfg[section][key], then cfg[key].
    void apply(const json& cfg, const std::string& section) {
        for (Binding& b : bindings_) {
            if (b.opt->count() > 0) continue;
            const json* v = nullptr;
            if (cfg.contains(section) && cfg[section].is_object() && cfg[section].contains(b.key)) {
                v = &cfg[section][b.key];
            } else if (cfg.contains(b.key)) {
                v = &cfg[b.key];
            }
            if (!v) continue;
            try {
                b.set(*v);
            } catch (const json::exception& e) {
                throw ArgumentError("config value '" + b.key + "' has the wrong type: " + e.what());
            }
            b.from_config = true;
        }
    }

    // True when the option came from the command line or the config file.
    [[nodiscard]] bool given(const std::string& flag) const {
        const std::string key = config_key(flag);
        for (const Binding& b : bindings_) {
            if (b.key == key) return b.opt->count() > 0 || b.from_config;
        }
        return false;
    }

private:
    struct Binding {
        std::string key;
        CLI::Option* opt;
        std::function<void(const json&)> set;
        bool from_config = false;
    };
    CLI::App* app_;
    std::vector<Binding> bindings_;
};

json stats_json(const ColumnStats& s) {
    return {{"name", s.name},       {"count", s.count}, {"maximum", s.maximum}, {"minimum", s.minimum},
            {"range", s.range},     {"average", s.average}, {"std_dev", s.std_dev}};
}

std::string stats_csv(const std::vector<ColumnStats>& cols) {
    std::string out = "variable,count,maximum,minimum,range,average,std_dev\n";
    for (const ColumnStats& s : cols) {
        out += s.name + "," + std::to_string(s.count) + "," + format_double(s.maximum) + "," +
               format_double(s.minimum) + "," + format_double(s.range) + "," + format_double(s.average) + "," +
               format_double(s.std_dev) + "\n";
    }
    return out;
}

json eval_json(const EvalReport& r) { return json::parse(report_summary_json(r)); }

std::optional<std::size_t> feature_index(const std::string& name) {
    for (std::size_t j = 0; j < kFeatureCount; ++j) {
        if (kFeatureNames[j] == name) return j;
    }
    return std::nullopt;
}

// "name=value" pairs from repeated --count flags.
CountOverrides parse_count_overrides(const std::vector<std::string>& items) {
    CountOverrides out{};
    for (const std::string& item : items) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw ArgumentError("count override '" + item + "' is not name=value");
        const auto j = feature_index(item.substr(0, eq));
        if (!j) throw ArgumentError("unknown feature '" + item.substr(0, eq) + "' in count override");
        const auto parsed = parse_double(item.substr(eq + 1));
        const double v = parsed.value_or(0.0);
        if (!(v >= 1.0) || v != std::floor(v)) throw ArgumentError("count for '" + item + "' must be a whole number >= 1");
        out[*j] = static_cast<std::size_t>(v);
    }
    return out;
}

struct TrainFlags {
    std::string data;
    std::string kind = "mlfn";
    std::string target = "hcr";
    std::string out;
    std::string report;
    std::string test_out;
    double split = 0.85;
    std::uint64_t seed = 7;
    std::uint64_t sensitivity_seed = 0;
    double tolerance = kDefaultTolerance;
    std::vector<std::size_t> hidden{8};
    double learning_rate = 0.05;
    double momentum = 0.9;
    long epochs = 20000;
    std::size_t elm_hidden = 40;
    double ridge = 1e-3;
    std::vector<double> sigmas = TrainConfig{}.grnn_sigmas;
    std::vector<double> gammas = TrainConfig{}.lssvm_gammas;
    std::vector<double> widths = TrainConfig{}.lssvm_widths;
    double holdout = 0.15;
};

TrainConfig train_config(const TrainFlags& f, std::uint64_t seed) {
    TrainConfig tc;
    tc.kind = parse_kind(f.kind);
    tc.mlfn.hidden_sizes = f.hidden;
    tc.mlfn.learning_rate = f.learning_rate;
    tc.mlfn.momentum = f.momentum;
    tc.mlfn.epochs = f.epochs;
    tc.elm.hidden_size = f.elm_hidden;
    tc.elm.ridge = f.ridge;
    tc.grnn_sigmas = f.sigmas;
    tc.lssvm_gammas = f.gammas;
    tc.lssvm_widths = f.widths;
    tc.holdout_fraction = f.holdout;
    tc.seed = seed;
    return tc;
}

void log_warnings(const RegressorModel& m, std::ostream& err) {
    for (const std::string& w : m.meta.warnings) err << "warning: " << w << "\n";
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Surrogate regression and design screening for solar water heaters", "swhtool"};
    app.require_subcommand(1);
    std::string config_path;
    app.add_option("--config", config_path, "JSON file with default option values")->check(CLI::ExistingFile);

    // gen-data
    CLI::App* gen = app.add_subcommand("gen-data", "Generate a calibrated synthetic design database");
    Settings gen_s(gen);
    std::size_t gen_n = 915;
    std::uint64_t gen_seed = 7;
    std::string gen_out;
    std::string gen_calibration;
    gen_s.option("--n", gen_n, "Number of records");
    gen_s.option("--seed", gen_seed, "Random seed");
    gen_s.option("--out", gen_out, "Output CSV");
    gen_s.option("--calibration", gen_calibration, "Generator calibration JSON");

    // stats
    CLI::App* stats = app.add_subcommand("stats", "Descriptive statistics of a dataset");
    Settings stats_s(stats);
    std::string stats_data;
    std::string stats_out;
    stats_s.option("--data", stats_data, "Dataset CSV");
    stats_s.option("--out", stats_out, "Write the table as CSV");

    // train
    CLI::App* train = app.add_subcommand("train", "Split, train one model and evaluate it on the held-out part");
    Settings train_s(train);
    TrainFlags tf;
    train_s.option("--data", tf.data, "Dataset CSV");
    train_s.option("--model", tf.kind, "Model kind")->check(CLI::IsMember({"mlfn", "grnn", "elm", "lssvm"}));
    train_s.option("--target", tf.target, "Target")->check(CLI::IsMember({"hcr", "hlc"}));
    train_s.option("--out", tf.out, "Model file (default <target>.model)");
    train_s.option("--report", tf.report, "Per-sample test report CSV");
    train_s.option("--test-out", tf.test_out, "Write the test partition as CSV");
    train_s.option("--split", tf.split, "Training fraction");
    train_s.option("--seed", tf.seed, "Split and training seed");
    train_s.option("--sensitivity-seed", tf.sensitivity_seed, "Repeat split and training with this seed");
    train_s.option("--tolerance", tf.tolerance, "Relative accuracy tolerance");
    train_s.option("--hidden", tf.hidden, "MLFN hidden layer sizes");
    train_s.option("--learning-rate", tf.learning_rate, "MLFN learning rate");
    train_s.option("--momentum", tf.momentum, "MLFN momentum");
    train_s.option("--epochs", tf.epochs, "MLFN epochs");
    train_s.option("--elm-hidden", tf.elm_hidden, "ELM hidden nodes");
    train_s.option("--ridge", tf.ridge, "ELM ridge");
    train_s.option("--sigmas", tf.sigmas, "GRNN sigma grid");
    train_s.option("--gammas", tf.gammas, "LS-SVM gamma grid");
    train_s.option("--widths", tf.widths, "LS-SVM kernel width grid");
    train_s.option("--holdout", tf.holdout, "Selection holdout fraction for GRNN and LS-SVM");

    // eval
    CLI::App* eval = app.add_subcommand("eval", "Evaluate a model on a labelled dataset");
    Settings eval_s(eval);
    std::string eval_model;
    std::string eval_data;
    std::string eval_report;
    double eval_tolerance = kDefaultTolerance;
    double eval_split = 0.85;
    std::uint64_t eval_seed = 7;
    eval_s.option("--model", eval_model, "Model file");
    eval_s.option("--data", eval_data, "Dataset CSV");
    eval_s.option("--report", eval_report, "Per-sample report CSV");
    eval_s.option("--tolerance", eval_tolerance, "Relative accuracy tolerance");
    eval_s.option("--split", eval_split, "Evaluate only the test part of this split");
    eval_s.option("--seed", eval_seed, "Seed of the split");

    // predict
    CLI::App* pred = app.add_subcommand("predict", "Predict one design");
    Settings pred_s(pred);
    std::string pred_model;
    FeatureVector pf{};
    pred_s.option("--model", pred_model, "Model file");
    pred_s.option("--tube-length", pf[0], "Tube length (mm)");
    pred_s.option("--n-tubes", pf[1], "Number of tubes");
    pred_s.option("--tcd", pf[2], "Tube center distance (mm)");
    pred_s.option("--tank-volume", pf[3], "Tank volume (kg)");
    pred_s.option("--area", pf[4], "Collector area (m2)");
    pred_s.option("--angle", pf[5], "Tilt angle (deg)");
    pred_s.option("--final-temp", pf[6], "Final temperature (C)");

    // screen
    CLI::App* scr = app.add_subcommand("screen", "Enumerate a design grid and keep the best candidates");
    Settings scr_s(scr);
    std::string scr_model;
    std::string scr_hlc_model;
    std::string scr_data;
    std::string scr_out;
    std::string scr_allocation;
    std::size_t scr_top_k = 100;
    double scr_threshold = 0.0;
    std::vector<std::string> scr_counts;
    std::size_t scr_max_values = 111;
    double scr_cap = 1e9;
    bool scr_allow_large = false;
    std::size_t scr_workers = 1;
    std::uint64_t scr_chunk = 1 << 16;
    scr_s.option("--model", scr_model, "HCR model file");
    scr_s.option("--hlc-model", scr_hlc_model, "Optional HLC model file");
    scr_s.option("--data", scr_data, "Dataset whose feature ranges bound the grid");
    scr_s.option("--out", scr_out, "Candidate database (JSON lines)");
    scr_s.option("--allocation", scr_allocation, "importance (MLFN only) or published; default by model kind")
        ->check(CLI::IsMember({"importance", "published"}));
    scr_s.option("--top-k", scr_top_k, "Keep the k best designs");
    scr_s.option("--threshold", scr_threshold, "Keep every design with hcr >= this");
    scr_s.option("--count", scr_counts, "Value count override, feature=n (repeatable)");
    scr_s.option("--max-values", scr_max_values, "Values given to the most important feature");
    scr_s.option("--cap", scr_cap, "Enumeration cap");
    scr_s.flag("--allow-large", scr_allow_large, "Lift the enumeration cap");
    scr_s.option("--workers", scr_workers, "Worker threads");
    scr_s.option("--chunk-size", scr_chunk, "Grid indices per work unit");

    // db
    CLI::App* db = app.add_subcommand("db", "Candidate database operations");
    db->require_subcommand(1);
    CLI::App* db_export = db->add_subcommand("export", "Candidates as dataset CSV");
    Settings dbx_s(db_export);
    std::string dbx_db;
    std::string dbx_out;
    dbx_s.option("--db", dbx_db, "Candidate database");
    dbx_s.option("--out", dbx_out, "Output CSV");
    CLI::App* db_merge = db->add_subcommand("merge", "Merge measured designs into the original dataset");
    Settings dbm_s(db_merge);
    std::string dbm_db;
    std::string dbm_data;
    std::string dbm_experiments;
    std::string dbm_out;
    std::string dbm_db_out;
    dbm_s.option("--db", dbm_db, "Candidate database");
    dbm_s.option("--data", dbm_data, "Original dataset CSV");
    dbm_s.option("--experiments", dbm_experiments, "Measured designs CSV");
    dbm_s.option("--out", dbm_out, "Merged dataset CSV");
    dbm_s.option("--db-out", dbm_db_out, "Updated candidate database (default: overwrite --db)");

    // serve
    CLI::App* serve = app.add_subcommand("serve", "Serve the prediction API and web panel");
    Settings serve_s(serve);
    std::string serve_hcr;
    std::string serve_hlc;
    std::string serve_host = "127.0.0.1";
    int serve_port = 8080;
    std::string serve_static;
    serve_s.option("--hcr-model", serve_hcr, "HCR model file");
    serve_s.option("--hlc-model", serve_hlc, "HLC model file");
    serve_s.option("--host", serve_host, "Bind address");
    serve_s.option("--port", serve_port, "Port");
    serve_s.option("--static-dir", serve_static, "Directory served at /");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n";
        return 2;
    }

    auto require = [](const std::string& value, const std::string& flag) {
        if (value.empty()) throw ArgumentError(flag + " is required");
    };

    try {
        json cfg = json::object();
        if (!config_path.empty()) {
            try {
                cfg = json::parse(read_file(config_path));
            } catch (const json::exception& e) {
                throw ParseError("config '" + config_path + "': " + e.what());
            }
            if (!cfg.is_object()) throw ParseError("config '" + config_path + "' must hold a JSON object");
        }

        json summary;
        if (gen->parsed()) {
            gen_s.apply(cfg, "gen-data");
            require(gen_out, "--out");
            const GeneratorConfig gc = gen_calibration.empty() ? GeneratorConfig{} : load_generator_config(gen_calibration);
            const Dataset ds = generate_synthetic(gen_n, gen_seed, gc);
            save_dataset(ds, gen_out);
            err << "wrote " << ds.size() << " records to " << gen_out << "\n";
            summary = {{"command", "gen-data"},
                       {"out", gen_out},
                       {"n", ds.size()},
                       {"seed", gen_seed},
                       {"dataset_fingerprint", dataset_fingerprint(ds)}};
        } else if (stats->parsed()) {
            stats_s.apply(cfg, "stats");
            require(stats_data, "--data");
            const Dataset ds = load_dataset(stats_data);
            const std::vector<ColumnStats> cols = descriptive_stats(ds);
            if (!stats_out.empty()) write_file(stats_out, stats_csv(cols));
            json arr = json::array();
            for (const ColumnStats& c : cols) arr.push_back(stats_json(c));
            summary = {{"command", "stats"}, {"n", ds.size()}, {"columns", arr}};
        } else if (train->parsed()) {
            train_s.apply(cfg, "train");
            require(tf.data, "--data");
            const Target target = parse_target(tf.target);
            if (tf.out.empty()) tf.out = std::string(target_name(target)) + ".model";
            const Dataset data = load_dataset(tf.data);
            const auto [tr, te] = split(data, tf.split, tf.seed);
            err << "training " << tf.kind << " on " << tr.size() << " records, testing on " << te.size() << "\n";
            const RegressorModel model = train_model(tr, target, train_config(tf, tf.seed));
            log_warnings(model, err);
            save_model(model, tf.out);
            const EvalReport rep = evaluate(model, te, tf.tolerance);
            if (!tf.report.empty()) write_file(tf.report, report_csv(rep));
            if (!tf.test_out.empty()) save_dataset(te, tf.test_out);
            summary = {{"command", "train"},
                       {"kind", kind_name(model.kind())},
                       {"target", target_name(target)},
                       {"seed", tf.seed},
                       {"n_train", tr.size()},
                       {"n_test", te.size()},
                       {"model", tf.out},
                       {"model_fingerprint", model_fingerprint(model)},
                       {"dataset_fingerprint", model.meta.dataset_fingerprint},
                       {"hyperparameters", model.meta.hyperparameters},
                       {"eval", eval_json(rep)}};
            if (train_s.given("--sensitivity-seed")) {
                const auto [tr2, te2] = split(data, tf.split, tf.sensitivity_seed);
                err << "sensitivity run with seed " << tf.sensitivity_seed << "\n";
                const RegressorModel m2 = train_model(tr2, target, train_config(tf, tf.sensitivity_seed));
                log_warnings(m2, err);
                json s = eval_json(evaluate(m2, te2, tf.tolerance));
                s["seed"] = tf.sensitivity_seed;
                summary["sensitivity"] = s;
            }
        } else if (eval->parsed()) {
            eval_s.apply(cfg, "eval");
            require(eval_model, "--model");
            require(eval_data, "--data");
            const RegressorModel model = load_model(eval_model);
            Dataset data = load_dataset(eval_data);
            if (eval_s.given("--split")) data = split(data, eval_split, eval_seed).second;
            const EvalReport rep = evaluate(model, data, eval_tolerance);
            if (!eval_report.empty()) write_file(eval_report, report_csv(rep));
            summary = eval_json(rep);
            summary["command"] = "eval";
            summary["model_fingerprint"] = model_fingerprint(model);
        } else if (pred->parsed()) {
            pred_s.apply(cfg, "predict");
            require(pred_model, "--model");
            for (const char* flag :
                 {"--tube-length", "--n-tubes", "--tcd", "--tank-volume", "--area", "--angle", "--final-temp"}) {
                if (!pred_s.given(flag)) throw ArgumentError(std::string(flag) + " is required");
            }
            const std::string bytes = read_file(pred_model);
            const RegressorModel model = model_from_json(bytes);
            constexpr auto kTubes = static_cast<std::size_t>(Feature::n_tubes);
            if (pf[kTubes] != std::floor(pf[kTubes])) {
                throw ValidationError("n_tubes must be a whole number");
            }
            validate_record(record_from_features(pf));
            const double y = predict_features(model, pf);
            summary = {{"command", "predict"},
                       {"target", target_name(model.target)},
                       {"kind", kind_name(model.kind())},
                       {std::string(target_name(model.target)), y},
                       {"model_fingerprint", to_hex64(fnv1a64(bytes))}};
        } else if (scr->parsed()) {
            scr_s.apply(cfg, "screen");
            require(scr_model, "--model");
            require(scr_out, "--out");
            if (scr_s.given("--top-k") && scr_s.given("--threshold")) {
                throw ArgumentError("--top-k and --threshold are mutually exclusive");
            }
            if (!(scr_cap >= 1.0) || scr_cap > 1.8e19) throw ArgumentError("--cap must be between 1 and 1.8e19");
            const RegressorModel hcr = load_model(scr_model);
            std::optional<RegressorModel> hlc;
            if (!scr_hlc_model.empty()) hlc = load_model(scr_hlc_model);

            if (scr_allocation.empty()) scr_allocation = hcr.kind() == ModelKind::mlfn ? "importance" : "published";
            const CountOverrides overrides = parse_count_overrides(scr_counts);
            const auto cap = static_cast<std::uint64_t>(scr_cap);
            const BigInt product_cap = scr_allow_large ? BigInt(std::numeric_limits<std::uint64_t>::max()) : BigInt(cap);
            ValueCounts counts{};
            if (scr_allocation == "importance") {
                try {
                    counts = allocate_value_counts(weight_importance(hcr), product_cap, overrides, scr_max_values);
                } catch (const CapacityError& e) {
                    throw CapacityError(std::string(e.what()) + "; lower --max-values or pass --allow-large");
                }
            } else {
                std::array<double, kFeatureCount> flat{};
                flat.fill(1.0 / static_cast<double>(kFeatureCount));
                CountOverrides merged = overrides;
                for (std::size_t j = 0; j < kFeatureCount; ++j) {
                    if (!merged[j]) merged[j] = kPublishedValueCounts[j];
                }
                counts = allocate_value_counts(flat, product_cap, merged, 1);
            }
            const FeatureBounds bounds = scr_data.empty() ? default_bounds() : bounds_from(load_dataset(scr_data));
            const GridSpec grid = build_grid(counts, bounds);
            err << "screening " << grid.total_combinations().str() << " designs with " << scr_workers << " worker(s)\n";

            ScreenOptions opts;
            opts.workers = scr_workers;
            opts.chunk_size = scr_chunk;
            opts.enumeration_cap = cap;
            opts.allow_large = scr_allow_large;
            const ScreenCriterion crit = scr_s.given("--threshold") ? ScreenCriterion::threshold(scr_threshold)
                                                                     : ScreenCriterion::top(scr_top_k);
            const CandidateDB cdb = screen(hcr, hlc ? &*hlc : nullptr, grid, crit, opts);
            save_candidate_db(cdb, scr_out);
            json count_arr = json::array();
            for (std::size_t c : grid.counts()) count_arr.push_back(c);
            summary = {{"command", "screen"},
                       {"out", scr_out},
                       {"allocation", scr_allocation},
                       {"value_counts", count_arr},
                       {"total_combinations", grid.total_combinations().str()},
                       {"candidates", cdb.candidates.size()},
                       {"model_fingerprint", cdb.model_fingerprint}};
            if (!cdb.candidates.empty()) summary["best_hcr"] = cdb.candidates.front().predicted_hcr;
        } else if (db_export->parsed()) {
            dbx_s.apply(cfg, "db");
            require(dbx_db, "--db");
            require(dbx_out, "--out");
            const Dataset ds = candidates_as_dataset(load_candidate_db(dbx_db));
            save_dataset(ds, dbx_out);
            summary = {{"command", "db export"}, {"out", dbx_out}, {"n", ds.size()}};
        } else if (db_merge->parsed()) {
            dbm_s.apply(cfg, "db");
            require(dbm_db, "--db");
            require(dbm_data, "--data");
            require(dbm_experiments, "--experiments");
            require(dbm_out, "--out");
            if (dbm_db_out.empty()) dbm_db_out = dbm_db;
            const Dataset original = load_dataset(dbm_data);
            const Dataset experiments = load_dataset(dbm_experiments);
            const MergeResult mr = merge_validated(load_candidate_db(dbm_db), original, experiments);
            save_dataset(mr.merged, dbm_out);
            save_candidate_db(mr.db, dbm_db_out);
            json vals = json::array();
            for (const ValidationRecord& v : mr.db.validations) {
                vals.push_back({{"grid_index", v.grid_index},
                                {"predicted_hcr", v.predicted_hcr},
                                {"error_rate_pct", v.error_rate_pct}});
            }
            summary = {{"command", "db merge"},
                       {"out", dbm_out},
                       {"db_out", dbm_db_out},
                       {"n_original", original.size()},
                       {"n_experiments", experiments.size()},
                       {"n_merged", mr.merged.size()},
                       {"validations", vals}};
        } else if (serve->parsed()) {
            serve_s.apply(cfg, "serve");
            require(serve_hcr, "--hcr-model");
            require(serve_hlc, "--hlc-model");
            const PredictionService service(load_model_file(serve_hcr, Target::hcr),
                                            load_model_file(serve_hlc, Target::hlc));
            const std::optional<std::string> static_dir =
                serve_static.empty() ? std::nullopt : std::optional<std::string>(serve_static);
            out << json{{"command", "serve"}, {"host", serve_host}, {"port", serve_port}}.dump() << std::endl;
            err << "listening on " << serve_host << ":" << serve_port << "\n";
            run_server(service, serve_host, serve_port, static_dir);
            return 0;
        }
        out << summary.dump() << "\n";
        return 0;
    } catch (const Error& e) {
        err << "error[" << e.category() << "]: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace swh
