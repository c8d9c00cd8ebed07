#include "swh/screening.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

#include "json.hpp"
#include "swh/error.hpp"
#include "swh/metrics.hpp"
#include "swh/model_io.hpp"
#include "swh/synthetic.hpp"
#include "swh/text.hpp"

namespace swh {

using nlohmann::json;

FeatureBounds default_bounds() {
    const GeneratorConfig cfg;
    FeatureBounds b{};
    for (std::size_t j = 0; j < kFeatureCount; ++j) b[j] = {cfg.features[j].minimum, cfg.features[j].maximum};
    return b;
}

FeatureBounds bounds_from(const Dataset& ds) {
    const std::vector<ColumnStats> stats = descriptive_stats(ds);
    FeatureBounds b{};
    for (std::size_t j = 0; j < kFeatureCount; ++j) b[j] = {stats[j].minimum, stats[j].maximum};
    return b;
}

// ---- GridSpec --------------------------------------------------------------

GridSpec::GridSpec(std::array<std::vector<double>, kFeatureCount> values, FeatureBounds bounds)
    : values_(std::move(values)), bounds_(bounds) {
    for (std::size_t j = 0; j < kFeatureCount; ++j) {
        const std::string name(kFeatureNames[j]);
        const auto& v = values_[j];
        if (v.empty()) throw GridError("no candidate values for '" + name + "'");
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (!std::isfinite(v[i])) throw GridError("non-finite value for '" + name + "'");
            if (i > 0 && !(v[i] > v[i - 1])) throw GridError("values for '" + name + "' must be strictly ascending");
        }
        if (v.front() < bounds_[j].minimum || v.back() > bounds_[j].maximum) {
            throw GridError("values for '" + name + "' leave the experimental range [" +
                            format_double(bounds_[j].minimum) + ", " + format_double(bounds_[j].maximum) + "]");
        }
    }
}

ValueCounts GridSpec::counts() const {
    ValueCounts c{};
    for (std::size_t j = 0; j < kFeatureCount; ++j) c[j] = values_[j].size();
    return c;
}

BigInt GridSpec::total_combinations() const {
    BigInt total = 1;
    for (const auto& v : values_) total *= v.size();
    return total;
}

std::optional<std::uint64_t> GridSpec::total_u64() const {
    const BigInt total = total_combinations();
    if (total > BigInt(std::numeric_limits<std::uint64_t>::max())) return std::nullopt;
    return total.convert_to<std::uint64_t>();
}

std::array<std::size_t, kFeatureCount> GridSpec::digits_of(std::uint64_t index) const {
    std::array<std::size_t, kFeatureCount> d{};
    for (std::size_t j = kFeatureCount; j-- > 0;) {
        const std::uint64_t radix = values_[j].size();
        d[j] = static_cast<std::size_t>(index % radix);
        index /= radix;
    }
    return d;
}

std::uint64_t GridSpec::index_of(const std::array<std::size_t, kFeatureCount>& digits) const {
    std::uint64_t index = 0;
    for (std::size_t j = 0; j < kFeatureCount; ++j) {
        if (digits[j] >= values_[j].size()) throw ArgumentError("grid digit out of range");
        index = index * values_[j].size() + digits[j];
    }
    return index;
}

FeatureVector GridSpec::tuple_at(std::uint64_t index) const {
    const auto total = total_u64();
    if (!total || index >= *total) throw ArgumentError("grid index out of range");
    const auto d = digits_of(index);
    FeatureVector f{};
    for (std::size_t j = 0; j < kFeatureCount; ++j) f[j] = values_[j][d[j]];
    return f;
}

std::optional<std::uint64_t> GridSpec::find(const FeatureVector& f) const {
    std::array<std::size_t, kFeatureCount> d{};
    for (std::size_t j = 0; j < kFeatureCount; ++j) {
        const auto& v = values_[j];
        const auto it = std::lower_bound(v.begin(), v.end(), f[j]);
        if (it == v.end() || *it != f[j]) return std::nullopt;
        d[j] = static_cast<std::size_t>(it - v.begin());
    }
    return index_of(d);
}

// ---- enumeration -----------------------------------------------------------

GridRange::iterator::iterator(const GridSpec* spec, std::uint64_t index) : spec_(spec) {
    point_.index = index;
    if (spec_) {
        digits_ = spec_->digits_of(index);
        for (std::size_t j = 0; j < kFeatureCount; ++j) point_.features[j] = spec_->values(j)[digits_[j]];
    }
}

GridRange::iterator& GridRange::iterator::operator++() {
    ++point_.index;
    for (std::size_t j = kFeatureCount; j-- > 0;) {
        const auto& v = spec_->values(j);
        if (++digits_[j] < v.size()) {
            point_.features[j] = v[digits_[j]];
            break;
        }
        digits_[j] = 0;
        point_.features[j] = v[0];
    }
    return *this;
}

GridRange::GridRange(const GridSpec& spec, std::uint64_t start, std::uint64_t end)
    : spec_(&spec), start_(start), end_(end) {}

GridRange enumerate_grid(const GridSpec& spec, std::uint64_t start, std::uint64_t end) {
    const auto total = spec.total_u64();
    if (!total) throw CapacityError("grid is too large to enumerate");
    if (!(start < end && end <= *total)) {
        throw ArgumentError("grid range [" + std::to_string(start) + ", " + std::to_string(end) +
                            ") is not inside [0, " + std::to_string(*total) + ")");
    }
    return {spec, start, end};
}

// ---- value allocation ------------------------------------------------------

std::array<double, kFeatureCount> weight_importance(const RegressorModel& model) {
    const auto* net = std::get_if<MlfnParams>(&model.params);
    if (!net) {
        throw UnsupportedKindError("weight importance needs an MLFN model; assign counts manually for '" +
                                   std::string(kind_name(model.kind())) + "'");
    }
    const Matrix& first = net->weights.front();
    std::array<double, kFeatureCount> imp{};
    double total = 0.0;
    for (std::size_t j = 0; j < kFeatureCount; ++j) {
        imp[j] = first.col(static_cast<Eigen::Index>(j)).cwiseAbs().sum();
        total += imp[j];
    }
    if (total == 0.0) {
        imp.fill(1.0 / static_cast<double>(kFeatureCount));
        return imp;
    }
    for (double& v : imp) v /= total;
    return imp;
}

ValueCounts allocate_value_counts(const std::array<double, kFeatureCount>& importance, const BigInt& product_cap,
                                  const CountOverrides& overrides, std::size_t max_values_per_feature) {
    if (max_values_per_feature < 1) throw ArgumentError("max values per feature must be at least 1");
    double sum = 0.0;
    double top = 0.0;
    for (double v : importance) {
        if (!(v >= 0.0) || !std::isfinite(v)) throw ArgumentError("importances must be finite and non-negative");
        sum += v;
        top = std::max(top, v);
    }
    if (std::abs(sum - 1.0) > 1e-9) throw ArgumentError("importances must sum to 1");

    ValueCounts counts{};
    for (std::size_t j = 0; j < kFeatureCount; ++j) {
        const double share = importance[j] / top;
        const auto proportional =
            static_cast<std::size_t>(std::floor(static_cast<double>(max_values_per_feature) * share));
        counts[j] = std::max<std::size_t>(1, proportional);
        if (overrides[j]) {
            if (*overrides[j] < 1) {
                throw ArgumentError("override for '" + std::string(kFeatureNames[j]) + "' must be at least 1");
            }
            counts[j] = *overrides[j];
        }
    }
    BigInt product = 1;
    for (std::size_t c : counts) product *= c;
    if (product > product_cap) {
        throw CapacityError("allocated grid has " + product.str() + " combinations, above the cap of " +
                            product_cap.str());
    }
    return counts;
}

GridSpec build_grid(const ValueCounts& counts, const FeatureBounds& bounds, const FixedValues& fixed) {
    std::array<std::vector<double>, kFeatureCount> values;
    for (std::size_t j = 0; j < kFeatureCount; ++j) {
        const std::string name(kFeatureNames[j]);
        const Bounds& b = bounds[j];
        if (!(b.minimum <= b.maximum)) throw GridError("bounds for '" + name + "' are inverted");
        std::vector<double>& v = values[j];
        if (fixed[j]) {
            v = *fixed[j];
            if (kIntegerFeature[j]) {
                for (double& x : v) x = std::round(x);
            }
        } else {
            const std::size_t n = counts[j];
            if (n < 1) throw GridError("count for '" + name + "' must be at least 1");
            if (n == 1) {
                v.push_back(0.5 * (b.minimum + b.maximum));
            } else {
                for (std::size_t k = 0; k < n; ++k) {
                    v.push_back(k + 1 == n ? b.maximum
                                           : b.minimum + (b.maximum - b.minimum) * static_cast<double>(k) /
                                                             static_cast<double>(n - 1));
                }
            }
            if (kIntegerFeature[j]) {
                const double lo = std::ceil(b.minimum);
                const double hi = std::floor(b.maximum);
                if (lo > hi) throw GridError("no integer values inside the bounds of '" + name + "'");
                for (double& x : v) x = std::clamp(std::round(x), lo, hi);
            }
        }
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
        if (v.empty()) throw GridError("no candidate values left for '" + name + "'");
    }
    return GridSpec(std::move(values), bounds);
}

// ---- screening -------------------------------------------------------------

namespace {

struct WorkerResult {
    std::vector<Candidate> kept;
};

void keep_top(std::vector<Candidate>& heap, std::size_t k, const Candidate& c) {
    // heap front is the lowest-ranked kept candidate
    if (heap.size() < k) {
        heap.push_back(c);
        std::push_heap(heap.begin(), heap.end(), ranks_before);
    } else if (ranks_before(c, heap.front())) {
        std::pop_heap(heap.begin(), heap.end(), ranks_before);
        heap.back() = c;
        std::push_heap(heap.begin(), heap.end(), ranks_before);
    }
}

}  // namespace

CandidateDB screen(const RegressorModel& hcr_model, const RegressorModel* hlc_model, const GridSpec& spec,
                   const ScreenCriterion& criterion, const ScreenOptions& options) {
    if (hcr_model.target != Target::hcr) throw ArgumentError("screening model must predict hcr");
    if (hlc_model && hlc_model->target != Target::hlc) throw ArgumentError("second screening model must predict hlc");
    if (criterion.kind == ScreenCriterion::Kind::top_k && criterion.k < 1) throw ArgumentError("top-k needs k >= 1");
    if (criterion.kind == ScreenCriterion::Kind::threshold && !std::isfinite(criterion.min_hcr)) {
        throw ArgumentError("threshold must be finite");
    }
    if (options.workers < 1) throw ArgumentError("workers must be at least 1");
    if (options.chunk_size < 1) throw ArgumentError("chunk size must be at least 1");

    const BigInt total_big = spec.total_combinations();
    if (!options.allow_large && total_big > BigInt(options.enumeration_cap)) {
        throw CapacityError("grid has " + total_big.str() + " combinations, above the enumeration cap of " +
                            std::to_string(options.enumeration_cap) + "; reduce the grid or allow large runs");
    }
    const auto total = spec.total_u64();
    if (!total) throw CapacityError("grid has " + total_big.str() + " combinations, too many to index");

    const std::uint64_t chunks = (*total + options.chunk_size - 1) / options.chunk_size;
    std::atomic<std::uint64_t> next_chunk{0};
    std::vector<WorkerResult> results(options.workers);
    std::exception_ptr failure;
    std::mutex failure_mutex;

    auto work = [&](WorkerResult& out) {
        try {
            std::vector<double> scratch;
            for (std::uint64_t chunk = next_chunk.fetch_add(1); chunk < chunks; chunk = next_chunk.fetch_add(1)) {
                const std::uint64_t start = chunk * options.chunk_size;
                const std::uint64_t end = std::min(*total, start + options.chunk_size);
                for (const GridPoint& p : GridRange(spec, start, end)) {
                    const double hcr = predict_features(hcr_model, p.features, scratch);
                    if (criterion.kind == ScreenCriterion::Kind::threshold) {
                        if (hcr >= criterion.min_hcr) out.kept.push_back({p.index, p.features, hcr, std::nullopt});
                    } else if (out.kept.size() < criterion.k || hcr >= out.kept.front().predicted_hcr) {
                        keep_top(out.kept, criterion.k, {p.index, p.features, hcr, std::nullopt});
                    }
                }
            }
        } catch (...) {
            const std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
        }
    };

    if (options.workers == 1) {
        work(results[0]);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(options.workers);
        for (std::size_t w = 0; w < options.workers; ++w) pool.emplace_back(work, std::ref(results[w]));
        for (std::thread& t : pool) t.join();
    }
    if (failure) std::rethrow_exception(failure);

    CandidateDB db;
    db.model_fingerprint = model_fingerprint(hcr_model);
    if (hlc_model) db.hlc_model_fingerprint = model_fingerprint(*hlc_model);
    db.criterion = criterion;
    db.grid = spec;
    for (WorkerResult& r : results) {
        db.candidates.insert(db.candidates.end(), r.kept.begin(), r.kept.end());
    }
    std::sort(db.candidates.begin(), db.candidates.end(), ranks_before);
    if (criterion.kind == ScreenCriterion::Kind::top_k && db.candidates.size() > criterion.k) {
        db.candidates.resize(criterion.k);
    }
    if (hlc_model) {
        std::vector<double> scratch;
        for (Candidate& c : db.candidates) c.predicted_hlc = predict_features(*hlc_model, c.features, scratch);
    }
    return db;
}

// ---- candidate database file -----------------------------------------------

namespace {

json features_json(const FeatureVector& f) {
    json j = json::object();
    for (std::size_t k = 0; k < kFeatureCount; ++k) j[std::string(kFeatureNames[k])] = f[k];
    return j;
}

FeatureVector features_from(const json& j) {
    FeatureVector f{};
    for (std::size_t k = 0; k < kFeatureCount; ++k) f[k] = j.at(std::string(kFeatureNames[k])).get<double>();
    return f;
}

json grid_json(const GridSpec& g) {
    json features = json::object();
    for (std::size_t j = 0; j < kFeatureCount; ++j) {
        features[std::string(kFeatureNames[j])] = {
            {"minimum", g.bounds()[j].minimum}, {"maximum", g.bounds()[j].maximum}, {"values", g.values(j)}};
    }
    return {{"features", std::move(features)}, {"total_combinations", g.total_combinations().str()}};
}

GridSpec grid_from(const json& j) {
    std::array<std::vector<double>, kFeatureCount> values;
    FeatureBounds bounds{};
    for (std::size_t k = 0; k < kFeatureCount; ++k) {
        const json& f = j.at("features").at(std::string(kFeatureNames[k]));
        values[k] = f.at("values").get<std::vector<double>>();
        bounds[k] = {f.at("minimum").get<double>(), f.at("maximum").get<double>()};
    }
    GridSpec g(std::move(values), bounds);
    if (g.total_combinations().str() != j.at("total_combinations").get<std::string>()) {
        throw ParseError("candidate db: grid total does not match its value lists");
    }
    return g;
}

json criterion_json(const ScreenCriterion& c) {
    if (c.kind == ScreenCriterion::Kind::top_k) return {{"kind", "top_k"}, {"k", c.k}};
    return {{"kind", "threshold"}, {"min_hcr", c.min_hcr}};
}

ScreenCriterion criterion_from(const json& j) {
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "top_k") return ScreenCriterion::top(j.at("k").get<std::size_t>());
    if (kind == "threshold") return ScreenCriterion::threshold(j.at("min_hcr").get<double>());
    throw ParseError("candidate db: unknown criterion '" + kind + "'");
}

json record_json(const DesignRecord& r) {
    json j = features_json(features_of(r));
    if (r.hcr) j["hcr"] = *r.hcr;
    if (r.hlc) j["hlc"] = *r.hlc;
    return j;
}

DesignRecord record_from(const json& j) {
    DesignRecord r = record_from_features(features_from(j));
    if (j.contains("hcr")) r.hcr = j.at("hcr").get<double>();
    if (j.contains("hlc")) r.hlc = j.at("hlc").get<double>();
    return r;
}

}  // namespace

std::string candidate_db_to_jsonl(const CandidateDB& db) {
    json header = {
        {"schema_version", kCandidateDbSchemaVersion},
        {"model_fingerprint", db.model_fingerprint},
        {"criterion", criterion_json(db.criterion)},
        {"grid_spec", grid_json(db.grid)},
    };
    if (db.hlc_model_fingerprint) header["hlc_model_fingerprint"] = *db.hlc_model_fingerprint;
    std::string out = header.dump() + "\n";
    for (const Candidate& c : db.candidates) {
        json line = {{"grid_index", c.grid_index}, {"features", features_json(c.features)}, {"predicted_hcr", c.predicted_hcr}};
        if (c.predicted_hlc) line["predicted_hlc"] = *c.predicted_hlc;
        out += line.dump() + "\n";
    }
    for (const ValidationRecord& v : db.validations) {
        const json line = {{"validation",
                            {{"grid_index", v.grid_index},
                             {"measured", record_json(v.measured)},
                             {"predicted_hcr", v.predicted_hcr},
                             {"error_rate_pct", v.error_rate_pct}}}};
        out += line.dump() + "\n";
    }
    return out;
}

CandidateDB candidate_db_from_jsonl(std::string_view text) {
    std::vector<std::string_view> lines = split_fields(text, '\n');
    while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();
    if (lines.empty()) throw ParseError("candidate db is empty");
    CandidateDB db;
    try {
        const json header = json::parse(lines[0]);
        if (header.at("schema_version").get<int>() != kCandidateDbSchemaVersion) {
            throw ParseError("candidate db: unsupported schema_version");
        }
        db.model_fingerprint = header.at("model_fingerprint").get<std::string>();
        if (header.contains("hlc_model_fingerprint")) {
            db.hlc_model_fingerprint = header.at("hlc_model_fingerprint").get<std::string>();
        }
        db.criterion = criterion_from(header.at("criterion"));
        db.grid = grid_from(header.at("grid_spec"));
        for (std::size_t i = 1; i < lines.size(); ++i) {
            const json line = json::parse(lines[i]);
            if (line.contains("validation")) {
                const json& v = line.at("validation");
                db.validations.push_back({v.at("grid_index").get<std::uint64_t>(), record_from(v.at("measured")),
                                          v.at("predicted_hcr").get<double>(), v.at("error_rate_pct").get<double>()});
                continue;
            }
            Candidate c;
            c.grid_index = line.at("grid_index").get<std::uint64_t>();
            c.features = features_from(line.at("features"));
            c.predicted_hcr = line.at("predicted_hcr").get<double>();
            if (line.contains("predicted_hlc")) c.predicted_hlc = line.at("predicted_hlc").get<double>();
            db.candidates.push_back(c);
        }
    } catch (const json::exception& e) {
        throw ParseError(std::string("candidate db: ") + e.what());
    }
    if (!std::is_sorted(db.candidates.begin(), db.candidates.end(), ranks_before)) {
        throw ParseError("candidate db: candidates are not in rank order");
    }
    std::vector<std::uint64_t> indices;
    indices.reserve(db.candidates.size());
    for (const Candidate& c : db.candidates) indices.push_back(c.grid_index);
    std::sort(indices.begin(), indices.end());
    if (const auto dup = std::adjacent_find(indices.begin(), indices.end()); dup != indices.end()) {
        throw ParseError("candidate db: duplicate grid_index " + std::to_string(*dup));
    }
    return db;
}

void save_candidate_db(const CandidateDB& db, const std::string& path) { write_file(path, candidate_db_to_jsonl(db)); }

CandidateDB load_candidate_db(const std::string& path) { return candidate_db_from_jsonl(read_file(path)); }

Dataset candidates_as_dataset(const CandidateDB& db) {
    std::vector<DesignRecord> out;
    out.reserve(db.candidates.size());
    for (const Candidate& c : db.candidates) {
        DesignRecord r = record_from_features(c.features);
        r.hcr = c.predicted_hcr;
        r.hlc = c.predicted_hlc;
        out.push_back(r);
    }
    return Dataset(std::move(out));
}

MergeResult merge_validated(const CandidateDB& db, const Dataset& original, const Dataset& experiments) {
    std::vector<DesignRecord> merged(original.begin(), original.end());
    MergeResult result{Dataset{}, db};
    for (std::size_t i = 0; i < experiments.size(); ++i) {
        const DesignRecord& e = experiments[i];
        if (!e.hcr) {
            throw ValidationError("experiment row " + std::to_string(i + 1) + " has no measured hcr");
        }
        validate_record(e);
        const FeatureVector f = features_of(e);
        const auto same = std::find_if(merged.begin(), merged.end(),
                                       [&](const DesignRecord& r) { return features_of(r) == f; });
        if (same != merged.end()) {
            *same = e;
        } else {
            merged.push_back(e);
        }

        const auto cand = std::find_if(db.candidates.begin(), db.candidates.end(),
                                       [&](const Candidate& c) { return c.features == f; });
        if (cand == db.candidates.end()) continue;
        const double measured[] = {*e.hcr};
        const ValidationRecord v{cand->grid_index, e, cand->predicted_hcr,
                                 validation_error_rate(cand->predicted_hcr, measured)};
        auto& vals = result.db.validations;
        const auto prev = std::find_if(vals.begin(), vals.end(),
                                       [&](const ValidationRecord& x) { return x.grid_index == v.grid_index; });
        if (prev != vals.end()) {
            *prev = v;
        } else {
            vals.push_back(v);
        }
    }
    result.merged = Dataset(std::move(merged));
    return result;
}

}  // namespace swh
