#pragma once

#include <array>
#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <iterator>
#include <optional>
#include <string>
#include <vector>

#include "swh/dataset.hpp"
#include "swh/regressor.hpp"

namespace swh {

using BigInt = boost::multiprecision::cpp_int;

struct Bounds {
    double minimum = 0.0;
    double maximum = 0.0;

    bool operator==(const Bounds&) const = default;
};

using FeatureBounds = std::array<Bounds, kFeatureCount>;
using ValueCounts = std::array<std::size_t, kFeatureCount>;

// Extremes of the published 915-heater database.
FeatureBounds default_bounds();

// Observed min/max of every feature in `ds`.
FeatureBounds bounds_from(const Dataset& ds);

// Cartesian design space: one ascending list of candidate values per
// feature. Grid indices are lexicographic with the first feature varying
// slowest.
class GridSpec {
public:
    GridSpec() = default;

    // Throws GridError unless every list is nonempty, strictly ascending and
    // inside its bounds.
    GridSpec(std::array<std::vector<double>, kFeatureCount> values, FeatureBounds bounds);

    [[nodiscard]] const std::vector<double>& values(std::size_t feature) const { return values_[feature]; }
    [[nodiscard]] const FeatureBounds& bounds() const noexcept { return bounds_; }
    [[nodiscard]] ValueCounts counts() const;

    // Exact product of the list lengths.
    [[nodiscard]] BigInt total_combinations() const;

    // total_combinations() as uint64 when it fits.
    [[nodiscard]] std::optional<std::uint64_t> total_u64() const;

    [[nodiscard]] std::array<std::size_t, kFeatureCount> digits_of(std::uint64_t index) const;
    [[nodiscard]] std::uint64_t index_of(const std::array<std::size_t, kFeatureCount>& digits) const;
    [[nodiscard]] FeatureVector tuple_at(std::uint64_t index) const;

    // Index of a feature tuple whose values all appear in the grid.
    [[nodiscard]] std::optional<std::uint64_t> find(const FeatureVector& f) const;

    bool operator==(const GridSpec&) const = default;

private:
    std::array<std::vector<double>, kFeatureCount> values_;
    FeatureBounds bounds_{};
};

struct GridPoint {
    std::uint64_t index = 0;
    FeatureVector features{};
};

// Lazy view over grid indices [start, end). Iteration keeps one odometer
// and one tuple; nothing is materialized.
class GridRange {
public:
    class iterator {
    public:
        using iterator_category = std::input_iterator_tag;
        using value_type = GridPoint;
        using difference_type = std::ptrdiff_t;
        using reference = const GridPoint&;
        using pointer = const GridPoint*;

        iterator() = default;
        iterator(const GridSpec* spec, std::uint64_t index);

        reference operator*() const { return point_; }
        pointer operator->() const { return &point_; }
        iterator& operator++();
        void operator++(int) { ++*this; }
        bool operator==(const iterator& o) const { return point_.index == o.point_.index; }

    private:
        const GridSpec* spec_ = nullptr;
        std::array<std::size_t, kFeatureCount> digits_{};
        GridPoint point_;
    };

    GridRange(const GridSpec& spec, std::uint64_t start, std::uint64_t end);

    [[nodiscard]] iterator begin() const { return {spec_, start_}; }
    [[nodiscard]] iterator end() const { return {nullptr, end_}; }
    [[nodiscard]] std::uint64_t size() const { return end_ - start_; }

private:
    const GridSpec* spec_;
    std::uint64_t start_;
    std::uint64_t end_;
};

// Throws ArgumentError unless 0 <= start < end <= total.
GridRange enumerate_grid(const GridSpec& spec, std::uint64_t start, std::uint64_t end);

// Sum of |first-layer weight| per input, normalized to sum 1. A network
// whose first layer is all zero gets uniform importance.
std::array<double, kFeatureCount> weight_importance(const RegressorModel& model);

using CountOverrides = std::array<std::optional<std::size_t>, kFeatureCount>;

// count_j = max(1, floor(max_values * importance_j / max_importance)), then
// overrides replace counts verbatim. Throws CapacityError when the product
// exceeds `product_cap`.
ValueCounts allocate_value_counts(const std::array<double, kFeatureCount>& importance, const BigInt& product_cap,
                                  const CountOverrides& overrides, std::size_t max_values_per_feature);

// Published selection counts for (tube_length, n_tubes, tcd, tank_volume,
// collector_area, tilt_angle, final_temp).
inline constexpr ValueCounts kPublishedValueCounts = {5, 30, 5, 111, 50, 5, 17};

using FixedValues = std::array<std::optional<std::vector<double>>, kFeatureCount>;

// Evenly spaced values over each [min, max] (count 1 -> midpoint); explicit
// lists replace the spacing. Integer features are rounded and deduplicated.
GridSpec build_grid(const ValueCounts& counts, const FeatureBounds& bounds, const FixedValues& fixed = {});

struct Candidate {
    std::uint64_t grid_index = 0;
    FeatureVector features{};
    double predicted_hcr = 0.0;
    std::optional<double> predicted_hlc;

    bool operator==(const Candidate&) const = default;
};

// Higher predicted_hcr first, then smaller grid_index.
inline bool ranks_before(const Candidate& a, const Candidate& b) {
    if (a.predicted_hcr != b.predicted_hcr) return a.predicted_hcr > b.predicted_hcr;
    return a.grid_index < b.grid_index;
}

struct ScreenCriterion {
    enum class Kind { top_k, threshold };
    Kind kind = Kind::top_k;
    std::size_t k = 100;
    double min_hcr = 0.0;

    static ScreenCriterion top(std::size_t k) { return {Kind::top_k, k, 0.0}; }
    static ScreenCriterion threshold(double min_hcr) { return {Kind::threshold, 0, min_hcr}; }

    bool operator==(const ScreenCriterion&) const = default;
};

struct ValidationRecord {
    std::uint64_t grid_index = 0;
    DesignRecord measured;
    double predicted_hcr = 0.0;
    double error_rate_pct = 0.0;

    bool operator==(const ValidationRecord&) const = default;
};

inline constexpr int kCandidateDbSchemaVersion = 1;

struct CandidateDB {
    std::string model_fingerprint;
    std::optional<std::string> hlc_model_fingerprint;
    ScreenCriterion criterion;
    GridSpec grid;
    std::vector<Candidate> candidates;  // sorted by ranks_before
    std::vector<ValidationRecord> validations;

    bool operator==(const CandidateDB&) const = default;
};

struct ScreenOptions {
    std::size_t workers = 1;
    std::uint64_t chunk_size = 1 << 16;
    std::uint64_t enumeration_cap = 1'000'000'000;
    bool allow_large = false;  // lifts enumeration_cap
};

// Scores every grid tuple with `hcr_model` and keeps candidates per the
// criterion. Output does not depend on workers or chunk_size.
CandidateDB screen(const RegressorModel& hcr_model, const RegressorModel* hlc_model, const GridSpec& spec,
                   const ScreenCriterion& criterion, const ScreenOptions& options = {});

std::string candidate_db_to_jsonl(const CandidateDB& db);
CandidateDB candidate_db_from_jsonl(std::string_view text);
void save_candidate_db(const CandidateDB& db, const std::string& path);
CandidateDB load_candidate_db(const std::string& path);

// Candidates as a dataset CSV with predicted values in the target columns.
Dataset candidates_as_dataset(const CandidateDB& db);

struct MergeResult {
    Dataset merged;  // original plus validated designs
    CandidateDB db;  // input db with validation records attached
};

// Adds measured designs to the original database. A design whose features
// equal an existing record replaces it; designs matching a screened
// candidate get a validation error rate recorded against it. Repeating a
// merge with the same experiments changes nothing.
MergeResult merge_validated(const CandidateDB& db, const Dataset& original, const Dataset& experiments);

}  // namespace swh
