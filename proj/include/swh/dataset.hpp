#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "swh/design_record.hpp"

namespace swh {

// Ordered, index-addressable collection of designs. Immutable once built.
class Dataset {
public:
    Dataset() = default;
    explicit Dataset(std::vector<DesignRecord> records) : records_(std::move(records)) {}

    [[nodiscard]] std::size_t size() const noexcept { return records_.size(); }
    [[nodiscard]] bool empty() const noexcept { return records_.empty(); }
    [[nodiscard]] const DesignRecord& operator[](std::size_t i) const { return records_[i]; }
    [[nodiscard]] std::span<const DesignRecord> records() const noexcept { return records_; }
    [[nodiscard]] auto begin() const noexcept { return records_.begin(); }
    [[nodiscard]] auto end() const noexcept { return records_.end(); }

    // True when every record carries the target.
    [[nodiscard]] bool has_target(Target t) const;

    // Records picked by index, in the given order.
    [[nodiscard]] Dataset subset(std::span<const std::size_t> indices) const;

private:
    std::vector<DesignRecord> records_;
};

// Column headers for the nine CSV fields, in the order
// tube_length, n_tubes, tcd, tank_volume, collector_area, tilt_angle,
// final_temp, hcr, hlc.
struct CsvSchema {
    std::array<std::string, kFeatureCount + 2> columns = {
        "tube_length_mm",    "n_tubes",        "tcd_mm",       "tank_volume_kg", "collector_area_m2",
        "tilt_angle_deg",    "final_temp_c",   "hcr_mj_m2",    "hlc_w_m3k",
    };
};

// Parses CSV text. Unknown columns are skipped with a warning on stderr;
// target columns may be absent or left empty per row. Rows are numbered from
// 1 starting at the first data row.
Dataset parse_dataset(std::string_view csv, const CsvSchema& schema = {});
Dataset load_dataset(const std::filesystem::path& path, const CsvSchema& schema = {});

// Canonical CSV: default header, LF endings, shortest round-trip decimals.
std::string to_csv(const Dataset& ds);
void save_dataset(const Dataset& ds, const std::filesystem::path& path);

// Statistics of one column. std_dev uses divisor n (population form).
struct ColumnStats {
    std::string name;
    std::size_t count = 0;
    double maximum = 0.0;
    double minimum = 0.0;
    double range = 0.0;
    double average = 0.0;
    double std_dev = 0.0;
};

// One entry per feature, then hcr and hlc when at least one record has them
// (computed over the records that do).
std::vector<ColumnStats> descriptive_stats(const Dataset& ds);

// Population mean/std of a column of values.
ColumnStats column_stats(std::string name, std::span<const double> values);

struct SplitIndices {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
};

// Seeded shuffle; |train| = round(n * train_fraction).
SplitIndices split_indices(std::size_t n, double train_fraction, std::uint64_t seed);
std::pair<Dataset, Dataset> split(const Dataset& ds, double train_fraction, std::uint64_t seed);

}  // namespace swh
