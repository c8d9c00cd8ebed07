// Dataset CSV I/O, descriptive statistics and train/test splitting.
//
// Standard deviations everywhere in this file use the population form
// (divisor n).

#include "swh/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numeric>

#include "swh/error.hpp"
#include "swh/rng.hpp"
#include "swh/text.hpp"

namespace swh {

bool Dataset::has_target(Target t) const {
    return std::all_of(records_.begin(), records_.end(),
                       [t](const DesignRecord& r) { return r.target(t).has_value(); });
}

Dataset Dataset::subset(std::span<const std::size_t> indices) const {
    std::vector<DesignRecord> out;
    out.reserve(indices.size());
    for (std::size_t i : indices) out.push_back(records_.at(i));
    return Dataset(std::move(out));
}

namespace {

constexpr std::size_t kColumnCount = kFeatureCount + 2;
constexpr std::size_t kHcrColumn = kFeatureCount;
constexpr std::size_t kHlcColumn = kFeatureCount + 1;

std::string row_prefix(std::size_t row) { return "row " + std::to_string(row) + ": "; }

}  // namespace

Dataset parse_dataset(std::string_view csv, const CsvSchema& schema) {
    std::vector<std::string_view> lines = split_fields(csv, '\n');
    while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();
    if (lines.empty()) throw ParseError("dataset has no header row");

    // column position in the file for each logical field, or npos
    std::array<std::size_t, kColumnCount> position;
    position.fill(std::string_view::npos);
    const auto header = split_fields(lines[0], ',');
    for (std::size_t c = 0; c < header.size(); ++c) {
        const std::string_view name = trim(header[c]);
        const auto it = std::find(schema.columns.begin(), schema.columns.end(), name);
        if (it == schema.columns.end()) {
            std::cerr << "warning: ignoring unknown column '" << name << "'\n";
            continue;
        }
        position[static_cast<std::size_t>(it - schema.columns.begin())] = c;
    }
    for (std::size_t j = 0; j < kFeatureCount; ++j) {
        if (position[j] == std::string_view::npos) {
            throw ParseError("header is missing required column '" + schema.columns[j] + "'");
        }
    }

    std::vector<DesignRecord> records;
    records.reserve(lines.size() - 1);
    for (std::size_t li = 1; li < lines.size(); ++li) {
        const std::size_t row = li;
        const auto fields = split_fields(lines[li], ',');
        if (fields.size() != header.size()) {
            throw ParseError(row_prefix(row) + "expected " + std::to_string(header.size()) +
                             " fields, found " + std::to_string(fields.size()));
        }
        std::array<std::optional<double>, kColumnCount> values;
        for (std::size_t k = 0; k < kColumnCount; ++k) {
            if (position[k] == std::string_view::npos) continue;
            const std::string_view text = trim(fields[position[k]]);
            const bool is_target = k >= kFeatureCount;
            if (text.empty()) {
                if (is_target) continue;
                throw ParseError(row_prefix(row) + "column '" + schema.columns[k] + "' is empty");
            }
            auto v = parse_double(text);
            if (!v) {
                throw ParseError(row_prefix(row) + "column '" + schema.columns[k] + "' cannot parse '" +
                                 std::string(text) + "'");
            }
            values[k] = *v;
        }
        const double tubes = *values[static_cast<std::size_t>(Feature::n_tubes)];
        if (std::isfinite(tubes) && tubes != std::floor(tubes)) {
            throw ParseError(row_prefix(row) + "column '" + schema.columns[1] + "' must be an integer");
        }
        if (std::isfinite(tubes) && std::abs(tubes) > 1e9) {
            throw ParseError(row_prefix(row) + "column '" + schema.columns[1] + "' out of range");
        }

        DesignRecord r;
        r.tube_length = *values[0];
        r.n_tubes = std::isfinite(tubes) ? static_cast<int>(tubes) : 0;
        r.tcd = *values[2];
        r.tank_volume = *values[3];
        r.collector_area = *values[4];
        r.tilt_angle = *values[5];
        r.final_temp = *values[6];
        r.hcr = values[kHcrColumn];
        r.hlc = values[kHlcColumn];
        if (auto bad = first_invalid_field(r)) {
            throw ValidationError(row_prefix(row) + "field '" + *bad + "' violates record invariants");
        }
        records.push_back(r);
    }
    return Dataset(std::move(records));
}

Dataset load_dataset(const std::filesystem::path& path, const CsvSchema& schema) {
    return parse_dataset(read_file(path.string()), schema);
}

std::string to_csv(const Dataset& ds) {
    const CsvSchema schema;
    std::string out;
    for (std::size_t k = 0; k < kColumnCount; ++k) {
        if (k) out += ',';
        out += schema.columns[k];
    }
    out += '\n';
    for (const DesignRecord& r : ds) {
        out += format_double(r.tube_length);
        out += ',';
        out += std::to_string(r.n_tubes);
        for (double v : {r.tcd, r.tank_volume, r.collector_area, r.tilt_angle, r.final_temp}) {
            out += ',';
            out += format_double(v);
        }
        out += ',';
        if (r.hcr) out += format_double(*r.hcr);
        out += ',';
        if (r.hlc) out += format_double(*r.hlc);
        out += '\n';
    }
    return out;
}

void save_dataset(const Dataset& ds, const std::filesystem::path& path) {
    write_file(path.string(), to_csv(ds));
}

ColumnStats column_stats(std::string name, std::span<const double> values) {
    if (values.empty()) throw ArgumentError("statistics of an empty column '" + name + "'");
    ColumnStats s;
    s.name = std::move(name);
    s.count = values.size();
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    s.minimum = *lo;
    s.maximum = *hi;
    s.range = s.maximum - s.minimum;
    const double n = static_cast<double>(values.size());
    s.average = std::accumulate(values.begin(), values.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : values) ss += (v - s.average) * (v - s.average);
    s.std_dev = std::sqrt(ss / n);
    // summation rounding can push the mean a hair outside [min, max]
    s.average = std::clamp(s.average, s.minimum, s.maximum);
    return s;
}

std::vector<ColumnStats> descriptive_stats(const Dataset& ds) {
    if (ds.empty()) throw ArgumentError("descriptive statistics of an empty dataset");
    std::vector<ColumnStats> out;
    std::vector<double> column(ds.size());
    for (std::size_t j = 0; j < kFeatureCount; ++j) {
        for (std::size_t i = 0; i < ds.size(); ++i) column[i] = features_of(ds[i])[j];
        out.push_back(column_stats(std::string(kFeatureNames[j]), column));
    }
    for (Target t : {Target::hcr, Target::hlc}) {
        std::vector<double> present;
        for (const DesignRecord& r : ds) {
            if (auto v = r.target(t)) present.push_back(*v);
        }
        if (!present.empty()) out.push_back(column_stats(std::string(target_name(t)), present));
    }
    return out;
}

SplitIndices split_indices(std::size_t n, double train_fraction, std::uint64_t seed) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
        throw ArgumentError("train fraction must lie in (0, 1)");
    }
    if (n < 2) throw ArgumentError("split needs at least 2 records");
    const auto n_train = static_cast<std::size_t>(std::llround(static_cast<double>(n) * train_fraction));
    if (n_train == 0 || n_train == n) {
        throw ArgumentError("train fraction " + format_double(train_fraction) + " leaves an empty partition for " +
                            std::to_string(n) + " records");
    }

    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    Rng rng(seed);
    for (std::size_t i = n - 1; i > 0; --i) {
        const auto j = static_cast<std::size_t>(rng.below(i + 1));
        std::swap(perm[i], perm[j]);
    }
    SplitIndices out;
    out.train.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_train));
    out.test.assign(perm.begin() + static_cast<std::ptrdiff_t>(n_train), perm.end());
    return out;
}

std::pair<Dataset, Dataset> split(const Dataset& ds, double train_fraction, std::uint64_t seed) {
    const SplitIndices idx = split_indices(ds.size(), train_fraction, seed);
    return {ds.subset(idx.train), ds.subset(idx.test)};
}

}  // namespace swh
