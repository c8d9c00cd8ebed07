#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

namespace swh {

inline constexpr std::size_t kFeatureCount = 7;

using FeatureVector = std::array<double, kFeatureCount>;

// Feature order used everywhere a design is flattened into a vector.
enum class Feature : std::size_t {
    tube_length = 0,
    n_tubes,
    tcd,
    tank_volume,
    collector_area,
    tilt_angle,
    final_temp,
};

inline constexpr std::array<std::string_view, kFeatureCount> kFeatureNames = {
    "tube_length", "n_tubes", "tcd", "tank_volume", "collector_area", "tilt_angle", "final_temp",
};

// Features that only take integer values in a design.
inline constexpr std::array<bool, kFeatureCount> kIntegerFeature = {
    false, true, false, false, false, false, true,
};

enum class Target { hcr, hlc };

std::string_view target_name(Target t);
Target parse_target(std::string_view name);

// One evacuated-tube solar water heater: seven measurable design inputs and
// the two optional thermal targets.
struct DesignRecord {
    double tube_length = 0.0;     // mm
    int n_tubes = 0;              // count
    double tcd = 0.0;             // mm, tube center distance
    double tank_volume = 0.0;     // kg of water the tank holds
    double collector_area = 0.0;  // m^2
    double tilt_angle = 0.0;      // degrees
    double final_temp = 0.0;      // degrees C
    std::optional<double> hcr;    // MJ/m^2
    std::optional<double> hlc;    // W/(m^3 K)

    [[nodiscard]] std::optional<double> target(Target t) const { return t == Target::hcr ? hcr : hlc; }

    bool operator==(const DesignRecord&) const = default;
};

FeatureVector features_of(const DesignRecord& r);

// n_tubes is rounded to the nearest integer; targets are left empty.
DesignRecord record_from_features(const FeatureVector& f);

// Name of the first field violating the record invariants, if any.
std::optional<std::string> first_invalid_field(const DesignRecord& r);

// Throws ValidationError naming the field.
void validate_record(const DesignRecord& r);

}  // namespace swh
