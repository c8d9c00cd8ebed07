#include "swh/design_record.hpp"

#include <cmath>

#include "swh/error.hpp"

namespace swh {

std::string_view target_name(Target t) { return t == Target::hcr ? "hcr" : "hlc"; }

Target parse_target(std::string_view name) {
    if (name == "hcr") return Target::hcr;
    if (name == "hlc") return Target::hlc;
    throw ArgumentError("unknown target '" + std::string(name) + "' (expected hcr or hlc)");
}

FeatureVector features_of(const DesignRecord& r) {
    return {r.tube_length,    static_cast<double>(r.n_tubes), r.tcd,        r.tank_volume,
            r.collector_area, r.tilt_angle,                   r.final_temp};
}

DesignRecord record_from_features(const FeatureVector& f) {
    DesignRecord r;
    r.tube_length = f[0];
    r.n_tubes = static_cast<int>(std::lround(f[1]));
    r.tcd = f[2];
    r.tank_volume = f[3];
    r.collector_area = f[4];
    r.tilt_angle = f[5];
    r.final_temp = f[6];
    return r;
}

std::optional<std::string> first_invalid_field(const DesignRecord& r) {
    const FeatureVector f = features_of(r);
    for (std::size_t j = 0; j < kFeatureCount; ++j) {
        if (!std::isfinite(f[j]) || f[j] <= 0.0) return std::string(kFeatureNames[j]);
    }
    if (r.n_tubes < 1) return std::string("n_tubes");
    if (r.hcr && (!std::isfinite(*r.hcr) || *r.hcr <= 0.0)) return std::string("hcr");
    if (r.hlc && (!std::isfinite(*r.hlc) || *r.hlc <= 0.0)) return std::string("hlc");
    return std::nullopt;
}

void validate_record(const DesignRecord& r) {
    if (auto field = first_invalid_field(r)) {
        throw ValidationError("field '" + *field + "' must be finite and strictly positive");
    }
}

}  // namespace swh
