#pragma once

#include <string>
#include <string_view>

#include "swh/regressor.hpp"

namespace swh {

inline constexpr int kModelSchemaVersion = 1;

// JSON model document. Matrices are stored as {rows, cols, data} with data
// in row-major order. save -> load -> save reproduces the same bytes.
std::string model_to_json(const RegressorModel& m);
RegressorModel model_from_json(std::string_view text);

void save_model(const RegressorModel& m, const std::string& path);
RegressorModel load_model(const std::string& path);

// FNV-1a 64 of the serialized document, as 16 hex digits.
std::string model_fingerprint(const RegressorModel& m);

}  // namespace swh
