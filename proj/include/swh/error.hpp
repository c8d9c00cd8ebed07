#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace swh {

// Every error carries a short category used by the CLI and the HTTP layer.
class Error : public std::runtime_error {
public:
    Error(std::string category, const std::string& message)
        : std::runtime_error(message), category_(std::move(category)) {}

    [[nodiscard]] std::string_view category() const noexcept { return category_; }

private:
    std::string category_;
};

struct ArgumentError : Error {
    explicit ArgumentError(const std::string& m) : Error("argument", m) {}
};

struct ParseError : Error {
    explicit ParseError(const std::string& m) : Error("parse", m) {}
};

struct ValidationError : Error {
    explicit ValidationError(const std::string& m) : Error("validation", m) {}
};

struct TrainingError : Error {
    explicit TrainingError(const std::string& m) : Error("training", m) {}
};

struct DivergenceError : Error {
    DivergenceError(const std::string& m, long epoch) : Error("divergence", m), epoch_(epoch) {}
    [[nodiscard]] long epoch() const noexcept { return epoch_; }

private:
    long epoch_;
};

struct CapacityError : Error {
    explicit CapacityError(const std::string& m) : Error("capacity", m) {}
};

struct GridError : Error {
    explicit GridError(const std::string& m) : Error("grid", m) {}
};

struct UnsupportedKindError : Error {
    explicit UnsupportedKindError(const std::string& m) : Error("unsupported-kind", m) {}
};

struct IoError : Error {
    explicit IoError(const std::string& m) : Error("io", m) {}
};

}  // namespace swh
