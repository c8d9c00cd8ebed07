#pragma once

#include <atomic>
#include <filesystem>
#include <string>
#include <unistd.h>

#include "swh/dataset.hpp"

namespace swh::test {

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    TempDir() {
        static std::atomic<int> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("swh_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    [[nodiscard]] std::string file(const std::string& name) const { return (path_ / name).string(); }

private:
    std::filesystem::path path_;
};

inline DesignRecord make_record(double tl, int nt, double tcd, double tank, double area, double tilt, double ft,
                                std::optional<double> hcr = std::nullopt, std::optional<double> hlc = std::nullopt) {
    return DesignRecord{tl, nt, tcd, tank, area, tilt, ft, hcr, hlc};
}

}  // namespace swh::test
