#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "swh/regressor.hpp"

namespace swh {

struct LoadedModel {
    RegressorModel model;
    std::string fingerprint;  // FNV-1a 64 of the model file bytes
};

// Throws IoError / ParseError when the file is missing or malformed, and
// ArgumentError when it predicts a different target than `expected`.
LoadedModel load_model_file(const std::string& path, Target expected);

struct HttpResult {
    int status = 200;
    std::string body;  // JSON
};

// Request handling for the prediction API, independent of the transport.
// Holds the two models read-only; every method is safe to call concurrently.
class PredictionService {
public:
    PredictionService() = default;  // no models: every prediction is a 503
    PredictionService(LoadedModel hcr, LoadedModel hlc);

    [[nodiscard]] bool ready() const { return hcr_.has_value() && hlc_.has_value(); }

    // POST /api/predict
    [[nodiscard]] HttpResult predict(std::string_view body) const;

    // GET /api/health
    [[nodiscard]] HttpResult health() const;

private:
    std::optional<LoadedModel> hcr_;
    std::optional<LoadedModel> hlc_;
};

// "Collection Rate:<x>;Loss Coefficient:<y>" with three decimals.
std::string waterheater_display(double hcr, double hlc);

// HTTP front end: POST /api/predict, GET /api/health, and `static_dir`
// mounted at "/" when given.
class ApiServer {
public:
    ApiServer(const PredictionService& service, const std::optional<std::string>& static_dir);
    ~ApiServer();
    ApiServer(const ApiServer&) = delete;
    ApiServer& operator=(const ApiServer&) = delete;

    // Port 0 picks a free port. Returns the bound port; throws IoError.
    int bind(const std::string& host, int port);

    // Serves until stop() is called from another thread.
    void listen();
    void wait_until_ready() const;
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

// bind + listen. Throws IoError when the port cannot be bound or the static
// directory does not exist.
void run_server(const PredictionService& service, const std::string& host, int port,
                const std::optional<std::string>& static_dir);

}  // namespace swh
