#include "swh/service.hpp"

#include <cmath>

#include "httplib.h"
#include "json.hpp"
#include "swh/error.hpp"
#include "swh/model_io.hpp"
#include "swh/text.hpp"

namespace swh {

using nlohmann::json;

LoadedModel load_model_file(const std::string& path, Target expected) {
    const std::string bytes = read_file(path);
    LoadedModel m{model_from_json(bytes), to_hex64(fnv1a64(bytes))};
    if (m.model.target != expected) {
        throw ArgumentError("model '" + path + "' predicts " + std::string(target_name(m.model.target)) +
                            ", expected " + std::string(target_name(expected)));
    }
    return m;
}

PredictionService::PredictionService(LoadedModel hcr, LoadedModel hlc) : hcr_(std::move(hcr)), hlc_(std::move(hlc)) {}

std::string waterheater_display(double hcr, double hlc) {
    return "Collection Rate:" + format_fixed(hcr, 3) + ";Loss Coefficient:" + format_fixed(hlc, 3);
}

namespace {

HttpResult error_result(int status, const std::string& message, const json& fields = json::object()) {
    return {status, json{{"error", message}, {"fields", fields}}.dump()};
}

json fingerprints(const LoadedModel& hcr, const LoadedModel& hlc) {
    return {{"hcr", hcr.fingerprint}, {"hlc", hlc.fingerprint}};
}

}  // namespace

HttpResult PredictionService::predict(std::string_view body) const {
    if (!ready()) return error_result(503, "models not loaded");

    json doc;
    try {
        doc = json::parse(body);
    } catch (const json::out_of_range&) {
        return error_result(422, "request contains a number outside the double range");
    } catch (const json::exception&) {
        return error_result(400, "request body is not valid JSON");
    }
    if (!doc.is_object()) return error_result(400, "request body must be a JSON object");

    json shape_errors = json::object();
    FeatureVector f{};
    for (std::size_t j = 0; j < kFeatureCount; ++j) {
        const std::string name(kFeatureNames[j]);
        if (!doc.contains(name)) {
            shape_errors[name] = "missing";
        } else if (!doc[name].is_number()) {
            shape_errors[name] = "must be a number";
        } else {
            f[j] = doc[name].get<double>();
        }
    }
    if (!shape_errors.empty()) return error_result(400, "malformed request", shape_errors);

    json value_errors = json::object();
    for (std::size_t j = 0; j < kFeatureCount; ++j) {
        const std::string name(kFeatureNames[j]);
        if (!std::isfinite(f[j]) || f[j] <= 0.0) {
            value_errors[name] = "must be finite and strictly positive";
        } else if (kIntegerFeature[j] && j == static_cast<std::size_t>(Feature::n_tubes) && f[j] != std::floor(f[j])) {
            value_errors[name] = "must be a whole number";
        }
    }
    if (!value_errors.empty()) return error_result(422, "invalid feature values", value_errors);

    const double hcr = predict_features(hcr_->model, f);
    const double hlc = predict_features(hlc_->model, f);
    if (!std::isfinite(hcr) || !std::isfinite(hlc)) return error_result(500, "model produced a non-finite value");
    const json response = {
        {"heat_collection_rate", hcr},
        {"heat_loss_coefficient", hlc},
        {"display", waterheater_display(hcr, hlc)},
        {"model_fingerprints", fingerprints(*hcr_, *hlc_)},
    };
    return {200, response.dump()};
}

HttpResult PredictionService::health() const {
    if (!ready()) return {503, json{{"status", "unavailable"}, {"model_fingerprints", json::object()}}.dump()};
    return {200, json{{"status", "ok"}, {"model_fingerprints", fingerprints(*hcr_, *hlc_)}}.dump()};
}

struct ApiServer::Impl {
    httplib::Server server;
};

ApiServer::ApiServer(const PredictionService& service, const std::optional<std::string>& static_dir)
    : impl_(std::make_unique<Impl>()) {
    auto reply = [](httplib::Response& res, const HttpResult& r) {
        res.status = r.status;
        res.set_content(r.body, "application/json");
    };
    impl_->server.Post("/api/predict", [&service, reply](const httplib::Request& req, httplib::Response& res) {
        reply(res, service.predict(req.body));
    });
    impl_->server.Get("/api/health",
                      [&service, reply](const httplib::Request&, httplib::Response& res) { reply(res, service.health()); });
    if (static_dir && !impl_->server.set_mount_point("/", *static_dir)) {
        throw IoError("static directory '" + *static_dir + "' does not exist");
    }
}

ApiServer::~ApiServer() = default;

int ApiServer::bind(const std::string& host, int port) {
    const int bound = port == 0 ? impl_->server.bind_to_any_port(host) : (impl_->server.bind_to_port(host, port) ? port : -1);
    if (bound <= 0) throw IoError("cannot listen on " + host + ":" + std::to_string(port));
    return bound;
}

void ApiServer::listen() {
    if (!impl_->server.listen_after_bind()) throw IoError("server stopped with an error");
}

void ApiServer::wait_until_ready() const { impl_->server.wait_until_ready(); }

void ApiServer::stop() { impl_->server.stop(); }

void run_server(const PredictionService& service, const std::string& host, int port,
                const std::optional<std::string>& static_dir) {
    ApiServer server(service, static_dir);
    server.bind(host, port);
    server.listen();
}

}  // namespace swh
