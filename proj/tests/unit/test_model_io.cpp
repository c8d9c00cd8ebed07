#include "doctest.h"
#include "json.hpp"
#include "support.hpp"
#include "swh/error.hpp"
#include "swh/model_io.hpp"
#include "swh/synthetic.hpp"
#include "swh/text.hpp"

using namespace swh;

TEST_CASE("model documents round trip byte-exact for every kind") {
    const Dataset data = generate_synthetic(60, 9);
    TrainConfig cfg;
    cfg.mlfn.epochs = 200;
    cfg.mlfn.hidden_sizes = {5, 3};
    swh::test::TempDir dir;
    for (ModelKind kind : {ModelKind::mlfn, ModelKind::grnn, ModelKind::elm, ModelKind::lssvm}) {
        cfg.kind = kind;
        const RegressorModel m = train_model(data, Target::hcr, cfg);
        const std::string text = model_to_json(m);
        const RegressorModel back = model_from_json(text);
        CHECK(back == m);
        CHECK(model_to_json(back) == text);
        const std::string path = dir.file(std::string(kind_name(kind)) + ".model");
        save_model(m, path);
        CHECK(read_file(path) == text);
        CHECK(model_fingerprint(m) == to_hex64(fnv1a64(text)));
        const RegressorModel loaded = load_model(path);
        for (const DesignRecord& r : data) CHECK(predict(loaded, r) == predict(m, r));
    }
}

TEST_CASE("malformed model documents are parse errors") {
    const Dataset data = generate_synthetic(20, 9);
    TrainConfig cfg;
    cfg.kind = ModelKind::elm;
    const std::string good = model_to_json(train_model(data, Target::hlc, cfg));
    CHECK_THROWS_AS(model_from_json("not json"), ParseError);
    CHECK_THROWS_AS(model_from_json("{}"), ParseError);

    nlohmann::json j = nlohmann::json::parse(good);
    j["schema_version"] = 99;
    CHECK_THROWS_AS(model_from_json(j.dump()), ParseError);

    j = nlohmann::json::parse(good);
    j["kind"] = "forest";
    CHECK_THROWS_AS(model_from_json(j.dump()), ParseError);

    j = nlohmann::json::parse(good);
    j["params"]["beta"].push_back(1.0);
    CHECK_THROWS_AS(model_from_json(j.dump()), ParseError);

    CHECK_THROWS_AS(load_model("/nonexistent/model.json"), IoError);
}
